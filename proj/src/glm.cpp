#include "agglm/glm.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace agglm {

namespace {

Eigen::VectorXd penalty_mask(Eigen::Index d, const std::vector<Eigen::Index>& unpenalized) {
    Eigen::VectorXd mask = Eigen::VectorXd::Ones(d);
    for (Eigen::Index col : unpenalized) {
        if (col < 0 || col >= d)
            throw std::invalid_argument("unpenalized column " + std::to_string(col) +
                                        " out of range for d=" + std::to_string(d));
        mask[col] = 0.0;
    }
    return mask;
}

double penalty_value(const Eigen::VectorXd& beta, const Eigen::VectorXd& mask, double lambda) {
    if (lambda == 0.0) return 0.0;
    return lambda * (mask.array() * beta.array().square()).sum();
}

void check_inputs(const Eigen::MatrixXd& X, const Eigen::VectorXd& z, const GlmFamily& family,
                  const GlmOptions& opts) {
    if (X.rows() < 1 || X.cols() < 1)
        throw std::invalid_argument("design matrix must have at least one row and column");
    if (X.rows() != z.size())
        throw std::invalid_argument("design matrix has " + std::to_string(X.rows()) +
                                    " rows but target has length " + std::to_string(z.size()));
    if (!X.allFinite()) throw std::invalid_argument("design matrix has non-finite entries");
    if (opts.lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        if (!family.in_domain(z[i]))
            throw std::invalid_argument("target entry " + std::to_string(z[i]) + " at index " +
                                        std::to_string(i) + " outside " +
                                        std::string(family_name(family.kind())) + " domain");
    }
}

}  // namespace

Eigen::VectorXd predict_means(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta,
                              const GlmFamily& family) {
    if (X.cols() != beta.size())
        throw std::invalid_argument("design matrix has " + std::to_string(X.cols()) +
                                    " columns but beta has length " + std::to_string(beta.size()));
    return family.link_inverse(Eigen::VectorXd(X * beta));
}

double glm_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& z,
                     const Eigen::VectorXd& beta, const GlmFamily& family,
                     const GlmOptions& opts) {
    Eigen::VectorXd mask = penalty_mask(X.cols(), opts.unpenalized_columns);
    return family.divergence(z, predict_means(X, beta, family)) +
           penalty_value(beta, mask, opts.lambda);
}

GlmFit fit_glm(const Eigen::MatrixXd& X, const Eigen::VectorXd& z, const GlmFamily& family,
               const GlmOptions& opts, const Eigen::VectorXd* warm_start) {
    check_inputs(X, z, family, opts);
    const Eigen::Index d = X.cols();
    const Eigen::VectorXd mask = penalty_mask(d, opts.unpenalized_columns);

    GlmFit fit;
    fit.lambda = opts.lambda;
    Eigen::VectorXd beta = warm_start != nullptr ? *warm_start : Eigen::VectorXd::Zero(d);
    if (beta.size() != d) throw std::invalid_argument("warm start has wrong length");

    auto objective = [&](const Eigen::VectorXd& b) {
        return family.divergence(z, family.link_inverse(Eigen::VectorXd(X * b))) +
               penalty_value(b, mask, opts.lambda);
    };

    double obj = objective(beta);
    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        fit.iterations = iter + 1;
        Eigen::VectorXd mu = family.link_inverse(Eigen::VectorXd(X * beta));
        Eigen::VectorXd grad = X.transpose() * (mu - z) +
                               2.0 * opts.lambda * (mask.array() * beta.array()).matrix();
        fit.gradient_norm = grad.lpNorm<Eigen::Infinity>();
        if (fit.gradient_norm <= opts.gradient_tolerance) {
            fit.converged = true;
            break;
        }

        Eigen::VectorXd weights(mu.size());
        for (Eigen::Index i = 0; i < mu.size(); ++i) weights[i] = family.mean_derivative(mu[i]);
        Eigen::MatrixXd hessian = X.transpose() * weights.asDiagonal() * X;
        hessian.diagonal() += 2.0 * opts.lambda * mask;

        // Rank-revealing solve; a singular system falls back to the
        // minimum-norm solution.
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(hessian);
        if (cod.rank() < d && opts.lambda == 0.0) fit.rank_deficient = true;
        Eigen::VectorXd delta = cod.solve(-grad);

        bool accepted = false;
        double step = 1.0;
        for (int halving = 0; halving < 60; ++halving) {
            Eigen::VectorXd candidate = beta + step * delta;
            double candidate_obj = objective(candidate);
            if (candidate_obj <= obj) {
                beta = std::move(candidate);
                obj = candidate_obj;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // no descent direction left at this precision
    }

    if (!fit.converged) {
        Eigen::VectorXd mu = family.link_inverse(Eigen::VectorXd(X * beta));
        Eigen::VectorXd grad = X.transpose() * (mu - z) +
                               2.0 * opts.lambda * (mask.array() * beta.array()).matrix();
        fit.gradient_norm = grad.lpNorm<Eigen::Infinity>();
        fit.converged = fit.gradient_norm <= opts.gradient_tolerance;
    }
    fit.beta = std::move(beta);
    return fit;
}

}  // namespace agglm
