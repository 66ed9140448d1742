#include "agglm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace agglm {

InitScheme init_scheme_from_name(std::string_view name) {
    if (name == "interpolate") return InitScheme::interpolate;
    if (name == "zero-beta") return InitScheme::zero_beta;
    throw std::invalid_argument("unknown init scheme '" + std::string(name) +
                                "' (expected interpolate or zero-beta)");
}

GlmOptions glm_options(const FitOptions& opts) {
    GlmOptions glm_opts;
    glm_opts.lambda = opts.lambda;
    glm_opts.max_iterations = opts.glm_max_iterations;
    glm_opts.gradient_tolerance = opts.glm_gradient_tolerance;
    glm_opts.unpenalized_columns = opts.unpenalized_columns;
    return glm_opts;
}

Eigen::VectorXd initialize_targets(const AggregateSummary& summary, Eigen::Index n,
                                   const GlmFamily& family, InitScheme scheme) {
    const double baseline = family.link_inverse(0.0);
    if (scheme == InitScheme::zero_beta)
        return impute_targets(Eigen::VectorXd::Constant(n, baseline), summary);

    Eigen::VectorXd z = Eigen::VectorXd::Constant(n, baseline);
    for (const Block& block : summary.blocks) {
        std::vector<Eigen::Index> rows = block.rows;
        std::sort(rows.begin(), rows.end());
        const auto& cs = block.constraints;
        std::size_t k = 0;
        for (std::size_t j = 0; j < rows.size(); ++j) {
            const Eigen::Index pos = static_cast<Eigen::Index>(j) + 1;  // 1-based sorted position
            while (k + 1 < cs.size() && cs[k + 1].rank <= pos) ++k;
            double value;
            if (pos <= cs.front().rank) {
                value = cs.front().value;
            } else if (pos >= cs.back().rank) {
                value = cs.back().value;
            } else {
                const auto& lo = cs[k];
                const auto& hi = cs[k + 1];
                double t = static_cast<double>(pos - lo.rank) / static_cast<double>(hi.rank - lo.rank);
                value = lo.value + t * (hi.value - lo.value);
            }
            z[rows[j]] = value;
        }
    }
    return z;
}

FitState alternate_fit(const Eigen::MatrixXd& X, const AggregateSummary& summary,
                       const GlmFamily& family, const FitOptions& opts) {
    const Eigen::Index n = X.rows();
    validate_summary(summary, n, family);
    if (opts.max_outer_iterations < 1)
        throw std::invalid_argument("max_outer_iterations must be >= 1");
    if (!(opts.relative_loss_tolerance > 0.0))
        throw std::invalid_argument("relative_loss_tolerance must be positive");

    const GlmOptions glm_opts = glm_options(opts);

    Eigen::VectorXd z;
    if (opts.initial_targets.has_value()) {
        z = *opts.initial_targets;
        if (z.size() != n)
            throw std::invalid_argument("initial targets have length " + std::to_string(z.size()) +
                                        " but the design has " + std::to_string(n) + " rows");
    } else {
        z = initialize_targets(summary, n, family, opts.init_scheme);
    }

    FitState state;
    state.lambda = opts.lambda;
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(X.cols());
    double previous_loss = std::numeric_limits<double>::quiet_NaN();
    for (int t = 0; t < opts.max_outer_iterations; ++t) {
        GlmFit fit = fit_glm(X, z, family, glm_opts, t == 0 ? nullptr : &beta);
        if (!fit.converged) ++state.glm_failures;
        beta = std::move(fit.beta);

        Eigen::VectorXd gamma = predict_means(X, beta, family);
        z = impute_targets(gamma, summary);

        double loss = glm_objective(X, z, beta, family, glm_opts);
        state.loss_trajectory.push_back(loss);
        if (t > 0) {
            double rel = std::abs(loss - previous_loss) / std::max(std::abs(previous_loss), 1e-12);
            if (rel < opts.relative_loss_tolerance) {
                state.converged = true;
                break;
            }
        }
        previous_loss = loss;
    }
    state.iterations = static_cast<int>(state.loss_trajectory.size());
    state.beta = std::move(beta);
    state.z_hat = std::move(z);
    return state;
}

}  // namespace agglm
