#pragma once

#include <Eigen/Dense>
#include <vector>

#include "agglm/family.hpp"

namespace agglm {

struct GlmOptions {
    double lambda = 0.0;           // weight of the squared-L2 coefficient penalty
    int max_iterations = 100;
    double gradient_tolerance = 1e-8;  // infinity norm
    // Columns exempt from the penalty (e.g. a constant intercept column).
    std::vector<Eigen::Index> unpenalized_columns{};
};

struct GlmFit {
    Eigen::VectorXd beta;
    double lambda = 0.0;
    int iterations = 0;
    bool converged = false;
    // lambda == 0 and the Newton system was singular; the minimum-norm step
    // was taken instead.
    bool rank_deficient = false;
    double gradient_norm = 0.0;
};

/// Componentwise link inverse of the linear predictor X * beta.
Eigen::VectorXd predict_means(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta,
                              const GlmFamily& family);

/// D_phi(z || linkinv(X beta)) + lambda * sum of penalized beta[j]^2.
double glm_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& z,
                     const Eigen::VectorXd& beta, const GlmFamily& family,
                     const GlmOptions& opts);

/// Damped Newton minimization of glm_objective. Steps are halved until the
/// objective does not increase, so the objective is non-increasing across
/// iterations from any warm start. Deterministic.
GlmFit fit_glm(const Eigen::MatrixXd& X, const Eigen::VectorXd& z, const GlmFamily& family,
               const GlmOptions& opts = {}, const Eigen::VectorXd* warm_start = nullptr);

}  // namespace agglm
