#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "agglm/aggregate.hpp"
#include "agglm/glm.hpp"
#include "agglm/impute.hpp"

namespace agglm {

enum class InitScheme { interpolate, zero_beta };

InitScheme init_scheme_from_name(std::string_view name);

struct FitOptions {
    double lambda = 0.0;
    int max_outer_iterations = 500;
    double relative_loss_tolerance = 1e-6;
    std::uint64_t seed = 0;  // reserved; both initialization schemes are deterministic
    InitScheme init_scheme = InitScheme::interpolate;
    std::vector<Eigen::Index> unpenalized_columns{};
    // Overrides init_scheme when set (e.g. to restart from a previous fit).
    std::optional<Eigen::VectorXd> initial_targets{};
    int glm_max_iterations = 100;
    double glm_gradient_tolerance = 1e-8;
};

struct FitState {
    Eigen::VectorXd beta;
    double lambda = 0.0;
    Eigen::VectorXd z_hat;
    // Objective value after each outer iteration; non-increasing.
    std::vector<double> loss_trajectory;
    int iterations = 0;
    bool converged = false;
    int glm_failures = 0;  // inner fits that stopped before reaching gradient tolerance
};

/// Inner coefficient-fit options implied by the outer options.
GlmOptions glm_options(const FitOptions& opts);

/// Feasible starting targets. interpolate: piecewise-linear in sorted position
/// between the constraint values of each block, constant beyond the first and
/// last constraint, assigned to rows in ascending row-id order. zero_beta:
/// the constrained imputation of the zero-coefficient mean vector. Rows
/// outside all blocks start at the family mean for a zero linear predictor.
Eigen::VectorXd initialize_targets(const AggregateSummary& summary, Eigen::Index n,
                                   const GlmFamily& family, InitScheme scheme);

/// Alternating minimization: fit coefficients to the current imputed targets,
/// predict means, impute targets consistent with the summary, repeat. The
/// coefficient fit is warm-started from the previous iterate and never
/// increases the objective, so the recorded loss is non-increasing. Stops on
/// relative loss change below tolerance or the iteration cap.
FitState alternate_fit(const Eigen::MatrixXd& X, const AggregateSummary& summary,
                       const GlmFamily& family, const FitOptions& opts = {});

}  // namespace agglm
