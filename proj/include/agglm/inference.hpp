#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "agglm/solver.hpp"

namespace agglm {

/// Mean per-sample Bregman divergence between true and recovered targets.
double evaluate_error(const Eigen::VectorXd& z_true, const Eigen::VectorXd& z_rec,
                      const GlmFamily& family);

struct PermutationTestResult {
    double observed_error = 0.0;
    std::vector<double> null_errors;  // replicate order
    double p_value = 1.0;
    int fit_failures = 0;  // null fits that stopped before convergence
};

/// Observed statistic: the mean divergence between the true targets and the
/// aggregated fit's recovered targets when a summary is given, or the
/// training error of the plain coefficient fit otherwise. Null distribution:
/// training error of the plain fit after seeded random permutations of the
/// true targets. p-value uses the add-one empirical rule, counting ties.
PermutationTestResult permutation_test(const Eigen::MatrixXd& X, const Eigen::VectorXd& z_true,
                                       const std::optional<AggregateSummary>& summary,
                                       const GlmFamily& family, const FitOptions& opts,
                                       int n_permutations, std::uint64_t seed, int jobs = 1);

struct SweepCell {
    int bins = 0;
    int fold = 0;
    double train_error = 0.0;
    double test_error = 0.0;
    double baseline_train_error = 0.0;  // fully observed fit, independent of bins
    double baseline_test_error = 0.0;
};

struct SweepResult {
    std::vector<SweepCell> cells;  // ordered by (bins as listed, fold)
};

/// Seeded fold assignment. With blocks, whole blocks are assigned to folds so
/// no block straddles a split; fold of row i is assignment[i].
std::vector<int> fold_assignments(Eigen::Index n, int folds, std::uint64_t seed,
                                  const std::vector<std::vector<Eigen::Index>>& blocks = {});

/// Cross-validated bin-granularity sweep: per fold, summarize the training
/// targets at each bin count, run the aggregated fit, and score recovery on
/// the training split and prediction on the held-out split, alongside the
/// fully observed baseline fit.
SweepResult granularity_sweep(const Eigen::MatrixXd& X, const Eigen::VectorXd& z_true,
                              const GlmFamily& family, const std::vector<int>& bins_list,
                              int folds, const FitOptions& opts, std::uint64_t seed,
                              const std::vector<std::vector<Eigen::Index>>& blocks = {},
                              int jobs = 1);

}  // namespace agglm
