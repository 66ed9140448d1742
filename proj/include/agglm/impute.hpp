#pragma once

#include <Eigen/Dense>
#include <vector>

#include "agglm/aggregate.hpp"

namespace agglm {

/// Factorization of a vector into a permutation and a nondecreasing value
/// vector: order[j] holds the original index of the j-th smallest value.
/// Ties keep ascending original index, so the permutation is deterministic.
struct SortedView {
    std::vector<Eigen::Index> order;
    Eigen::VectorXd sorted_values;
};

SortedView sorted_view(const Eigen::VectorXd& v);

/// Divergence-minimizing nondecreasing vector through the (rank, value)
/// constraints, given nondecreasing predictions gamma_sorted. Each entry is
/// gamma clamped into the interval spanned by the surrounding constraint
/// values; constrained ranks take the constraint value exactly. The rule does
/// not depend on which identically separable divergence is minimized.
Eigen::VectorXd impute_sorted(const Eigen::VectorXd& gamma_sorted,
                              const std::vector<OrderStatisticConstraint>& constraints);

/// Blockwise imputation: within each block, sort gamma, clip through the
/// block's constraints, scatter back through the inverse permutation. The
/// output is isotonic with gamma inside each block and satisfies every
/// constraint exactly. Rows outside all blocks pass through unchanged.
Eigen::VectorXd impute_targets(const Eigen::VectorXd& gamma, const AggregateSummary& summary);

}  // namespace agglm
