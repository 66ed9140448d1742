#pragma once

#include <Eigen/Dense>
#include <vector>

#include "agglm/family.hpp"

namespace agglm {

/// The rank-th smallest value of a block equals `value`. Ranks are 1-based
/// within the block.
struct OrderStatisticConstraint {
    Eigen::Index rank = 1;
    double value = 0.0;
};

struct Block {
    std::vector<Eigen::Index> rows;  // 0-based sample indices
    std::vector<OrderStatisticConstraint> constraints;  // ascending rank
};

/// The only observation of the response: per-block order-statistic
/// constraints over disjoint row sets. Rows covered by no block are
/// unconstrained.
struct AggregateSummary {
    std::vector<Block> blocks;
};

/// Checks ranks (1-based, strictly increasing, within block size), value
/// monotonicity, family domain membership and row-id disjointness. Throws
/// std::invalid_argument naming the offending block; returns the summary
/// otherwise.
const AggregateSummary& validate_summary(const AggregateSummary& summary, Eigen::Index n,
                                         const GlmFamily& family);

enum class SummaryScheme { quantile_cuts, edge_histogram };

struct SummarizeOptions {
    SummaryScheme scheme = SummaryScheme::quantile_cuts;
    int bins = 10;                // quantile_cuts: number of equal-frequency bins
    std::vector<double> edges{};  // edge_histogram: strictly increasing bin edges
    bool include_extremes = true; // quantile_cuts: keep ranks 1 and n (min and max)
};

/// Order-statistic constraints summarizing one block of values.
/// quantile_cuts emits interior ranks round(k*n/bins), k = 1..bins-1, plus the
/// extremes unless dropped. edge_histogram emits (cumulative count, edge) for
/// every interior edge; the edge value stands in for the sample value at that
/// rank.
std::vector<OrderStatisticConstraint> summarize_block(const Eigen::VectorXd& values,
                                                      const SummarizeOptions& opts);

/// Single block covering rows 0..n-1.
AggregateSummary summarize_targets(const Eigen::VectorXd& z, const SummarizeOptions& opts);

/// One block per row-id list, each summarized over z restricted to it.
AggregateSummary summarize_targets(const Eigen::VectorXd& z,
                                   const std::vector<std::vector<Eigen::Index>>& blocks,
                                   const SummarizeOptions& opts);

struct HistogramCounts {
    std::vector<Eigen::Index> counts;  // per half-open bin [e_i, e_{i+1})
    Eigen::Index out_of_range = 0;
};

/// Bin counts of z over strictly increasing edges.
HistogramCounts recovered_histogram(const Eigen::VectorXd& z, const std::vector<double>& edges);

}  // namespace agglm
