#include "agglm/aggregate.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace agglm {

namespace {

[[noreturn]] void block_error(std::size_t block_index, const std::string& what) {
    throw std::invalid_argument("block " + std::to_string(block_index + 1) + ": " + what);
}

}  // namespace

const AggregateSummary& validate_summary(const AggregateSummary& summary, Eigen::Index n,
                                         const GlmFamily& family) {
    std::unordered_set<Eigen::Index> seen_rows;
    for (std::size_t b = 0; b < summary.blocks.size(); ++b) {
        const Block& block = summary.blocks[b];
        const Eigen::Index size = static_cast<Eigen::Index>(block.rows.size());
        if (size == 0) block_error(b, "empty row list");
        for (Eigen::Index row : block.rows) {
            if (row < 0 || row >= n)
                block_error(b, "row id " + std::to_string(row) + " outside [0, " +
                                   std::to_string(n) + ")");
            if (!seen_rows.insert(row).second)
                block_error(b, "row id " + std::to_string(row) + " overlaps another block");
        }
        if (block.constraints.empty()) block_error(b, "no order-statistic constraints");
        Eigen::Index prev_rank = 0;
        double prev_value = -std::numeric_limits<double>::infinity();
        for (const OrderStatisticConstraint& c : block.constraints) {
            if (c.rank < 1 || c.rank > size)
                block_error(b, "rank " + std::to_string(c.rank) + " outside [1, " +
                                   std::to_string(size) + "]");
            if (c.rank == prev_rank)
                block_error(b, "duplicate rank " + std::to_string(c.rank));
            if (c.rank < prev_rank)
                block_error(b, "ranks not increasing at rank " + std::to_string(c.rank));
            if (!family.in_domain(c.value))
                block_error(b, "value " + std::to_string(c.value) + " outside " +
                                   std::string(family_name(family.kind())) + " domain");
            if (c.value < prev_value)
                block_error(b, "values decrease with rank at rank " + std::to_string(c.rank));
            prev_rank = c.rank;
            prev_value = c.value;
        }
    }
    return summary;
}

std::vector<OrderStatisticConstraint> summarize_block(const Eigen::VectorXd& values,
                                                      const SummarizeOptions& opts) {
    const Eigen::Index n = values.size();
    if (n < 1) throw std::invalid_argument("summarize_block: empty block");

    std::vector<double> sorted(values.data(), values.data() + n);
    std::sort(sorted.begin(), sorted.end());

    std::vector<OrderStatisticConstraint> constraints;
    if (opts.scheme == SummaryScheme::quantile_cuts) {
        const Eigen::Index bins = opts.bins;
        if (bins < 1) throw std::invalid_argument("bins must be >= 1");
        if (bins > n)
            throw std::invalid_argument("bins (" + std::to_string(bins) +
                                        ") exceed block size (" + std::to_string(n) + ")");
        std::set<Eigen::Index> ranks;
        if (opts.include_extremes) {
            ranks.insert(1);
            ranks.insert(n);
        }
        for (Eigen::Index k = 1; k < bins; ++k) {
            // round(k*n/bins), half away from zero
            Eigen::Index tau = (2 * k * n + bins) / (2 * bins);
            ranks.insert(std::clamp<Eigen::Index>(tau, 1, n));
        }
        if (ranks.empty())
            throw std::invalid_argument("bins=1 with extremes dropped yields no constraints");
        for (Eigen::Index tau : ranks)
            constraints.push_back({tau, sorted[static_cast<std::size_t>(tau - 1)]});
    } else {
        if (opts.edges.empty()) throw std::invalid_argument("edge scheme requires edges");
        for (std::size_t i = 1; i < opts.edges.size(); ++i)
            if (!(opts.edges[i] > opts.edges[i - 1]))
                throw std::invalid_argument("edges must be strictly increasing");
        Eigen::Index prev_count = -1;
        for (double edge : opts.edges) {
            auto count = static_cast<Eigen::Index>(
                std::upper_bound(sorted.begin(), sorted.end(), edge) - sorted.begin());
            if (count <= 0 || count >= n) continue;
            // no samples between two edges: keep the smaller edge for the rank
            if (count == prev_count) continue;
            constraints.push_back({count, edge});
            prev_count = count;
        }
        if (constraints.empty())
            throw std::invalid_argument("edges produce no interior constraints");
    }
    return constraints;
}

AggregateSummary summarize_targets(const Eigen::VectorXd& z, const SummarizeOptions& opts) {
    Block block;
    block.rows.resize(static_cast<std::size_t>(z.size()));
    for (Eigen::Index i = 0; i < z.size(); ++i) block.rows[static_cast<std::size_t>(i)] = i;
    block.constraints = summarize_block(z, opts);
    return AggregateSummary{{std::move(block)}};
}

AggregateSummary summarize_targets(const Eigen::VectorXd& z,
                                   const std::vector<std::vector<Eigen::Index>>& blocks,
                                   const SummarizeOptions& opts) {
    AggregateSummary summary;
    for (const std::vector<Eigen::Index>& rows : blocks) {
        Eigen::VectorXd values(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t j = 0; j < rows.size(); ++j) {
            if (rows[j] < 0 || rows[j] >= z.size())
                throw std::invalid_argument("block row id " + std::to_string(rows[j]) +
                                            " outside target length " + std::to_string(z.size()));
            values[static_cast<Eigen::Index>(j)] = z[rows[j]];
        }
        summary.blocks.push_back({rows, summarize_block(values, opts)});
    }
    return summary;
}

HistogramCounts recovered_histogram(const Eigen::VectorXd& z, const std::vector<double>& edges) {
    if (edges.size() < 2) throw std::invalid_argument("need at least two histogram edges");
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (!(edges[i] > edges[i - 1]))
            throw std::invalid_argument("histogram edges must be strictly increasing");

    HistogramCounts result;
    result.counts.assign(edges.size() - 1, 0);
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        double v = z[i];
        if (v < edges.front() || v >= edges.back()) {
            ++result.out_of_range;
            continue;
        }
        auto bin = static_cast<std::size_t>(
            std::upper_bound(edges.begin(), edges.end(), v) - edges.begin() - 1);
        ++result.counts[bin];
    }
    return result;
}

}  // namespace agglm
