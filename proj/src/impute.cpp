#include "agglm/impute.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace agglm {

SortedView sorted_view(const Eigen::VectorXd& v) {
    SortedView view;
    view.order.resize(static_cast<std::size_t>(v.size()));
    std::iota(view.order.begin(), view.order.end(), Eigen::Index{0});
    std::stable_sort(view.order.begin(), view.order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return v[a] < v[b]; });
    view.sorted_values.resize(v.size());
    for (Eigen::Index j = 0; j < v.size(); ++j)
        view.sorted_values[j] = v[view.order[static_cast<std::size_t>(j)]];
    return view;
}

Eigen::VectorXd impute_sorted(const Eigen::VectorXd& gamma_sorted,
                              const std::vector<OrderStatisticConstraint>& constraints) {
    const Eigen::Index m = gamma_sorted.size();
    for (Eigen::Index j = 1; j < m; ++j)
        if (gamma_sorted[j] < gamma_sorted[j - 1])
            throw std::invalid_argument("impute_sorted: gamma is not nondecreasing");
    for (const OrderStatisticConstraint& c : constraints)
        if (c.rank < 1 || c.rank > m)
            throw std::invalid_argument("impute_sorted: rank " + std::to_string(c.rank) +
                                        " outside [1, " + std::to_string(m) + "]");

    Eigen::VectorXd z = gamma_sorted;
    if (constraints.empty()) return z;

    const OrderStatisticConstraint& first = constraints.front();
    const OrderStatisticConstraint& last = constraints.back();
    for (Eigen::Index j = 0; j < first.rank - 1; ++j) z[j] = std::min(z[j], first.value);
    z[first.rank - 1] = first.value;
    for (std::size_t k = 0; k + 1 < constraints.size(); ++k) {
        const OrderStatisticConstraint& lo = constraints[k];
        const OrderStatisticConstraint& hi = constraints[k + 1];
        for (Eigen::Index j = lo.rank; j < hi.rank - 1; ++j)
            z[j] = std::clamp(z[j], lo.value, hi.value);
        z[hi.rank - 1] = hi.value;
    }
    for (Eigen::Index j = last.rank; j < m; ++j) z[j] = std::max(z[j], last.value);
    return z;
}

Eigen::VectorXd impute_targets(const Eigen::VectorXd& gamma, const AggregateSummary& summary) {
    Eigen::VectorXd out = gamma;
    for (const Block& block : summary.blocks) {
        Eigen::VectorXd block_gamma(static_cast<Eigen::Index>(block.rows.size()));
        for (std::size_t j = 0; j < block.rows.size(); ++j) {
            Eigen::Index row = block.rows[j];
            if (row < 0 || row >= gamma.size())
                throw std::invalid_argument("impute_targets: block row " + std::to_string(row) +
                                            " outside gamma length " +
                                            std::to_string(gamma.size()));
            block_gamma[static_cast<Eigen::Index>(j)] = gamma[row];
        }
        SortedView view = sorted_view(block_gamma);
        Eigen::VectorXd imputed = impute_sorted(view.sorted_values, block.constraints);
        for (Eigen::Index j = 0; j < imputed.size(); ++j)
            out[block.rows[static_cast<std::size_t>(view.order[static_cast<std::size_t>(j)])]] =
                imputed[j];
    }
    return out;
}

}  // namespace agglm
