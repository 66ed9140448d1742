#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "agglm/aggregate.hpp"
#include "agglm/family.hpp"

namespace testutil {

inline double random_domain_value(std::mt19937_64& rng, const agglm::GlmFamily& family) {
    switch (family.kind()) {
        case agglm::FamilyKind::gaussian: {
            std::normal_distribution<double> normal(0.0, 2.0);
            return normal(rng);
        }
        case agglm::FamilyKind::poisson: {
            std::uniform_real_distribution<double> uniform(0.05, 6.0);
            return uniform(rng);
        }
        case agglm::FamilyKind::bernoulli: {
            std::uniform_real_distribution<double> uniform(0.02, 0.98);
            return uniform(rng);
        }
    }
    return 0.0;
}

inline Eigen::VectorXd random_domain_vector(std::mt19937_64& rng, const agglm::GlmFamily& family,
                                            Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = random_domain_value(rng, family);
    return v;
}

/// Feasible constraints built from the order statistics of a fresh random
/// sample, so values are automatically nondecreasing in rank.
inline std::vector<agglm::OrderStatisticConstraint> random_constraints(
    std::mt19937_64& rng, const agglm::GlmFamily& family, Eigen::Index block_size,
    int constraint_count) {
    Eigen::VectorXd sample = random_domain_vector(rng, family, block_size);
    std::sort(sample.data(), sample.data() + block_size);

    std::vector<Eigen::Index> ranks(static_cast<std::size_t>(block_size));
    for (Eigen::Index r = 0; r < block_size; ++r) ranks[static_cast<std::size_t>(r)] = r + 1;
    std::shuffle(ranks.begin(), ranks.end(), rng);
    ranks.resize(static_cast<std::size_t>(
        std::min<Eigen::Index>(constraint_count, block_size)));
    std::sort(ranks.begin(), ranks.end());

    std::vector<agglm::OrderStatisticConstraint> constraints;
    for (Eigen::Index r : ranks) constraints.push_back({r, sample[r - 1]});
    return constraints;
}

/// True when, inside every block, the sorted values of z hit each constraint
/// value exactly at its rank.
inline bool satisfies_summary(const Eigen::VectorXd& z, const agglm::AggregateSummary& summary,
                              double tol = 0.0) {
    for (const agglm::Block& block : summary.blocks) {
        std::vector<double> values;
        values.reserve(block.rows.size());
        for (Eigen::Index row : block.rows) values.push_back(z[row]);
        std::sort(values.begin(), values.end());
        for (const agglm::OrderStatisticConstraint& c : block.constraints) {
            double got = values[static_cast<std::size_t>(c.rank - 1)];
            if (std::abs(got - c.value) > tol) return false;
        }
    }
    return true;
}

/// Random disjoint blocks covering all of 0..n-1, each of size >= min_size.
inline std::vector<std::vector<Eigen::Index>> random_partition(std::mt19937_64& rng,
                                                               Eigen::Index n,
                                                               Eigen::Index min_size) {
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = i;
    std::shuffle(rows.begin(), rows.end(), rng);

    std::vector<std::vector<Eigen::Index>> blocks;
    std::size_t at = 0;
    while (at < rows.size()) {
        std::uniform_int_distribution<Eigen::Index> size_dist(min_size, 2 * min_size);
        std::size_t want = static_cast<std::size_t>(size_dist(rng));
        std::size_t take = std::min(want, rows.size() - at);
        if (rows.size() - at - take < static_cast<std::size_t>(min_size)) take = rows.size() - at;
        blocks.emplace_back(rows.begin() + static_cast<std::ptrdiff_t>(at),
                            rows.begin() + static_cast<std::ptrdiff_t>(at + take));
        at += take;
    }
    return blocks;
}

}  // namespace testutil
