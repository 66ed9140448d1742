#include "agglm/inference.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "agglm/parallel.hpp"
#include "agglm/rng.hpp"

namespace agglm {

namespace {

// Stream offsets so replicate, fold and dataset draws from one seed stay
// decorrelated.
constexpr std::uint64_t kFoldStream = 1;
constexpr std::uint64_t kPermutationStreamBase = 1000;

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& X, const std::vector<Eigen::Index>& rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
    return out;
}

Eigen::VectorXd take_rows(const Eigen::VectorXd& v, const std::vector<Eigen::Index>& rows) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[rows[i]];
    return out;
}

}  // namespace

double evaluate_error(const Eigen::VectorXd& z_true, const Eigen::VectorXd& z_rec,
                      const GlmFamily& family) {
    if (z_true.size() != z_rec.size())
        throw std::invalid_argument("evaluate_error: lengths " + std::to_string(z_true.size()) +
                                    " and " + std::to_string(z_rec.size()) + " differ");
    if (z_true.size() == 0) throw std::invalid_argument("evaluate_error: empty vectors");
    return family.divergence(z_true, z_rec) / static_cast<double>(z_true.size());
}

PermutationTestResult permutation_test(const Eigen::MatrixXd& X, const Eigen::VectorXd& z_true,
                                       const std::optional<AggregateSummary>& summary,
                                       const GlmFamily& family, const FitOptions& opts,
                                       int n_permutations, std::uint64_t seed, int jobs) {
    if (n_permutations < 1) throw std::invalid_argument("need at least one permutation");
    const Eigen::Index n = X.rows();
    if (z_true.size() != n)
        throw std::invalid_argument("permutation_test: target length does not match design rows");

    PermutationTestResult result;
    const GlmOptions glm_opts = glm_options(opts);
    if (summary.has_value()) {
        // Training error in the true-vs-recovered sense, so the statistic is
        // on the same scale as the null fits, which see actual target values.
        FitState state = alternate_fit(X, *summary, family, opts);
        result.observed_error = evaluate_error(z_true, state.z_hat, family);
    } else {
        GlmFit fit = fit_glm(X, z_true, family, glm_opts);
        result.observed_error =
            evaluate_error(z_true, predict_means(X, fit.beta, family), family);
    }

    result.null_errors.assign(static_cast<std::size_t>(n_permutations), 0.0);
    std::vector<unsigned char> failed(static_cast<std::size_t>(n_permutations), 0);
    parallel_for(n_permutations, jobs, [&](int r) {
        std::mt19937_64 rng =
            make_engine(seed, kPermutationStreamBase + static_cast<std::uint64_t>(r));
        std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), Eigen::Index{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        Eigen::VectorXd z_perm = take_rows(z_true, perm);
        GlmFit fit = fit_glm(X, z_perm, family, glm_opts);
        if (!fit.converged) failed[static_cast<std::size_t>(r)] = 1;
        result.null_errors[static_cast<std::size_t>(r)] =
            evaluate_error(z_perm, predict_means(X, fit.beta, family), family);
    });

    for (unsigned char f : failed) result.fit_failures += f;
    std::size_t at_most = 0;
    for (double e : result.null_errors)
        if (e <= result.observed_error) ++at_most;
    result.p_value = static_cast<double>(1 + at_most) / static_cast<double>(1 + n_permutations);
    return result;
}

std::vector<int> fold_assignments(Eigen::Index n, int folds, std::uint64_t seed,
                                  const std::vector<std::vector<Eigen::Index>>& blocks) {
    if (folds < 2) throw std::invalid_argument("need at least two folds");

    // Units are whole blocks (a blockwise summary is meaningless across a
    // split) plus singletons for uncovered rows.
    std::vector<std::vector<Eigen::Index>> units;
    std::unordered_set<Eigen::Index> covered;
    for (const auto& block : blocks) {
        if (block.empty()) throw std::invalid_argument("fold_assignments: empty block");
        for (Eigen::Index row : block) {
            if (row < 0 || row >= n)
                throw std::invalid_argument("fold_assignments: row id out of range");
            if (!covered.insert(row).second)
                throw std::invalid_argument("fold_assignments: row in more than one block");
        }
        units.push_back(block);
    }
    for (Eigen::Index row = 0; row < n; ++row)
        if (!covered.contains(row)) units.push_back({row});
    if (static_cast<int>(units.size()) < folds)
        throw std::invalid_argument("fewer units than folds");

    std::vector<std::size_t> order(units.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng = make_engine(seed, kFoldStream);
    std::shuffle(order.begin(), order.end(), rng);

    // Greedy size balancing: each unit goes to the currently smallest fold.
    std::vector<Eigen::Index> fold_size(static_cast<std::size_t>(folds), 0);
    std::vector<int> assignment(static_cast<std::size_t>(n), -1);
    for (std::size_t u : order) {
        int target = 0;
        for (int f = 1; f < folds; ++f)
            if (fold_size[static_cast<std::size_t>(f)] < fold_size[static_cast<std::size_t>(target)])
                target = f;
        for (Eigen::Index row : units[u]) assignment[static_cast<std::size_t>(row)] = target;
        fold_size[static_cast<std::size_t>(target)] +=
            static_cast<Eigen::Index>(units[u].size());
    }
    return assignment;
}

SweepResult granularity_sweep(const Eigen::MatrixXd& X, const Eigen::VectorXd& z_true,
                              const GlmFamily& family, const std::vector<int>& bins_list,
                              int folds, const FitOptions& opts, std::uint64_t seed,
                              const std::vector<std::vector<Eigen::Index>>& blocks, int jobs) {
    const Eigen::Index n = X.rows();
    if (z_true.size() != n)
        throw std::invalid_argument("granularity_sweep: target length does not match design rows");
    if (bins_list.empty()) throw std::invalid_argument("granularity_sweep: empty bins list");
    for (int bins : bins_list)
        if (bins < 1) throw std::invalid_argument("granularity_sweep: bins must be >= 1");

    const std::vector<int> assignment = fold_assignments(n, folds, seed, blocks);

    struct FoldData {
        std::vector<Eigen::Index> train_rows, test_rows;
        Eigen::MatrixXd X_train, X_test;
        Eigen::VectorXd z_train, z_test;
        double baseline_train = 0.0, baseline_test = 0.0;
    };
    std::vector<FoldData> fold_data(static_cast<std::size_t>(folds));
    const GlmOptions glm_opts = glm_options(opts);
    parallel_for(folds, jobs, [&](int f) {
        FoldData& fd = fold_data[static_cast<std::size_t>(f)];
        for (Eigen::Index i = 0; i < n; ++i)
            (assignment[static_cast<std::size_t>(i)] == f ? fd.test_rows : fd.train_rows)
                .push_back(i);
        if (fd.train_rows.empty() || fd.test_rows.empty())
            throw std::invalid_argument("granularity_sweep: a fold split is empty");
        fd.X_train = take_rows(X, fd.train_rows);
        fd.X_test = take_rows(X, fd.test_rows);
        fd.z_train = take_rows(z_true, fd.train_rows);
        fd.z_test = take_rows(z_true, fd.test_rows);
        GlmFit baseline = fit_glm(fd.X_train, fd.z_train, family, glm_opts);
        fd.baseline_train =
            evaluate_error(fd.z_train, predict_means(fd.X_train, baseline.beta, family), family);
        fd.baseline_test =
            evaluate_error(fd.z_test, predict_means(fd.X_test, baseline.beta, family), family);
    });

    SweepResult result;
    result.cells.assign(static_cast<std::size_t>(bins_list.size()) *
                            static_cast<std::size_t>(folds),
                        SweepCell{});
    const int cell_count = static_cast<int>(result.cells.size());
    parallel_for(cell_count, jobs, [&](int c) {
        const int bin_index = c / folds;
        const int f = c % folds;
        const int bins = bins_list[static_cast<std::size_t>(bin_index)];
        const FoldData& fd = fold_data[static_cast<std::size_t>(f)];

        SummarizeOptions sum_opts;
        sum_opts.bins = bins;
        AggregateSummary summary;
        if (blocks.empty()) {
            summary = summarize_targets(fd.z_train, sum_opts);
        } else {
            // Map each fully-in-train block to local train indices.
            std::vector<Eigen::Index> local(static_cast<std::size_t>(n), -1);
            for (std::size_t i = 0; i < fd.train_rows.size(); ++i)
                local[static_cast<std::size_t>(fd.train_rows[i])] = static_cast<Eigen::Index>(i);
            std::vector<std::vector<Eigen::Index>> train_blocks;
            for (const auto& block : blocks) {
                if (local[static_cast<std::size_t>(block.front())] < 0) continue;
                std::vector<Eigen::Index> mapped;
                mapped.reserve(block.size());
                for (Eigen::Index row : block) mapped.push_back(local[static_cast<std::size_t>(row)]);
                train_blocks.push_back(std::move(mapped));
            }
            summary = summarize_targets(fd.z_train, train_blocks, sum_opts);
        }

        FitOptions cell_opts = opts;
        cell_opts.initial_targets.reset();  // fold-local problem sizes
        FitState state = alternate_fit(fd.X_train, summary, family, cell_opts);

        SweepCell& cell = result.cells[static_cast<std::size_t>(c)];
        cell.bins = bins;
        cell.fold = f;
        cell.train_error = evaluate_error(fd.z_train, state.z_hat, family);
        cell.test_error =
            evaluate_error(fd.z_test, predict_means(fd.X_test, state.beta, family), family);
        cell.baseline_train_error = fd.baseline_train;
        cell.baseline_test_error = fd.baseline_test;
    });
    return result;
}

}  // namespace agglm
