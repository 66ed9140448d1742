#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "CLI11.hpp"
#include "agglm/aggregate.hpp"
#include "agglm/dataset.hpp"
#include "agglm/glm.hpp"
#include "agglm/impute.hpp"
#include "agglm/inference.hpp"
#include "agglm/serialize.hpp"
#include "agglm/simulate.hpp"
#include "agglm/solver.hpp"

namespace {

using namespace agglm;

const std::vector<std::string> kFamilies{"gaussian", "poisson", "bernoulli"};

struct DataFlags {
    std::string path;
    std::string target;
    std::string block;
    std::vector<std::string> features;
};

void add_data_flags(CLI::App& cmd, DataFlags& f, bool target_required) {
    cmd.add_option("--data", f.path, "input dataset CSV")->required();
    auto* opt = cmd.add_option("--target", f.target, "target column name");
    if (target_required) opt->required();
    cmd.add_option("--block", f.block, "block-label column name");
    cmd.add_option("--features", f.features,
                   "feature columns, comma separated (default: all remaining)")
        ->delimiter(',');
}

Dataset load_dataset(const DataFlags& f, const std::optional<GlmFamily>& family) {
    ReadOptions opts;
    opts.target_column = f.target;
    opts.block_column = f.block;
    opts.feature_columns = f.features;
    opts.family = family;
    return read_dataset(f.path, opts);
}

struct FitFlags {
    double lambda = 0.0;
    std::string init = "interpolate";
    int max_outer = 500;
    double tol = 1e-6;
    int glm_max_iter = 100;
    double glm_tol = 1e-8;
};

void add_fit_flags(CLI::App& cmd, FitFlags& f) {
    cmd.add_option("--lambda", f.lambda, "ridge penalty weight")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd.add_option("--init", f.init, "target initialization scheme")
        ->check(CLI::IsMember({"interpolate", "zero-beta"}))
        ->capture_default_str();
    cmd.add_option("--max-outer", f.max_outer, "outer iteration cap")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_option("--tol", f.tol, "relative loss tolerance")->capture_default_str();
    cmd.add_option("--glm-max-iter", f.glm_max_iter, "inner Newton iteration cap")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_option("--glm-tol", f.glm_tol, "inner gradient tolerance")->capture_default_str();
}

FitOptions fit_options(const FitFlags& f, std::uint64_t seed) {
    FitOptions opts;
    opts.lambda = f.lambda;
    opts.init_scheme = init_scheme_from_name(f.init);
    opts.max_outer_iterations = f.max_outer;
    opts.relative_loss_tolerance = f.tol;
    opts.glm_max_iterations = f.glm_max_iter;
    opts.glm_gradient_tolerance = f.glm_tol;
    opts.seed = seed;
    return opts;
}

CLI::Option* add_seed(CLI::App& cmd, std::uint64_t& seed) {
    return cmd.add_option("--seed", seed, "random seed")
        ->envname("AGGLM_SEED")
        ->capture_default_str();
}

int resolve_jobs(int jobs) {
    if (jobs > 0) return jobs;
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<double> display_edges(double lo, double hi, int bins) {
    if (!(hi > lo)) hi = lo + 1.0;
    std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
    for (int i = 0; i <= bins; ++i)
        edges[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / bins;
    // The bins are half open, so nudge the last edge past the maximum.
    edges.back() = std::nextafter(std::max(edges.back(), hi),
                                  std::numeric_limits<double>::infinity());
    return edges;
}

std::string cell_json(const SweepCell& c) {
    std::ostringstream out;
    out << "{\"bins\":" << c.bins << ",\"fold\":" << c.fold
        << ",\"train_error\":" << format_double(c.train_error)
        << ",\"test_error\":" << format_double(c.test_error)
        << ",\"baseline_train_error\":" << format_double(c.baseline_train_error)
        << ",\"baseline_test_error\":" << format_double(c.baseline_test_error) << '}';
    return out.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GLM fitting from order-statistic aggregates"};
    app.require_subcommand(1);

    // simulate ----------------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "write a synthetic GLM dataset");
    struct {
        std::string family;
        Eigen::Index n = 1000;
        Eigen::Index d = 10;
        double cov_scale = 1.0;
        double coef_scale = 1.0;
        double epsilon = 1e-8;
        std::string relationship = "linear";
        std::uint64_t seed = 0;
        std::string out;
        std::string out_beta;
    } sim_args;
    sim->add_option("--family", sim_args.family, "exponential family")
        ->required()
        ->check(CLI::IsMember(kFamilies));
    sim->add_option("--n", sim_args.n, "sample size")->check(CLI::PositiveNumber)->capture_default_str();
    sim->add_option("--d", sim_args.d, "covariate count")->check(CLI::PositiveNumber)->capture_default_str();
    sim->add_option("--cov-scale", sim_args.cov_scale, "covariate scale")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    auto* coef_opt =
        sim->add_option("--coef-scale", sim_args.coef_scale,
                        "coefficient scale (default 1.0, 0.3 for poisson)")
            ->check(CLI::PositiveNumber);
    sim->add_option("--epsilon", sim_args.epsilon, "bernoulli softening")->capture_default_str();
    sim->add_option("--relationship", sim_args.relationship, "linear or none")
        ->check(CLI::IsMember({"linear", "none"}))
        ->capture_default_str();
    add_seed(*sim, sim_args.seed);
    sim->add_option("--out", sim_args.out, "output dataset CSV")->required();
    sim->add_option("--out-beta", sim_args.out_beta, "output true-coefficients CSV");
    sim->callback([&] {
        SimulationConfig config;
        config.family = family_from_name(sim_args.family);
        config.n = sim_args.n;
        config.d = sim_args.d;
        config.covariate_scale = sim_args.cov_scale;
        config.coefficient_scale = coef_opt->count()
                                       ? sim_args.coef_scale
                                       : (config.family == FamilyKind::poisson ? 0.3 : 1.0);
        config.epsilon = sim_args.epsilon;
        config.relationship = relationship_from_name(sim_args.relationship);
        config.seed = sim_args.seed;
        SimulatedData data = simulate_glm(config);

        Dataset out;
        for (Eigen::Index j = 0; j < config.d; ++j)
            out.feature_names.push_back("x" + std::to_string(j + 1));
        out.X = std::move(data.X);
        out.target = std::move(data.z);
        out.target_name = "target";
        write_dataset(sim_args.out, out);
        if (!sim_args.out_beta.empty()) {
            std::ostringstream text;
            text << "beta\n";
            for (Eigen::Index j = 0; j < data.beta.size(); ++j)
                text << format_double(data.beta(j)) << '\n';
            write_text(sim_args.out_beta, text.str());
        }
        std::cout << "wrote " << sim_args.out << " (" << config.n << " rows)\n";
    });

    // aggregate ---------------------------------------------------------
    auto* agg = app.add_subcommand("aggregate", "summarize targets into order statistics");
    struct {
        DataFlags data;
        std::string family;
        int bins = 10;
        std::vector<double> edges;
        bool drop_extremes = false;
        std::string out;
    } agg_args;
    add_data_flags(*agg, agg_args.data, true);
    agg->add_option("--family", agg_args.family, "exponential family")
        ->required()
        ->check(CLI::IsMember(kFamilies));
    auto* bins_opt = agg->add_option("--bins", agg_args.bins, "equal-frequency bin count")
                         ->check(CLI::PositiveNumber)
                         ->capture_default_str();
    auto* edges_opt = agg->add_option("--edges", agg_args.edges,
                                      "histogram edges, comma separated (replaces --bins)")
                          ->delimiter(',')
                          ->excludes(bins_opt);
    agg->add_flag("--drop-extremes", agg_args.drop_extremes,
                  "omit the min and max order statistics");
    agg->add_option("--out", agg_args.out, "output summary JSON")->required();
    agg->callback([&] {
        GlmFamily family(family_from_name(agg_args.family));
        Dataset data = load_dataset(agg_args.data, family);

        SummarizeOptions opts;
        if (edges_opt->count()) {
            opts.scheme = SummaryScheme::edge_histogram;
            opts.edges = agg_args.edges;
        } else {
            opts.bins = agg_args.bins;
        }
        opts.include_extremes = !agg_args.drop_extremes;

        AggregateSummary summary =
            data.block_labels.empty()
                ? summarize_targets(*data.target, opts)
                : summarize_targets(*data.target, data.blocks(), opts);
        validate_summary(summary, data.n(), family);
        write_summary(agg_args.out, summary);
        std::cout << "wrote " << agg_args.out << " (" << summary.blocks.size()
                  << " blocks)\n";
    });

    // fit ---------------------------------------------------------------
    auto* fit = app.add_subcommand("fit", "fit a GLM against a summary");
    struct {
        DataFlags data;
        std::string family;
        std::string summary;
        FitFlags fit;
        double epsilon = 1e-8;
        std::uint64_t seed = 0;
        std::string out_state;
        std::string out_imputed;
    } fit_args;
    add_data_flags(*fit, fit_args.data, false);
    fit->add_option("--family", fit_args.family, "exponential family")
        ->required()
        ->check(CLI::IsMember(kFamilies));
    fit->add_option("--summary", fit_args.summary, "summary JSON path")->required();
    add_fit_flags(*fit, fit_args.fit);
    fit->add_option("--epsilon", fit_args.epsilon, "family epsilon")->capture_default_str();
    add_seed(*fit, fit_args.seed);
    fit->add_option("--out-state", fit_args.out_state, "output fit-state JSON");
    fit->add_option("--out-imputed", fit_args.out_imputed, "output imputed-targets CSV");
    fit->callback([&] {
        GlmFamily family(family_from_name(fit_args.family), fit_args.epsilon);
        Dataset data = load_dataset(fit_args.data, family);
        AggregateSummary summary = read_summary(fit_args.summary);

        FitState state = alternate_fit(data.X, summary, family,
                                       fit_options(fit_args.fit, fit_args.seed));
        if (!fit_args.out_state.empty()) write_fit_state(fit_args.out_state, state);
        if (!fit_args.out_imputed.empty()) {
            std::ostringstream text;
            text << "row,z_hat\n";
            for (Eigen::Index i = 0; i < state.z_hat.size(); ++i)
                text << i << ',' << format_double(state.z_hat(i)) << '\n';
            write_text(fit_args.out_imputed, text.str());
        }
        std::cout << (state.converged ? "converged" : "stopped") << " after "
                  << state.iterations << " iterations, loss "
                  << format_double(state.loss_trajectory.back()) << '\n';
    });

    // permtest ----------------------------------------------------------
    auto* perm = app.add_subcommand("permtest", "permutation test of covariate relevance");
    struct {
        DataFlags data;
        std::string family;
        std::string summary;
        FitFlags fit;
        double epsilon = 1e-8;
        int perms = 1000;
        std::uint64_t seed = 0;
        int jobs = 1;
        std::string out;
        std::string out_null;
    } perm_args;
    add_data_flags(*perm, perm_args.data, true);
    perm->add_option("--family", perm_args.family, "exponential family")
        ->required()
        ->check(CLI::IsMember(kFamilies));
    perm->add_option("--summary", perm_args.summary,
                     "summary JSON; when given, the observed statistic is the aggregated fit");
    add_fit_flags(*perm, perm_args.fit);
    perm->add_option("--epsilon", perm_args.epsilon, "family epsilon")->capture_default_str();
    perm->add_option("--perms", perm_args.perms, "permutation count")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_seed(*perm, perm_args.seed);
    perm->add_option("--jobs", perm_args.jobs, "worker threads (0 = all cores)")
        ->capture_default_str();
    perm->add_option("--out", perm_args.out, "output result JSON")->required();
    perm->add_option("--out-null", perm_args.out_null, "output null-error CSV");
    perm->callback([&] {
        GlmFamily family(family_from_name(perm_args.family), perm_args.epsilon);
        Dataset data = load_dataset(perm_args.data, family);
        std::optional<AggregateSummary> summary;
        if (!perm_args.summary.empty()) summary = read_summary(perm_args.summary);

        PermutationTestResult result = permutation_test(
            data.X, *data.target, summary, family, fit_options(perm_args.fit, perm_args.seed),
            perm_args.perms, perm_args.seed, resolve_jobs(perm_args.jobs));
        write_permutation_test(perm_args.out, result);
        if (!perm_args.out_null.empty()) write_null_errors_csv(perm_args.out_null, result);
        std::cout << "observed error " << format_double(result.observed_error)
                  << ", p-value " << format_double(result.p_value) << '\n';
    });

    // curve -------------------------------------------------------------
    auto* curve = app.add_subcommand("curve", "cross-validated error vs. summary granularity");
    struct {
        DataFlags data;
        std::string family;
        std::vector<int> bins{2, 5, 10, 25, 50};
        int folds = 5;
        int seeds = 1;
        std::uint64_t seed = 0;
        int jobs = 1;
        FitFlags fit;
        double epsilon = 1e-8;
        Eigen::Index n = 1000;
        Eigen::Index d = 10;
        double cov_scale = 1.0;
        double coef_scale = 1.0;
        Eigen::Index block_size = 50;
        std::string relationship = "linear";
        std::string out;
        std::string out_json;
    } curve_args;
    auto* curve_data = curve->add_option("--data", curve_args.data.path,
                                         "dataset CSV (default: simulate per seed)");
    curve->add_option("--target", curve_args.data.target, "target column name")
        ->needs(curve_data);
    curve->add_option("--block", curve_args.data.block, "block-label column name")
        ->needs(curve_data);
    curve->add_option("--features", curve_args.data.features,
                      "feature columns, comma separated (default: all remaining)")
        ->delimiter(',')
        ->needs(curve_data);
    curve->add_option("--family", curve_args.family, "exponential family")
        ->required()
        ->check(CLI::IsMember(kFamilies));
    curve->add_option("--bins", curve_args.bins, "bin counts to sweep, comma separated")
        ->delimiter(',')
        ->capture_default_str();
    curve->add_option("--folds", curve_args.folds, "cross-validation folds")
        ->check(CLI::Range(2, 1000000))
        ->capture_default_str();
    curve->add_option("--seeds", curve_args.seeds, "number of consecutive seeds to run")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_seed(*curve, curve_args.seed);
    curve->add_option("--jobs", curve_args.jobs, "worker threads (0 = all cores)")
        ->capture_default_str();
    add_fit_flags(*curve, curve_args.fit);
    curve->add_option("--epsilon", curve_args.epsilon, "family epsilon")->capture_default_str();
    curve->add_option("--n", curve_args.n, "simulated sample size")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    curve->add_option("--d", curve_args.d, "simulated covariate count")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    curve->add_option("--cov-scale", curve_args.cov_scale, "simulated covariate scale")
        ->capture_default_str();
    auto* curve_coef = curve->add_option("--coef-scale", curve_args.coef_scale,
                                         "simulated coefficient scale (default 1.0, 0.3 for poisson)");
    curve->add_option("--block-size", curve_args.block_size,
                      "row-group size for simulated-data summaries")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    curve->add_option("--relationship", curve_args.relationship, "simulated relationship")
        ->check(CLI::IsMember({"linear", "none"}))
        ->capture_default_str();
    curve->add_option("--out", curve_args.out, "output sweep CSV")->required();
    curve->add_option("--out-json", curve_args.out_json, "output sweep JSON");
    curve->callback([&] {
        GlmFamily family(family_from_name(curve_args.family), curve_args.epsilon);
        const int jobs = resolve_jobs(curve_args.jobs);

        std::optional<Dataset> data;
        if (curve_data->count()) {
            if (curve_args.data.target.empty())
                throw std::runtime_error("--data requires --target");
            data = load_dataset(curve_args.data, family);
        }

        std::ostringstream csv;
        csv << "seed,bins,fold,train_error,test_error,baseline_train_error,baseline_test_error\n";
        std::ostringstream json;
        json << "{\"runs\":[";
        for (int s = 0; s < curve_args.seeds; ++s) {
            const std::uint64_t seed = curve_args.seed + static_cast<std::uint64_t>(s);
            Eigen::MatrixXd X;
            Eigen::VectorXd z;
            std::vector<std::vector<Eigen::Index>> blocks;
            if (data) {
                X = data->X;
                z = *data->target;
                blocks = data->blocks();
            } else {
                SimulationConfig config;
                config.family = family.kind();
                config.n = curve_args.n;
                config.d = curve_args.d;
                config.covariate_scale = curve_args.cov_scale;
                config.coefficient_scale =
                    curve_coef->count()
                        ? curve_args.coef_scale
                        : (family.kind() == FamilyKind::poisson ? 0.3 : 1.0);
                config.epsilon = curve_args.epsilon;
                config.relationship = relationship_from_name(curve_args.relationship);
                config.seed = seed;
                SimulatedData sim_data = simulate_glm(config);
                X = std::move(sim_data.X);
                z = std::move(sim_data.z);
                // A whole-sample summary pins only the target distribution;
                // grouped summaries are what make the coefficients
                // recoverable, so simulated rows aggregate in groups.
                for (Eigen::Index start = 0; start < X.rows();
                     start += curve_args.block_size) {
                    const Eigen::Index stop =
                        std::min(X.rows(), start + curve_args.block_size);
                    std::vector<Eigen::Index> rows(
                        static_cast<std::size_t>(stop - start));
                    std::iota(rows.begin(), rows.end(), start);
                    blocks.push_back(std::move(rows));
                }
            }

            SweepResult sweep =
                granularity_sweep(X, z, family, curve_args.bins, curve_args.folds,
                                  fit_options(curve_args.fit, seed), seed, blocks, jobs);
            if (s) json << ',';
            json << "{\"seed\":" << seed << ",\"cells\":[";
            for (std::size_t i = 0; i < sweep.cells.size(); ++i) {
                const SweepCell& c = sweep.cells[i];
                csv << seed << ',' << c.bins << ',' << c.fold << ','
                    << format_double(c.train_error) << ',' << format_double(c.test_error)
                    << ',' << format_double(c.baseline_train_error) << ','
                    << format_double(c.baseline_test_error) << '\n';
                if (i) json << ',';
                json << cell_json(c);
            }
            json << "]}";
        }
        json << "]}\n";
        write_text(curve_args.out, csv.str());
        if (!curve_args.out_json.empty()) write_text(curve_args.out_json, json.str());
        std::cout << "wrote " << curve_args.out << '\n';
    });

    // hist --------------------------------------------------------------
    auto* hist = app.add_subcommand("hist", "true vs. recovered histogram from a summary");
    struct {
        DataFlags data;
        std::string family;
        int bins = 10;
        bool drop_extremes = false;
        int hist_bins = 20;
        std::string out;
    } hist_args;
    add_data_flags(*hist, hist_args.data, true);
    hist->add_option("--family", hist_args.family, "exponential family")
        ->required()
        ->check(CLI::IsMember(kFamilies));
    hist->add_option("--bins", hist_args.bins, "summary bin count")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    hist->add_flag("--drop-extremes", hist_args.drop_extremes,
                   "omit the min and max order statistics");
    hist->add_option("--hist-bins", hist_args.hist_bins, "display histogram bin count")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    hist->add_option("--out", hist_args.out, "output histogram CSV")->required();
    hist->callback([&] {
        GlmFamily family(family_from_name(hist_args.family));
        Dataset data = load_dataset(hist_args.data, family);
        const Eigen::VectorXd& z = *data.target;

        SummarizeOptions opts;
        opts.bins = hist_args.bins;
        opts.include_extremes = !hist_args.drop_extremes;
        AggregateSummary summary =
            data.block_labels.empty() ? summarize_targets(z, opts)
                                      : summarize_targets(z, data.blocks(), opts);

        // Covariate-free recovery: impute around the family's baseline mean.
        Eigen::VectorXd gamma =
            Eigen::VectorXd::Constant(z.size(), family.link_inverse(0.0));
        Eigen::VectorXd recovered = impute_targets(gamma, summary);

        const double lo = std::min(z.minCoeff(), recovered.minCoeff());
        const double hi = std::max(z.maxCoeff(), recovered.maxCoeff());
        const std::vector<double> edges = display_edges(lo, hi, hist_args.hist_bins);
        HistogramCounts true_counts = recovered_histogram(z, edges);
        HistogramCounts rec_counts = recovered_histogram(recovered, edges);

        std::ostringstream text;
        text << "bin_lo,bin_hi,true_count,recovered_count\n";
        for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
            text << format_double(edges[i]) << ',' << format_double(edges[i + 1]) << ','
                 << true_counts.counts[i] << ',' << rec_counts.counts[i] << '\n';
        }
        write_text(hist_args.out, text.str());
        std::cout << "wrote " << hist_args.out << '\n';
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
