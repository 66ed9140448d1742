#include "agglm/serialize.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace agglm {

namespace {

using nlohmann::json;

std::string number(double value) {
    if (!std::isfinite(value))
        throw std::invalid_argument("non-finite value cannot be serialized");
    return format_double(value);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spill(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

json parse(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string(what) + ": " + e.what());
    }
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) throw std::runtime_error("format_double failed");
    return std::string(buf, ptr);
}

std::string summary_to_json(const AggregateSummary& summary) {
    std::ostringstream out;
    out << "{\"blocks\":[";
    for (std::size_t b = 0; b < summary.blocks.size(); ++b) {
        const Block& block = summary.blocks[b];
        if (b) out << ',';
        out << "{\"rows\":[";
        for (std::size_t i = 0; i < block.rows.size(); ++i) {
            if (i) out << ',';
            out << block.rows[i];
        }
        out << "],\"constraints\":[";
        for (std::size_t k = 0; k < block.constraints.size(); ++k) {
            if (k) out << ',';
            out << "{\"rank\":" << block.constraints[k].rank
                << ",\"value\":" << number(block.constraints[k].value) << '}';
        }
        out << "]}";
    }
    out << "]}\n";
    return out.str();
}

AggregateSummary summary_from_json(const std::string& text) {
    const json doc = parse(text, "summary JSON");
    AggregateSummary summary;
    try {
        for (const json& jb : doc.at("blocks")) {
            Block block;
            for (const json& r : jb.at("rows"))
                block.rows.push_back(r.get<Eigen::Index>());
            for (const json& jc : jb.at("constraints")) {
                OrderStatisticConstraint c;
                c.rank = jc.at("rank").get<Eigen::Index>();
                c.value = jc.at("value").get<double>();
                block.constraints.push_back(c);
            }
            summary.blocks.push_back(std::move(block));
        }
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("summary JSON: ") + e.what());
    }
    return summary;
}

void write_summary(const std::string& path, const AggregateSummary& summary) {
    spill(path, summary_to_json(summary));
}

AggregateSummary read_summary(const std::string& path) {
    try {
        return summary_from_json(slurp(path));
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

std::string fit_state_to_json(const FitState& state) {
    std::ostringstream out;
    out << "{\"beta\":[";
    for (Eigen::Index j = 0; j < state.beta.size(); ++j) {
        if (j) out << ',';
        out << number(state.beta(j));
    }
    out << "],\"lambda\":" << number(state.lambda)
        << ",\"iterations\":" << state.iterations
        << ",\"converged\":" << (state.converged ? "true" : "false")
        << ",\"loss_trajectory\":[";
    for (std::size_t t = 0; t < state.loss_trajectory.size(); ++t) {
        if (t) out << ',';
        out << number(state.loss_trajectory[t]);
    }
    out << "]}\n";
    return out.str();
}

FitState fit_state_from_json(const std::string& text) {
    const json doc = parse(text, "fit state JSON");
    FitState state;
    try {
        const json& jb = doc.at("beta");
        state.beta.resize(static_cast<Eigen::Index>(jb.size()));
        for (Eigen::Index j = 0; j < state.beta.size(); ++j)
            state.beta(j) = jb.at(static_cast<std::size_t>(j)).get<double>();
        state.lambda = doc.at("lambda").get<double>();
        state.iterations = doc.at("iterations").get<int>();
        state.converged = doc.at("converged").get<bool>();
        for (const json& v : doc.at("loss_trajectory"))
            state.loss_trajectory.push_back(v.get<double>());
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("fit state JSON: ") + e.what());
    }
    return state;
}

void write_fit_state(const std::string& path, const FitState& state) {
    spill(path, fit_state_to_json(state));
}

FitState read_fit_state(const std::string& path) {
    try {
        return fit_state_from_json(slurp(path));
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

std::string permutation_test_to_json(const PermutationTestResult& result) {
    std::ostringstream out;
    out << "{\"observed_error\":" << number(result.observed_error)
        << ",\"p_value\":" << number(result.p_value)
        << ",\"n_permutations\":" << result.null_errors.size()
        << ",\"fit_failures\":" << result.fit_failures << "}\n";
    return out.str();
}

void write_permutation_test(const std::string& path, const PermutationTestResult& result) {
    spill(path, permutation_test_to_json(result));
}

void write_null_errors_csv(const std::string& path, const PermutationTestResult& result) {
    std::ostringstream out;
    out << "replicate,null_error\n";
    for (std::size_t r = 0; r < result.null_errors.size(); ++r)
        out << r << ',' << number(result.null_errors[r]) << '\n';
    spill(path, out.str());
}

std::string sweep_to_json(const SweepResult& result) {
    std::ostringstream out;
    out << "{\"cells\":[";
    for (std::size_t i = 0; i < result.cells.size(); ++i) {
        const SweepCell& c = result.cells[i];
        if (i) out << ',';
        out << "{\"bins\":" << c.bins << ",\"fold\":" << c.fold
            << ",\"train_error\":" << number(c.train_error)
            << ",\"test_error\":" << number(c.test_error)
            << ",\"baseline_train_error\":" << number(c.baseline_train_error)
            << ",\"baseline_test_error\":" << number(c.baseline_test_error) << '}';
    }
    out << "]}\n";
    return out.str();
}

void write_sweep_csv(const std::string& path, const SweepResult& result) {
    std::ostringstream out;
    out << "bins,fold,train_error,test_error,baseline_train_error,baseline_test_error\n";
    for (const SweepCell& c : result.cells) {
        out << c.bins << ',' << c.fold << ',' << number(c.train_error) << ','
            << number(c.test_error) << ',' << number(c.baseline_train_error)
            << ',' << number(c.baseline_test_error) << '\n';
    }
    spill(path, out.str());
}

void write_sweep_json(const std::string& path, const SweepResult& result) {
    spill(path, sweep_to_json(result));
}

}  // namespace agglm
