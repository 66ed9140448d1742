#include "agglm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "agglm/serialize.hpp"

namespace agglm {

namespace {

std::vector<std::string> split_csv_line(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return cells;
}

double parse_cell(const std::string& cell, const std::string& path,
                  std::size_t line_no, const std::string& column) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = first + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": column '" + column + "': not a number: '" +
                                 cell + "'");
    }
    return value;
}

}  // namespace

std::vector<std::vector<Eigen::Index>> Dataset::blocks() const {
    std::vector<std::vector<Eigen::Index>> out;
    if (block_labels.empty()) return out;
    std::unordered_map<std::string, std::size_t> index;
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(block_labels.size()); ++i) {
        auto [it, inserted] = index.emplace(block_labels[i], out.size());
        if (inserted) out.emplace_back();
        out[it->second].push_back(i);
    }
    return out;
}

Dataset read_dataset(const std::string& path, const ReadOptions& opts) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    const std::vector<std::string> header = split_csv_line(line);

    std::unordered_map<std::string, std::size_t> position;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (!position.emplace(header[j], j).second)
            throw std::runtime_error(path + ": duplicate column '" + header[j] + "'");
    }

    auto require = [&](const std::string& name) {
        auto it = position.find(name);
        if (it == position.end())
            throw std::runtime_error(path + ": no column '" + name + "'");
        return it->second;
    };

    std::optional<std::size_t> target_pos;
    if (!opts.target_column.empty()) target_pos = require(opts.target_column);
    std::optional<std::size_t> block_pos;
    if (!opts.block_column.empty()) block_pos = require(opts.block_column);

    std::vector<std::size_t> feature_pos;
    std::vector<std::string> feature_names;
    if (opts.feature_columns.empty()) {
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (target_pos && j == *target_pos) continue;
            if (block_pos && j == *block_pos) continue;
            feature_pos.push_back(j);
            feature_names.push_back(header[j]);
        }
    } else {
        for (const std::string& name : opts.feature_columns) {
            feature_pos.push_back(require(name));
            feature_names.push_back(name);
        }
    }
    if (feature_pos.empty()) throw std::runtime_error(path + ": no feature columns");

    std::vector<std::vector<double>> rows;
    std::vector<double> targets;
    std::vector<std::string> labels;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected " + std::to_string(header.size()) +
                                     " cells, got " + std::to_string(cells.size()));
        }
        std::vector<double> row(feature_pos.size());
        for (std::size_t k = 0; k < feature_pos.size(); ++k)
            row[k] = parse_cell(cells[feature_pos[k]], path, line_no, feature_names[k]);
        rows.push_back(std::move(row));
        if (target_pos) {
            double y = parse_cell(cells[*target_pos], path, line_no, opts.target_column);
            if (opts.family && !opts.family->in_domain(y)) {
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": column '" + opts.target_column +
                                         "': value " + format_double(y) +
                                         " outside the " +
                                         std::string(family_name(opts.family->kind())) +
                                         " domain");
            }
            targets.push_back(y);
        }
        if (block_pos) labels.push_back(cells[*block_pos]);
    }
    if (rows.empty()) throw std::runtime_error(path + ": no data rows");

    Dataset data;
    data.feature_names = std::move(feature_names);
    data.X.resize(static_cast<Eigen::Index>(rows.size()),
                  static_cast<Eigen::Index>(feature_pos.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t k = 0; k < feature_pos.size(); ++k)
            data.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    if (target_pos) {
        data.target_name = opts.target_column;
        data.target = Eigen::Map<Eigen::VectorXd>(targets.data(),
                                                  static_cast<Eigen::Index>(targets.size()));
    }
    if (block_pos) {
        data.block_name = opts.block_column;
        data.block_labels = std::move(labels);
    }
    return data;
}

void write_dataset(const std::string& path, const Dataset& data) {
    if (data.X.cols() != static_cast<Eigen::Index>(data.feature_names.size()))
        throw std::invalid_argument("feature_names does not match X");
    if (data.target && data.target->size() != data.X.rows())
        throw std::invalid_argument("target length does not match X");
    if (!data.block_labels.empty() &&
        static_cast<Eigen::Index>(data.block_labels.size()) != data.X.rows())
        throw std::invalid_argument("block_labels length does not match X");

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");

    std::ostringstream head;
    for (std::size_t j = 0; j < data.feature_names.size(); ++j) {
        if (j) head << ',';
        head << data.feature_names[j];
    }
    if (data.target) head << ',' << (data.target_name.empty() ? "target" : data.target_name);
    if (!data.block_labels.empty())
        head << ',' << (data.block_name.empty() ? "block" : data.block_name);
    out << head.str() << '\n';

    for (Eigen::Index i = 0; i < data.X.rows(); ++i) {
        for (Eigen::Index j = 0; j < data.X.cols(); ++j) {
            if (j) out << ',';
            out << format_double(data.X(i, j));
        }
        if (data.target) out << ',' << format_double((*data.target)(i));
        if (!data.block_labels.empty()) out << ',' << data.block_labels[i];
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace agglm
