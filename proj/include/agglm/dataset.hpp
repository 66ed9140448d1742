#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "agglm/family.hpp"

namespace agglm {

/// Rectangular numeric dataset with optional true-target and block-label
/// columns.
struct Dataset {
    std::vector<std::string> feature_names;
    Eigen::MatrixXd X;
    std::optional<Eigen::VectorXd> target;
    std::string target_name;
    std::vector<std::string> block_labels;  // empty when no block column
    std::string block_name;

    Eigen::Index n() const { return X.rows(); }
    Eigen::Index d() const { return X.cols(); }

    /// Row-id lists grouped by block label, ordered by first appearance.
    std::vector<std::vector<Eigen::Index>> blocks() const;
};

struct ReadOptions {
    std::string target_column;                 // empty: no target expected
    std::string block_column;                  // empty: no block labels
    std::vector<std::string> feature_columns;  // empty: every remaining column
    std::optional<GlmFamily> family;           // when set, target entries are domain-checked
};

/// Parses a headered, comma-separated, '.'-decimal CSV. Errors carry the
/// file line and column name of the offending cell.
Dataset read_dataset(const std::string& path, const ReadOptions& opts = {});

void write_dataset(const std::string& path, const Dataset& data);

}  // namespace agglm
