#pragma once

#include <string>

#include "agglm/aggregate.hpp"
#include "agglm/inference.hpp"
#include "agglm/solver.hpp"

namespace agglm {

/// Shortest decimal representation that round-trips through double.
std::string format_double(double value);

std::string summary_to_json(const AggregateSummary& summary);
AggregateSummary summary_from_json(const std::string& text);

void write_summary(const std::string& path, const AggregateSummary& summary);
AggregateSummary read_summary(const std::string& path);

std::string fit_state_to_json(const FitState& state);
FitState fit_state_from_json(const std::string& text);
void write_fit_state(const std::string& path, const FitState& state);
FitState read_fit_state(const std::string& path);

std::string permutation_test_to_json(const PermutationTestResult& result);
void write_permutation_test(const std::string& path, const PermutationTestResult& result);
/// One row per replicate: replicate,null_error.
void write_null_errors_csv(const std::string& path, const PermutationTestResult& result);

std::string sweep_to_json(const SweepResult& result);
/// One row per (bins, fold) cell.
void write_sweep_csv(const std::string& path, const SweepResult& result);
void write_sweep_json(const std::string& path, const SweepResult& result);

}  // namespace agglm
