#pragma once

// One experiment: build the accuracy source, run the local frame (and its
// inflated variant) and write the iteration logs, summary and plot data.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "colts/config.hpp"
#include "colts/harness.hpp"

namespace colts {

struct ExperimentResult {
  LocalFrame frame;
  std::optional<LocalFrame> inflated;
  std::string inflation_error;  // why the inflated variant is missing
};

ExperimentResult run_experiment(const ExperimentConfig& config);

/// File stem used for a run's artifacts, e.g. "colts_0.5".
std::string run_stem(const std::string& name);

void write_iteration_csv(std::ostream& out, const Run& run, const ConvergenceParams& params);
std::string summary_json(const ExperimentConfig& config, const ExperimentResult& result);
/// Writes every artifact under `config.out`; returns the summary path.
std::filesystem::path write_artifacts(const ExperimentConfig& config, const ExperimentResult& result);

}  // namespace colts
