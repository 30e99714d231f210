#pragma once

// Experiment configuration: flat `key = value` files, COLTS_* environment
// overrides and per-key setters used by the command line.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "colts/harness.hpp"

namespace colts {

struct ExperimentConfig {
  std::string learner = "synthetic";  // synthetic | baseline | external
  double synthetic_a = 542.5451;
  double synthetic_b = 0.3838;
  double synthetic_c = 99.2876;
  double noise = 0.0;
  std::string corpus;
  std::string heldout;
  std::string command;
  bool scramble = false;

  std::uint64_t kernel = 5000;
  std::uint64_t eta = 5000;
  double nu = 2e-5;
  unsigned varsigma = 1;
  unsigned lambda = 5;
  double tau = 1.0;
  std::uint64_t scope = 800000;  // 0: unscoped
  bool anchoring = true;

  std::vector<std::string> schedules{"arithmetic", "geometric", "colts"};
  std::vector<double> psi{0.2, 0.5, 0.8};
  double inflate = 1.0;  // 0 disables the inflated variant

  unsigned folds = 10;
  double heldout_fraction = 0.1;
  std::uint64_t corpus_words = 1'170'000;  // virtual corpus for synthetic learners
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string out = "colts-out";

  /// Sets one key from its textual form. Throws Error(Config) on unknown
  /// keys or malformed values; range checks are left to `diagnose`.
  void set(const std::string& key, const std::string& value);
  /// Canonical textual form of a key.
  std::string get(const std::string& key) const;
  static const std::vector<std::string>& keys();

  void load_file(const std::filesystem::path& path);
  void load_stream(std::istream& in, const std::string& source_name);
  /// Applies every COLTS_<KEY> variable present in the environment.
  void apply_env();

  ConvergenceParams convergence() const;
  LearnerSpec learner_spec() const;
  EvaluationSpec evaluation() const;
  FrameConfig frame() const;
};

/// Range checks plus a preflight of the data: corpus parse, kernel against
/// corpus size and k-fold feasibility. Empty when clean.
std::vector<std::string> diagnose(const ExperimentConfig& config);

}  // namespace colts
