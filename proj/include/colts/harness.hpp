#pragma once

// Runs, local testing frames, inflated variants and the cost-saving metrics
// used to compare sampling schedules against an arithmetic baseline.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "colts/convergence.hpp"
#include "colts/learners.hpp"
#include "colts/scheme.hpp"
#include "colts/trace.hpp"

namespace colts {

struct RunFlags {
  bool exhausted = false;     // a step overran the available training data
  bool beyond_scope = false;  // passed the scope end without halting
  bool non_viable = false;
  std::string reason;         // empty when viable
};

struct RunOptions {
  ConvergenceParams params;
  bool anchoring = true;
  /// Working and prediction levels imposed by a frame; detected from the
  /// run's own backbone when absent.
  std::optional<std::size_t> omega;
  std::optional<std::size_t> plevel;
  /// Accuracy substitutions by level (inflated variants).
  std::map<std::size_t, double> overrides;
  std::size_t max_levels = 100000;
};

struct Run {
  std::string name;
  LearningScheme scheme;
  LearningTrace trace;
  std::vector<std::uint64_t> word_targets;  // unaligned sizes W_l
  // Per level, index level - 1. Steps hold the increment to the next level.
  std::vector<std::optional<double>> mu;
  std::vector<std::optional<std::uint64_t>> step;
  std::vector<std::optional<double>> chi;
  std::optional<std::size_t> wlevel;
  std::optional<std::size_t> plevel;
  std::optional<std::size_t> clevel;
  RunFlags flags;
  std::optional<std::size_t> inflated_level;
  std::optional<double> inflated_accuracy;

  std::size_t levels() const noexcept { return trace.levels(); }
  /// Position of the instance of `level` (sentence aligned).
  std::uint64_t position(std::size_t level) const { return trace.position(level); }
  std::optional<std::uint64_t> clevel_position() const;
  bool halted_at(std::size_t level) const;
};

/// Observes `source` along `scheme` until the layered criterion halts, the
/// data runs out, or the scope end is passed.
Run execute_run(AccuracySource& source, const LearningScheme& scheme, const RunOptions& options,
                std::string name = {});

struct MetricsReport {
  std::int64_t delta = 0;
  double dacsr = 0.0;
  double icsr = 0.0;
  double lcsr = 0.0;
};

/// Signed distance between the convergence instances of `run` and `baseline`.
std::int64_t discrepancy(const Run& run, const Run& baseline);
double dacsr(const Run& run, const Run& baseline, std::uint64_t eta);
double icsr(const Run& run, const Run& baseline);
MetricsReport metrics(const Run& run, const Run& baseline, std::uint64_t eta);

enum class ScheduleKind { Arithmetic, Geometric, Colts };

struct ScheduleSpec {
  ScheduleKind kind = ScheduleKind::Arithmetic;
  double psi = 0.5;                   // trial PORT for COLTS
  std::optional<double> fixed_param;  // skip tuning: explicit ratio or PORT
  std::string name() const;
};

struct FrameConfig {
  std::uint64_t kernel = 5000;
  std::uint64_t eta = 5000;
  ConvergenceParams params;
  bool anchoring = true;
  std::vector<ScheduleSpec> competitors;
  bool parallel = true;
};

struct LocalFrame {
  FrameConfig config;
  /// runs[0] is the arithmetic baseline; the others follow `config.competitors`.
  std::vector<Run> runs;
  /// Tuned ratio / PORT per run (eta for the baseline).
  std::vector<double> step_params;
  std::vector<std::optional<MetricsReport>> reports;
  std::optional<std::size_t> omega;
  std::optional<std::size_t> plevel;
  std::uint64_t plevel_position = 0;
  bool viable = false;
  std::string reason;
  std::optional<double> inflation;  // set on inflated variants

  const Run& baseline() const { return runs.front(); }
  /// [baseline convergence instance - eta, baseline convergence instance]
  std::pair<std::int64_t, std::int64_t> tolerance_interval() const;
};

/// Baseline first (its levels fix omega, plevel and tuning), then the tuned
/// competitors.
LocalFrame build_frame(AccuracySource& source, const FrameConfig& config);

/// Greatest level whose instance precedes both the run's and the baseline's
/// convergence instances.
std::optional<std::size_t> inflation_level(const Run& run, const Run& baseline);

/// Re-executes every run of a viable frame with one observation inflated by
/// `iota` percent (capped at the run's converged asymptote). Throws
/// NonViableInflation when some run's inflated level does not exceed the
/// plevel, or the inflated baseline moves the plevel.
LocalFrame inflate_frame(const LocalFrame& frame, double iota, AccuracySource& source);

}  // namespace colts
