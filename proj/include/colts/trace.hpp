#pragma once

// A learning trace: one fitted trend per level (from level 3 on), the
// asymptotic backbone they induce and, once a working level is known, the
// canonically anchored trends that follow it.

#include <cstddef>
#include <optional>
#include <vector>

#include "colts/convergence.hpp"
#include "colts/pattern.hpp"

namespace colts {

inline constexpr double kRelevanceTolerance = 1e-9;

class LearningTrace {
 public:
  /// Appends an observation and fits the trend of the new level. The
  /// observation is kept even when the fit fails; the error is rethrown and
  /// the level simply has no trend.
  void extend(const Observation& obs);

  /// Starts canonical anchoring after `omega`: level omega+1 is anchored at
  /// alpha_omega and each later level at the previous anchored asymptote.
  /// Levels already present past omega get their anchored trends now.
  void anchor_from(std::size_t omega);

  /// Drops every level past `levels`.
  void truncate(std::size_t levels);

  std::size_t levels() const noexcept { return observations_.size(); }
  const std::vector<Observation>& observations() const noexcept { return observations_; }
  std::uint64_t position(std::size_t level) const { return observations_.at(level - 1).position; }

  const std::optional<PowerFit>& trend(std::size_t level) const { return trends_.at(level - 1); }
  const std::optional<PowerFit>& anchored_trend(std::size_t level) const {
    return anchored_.at(level - 1);
  }
  /// Anchored trend when there is one, plain trend otherwise.
  std::optional<PowerFit> effective_trend(std::size_t level) const;

  std::optional<double> alpha(std::size_t level) const;
  std::optional<double> anchored_alpha(std::size_t level) const;
  std::optional<double> anchor(std::size_t level) const { return anchors_.at(level - 1); }

  bool anchored() const noexcept { return omega_.has_value(); }
  std::optional<std::size_t> omega() const noexcept { return omega_; }

  Backbone backbone() const;

  /// Whether x_{level+1} is relevant: the slopes of the trends of `level` and
  /// `level + 1` at their own positions differ by more than `tolerance`.
  bool is_relevant(std::size_t level, double tolerance = kRelevanceTolerance) const;

 private:
  std::optional<double> next_anchor(std::size_t level) const;
  void fit_anchored(std::size_t level);

  std::vector<Observation> observations_;
  std::vector<std::optional<PowerFit>> trends_;
  std::vector<std::optional<PowerFit>> anchored_;
  std::vector<std::optional<double>> anchors_;
  std::optional<std::size_t> omega_;
};

/// Canonical anchors for levels omega+1 .. levels(), in order. Computed on a
/// copy of the trace, which is left untouched.
std::vector<double> canonical_anchor_sequence(const LearningTrace& trace, std::size_t omega);

}  // namespace colts
