#pragma once

// Working/prediction levels over an asymptotic backbone and the layered
// convergence halting test.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "colts/pattern.hpp"

namespace colts {

struct ConvergenceParams {
  double nu = 2e-5;            // verticality threshold, (0, 1)
  unsigned slowdown = 1;       // >= 1
  unsigned lookahead = 5;      // >= 0
  double tau = 1.0;            // accuracy points, > 0
  std::optional<std::uint64_t> scope_end;  // word position; unscoped when empty

  void validate() const;
};

/// nu^(1/slowdown) / (1 - nu)
double verticality_threshold(double nu, unsigned slowdown);

/// Backbone indexed by level - 1. Levels whose trend failed to fit carry no
/// asymptote.
struct Backbone {
  std::vector<std::uint64_t> positions;
  std::vector<std::optional<double>> alpha;

  std::size_t levels() const noexcept { return positions.size(); }
};

/// Smallest level whose look-ahead window keeps every backbone slope under
/// the verticality threshold.
std::optional<std::size_t> wlevel(const Backbone& backbone, const ConvergenceParams& params);

/// Smallest level >= omega whose asymptote does not exceed 100.
std::optional<std::size_t> plevel(const Backbone& backbone, std::size_t omega);

/// Remaining accuracy gain of a trend at x, either up to its asymptote or up
/// to a (sentence-aligned) scope end.
double layer(const PowerFit& trend, double x, std::optional<std::uint64_t> scope_end = {});

inline bool halted(double chi, double tau) { return chi <= tau; }

}  // namespace colts
