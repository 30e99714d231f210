#pragma once

// Power-family accuracy patterns  y = c - a * x^(-b)  and their least-squares
// fitting. Positions are counts of training items; accuracies are percentages.

#include <cstdint>
#include <optional>
#include <span>

namespace colts {

struct Observation {
  std::uint64_t position = 0;
  double accuracy = 0.0;
};

/// One fitted learning trend. `a` and `b` are strictly positive, which makes
/// the curve strictly increasing and concave on (0, inf) with asymptote `c`.
struct PowerFit {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double residual_norm = 0.0;

  double asymptote() const noexcept { return c; }
};

struct FitOptions {
  std::optional<double> anchor;
  /// Starting point for the damped iteration; a closed-form start is used
  /// when absent.
  std::optional<PowerFit> warm_start;
  int max_iterations = 200;
  double relative_tolerance = 1e-10;
};

/// Damped least squares on (log a, log b, c). An anchor contributes a single
/// extra residual (c - anchor), which is what an observation at an
/// arbitrarily distant position amounts to.
PowerFit fit(std::span<const Observation> observations, const FitOptions& options = {});

double value(const PowerFit& fit, double x);
double slope(const PowerFit& fit, double x);

/// Throws unless the sequence satisfies the observation invariants.
void check_observations(std::span<const Observation> observations);

}  // namespace colts
