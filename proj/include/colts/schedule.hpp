#pragma once

// Step sizes: the tangent/asymptote distance, the PORT-driven COLTS step and
// the tuning rules that align competitor schedules with the baseline.

#include <cstdint>

#include "colts/pattern.hpp"

namespace colts {

struct StepDecision {
  std::size_t level = 0;   // level being reached
  std::uint64_t step = 0;  // items added to reach it
  double mu = 0.0;         // COLTS only
  double port = 0.0;       // COLTS only
};

/// Distance from x to where the tangent at x meets the asymptote. For the
/// power family this is x / b.
double mu(const PowerFit& fit, double x);

/// ceil(port * mu), never below one item.
std::uint64_t colts_step(const PowerFit& fit, double x, double port);
std::uint64_t colts_step_from_mu(double mu_value, double port);

/// Probability of relevant training for a step of `step` items.
double port_of(double step, double mu_value);

/// Common ratio whose first step out of the plevel position equals eta.
double tune_geometric(std::uint64_t eta, std::uint64_t plevel_position);

/// PORT whose step out of the plevel matches eta for trial PORT psi, capped by
/// the data left after the plevel.
double tune_port(double psi, std::uint64_t eta, std::uint64_t step_at_plevel,
                 std::uint64_t remaining);

}  // namespace colts
