#include "colts/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "colts/error.hpp"
#include "colts/scheme.hpp"

namespace colts {

double mu(const PowerFit& fit, double x) {
  const double s = slope(fit, x);
  if (!(s > 0.0)) throw Error(ErrorCode::NonPositiveSlope, "trend slope is not positive");
  // (c - v(x)) / v'(x) reduces to x / b, free of the cancellation in c - v(x).
  return x / fit.b;
}

std::uint64_t colts_step_from_mu(double mu_value, double port) {
  if (!(port > 0.0 && port <= 1.0)) throw Error(ErrorCode::PortOutOfRange, "PORT out of (0,1]");
  if (!(mu_value > 0.0) || !std::isfinite(mu_value))
    throw Error(ErrorCode::InvalidArgument, "mu must be positive and finite");
  return ceil_count(port * mu_value);
}

std::uint64_t colts_step(const PowerFit& fit, double x, double port) {
  return colts_step_from_mu(mu(fit, x), port);
}

double port_of(double step, double mu_value) {
  if (!(step >= 1.0) || !(mu_value > 0.0))
    throw Error(ErrorCode::InvalidArgument, "port_of needs step >= 1 and mu > 0");
  return step >= mu_value ? 1.0 : step / mu_value;
}

double tune_geometric(std::uint64_t eta, std::uint64_t plevel_position) {
  if (eta == 0 || plevel_position == 0)
    throw Error(ErrorCode::InvalidArgument, "tune_geometric needs positive inputs");
  const auto p = static_cast<double>(plevel_position);
  return (static_cast<double>(eta) + p) / p;
}

double tune_port(double psi, std::uint64_t eta, std::uint64_t step_at_plevel,
                 std::uint64_t remaining) {
  if (!(psi > 0.0 && psi <= 1.0)) throw Error(ErrorCode::PortOutOfRange, "PORT out of (0,1]");
  if (eta == 0 || step_at_plevel == 0 || remaining == 0)
    throw Error(ErrorCode::InvalidArgument, "tune_port needs positive inputs");
  const auto denom = static_cast<double>(std::min(step_at_plevel, remaining));
  return std::min(static_cast<double>(eta) / denom, 1.0);
}

}  // namespace colts
