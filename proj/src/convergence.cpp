#include "colts/convergence.hpp"

#include <cmath>

#include "colts/error.hpp"

namespace colts {

void ConvergenceParams::validate() const {
  if (!(nu > 0.0 && nu < 1.0)) throw Error(ErrorCode::InvalidArgument, "nu must lie in (0,1)");
  if (slowdown < 1) throw Error(ErrorCode::InvalidArgument, "slowdown must be >= 1");
  if (!(tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "tau must be positive");
  if (scope_end && *scope_end == 0) throw Error(ErrorCode::InvalidArgument, "scope end must be >= 1");
}

double verticality_threshold(double nu, unsigned slowdown) {
  if (!(nu > 0.0 && nu < 1.0) || slowdown < 1)
    throw Error(ErrorCode::InvalidArgument, "verticality threshold needs nu in (0,1), slowdown >= 1");
  return std::pow(nu, 1.0 / static_cast<double>(slowdown)) / (1.0 - nu);
}

std::optional<std::size_t> wlevel(const Backbone& bb, const ConvergenceParams& params) {
  const double threshold = verticality_threshold(params.nu, params.slowdown);
  const std::size_t n = bb.levels();
  const auto flat = [&](std::size_t i) {  // 0-based pair (i, i+1)
    if (!bb.alpha[i] || !bb.alpha[i + 1]) return false;
    const double dx = static_cast<double>(bb.positions[i + 1]) - static_cast<double>(bb.positions[i]);
    return std::fabs(*bb.alpha[i + 1] - *bb.alpha[i]) / dx <= threshold;
  };
  for (std::size_t w = 0; w + params.lookahead + 1 < n; ++w) {
    bool ok = true;
    for (std::size_t i = w; i <= w + params.lookahead && ok; ++i) ok = flat(i);
    if (ok) return w + 1;
  }
  return std::nullopt;
}

std::optional<std::size_t> plevel(const Backbone& bb, std::size_t omega) {
  if (omega < 1) return std::nullopt;
  for (std::size_t l = omega; l <= bb.levels(); ++l) {
    const auto& a = bb.alpha[l - 1];
    if (a && *a <= 100.0) return l;
  }
  return std::nullopt;
}

double layer(const PowerFit& trend, double x, std::optional<std::uint64_t> scope_end) {
  if (!(x > 0.0)) throw Error(ErrorCode::NonPositivePosition, "position must be positive");
  if (!scope_end) return trend.a * std::pow(x, -trend.b);
  const auto s = static_cast<double>(*scope_end);
  if (s < x) throw Error(ErrorCode::ScopeBeforeX, "scope end precedes the evaluated position");
  return std::fabs(value(trend, x) - value(trend, s));
}

}  // namespace colts
