#include "colts/pattern.hpp"

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "colts/error.hpp"

namespace colts {

namespace {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Parameters live in (log A, log b, c) so that every iterate is a valid curve,
// with positions measured from their log-mean: y = c - A (x / x_ref)^-b and
// a = A x_ref^b.
struct Problem {
  std::vector<double> x;
  std::vector<double> log_x;  // log(x / x_ref)
  double log_ref = 0.0;
  std::vector<double> y;
  std::optional<double> anchor;

  std::size_t rows() const { return y.size() + (anchor ? 1 : 0); }

  double ssr(const Vec3& p, Eigen::VectorXd* r, Eigen::MatrixXd* jac) const {
    const double a = std::exp(p[0]);
    const double b = std::exp(p[1]);
    const double c = p[2];
    double total = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double decay = std::exp(-b * log_x[i]);
      const double res = c - a * decay - y[i];
      total += res * res;
      if (r) (*r)[static_cast<Eigen::Index>(i)] = res;
      if (jac) {
        const auto row = static_cast<Eigen::Index>(i);
        (*jac)(row, 0) = -a * decay;
        (*jac)(row, 1) = a * decay * log_x[i] * b;
        (*jac)(row, 2) = 1.0;
      }
    }
    if (anchor) {
      const double res = c - *anchor;
      total += res * res;
      const auto row = static_cast<Eigen::Index>(y.size());
      if (r) (*r)[row] = res;
      if (jac) {
        (*jac)(row, 0) = 0.0;
        (*jac)(row, 1) = 0.0;
        (*jac)(row, 2) = 1.0;
      }
    }
    return total;
  }
};

Vec3 cold_start(const Problem& pb) {
  const double c0 = *std::max_element(pb.y.begin(), pb.y.end()) + 0.5;
  // log(c0 - y) = log A - b log(x / x_ref)
  const auto n = static_cast<double>(pb.y.size());
  double sx = 0, sz = 0, sxx = 0, sxz = 0;
  for (std::size_t i = 0; i < pb.y.size(); ++i) {
    const double lx = pb.log_x[i];
    const double z = std::log(c0 - pb.y[i]);
    sx += lx;
    sz += z;
    sxx += lx * lx;
    sxz += lx * z;
  }
  const double denom = n * sxx - sx * sx;
  double b0 = 0.5;
  double log_a0 = sz / n + b0 * sx / n;
  if (denom > 0.0) {
    const double s = (n * sxz - sx * sz) / denom;
    if (s < 0.0) {
      b0 = -s;
      log_a0 = (sz - s * sx) / n;
    }
  }
  return {log_a0, std::log(b0), c0};
}

// For a fixed exponent the model is linear in (A, c). Returns the cost of the
// best admissible (A >= 0) linear solution and writes it to `out`.
double profile(const Problem& pb, double log_b, Vec3* out) {
  const double b = std::exp(log_b);
  const auto n = static_cast<Eigen::Index>(pb.rows());
  Eigen::MatrixXd m(n, 2);
  Eigen::VectorXd rhs(n);
  for (std::size_t i = 0; i < pb.y.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    m(row, 0) = -std::exp(-b * pb.log_x[i]);
    m(row, 1) = 1.0;
    rhs[row] = pb.y[i];
  }
  if (pb.anchor) {
    m(n - 1, 0) = 0.0;
    m(n - 1, 1) = 1.0;
    rhs[n - 1] = *pb.anchor;
  }
  Eigen::Vector2d sol = m.colPivHouseholderQr().solve(rhs);
  if (!(sol[0] > 0.0)) sol = {0.0, rhs.mean()};
  if (out) *out = {sol[0] > 0.0 ? std::log(sol[0]) : -std::numeric_limits<double>::infinity(),
                   log_b, sol[1]};
  return (m * sol - rhs).squaredNorm();
}

// Grid over the exponent, then Brent around the best grid point.
std::optional<Vec3> profiled_start(const Problem& pb) {
  constexpr int kGrid = 160;
  const double lo = std::log(1e-4), hi = std::log(20.0);
  auto at = [&](int k) { return lo + (hi - lo) * k / kGrid; };
  int best = -1;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= kGrid; ++k) {
    const double cost = profile(pb, at(k), nullptr);
    if (cost < best_cost) {
      best_cost = cost;
      best = k;
    }
  }
  if (best < 0) return std::nullopt;
  const auto [v, cost] = boost::math::tools::brent_find_minima(
      [&](double lb) { return profile(pb, lb, nullptr); }, at(std::max(best - 1, 0)),
      at(std::min(best + 1, kGrid)), std::numeric_limits<double>::digits);
  (void)cost;
  Vec3 p;
  profile(pb, v, &p);
  if (!std::isfinite(p[0])) return std::nullopt;
  return p;
}

bool finite(const Vec3& p) {
  return std::isfinite(p[0]) && std::isfinite(p[1]) && std::isfinite(p[2]) &&
         std::isfinite(std::exp(p[0])) && std::exp(p[1]) > 0.0 &&
         std::isfinite(std::exp(p[1]));
}

std::optional<PowerFit> to_fit(const Problem& pb, const Vec3& p) {
  if (!finite(p)) return std::nullopt;
  const double b = std::exp(p[1]);
  const double a = std::exp(p[0] + b * pb.log_ref);
  if (!std::isfinite(a) || !(a > 0.0)) return std::nullopt;
  return PowerFit{a, b, p[2], std::sqrt(pb.ssr(p, nullptr, nullptr))};
}

std::optional<PowerFit> levenberg_marquardt(const Problem& pb, Vec3 p,
                                            const FitOptions& opt) {
  const auto m = static_cast<Eigen::Index>(pb.rows());
  Eigen::VectorXd r(m), r_trial(m);
  Eigen::MatrixXd jac(m, 3);
  double cost = pb.ssr(p, &r, &jac);
  if (!std::isfinite(cost)) return std::nullopt;

  // Scale of the data, used to recognise an exact fit.
  double scale = 0.0;
  for (double v : pb.y) scale += v * v;
  const double exact = 1e-28 * std::max(scale, 1.0);

  double lambda = 1e-3;
  bool converged = cost <= exact;
  for (int it = 0; it < opt.max_iterations && !converged; ++it) {
    const Mat3 jtj = jac.transpose() * jac;
    const Vec3 grad = jac.transpose() * r;
    Mat3 damped = jtj;
    const double floor = 1e-12 * std::max(jtj.diagonal().maxCoeff(), 1e-300);
    for (int k = 0; k < 3; ++k) damped(k, k) += lambda * std::max(jtj(k, k), floor);

    const Vec3 step = damped.ldlt().solve(-grad);
    const double predicted = -(2.0 * grad.dot(step) + step.dot(jtj * step));
    const Vec3 trial = p + step;
    const double trial_cost =
        finite(trial) ? pb.ssr(trial, &r_trial, nullptr) : std::numeric_limits<double>::infinity();

    if (std::isfinite(trial_cost) && trial_cost < cost) {
      const double decrease = (cost - trial_cost) / cost;
      p = trial;
      cost = pb.ssr(p, &r, &jac);
      lambda = std::max(lambda * 0.1, 1e-15);
      if (decrease < opt.relative_tolerance || cost <= exact) converged = true;
    } else {
      // Nothing left to gain within rounding: the current point is the minimum.
      if (!(predicted > opt.relative_tolerance * 1e-2 * cost)) {
        converged = true;
        break;
      }
      lambda *= 10.0;
      if (lambda > 1e20) break;
    }
  }
  if (!converged) return std::nullopt;
  return to_fit(pb, p);
}

}  // namespace

void check_observations(std::span<const Observation> observations) {
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const auto& o = observations[i];
    if (o.position == 0)
      throw Error(ErrorCode::NonPositivePosition, "observation position must be >= 1");
    if (!(o.accuracy > 0.0 && o.accuracy <= 100.0))
      throw Error(ErrorCode::InvalidArgument,
                  "observation accuracy " + std::to_string(o.accuracy) + " outside (0, 100]");
    if (i > 0 && o.position <= observations[i - 1].position)
      throw Error(ErrorCode::NonMonotonePositions,
                  "observation positions must be strictly increasing");
  }
}

PowerFit fit(std::span<const Observation> observations, const FitOptions& options) {
  if (observations.size() < 3)
    throw Error(ErrorCode::FewerThanThreeObservations,
                "a learning trend needs at least three observations");
  check_observations(observations);

  Problem pb;
  pb.anchor = options.anchor;
  for (const auto& o : observations) {
    pb.x.push_back(static_cast<double>(o.position));
    pb.log_x.push_back(std::log(static_cast<double>(o.position)));
    pb.y.push_back(o.accuracy);
  }
  for (double lx : pb.log_x) pb.log_ref += lx;
  pb.log_ref /= static_cast<double>(pb.log_x.size());
  for (double& lx : pb.log_x) lx -= pb.log_ref;
  const bool constant = std::all_of(pb.y.begin(), pb.y.end(),
                                    [&](double v) { return v == pb.y.front(); });
  if (constant)
    throw Error(ErrorCode::FitDiverged, "constant accuracies admit no increasing concave trend");

  // Candidates: the profiled start, the previous trend, then the plain
  // log-log start. The lowest converged cost wins; ties keep the earlier one.
  std::optional<PowerFit> best;
  auto consider = [&](const std::optional<PowerFit>& r) {
    if (r && (!best || r->residual_norm < best->residual_norm)) best = r;
  };
  if (const auto start = profiled_start(pb)) {
    auto r = levenberg_marquardt(pb, *start, options);
    if (!r) r = to_fit(pb, *start);
    consider(r);
  }
  if (options.warm_start) {
    const auto& w = *options.warm_start;
    if (w.a > 0.0 && w.b > 0.0 && std::isfinite(w.c)) {
      const Vec3 start{std::log(w.a) - w.b * pb.log_ref, std::log(w.b), w.c};
      consider(levenberg_marquardt(pb, start, options));
    }
  }
  if (!best) consider(levenberg_marquardt(pb, cold_start(pb), options));
  if (best) return *best;
  throw Error(ErrorCode::FitDiverged, "damped least squares did not converge");
}

double value(const PowerFit& f, double x) {
  if (!(x > 0.0)) throw Error(ErrorCode::NonPositivePosition, "position must be positive");
  return f.c - f.a * std::pow(x, -f.b);
}

double slope(const PowerFit& f, double x) {
  if (!(x > 0.0)) throw Error(ErrorCode::NonPositivePosition, "position must be positive");
  return f.a * f.b * std::pow(x, -(f.b + 1.0));
}

}  // namespace colts
