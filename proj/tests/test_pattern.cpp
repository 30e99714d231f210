#include <algorithm>
#include <limits>

#include "colts/pattern.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace colts;
using testing::code_of;
using testing::rel_close;

TEST_CASE("value and asymptote of a power curve") {
  const PowerFit f{100.0, 1.0, 99.0, 0.0};
  CHECK(value(f, 100.0) == doctest::Approx(98.0));
  const PowerFit g{542.5451, 0.3838, 99.2876, 0.0};
  CHECK(g.asymptote() == 99.2876);
  CHECK(value(g, 1e30) == doctest::Approx(99.2876).epsilon(1e-9));
  double prev = value(g, 1.0);
  for (double x = 2.0; x < 1e7; x *= 1.7) {
    const double v = value(g, x);
    CHECK(v > prev);
    CHECK(v < g.c);
    prev = v;
  }
  CHECK(code_of([&] { value(g, 0.0); }) == ErrorCode::NonPositivePosition);
}

TEST_CASE("slope is the derivative and decreases") {
  const PowerFit f{100.0, 1.0, 99.0, 0.0};
  CHECK(slope(f, 10.0) == doctest::Approx(1.0));
  const PowerFit g{542.5451, 0.3838, 99.2876, 0.0};
  const double x = 1e4, h = 1.0;
  const double fd = (value(g, x + h) - value(g, x - h)) / (2 * h);
  CHECK(rel_close(slope(g, x), fd, 1e-6));
  double prev = slope(g, 1.0);
  for (double y = 2.0; y < 1e7; y *= 1.9) {
    CHECK(slope(g, y) < prev);
    CHECK(slope(g, y) > 0.0);
    prev = slope(g, y);
  }
  CHECK(code_of([&] { slope(g, -1.0); }) == ErrorCode::NonPositivePosition);
}

TEST_CASE("noiseless points recover the generating curve") {
  const auto obs = testing::sample(542.5451, 0.3838, 99.2876, testing::arithmetic(5000, 5000, 160));
  const auto f = fit(obs);
  CHECK(rel_close(f.a, 542.5451, 1e-4));
  CHECK(rel_close(f.b, 0.3838, 1e-4));
  CHECK(rel_close(f.c, 99.2876, 1e-4));
}

TEST_CASE("three exact points are interpolated") {
  const auto obs = testing::sample(100.0, 0.5, 99.0, {100, 400, 2500});
  const auto f = fit(obs);
  CHECK(f.residual_norm < 1e-6);
  CHECK(rel_close(f.a, 100.0, 1e-4));
  CHECK(rel_close(f.b, 0.5, 1e-4));
  CHECK(rel_close(f.c, 99.0, 1e-4));
}

TEST_CASE("narrow position ranges still fit") {
  for (std::uint64_t first : {80000ull, 230000ull, 600000ull}) {
    const auto obs = testing::sample(542.5451, 0.3838, 99.2876, {first, first + 5000, first + 10000});
    const auto f = fit(obs);
    CHECK(rel_close(f.c, 99.2876, 1e-6));
  }
}

namespace {

// Anchored cost over a (b, c) grid with the optimal a in closed form.
struct GridOptimum {
  double cost, a, b, c;
};

GridOptimum grid_anchor_oracle(const std::vector<Observation>& obs, double anchor) {
  // Fine grid over b; (a, c) from the 2x2 normal equations with the anchor row.
  GridOptimum best{std::numeric_limits<double>::infinity(), 0, 0, 0};
  for (int i = 0; i <= 40000; ++i) {
    const double b = 0.3 + i * 1e-5;
    double suu = 0, su = 0, suy = 0, sy = anchor;
    const double n = static_cast<double>(obs.size()) + 1.0;
    for (const auto& o : obs) {
      const double u = std::pow(static_cast<double>(o.position), -b);
      suu += u * u;
      su += u;
      suy += u * o.accuracy;
      sy += o.accuracy;
    }
    // Unknowns (a, c); rows are -u a + c = y, and c = anchor.
    const double det = suu * n - su * su;
    const double a = (su * sy - n * suy) / det;
    const double c = (suu * sy - su * suy) / det;
    if (!(a >= 0.0)) continue;
    double cost = (c - anchor) * (c - anchor);
    for (const auto& o : obs) {
      const double r = c - a * std::pow(static_cast<double>(o.position), -b) - o.accuracy;
      cost += r * r;
    }
    if (cost < best.cost) best = {cost, a, b, c};
  }
  return best;
}

}  // namespace

TEST_CASE("an anchor pulls the asymptote") {
  const auto obs = testing::sample(100.0, 0.5, 99.0, {100, 400, 900, 1600});
  FitOptions opt;
  opt.anchor = 99.0;
  const auto f = fit(obs, opt);
  CHECK(std::fabs(f.c - 99.0) < 1e-3);
  const auto oracle = grid_anchor_oracle(obs, 99.0);
  CHECK(std::fabs(f.c - oracle.c) < 1e-3);
  CHECK(f.residual_norm * f.residual_norm <= oracle.cost + 1e-12);

  // A displaced anchor is honoured as one extra residual of unit weight.
  opt.anchor = 99.05;
  const auto g = fit(obs, opt);
  const auto o2 = grid_anchor_oracle(obs, 99.05);
  CHECK(std::fabs(g.c - o2.c) < 1e-3);
  CHECK(g.residual_norm * g.residual_norm <= o2.cost + 1e-9);
}

TEST_CASE("fit rejects malformed inputs") {
  const auto three = testing::sample(100.0, 0.5, 99.0, {100, 400, 900});
  CHECK(code_of([&] { fit(std::span(three).first(2)); }) == ErrorCode::FewerThanThreeObservations);
  auto swapped = three;
  std::swap(swapped[0], swapped[1]);
  CHECK(code_of([&] { fit(swapped); }) == ErrorCode::NonMonotonePositions);
  std::vector<Observation> flat{{1, 90.0}, {2, 90.0}, {3, 90.0}};
  CHECK(code_of([&] { fit(flat); }) == ErrorCode::FitDiverged);
  std::vector<Observation> zero{{0, 80.0}, {2, 85.0}, {3, 90.0}};
  CHECK(code_of([&] { fit(zero); }) == ErrorCode::NonPositivePosition);
  std::vector<Observation> over{{1, 80.0}, {2, 85.0}, {3, 100.5}};
  CHECK(code_of([&] { fit(over); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("fits stay positive and are idempotent") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto obs = testing::sample(300.0 + 10.0 * seed, 0.3 + 0.01 * seed, 97.0,
                                     testing::arithmetic(2000, 3000, 30), 0.3, seed);
    PowerFit f;
    try {
      f = fit(obs);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::FitDiverged);
      continue;
    }
    CHECK(f.a > 0.0);
    CHECK(f.b > 0.0);

    std::vector<Observation> regen;
    for (const auto& o : obs) regen.push_back({o.position, value(f, static_cast<double>(o.position))});
    const auto g = fit(regen);
    CHECK(rel_close(g.a, f.a, 1e-6));
    CHECK(rel_close(g.b, f.b, 1e-6));
    CHECK(rel_close(g.c, f.c, 1e-6));
  }
}

TEST_CASE("bounded noise keeps the asymptote close") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto obs = testing::sample(542.5451, 0.3838, 99.2876,
                                     testing::arithmetic(5000, 5000, 120), 0.1, seed);
    CHECK(std::fabs(fit(obs).c - 99.2876) < 0.5);
  }
}

TEST_CASE("anchoring at the true asymptote helps in most cases") {
  int better = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto obs = testing::sample(542.5451, 0.3838, 99.2876,
                                     testing::arithmetic(5000, 5000, 25), 0.2, 1000 + seed);
    FitOptions anchored;
    anchored.anchor = 99.2876;
    const double plain = std::fabs(fit(obs).c - 99.2876);
    const double with = std::fabs(fit(obs, anchored).c - 99.2876);
    better += with <= plain;
    ++total;
  }
  CHECK(2 * better > total);
}

TEST_CASE("fitting is deterministic") {
  const auto obs = testing::sample(542.5451, 0.3838, 99.2876, testing::arithmetic(5000, 5000, 30), 0.2, 7);
  const auto f = fit(obs);
  const auto g = fit(obs);
  CHECK(f.a == g.a);
  CHECK(f.b == g.b);
  CHECK(f.c == g.c);
}
