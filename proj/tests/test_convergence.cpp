#include <random>

#include "colts/convergence.hpp"
#include "colts/trace.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace colts;
using testing::code_of;
using testing::rel_close;

namespace {

Backbone make_backbone(const std::vector<double>& alpha, std::uint64_t first = 5000,
                       std::uint64_t step = 5000) {
  Backbone b;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    b.positions.push_back(first + step * i);
    b.alpha.push_back(alpha[i]);
  }
  return b;
}

}  // namespace

TEST_CASE("verticality threshold") {
  CHECK(rel_close(verticality_threshold(2e-5, 1), 2e-5 / (1 - 2e-5), 1e-12));
  CHECK(verticality_threshold(2e-5, 1) == doctest::Approx(2.00004e-5).epsilon(1e-9));
  CHECK(verticality_threshold(2e-5, 2) == doctest::Approx(4.47223e-3).epsilon(1e-5));
  CHECK(code_of([] { verticality_threshold(0.0, 1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("working level of a constant backbone") {
  Backbone b = make_backbone({95, 95, 95, 95, 95, 95, 95, 95, 95, 95});
  b.alpha[0].reset();
  b.alpha[1].reset();
  ConvergenceParams p;
  CHECK(wlevel(b, p) == 3u);
  p.lookahead = 20;
  CHECK_FALSE(wlevel(b, p).has_value());
}

TEST_CASE("working level waits for the window") {
  // Slope 1e-3 per item until level 5, flat afterwards.
  std::vector<double> a;
  for (int i = 0; i < 5; ++i) a.push_back(90 + 5.0 * i);
  for (int i = 0; i < 8; ++i) a.push_back(110);
  ConvergenceParams p;
  CHECK(wlevel(make_backbone(a), p) == 5u);
  p.lookahead = 0;
  CHECK(wlevel(make_backbone(a), p) == 5u);
}

TEST_CASE("larger nu never delays the working level") {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> step(0.0, 0.05);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a{98.0};
    for (int i = 1; i < 40; ++i) a.push_back(a.back() + step(gen) / (1 + i));
    std::optional<std::size_t> prev;
    for (double nu : {1e-7, 1e-6, 1e-5, 2e-5, 1e-4, 1e-3}) {
      ConvergenceParams p;
      p.nu = nu;
      const auto w = wlevel(make_backbone(a), p);
      if (prev) {
        REQUIRE(w.has_value());
        CHECK(*w <= *prev);
      }
      if (w) prev = w;
    }
  }
}

TEST_CASE("prediction level") {
  CHECK(plevel(make_backbone({99, 98, 97}), 1) == 1u);
  CHECK(plevel(make_backbone({120, 101, 100.5, 99.9, 99.0}), 2) == 4u);
  CHECK_FALSE(plevel(make_backbone({101, 102}), 1).has_value());
}

TEST_CASE("layer of convergence") {
  const PowerFit f{100.0, 0.5, 99.0, 0.0};
  CHECK(layer(f, 1e4) == doctest::Approx(1.0));
  CHECK(layer(f, 1e4, 10000) == 0.0);
  for (double x : {10.0, 1e3, 5e4}) {
    CHECK(rel_close(layer(f, x), 100.0 * std::pow(x, -0.5), 1e-9));
    CHECK(layer(f, x, 800000) < layer(f, x));
  }
  CHECK(code_of([&] { layer(f, 1e4, 9999); }) == ErrorCode::ScopeBeforeX);
  CHECK(code_of([&] { layer(f, 0.0); }) == ErrorCode::NonPositivePosition);
}

TEST_CASE("halting threshold is inclusive") {
  CHECK(halted(1.27, 1.27));
  CHECK_FALSE(halted(1.27 + 1e-9, 1.27));
}

TEST_CASE("halting on a noiseless trace is upward closed") {
  LearningTrace t;
  const auto obs = testing::sample(542.5451, 0.3838, 99.2876, testing::arithmetic(5000, 5000, 80));
  for (const auto& o : obs) t.extend(o);
  for (std::optional<std::uint64_t> scope : {std::optional<std::uint64_t>{}, std::optional<std::uint64_t>{800000}}) {
    bool seen = false;
    double prev = 1e300;
    for (std::size_t l = 3; l <= t.levels(); ++l) {
      const double chi = layer(*t.trend(l), static_cast<double>(t.position(l)), scope);
      CHECK(chi < prev);
      prev = chi;
      const bool h = halted(chi, 1.0);
      if (seen) CHECK(h);
      seen = seen || h;
    }
    // Unscoped, the trend is still more than a point from its asymptote at 400000.
    CHECK(seen == scope.has_value());
  }
}

TEST_CASE("parameter validation") {
  ConvergenceParams p;
  CHECK_NOTHROW(p.validate());
  p.nu = 1.0;
  CHECK(code_of([&] { p.validate(); }) == ErrorCode::InvalidArgument);
  p = {};
  p.slowdown = 0;
  CHECK(code_of([&] { p.validate(); }) == ErrorCode::InvalidArgument);
  p = {};
  p.tau = 0.0;
  CHECK(code_of([&] { p.validate(); }) == ErrorCode::InvalidArgument);
}
