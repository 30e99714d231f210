#include <cmath>
#include <numeric>

#include "colts/error.hpp"
#include "colts/harness.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace colts;
using testing::code_of;

namespace {

constexpr double kA = 542.5451, kB = 0.3838, kC = 99.2876;

// A run observed at `positions` on the reference curve.
Run hand_run(const std::vector<std::uint64_t>& positions, std::optional<std::size_t> clevel,
             std::optional<std::size_t> pl = 3) {
  Run r;
  for (auto x : positions) {
    try {
      r.trace.extend({x, testing::curve(kA, kB, kC, static_cast<double>(x))});
    } catch (const Error&) {
    }
  }
  r.clevel = clevel;
  r.plevel = pl;
  r.wlevel = pl;
  return r;
}

ConvergenceParams scoped() {
  ConvergenceParams p;
  p.scope_end = 800000;
  return p;
}

AccuracySource reference_source(std::uint64_t words = 1170000) {
  EvaluationSpec ev;
  ev.folds = 1;
  ev.virtual_words = words;
  return AccuracySource(LearnerSpec::make_synthetic(kA, kB, kC), ev);
}

FrameConfig reference_frame() {
  FrameConfig cfg;
  cfg.params = scoped();
  cfg.competitors = {{ScheduleKind::Geometric, 0.5, std::nullopt},
                     {ScheduleKind::Colts, 0.5, std::nullopt}};
  return cfg;
}

}  // namespace

TEST_CASE("arithmetic run visits multiples of the step") {
  auto src = reference_source();
  RunOptions o;
  o.params = scoped();
  const Run r = execute_run(src, LearningScheme::baseline(5000, 5000), o, "base");
  REQUIRE(r.clevel);
  for (std::size_t l = 1; l <= r.levels(); ++l) CHECK(r.position(l) == 5000 * l);
  CHECK(r.word_targets.size() == r.levels());
  CHECK(r.name == "base");
}

TEST_CASE("frozen prediction level of the reference curve") {
  auto src = reference_source();
  RunOptions o;
  o.params = scoped();
  const Run r = execute_run(src, LearningScheme::baseline(5000, 5000), o);
  REQUIRE(r.wlevel);
  REQUIRE(r.plevel);
  CHECK(*r.wlevel == 3);
  CHECK(*r.plevel == 3);
  CHECK(r.position(3) == 15000);
  REQUIRE(r.clevel);
  CHECK(*r.clevel == 75);
  CHECK(*r.clevel_position() == 375000);
  CHECK(r.halted_at(75));
  CHECK(!r.flags.non_viable);
  CHECK(r.flags.reason.empty());
}

TEST_CASE("runs out of data without converging") {
  auto src = reference_source(60000);
  RunOptions o;
  o.params = scoped();
  const Run r = execute_run(src, LearningScheme::baseline(5000, 7000), o);
  CHECK(r.flags.exhausted);
  CHECK(r.flags.non_viable);
  CHECK(r.flags.reason == "exhausted");
  CHECK(!r.clevel);
  CHECK(r.position(r.levels()) == 60000);
}

TEST_CASE("runs past the scope end stop") {
  auto src = reference_source();
  RunOptions o;
  // 98000 is still 0.05 points short of the scope end value; 105000 lies past
  // it and is never observed.
  o.params.scope_end = 100000;
  o.params.tau = 0.01;
  const Run r = execute_run(src, LearningScheme::baseline(7000, 7000), o);
  CHECK(!r.clevel);
  CHECK(r.flags.beyond_scope);
  CHECK(r.flags.reason == "beyond_scope");
  CHECK(r.position(r.levels()) == 98000);
}

TEST_CASE("discrepancy examples") {
  std::vector<std::uint64_t> base;
  for (std::uint64_t l = 1; l <= 75; ++l) base.push_back(5000 * l);
  const Run b = hand_run(base, 75);

  CHECK(discrepancy(b, b) == 0);
  auto late = base;
  late.push_back(465000);
  CHECK(discrepancy(hand_run(late, 76), b) == 90000);
  auto early = base;
  early.resize(73);
  early.push_back(369000);
  const Run e = hand_run(early, 74);
  CHECK(discrepancy(e, b) == -6000);
  CHECK(dacsr(e, b, 5000) == 0.0);

  CHECK(code_of([&] { discrepancy(hand_run(base, std::nullopt), b); }) == ErrorCode::NoCLevel);
}

TEST_CASE("DACSR examples") {
  const Run at_plevel = hand_run({5000, 10000, 15000}, 3);
  CHECK(dacsr(at_plevel, at_plevel, 5000) == 1.0);

  const Run b = hand_run({30000, 60000, 90000, 120000, 150000, 180000}, 6);
  const Run r = hand_run({30000, 60000, 90000, 180000}, 4);
  CHECK(dacsr(r, b, 30000) == doctest::Approx(0.5));

  // delta = -eta still counts; one word further does not.
  const Run edge = hand_run({30000, 60000, 90000, 150000}, 4);
  CHECK(dacsr(edge, b, 30000) == doctest::Approx(90000.0 / 150000.0));
  CHECK(dacsr(edge, b, 29999) == 0.0);
}

TEST_CASE("ICSR against a summation") {
  const std::vector<std::uint64_t> base{5000, 10000, 15000, 20000, 25000, 30000, 35000, 40000};
  const std::vector<std::uint64_t> run{5000, 10000, 15000, 21000, 29000, 41000};
  const Run b = hand_run(base, 8);
  const Run r = hand_run(run, 6);
  const double num = 5000 + 10000 + 15000;
  const double den = 5000 + 10000 + 15000 + 21000 + 29000 + 41000;
  CHECK(icsr(r, b) == doctest::Approx(num / den));
  CHECK(icsr(b, b) == doctest::Approx(30000.0 / std::accumulate(base.begin(), base.end(), 0.0)));

  const Run at_plevel = hand_run({5000, 10000, 15000}, 3);
  CHECK(icsr(at_plevel, at_plevel) == 1.0);

  const auto m = metrics(r, b, 5000);
  CHECK(m.delta == 1000);
  CHECK(m.lcsr == doctest::Approx(m.dacsr * m.icsr));
}

TEST_CASE("frame coherence") {
  auto src = reference_source();
  const LocalFrame f = build_frame(src, reference_frame());
  REQUIRE(f.viable);
  REQUIRE(f.runs.size() == 3);
  REQUIRE(f.plevel);
  CHECK(*f.plevel == 3);
  CHECK(f.plevel_position == 15000);
  CHECK(f.step_params[0] == 5000);
  CHECK(f.runs[1].name == "geometric");
  CHECK(f.runs[2].name == "colts[0.5]");
  const auto [lo, hi] = f.tolerance_interval();
  CHECK(hi - lo == 5000);
  CHECK(hi == 375000);
  for (const Run& r : f.runs) {
    CHECK(r.wlevel == f.omega);
    CHECK(r.plevel == f.plevel);
    for (std::size_t l = 1; l <= *f.plevel; ++l) CHECK(r.position(l) == f.baseline().position(l));
  }
  for (std::size_t i = 0; i < f.runs.size(); ++i) {
    REQUIRE(f.reports[i]);
    const auto& m = *f.reports[i];
    CHECK(m.dacsr >= 0.0);
    CHECK(m.dacsr <= 1.0);
    CHECK(m.icsr > 0.0);
    CHECK(m.icsr <= 1.0);
    CHECK(m.lcsr == doctest::Approx(m.dacsr * m.icsr));
  }
  CHECK(f.reports[0]->delta == 0);
  CHECK(f.reports[0]->dacsr == doctest::Approx(15000.0 / 375000.0));
}

TEST_CASE("inflation bumps one observation per run") {
  auto src = reference_source();
  const LocalFrame f = build_frame(src, reference_frame());
  REQUIRE(f.viable);

  const LocalFrame small = inflate_frame(f, 0.001, src);
  const LocalFrame big = inflate_frame(f, 5.0, src);
  CHECK(small.inflation == 0.001);
  for (std::size_t i = 0; i < f.runs.size(); ++i) {
    const Run& orig = f.runs[i];
    const auto level = inflation_level(orig, f.baseline());
    REQUIRE(level);
    CHECK(*level > *f.plevel);
    CHECK(orig.position(*level) < std::min(*orig.clevel_position(), *f.baseline().clevel_position()));
    const double a = orig.trace.observations()[*level - 1].accuracy;
    const double cap = *orig.trace.alpha(*orig.clevel);

    CHECK(small.runs[i].inflated_level == level);
    CHECK(*small.runs[i].inflated_accuracy == doctest::Approx(1.00001 * a).epsilon(1e-14));
    CHECK(small.runs[i].trace.observations()[*level - 1].accuracy == *small.runs[i].inflated_accuracy);
    // 5% lifts any accuracy near 97 past the asymptote.
    CHECK(*big.runs[i].inflated_accuracy == cap);
  }
}

TEST_CASE("inflation needs a level past the prediction level") {
  auto src = reference_source();
  LocalFrame f;
  f.viable = true;
  f.omega = 3;
  f.plevel = 3;
  f.runs.push_back(hand_run({5000, 10000, 15000, 20000}, 4));
  CHECK(code_of([&] { inflate_frame(f, 1.0, src); }) == ErrorCode::NonViableInflation);
  CHECK(code_of([&] { inflate_frame(f, 0.0, src); }) == ErrorCode::InvalidArgument);
  f.viable = false;
  CHECK(code_of([&] { inflate_frame(f, 1.0, src); }) == ErrorCode::NonViableInflation);
}

TEST_CASE("schedule names") {
  CHECK(ScheduleSpec{ScheduleKind::Arithmetic, 0.5, std::nullopt}.name() == "arithmetic");
  CHECK(ScheduleSpec{ScheduleKind::Colts, 0.2, std::nullopt}.name() == "colts[0.2]");
  CHECK(ScheduleSpec{ScheduleKind::Geometric, 0.5, 1.05}.name() == "geometric[1.05]");
}

TEST_CASE("frames are deterministic, in parallel or not") {
  auto s1 = reference_source();
  auto s2 = reference_source();
  auto cfg = reference_frame();
  const LocalFrame a = build_frame(s1, cfg);
  cfg.parallel = false;
  const LocalFrame b = build_frame(s2, cfg);
  REQUIRE(a.runs.size() == b.runs.size());
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    CHECK(a.runs[i].trace.observations().size() == b.runs[i].trace.observations().size());
    CHECK(a.runs[i].clevel == b.runs[i].clevel);
    CHECK(a.step_params[i] == b.step_params[i]);
    CHECK(a.reports[i]->lcsr == b.reports[i]->lcsr);
  }
}
