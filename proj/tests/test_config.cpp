#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "colts/config.hpp"
#include "colts/error.hpp"
#include "colts/experiment.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace colts;
using testing::code_of;

namespace {

bool mentions(const std::vector<std::string>& d, const std::string& needle) {
  for (const auto& s : d)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

std::filesystem::path write_corpus_file(const std::string& name, std::size_t sentences, std::size_t len) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  for (std::size_t s = 0; s < sentences; ++s) {
    for (std::size_t i = 0; i < len; ++i) out << "w" << (s * len + i) % 50 << "\tT" << i % 3 << "\n";
    out << "\n";
  }
  return path;
}

}  // namespace

TEST_CASE("defaults are clean") {
  ExperimentConfig c;
  CHECK(diagnose(c).empty());
  CHECK(c.get("kernel") == "5000");
  CHECK(c.get("schedules") == "arithmetic,geometric,colts");
  CHECK(c.get("psi") == "0.2,0.5,0.8");
  CHECK(c.get("anchoring") == "true");
}

TEST_CASE("every key round-trips through its text form") {
  ExperimentConfig c;
  for (const auto& k : ExperimentConfig::keys()) {
    ExperimentConfig d;
    d.set(k, c.get(k));
    CHECK(d.get(k) == c.get(k));
  }
}

TEST_CASE("setters reject malformed values") {
  ExperimentConfig c;
  CHECK(code_of([&] { c.set("kernel", "-5"); }) == ErrorCode::Config);
  CHECK(code_of([&] { c.set("kernel", "12x"); }) == ErrorCode::Config);
  CHECK(code_of([&] { c.set("tau", "abc"); }) == ErrorCode::Config);
  CHECK(code_of([&] { c.set("anchoring", "maybe"); }) == ErrorCode::Config);
  CHECK(code_of([&] { c.set("no_such_key", "1"); }) == ErrorCode::Config);
  c.set("anchoring", "off");
  CHECK(!c.anchoring);
  c.set(" psi ", " 0.3 , 0.7 ");
  CHECK(c.psi == std::vector<double>{0.3, 0.7});
}

TEST_CASE("config files") {
  ExperimentConfig c;
  std::istringstream in("# comment\nkernel = 10000\n\neta=2500  # trailing\nschedules = arithmetic, colts\n");
  c.load_stream(in, "cfg");
  CHECK(c.kernel == 10000);
  CHECK(c.eta == 2500);
  CHECK(c.schedules == std::vector<std::string>{"arithmetic", "colts"});

  std::istringstream bad("kernel = 1\nnonsense\n");
  try {
    c.load_stream(bad, "cfg");
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
    CHECK(std::string(e.what()).find("cfg:2") != std::string::npos);
  }
  CHECK(code_of([&] { c.load_file("/nonexistent/colts.cfg"); }) == ErrorCode::Io);
}

TEST_CASE("environment overrides") {
  ::setenv("COLTS_ETA", "1234", 1);
  ::setenv("COLTS_SCRAMBLE", "yes", 1);
  ExperimentConfig c;
  c.apply_env();
  ::unsetenv("COLTS_ETA");
  ::unsetenv("COLTS_SCRAMBLE");
  CHECK(c.eta == 1234);
  CHECK(c.scramble);

  ::setenv("COLTS_TAU", "x", 1);
  CHECK(code_of([&] { c.apply_env(); }) == ErrorCode::Config);
  ::unsetenv("COLTS_TAU");
}

TEST_CASE("diagnostics") {
  ExperimentConfig c;
  c.psi = {0.5, 1.5};
  CHECK(mentions(diagnose(c), "PORT out of (0,1]: psi=1.5"));

  c = {};
  c.kernel = 2'000'000;
  CHECK(mentions(diagnose(c), "kernel exceeds corpus"));

  c = {};
  c.nu = 1.0;
  CHECK(mentions(diagnose(c), "nu out of (0,1)"));

  c = {};
  c.schedules = {"fibonacci"};
  CHECK(mentions(diagnose(c), "unknown schedule 'fibonacci'"));

  c = {};
  c.learner = "external";
  c.corpus = write_corpus_file("colts-diag.tsv", 30, 10).string();
  c.command = "tagger {train}";
  CHECK(mentions(diagnose(c), "must contain {train} and {test}"));

  c = {};
  c.learner = "baseline";
  c.corpus = write_corpus_file("colts-diag.tsv", 30, 10).string();
  c.kernel = 100;
  c.folds = 40;
  CHECK(mentions(diagnose(c), "k-fold infeasible"));
  c.folds = 2;
  c.kernel = 200;
  CHECK(mentions(diagnose(c), "fold training sets hold only 150 words"));
  c.kernel = 300;
  CHECK(mentions(diagnose(c), "kernel exceeds corpus (300 >= 300 words)"));
  c.kernel = 100;
  CHECK(diagnose(c).empty());

  c.corpus = "/nonexistent/corpus.tsv";
  CHECK(mentions(diagnose(c), "corpus:"));
}

TEST_CASE("frame assembly") {
  ExperimentConfig c;
  const auto f = c.frame();
  REQUIRE(f.competitors.size() == 4);
  CHECK(f.competitors[0].kind == ScheduleKind::Geometric);
  CHECK(f.competitors[1].name() == "colts[0.2]");
  CHECK(f.competitors[3].name() == "colts[0.8]");
  CHECK(f.params.scope_end == 800000);
  c.scope = 0;
  c.threads = 1;
  CHECK(!c.frame().params.scope_end);
  CHECK(!c.frame().parallel);
}

TEST_CASE("run stems") {
  CHECK(run_stem("colts[0.5]") == "colts_0.5");
  CHECK(run_stem("arithmetic") == "arithmetic");
}

TEST_CASE("iteration log columns and audit") {
  ExperimentConfig c;
  c.folds = 1;
  c.inflate = 0;
  c.schedules = {"arithmetic"};
  const auto result = run_experiment(c);
  const Run& b = result.frame.baseline();
  std::ostringstream out;
  write_iteration_csv(out, b, c.convergence());
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "level,position,accuracy,fit_a,fit_b,fit_c,alpha,anchored_alpha,mu,step,port,chi,halted");
  std::size_t rows = 0;
  std::uint64_t last = 0;
  std::string halted_row;
  while (std::getline(in, line)) {
    ++rows;
    std::stringstream ss(line);
    std::string level, pos;
    std::getline(ss, level, ',');
    std::getline(ss, pos, ',');
    CHECK(std::stoul(level) == rows);
    last = std::stoull(pos);
    if (line.back() == '1') halted_row = level;
  }
  CHECK(rows == b.levels());
  CHECK(last == *b.clevel_position());
  CHECK(halted_row == std::to_string(*b.clevel));
}
