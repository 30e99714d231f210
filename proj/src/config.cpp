#include "colts/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "colts/error.hpp"

namespace colts {

namespace {

std::string trim(std::string s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& value, const char* what) {
  throw Error(ErrorCode::Config, key + ": '" + value + "' is not " + what);
}

template <class T>
T parse_int(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  T out{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size()) bad(key, value, "a non-negative integer");
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out))
    bad(key, value, "a number");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  std::string v = trim(value);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  bad(key, value, "a boolean");
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Shortest form that round-trips.
  for (int p = 1; p <= 17; ++p) {
    char s[32];
    std::snprintf(s, sizeof s, "%.*g", p, v);
    if (std::strtod(s, nullptr) == v) return s;
  }
  return buf;
}

struct Field {
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define COLTS_STR(name)                                                   \
  {#name, {[](ExperimentConfig& c, const std::string& v) { c.name = trim(v); }, \
           [](const ExperimentConfig& c) { return c.name; }}}
#define COLTS_U64(name)                                                                   \
  {#name, {[](ExperimentConfig& c, const std::string& v) {                                \
             c.name = parse_int<std::uint64_t>(#name, v);                                 \
           },                                                                             \
           [](const ExperimentConfig& c) { return std::to_string(c.name); }}}
#define COLTS_UINT(name)                                                                  \
  {#name, {[](ExperimentConfig& c, const std::string& v) { c.name = parse_int<unsigned>(#name, v); }, \
           [](const ExperimentConfig& c) { return std::to_string(c.name); }}}
#define COLTS_DBL(name)                                                                   \
  {#name, {[](ExperimentConfig& c, const std::string& v) { c.name = parse_double(#name, v); }, \
           [](const ExperimentConfig& c) { return num(c.name); }}}
#define COLTS_BOOL(name)                                                                  \
  {#name, {[](ExperimentConfig& c, const std::string& v) { c.name = parse_bool(#name, v); }, \
           [](const ExperimentConfig& c) { return std::string(c.name ? "true" : "false"); }}}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = {
      COLTS_STR(learner),
      COLTS_DBL(synthetic_a),
      COLTS_DBL(synthetic_b),
      COLTS_DBL(synthetic_c),
      COLTS_DBL(noise),
      COLTS_STR(corpus),
      COLTS_STR(heldout),
      COLTS_STR(command),
      COLTS_BOOL(scramble),
      COLTS_U64(kernel),
      COLTS_U64(eta),
      COLTS_DBL(nu),
      COLTS_UINT(varsigma),
      COLTS_UINT(lambda),
      COLTS_DBL(tau),
      COLTS_U64(scope),
      COLTS_BOOL(anchoring),
      {"schedules",
       {[](ExperimentConfig& c, const std::string& v) { c.schedules = split_list(v); },
        [](const ExperimentConfig& c) {
          std::string s;
          for (const auto& x : c.schedules) s += (s.empty() ? "" : ",") + x;
          return s;
        }}},
      {"psi",
       {[](ExperimentConfig& c, const std::string& v) {
          c.psi.clear();
          for (const auto& x : split_list(v)) c.psi.push_back(parse_double("psi", x));
        },
        [](const ExperimentConfig& c) {
          std::string s;
          for (double x : c.psi) s += (s.empty() ? "" : ",") + num(x);
          return s;
        }}},
      COLTS_DBL(inflate),
      COLTS_UINT(folds),
      COLTS_DBL(heldout_fraction),
      COLTS_U64(corpus_words),
      COLTS_U64(seed),
      COLTS_UINT(threads),
      COLTS_STR(out),
  };
  return table;
}

#undef COLTS_STR
#undef COLTS_U64
#undef COLTS_UINT
#undef COLTS_DBL
#undef COLTS_BOOL

const Field& field(const std::string& key) {
  const auto it = fields().find(key);
  if (it == fields().end()) throw Error(ErrorCode::Config, "unknown configuration key '" + key + "'");
  return it->second;
}

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  field(trim(key)).set(*this, value);
}

std::string ExperimentConfig::get(const std::string& key) const { return field(trim(key)).get(*this); }

const std::vector<std::string>& ExperimentConfig::keys() {
  static const std::vector<std::string> out = [] {
    std::vector<std::string> k;
    for (const auto& [name, f] : fields()) k.push_back(name);
    return k;
  }();
  return out;
}

void ExperimentConfig::load_stream(std::istream& in, const std::string& source_name) {
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::Config,
                  source_name + ":" + std::to_string(n) + ": expected 'key = value'");
    try {
      set(line.substr(0, eq), line.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(ErrorCode::Config, source_name + ":" + std::to_string(n) + ": " + e.what());
    }
  }
}

void ExperimentConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config file " + path.string());
  load_stream(in, path.string());
}

void ExperimentConfig::apply_env() {
  for (const auto& key : keys()) {
    std::string var = "COLTS_";
    for (char ch : key) var += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (const char* v = std::getenv(var.c_str())) {
      try {
        set(key, v);
      } catch (const Error& e) {
        throw Error(ErrorCode::Config, var + ": " + e.what());
      }
    }
  }
}

ConvergenceParams ExperimentConfig::convergence() const {
  ConvergenceParams p;
  p.nu = nu;
  p.slowdown = varsigma;
  p.lookahead = lambda;
  p.tau = tau;
  if (scope > 0) p.scope_end = scope;
  return p;
}

LearnerSpec ExperimentConfig::learner_spec() const {
  if (learner == "synthetic")
    return LearnerSpec::make_synthetic(synthetic_a, synthetic_b, synthetic_c, noise, seed);
  if (learner == "baseline") return LearnerSpec::make_baseline_tagger();
  if (learner == "external") return LearnerSpec::make_external(command);
  throw Error(ErrorCode::Config, "unknown learner '" + learner + "'");
}

EvaluationSpec ExperimentConfig::evaluation() const {
  EvaluationSpec e;
  e.folds = folds;
  e.heldout_fraction = heldout_fraction;
  e.seed = seed;
  e.virtual_words = corpus_words;
  e.threads = threads;
  return e;
}

FrameConfig ExperimentConfig::frame() const {
  FrameConfig f;
  f.kernel = kernel;
  f.eta = eta;
  f.params = convergence();
  f.anchoring = anchoring;
  f.parallel = threads != 1;
  for (const auto& s : schedules) {
    if (s == "arithmetic") continue;  // the baseline is always present
    if (s == "geometric") {
      f.competitors.push_back({ScheduleKind::Geometric, 0.5, std::nullopt});
    } else if (s == "colts") {
      for (double p : psi) f.competitors.push_back({ScheduleKind::Colts, p, std::nullopt});
    } else {
      throw Error(ErrorCode::Config, "unknown schedule '" + s + "'");
    }
  }
  return f;
}

std::vector<std::string> diagnose(const ExperimentConfig& c) {
  std::vector<std::string> d;
  auto add = [&](std::string s) { d.push_back(std::move(s)); };
  auto str = [](double v) { return num(v); };

  const bool synthetic = c.learner == "synthetic";
  if (!synthetic && c.learner != "baseline" && c.learner != "external")
    add("unknown learner '" + c.learner + "' (synthetic, baseline or external)");
  if (synthetic) {
    if (!(c.synthetic_a > 0.0)) add("synthetic_a must be positive");
    if (!(c.synthetic_b > 0.0)) add("synthetic_b must be positive");
    if (!(c.noise >= 0.0)) add("noise must be non-negative");
  } else if (c.corpus.empty()) {
    add("learner '" + c.learner + "' needs a corpus");
  }
  if (c.learner == "external" &&
      (c.command.find("{train}") == std::string::npos || c.command.find("{test}") == std::string::npos))
    add("external command must contain {train} and {test}");

  if (c.kernel == 0) add("kernel must be at least 1");
  if (c.eta == 0) add("eta must be at least 1");
  if (!(c.nu > 0.0 && c.nu < 1.0)) add("nu out of (0,1): " + str(c.nu));
  if (c.varsigma == 0) add("varsigma must be at least 1");
  if (!(c.tau > 0.0)) add("tau must be positive");
  if (c.scope > 0 && c.scope <= c.kernel) add("scope end does not follow the kernel");
  for (const auto& s : c.schedules)
    if (s != "arithmetic" && s != "geometric" && s != "colts") add("unknown schedule '" + s + "'");
  const bool colts = std::find(c.schedules.begin(), c.schedules.end(), "colts") != c.schedules.end();
  if (colts && c.psi.empty()) add("colts schedule needs at least one psi");
  for (double p : c.psi)
    if (!(p > 0.0 && p <= 1.0)) add("PORT out of (0,1]: psi=" + str(p));
  if (!(c.inflate >= 0.0 && c.inflate <= 100.0)) add("inflate out of [0,100]: " + str(c.inflate));
  if (c.folds == 0) add("folds must be at least 1");
  if (c.folds <= 1 && !(c.heldout_fraction > 0.0 && c.heldout_fraction < 1.0))
    add("heldout_fraction out of (0,1)");

  if (synthetic) {
    if (c.kernel >= c.corpus_words)
      add("kernel exceeds corpus (" + std::to_string(c.kernel) + " >= " +
          std::to_string(c.corpus_words) + " words)");
    return d;
  }
  if (c.corpus.empty()) return d;

  SentenceCorpus corpus;
  try {
    corpus = read_corpus(c.corpus);
  } catch (const Error& e) {
    add(std::string("corpus: ") + e.what());
    return d;
  }
  if (!c.heldout.empty()) {
    try {
      if (read_corpus(c.heldout).empty()) add("heldout corpus is empty");
    } catch (const Error& e) {
      add(std::string("heldout: ") + e.what());
    }
  }
  if (corpus.empty()) {
    add("corpus is empty");
    return d;
  }
  if (c.kernel >= corpus.word_count()) {
    add("kernel exceeds corpus (" + std::to_string(c.kernel) + " >= " +
        std::to_string(corpus.word_count()) + " words)");
    return d;
  }
  if (c.heldout.empty() && c.folds > 1) {
    if (c.folds > corpus.sentence_count()) {
      add("k-fold infeasible: " + std::to_string(c.folds) + " folds over " +
          std::to_string(corpus.sentence_count()) + " sentences");
      return d;
    }
    std::uint64_t smallest = corpus.word_count();
    for (const auto& f : kfold_partition(corpus.sentence_count(), c.folds)) {
      const std::uint64_t begin = f.begin == 0 ? 0 : corpus.sentence_end(f.begin - 1);
      const std::uint64_t held = corpus.sentence_end(f.end - 1) - begin;
      smallest = std::min(smallest, corpus.word_count() - held);
    }
    if (c.kernel >= smallest)
      add("kernel exceeds corpus: fold training sets hold only " + std::to_string(smallest) +
          " words");
  }
  return d;
}

}  // namespace colts
