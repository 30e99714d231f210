#include "colts/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "colts/error.hpp"
#include "colts/schedule.hpp"

namespace colts {

namespace {

std::string fmt(double v, const char* spec = "%.12g") {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

template <class T>
std::string opt(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_floating_point_v<T>)
    return fmt(*v);
  else
    return std::to_string(*v);
}

nlohmann::json opt_json(const auto& v) {
  if (!v) return nullptr;
  return *v;
}

std::unique_ptr<AccuracySource> make_source(const ExperimentConfig& config) {
  const LearnerSpec learner = config.learner_spec();
  if (learner.kind == LearnerKind::Synthetic)
    return std::make_unique<AccuracySource>(learner, config.evaluation());
  auto corpus = std::make_shared<SentenceCorpus>(read_corpus(config.corpus));
  if (config.scramble) *corpus = scramble(*corpus, config.seed);
  std::shared_ptr<const SentenceCorpus> heldout;
  if (!config.heldout.empty()) heldout = std::make_shared<SentenceCorpus>(read_corpus(config.heldout));
  return std::make_unique<AccuracySource>(learner, corpus, config.evaluation(), heldout);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

}  // namespace

std::string run_stem(const std::string& name) {
  std::string s;
  for (char ch : name) {
    if (ch == '[' || ch == '=') {
      s += '_';
    } else if (ch == ']') {
      continue;
    } else {
      s += ch;
    }
  }
  return s;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const auto problems = diagnose(config);
  if (!problems.empty()) throw Error(ErrorCode::Config, problems.front());
  auto source = make_source(config);
  FrameConfig fc = config.frame();
  // Scope ends inside the corpus snap to sentence boundaries; ends past it
  // are only ever evaluated on trends.
  if (config.learner != "synthetic" && fc.params.scope_end && config.heldout.empty()) {
    try {
      fc.params.scope_end = source->align(*fc.params.scope_end);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PositionBeyondCorpus) throw;
    }
  }

  ExperimentResult result{build_frame(*source, fc), std::nullopt, {}};
  if (config.inflate > 0.0) {
    if (!result.frame.viable) {
      result.inflation_error = "frame is not viable";
    } else {
      try {
        result.inflated = inflate_frame(result.frame, config.inflate, *source);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NonViableInflation) throw;
        result.inflation_error = e.what();
      }
    }
  }
  return result;
}

void write_iteration_csv(std::ostream& out, const Run& run, const ConvergenceParams& params) {
  (void)params;
  out << "level,position,accuracy,fit_a,fit_b,fit_c,alpha,anchored_alpha,mu,step,port,chi,halted\n";
  for (std::size_t l = 1; l <= run.levels(); ++l) {
    const auto& obs = run.trace.observations()[l - 1];
    const auto& trend = run.trace.trend(l);
    const auto mu_l = run.mu[l - 1];
    const auto step = run.step[l - 1];
    std::optional<double> port;
    if (mu_l && step) port = port_of(static_cast<double>(*step), *mu_l);
    out << l << ',' << obs.position << ',' << fmt(obs.accuracy, "%.4f") << ','
        << (trend ? fmt(trend->a) : "") << ',' << (trend ? fmt(trend->b) : "") << ','
        << (trend ? fmt(trend->c) : "") << ',' << opt(run.trace.alpha(l)) << ','
        << opt(run.trace.anchored_alpha(l)) << ',' << opt(mu_l) << ',' << opt(step) << ','
        << opt(port) << ',' << opt(run.chi[l - 1]) << ',' << (run.halted_at(l) ? 1 : 0) << '\n';
  }
}

namespace {

nlohmann::json run_json(const LocalFrame& frame, std::size_t i) {
  const Run& r = frame.runs[i];
  nlohmann::json j;
  j["name"] = r.name;
  j["schedule"] = describe(r.scheme.step);
  j["parameter"] = frame.step_params[i];
  j["wlevel"] = opt_json(r.wlevel);
  j["plevel"] = opt_json(r.plevel);
  j["clevel"] = opt_json(r.clevel);
  j["clevel_position"] = opt_json(r.clevel_position());
  j["levels"] = r.levels();
  j["exhausted"] = r.flags.exhausted;
  j["non_viable"] = r.flags.non_viable;
  j["reason"] = r.flags.reason;
  const auto& m = frame.reports[i];
  j["delta"] = m ? nlohmann::json(m->delta) : nlohmann::json(nullptr);
  j["dacsr"] = m ? nlohmann::json(m->dacsr) : nlohmann::json(nullptr);
  j["icsr"] = m ? nlohmann::json(m->icsr) : nlohmann::json(nullptr);
  j["lcsr"] = m ? nlohmann::json(m->lcsr) : nlohmann::json(nullptr);
  if (r.inflated_level) {
    j["inflated_level"] = *r.inflated_level;
    j["inflated_accuracy"] = *r.inflated_accuracy;
  }
  j["csv"] = (frame.inflation ? "inflated_" : "") + run_stem(r.name) + ".csv";
  return j;
}

nlohmann::json frame_json(const LocalFrame& f) {
  nlohmann::json j;
  j["viable"] = f.viable;
  j["reason"] = f.reason;
  j["kernel"] = f.config.kernel;
  j["eta"] = f.config.eta;
  j["tau"] = f.config.params.tau;
  j["wlevel"] = opt_json(f.omega);
  j["plevel"] = opt_json(f.plevel);
  j["plevel_position"] = f.plevel_position;
  if (f.baseline().clevel) {
    const auto [lo, hi] = f.tolerance_interval();
    j["tolerance_interval"] = {lo, hi};
  } else {
    j["tolerance_interval"] = nullptr;
  }
  j["runs"] = nlohmann::json::array();
  for (std::size_t i = 0; i < f.runs.size(); ++i) j["runs"].push_back(run_json(f, i));
  return j;
}

}  // namespace

std::string summary_json(const ExperimentConfig& config, const ExperimentResult& result) {
  nlohmann::json j;
  nlohmann::json cfg;
  for (const auto& key : ExperimentConfig::keys()) cfg[key] = config.get(key);
  j["config"] = cfg;
  j["frame"] = frame_json(result.frame);
  if (config.inflate > 0.0) {
    nlohmann::json inf;
    inf["iota"] = config.inflate;
    if (result.inflated) {
      inf["frame"] = frame_json(*result.inflated);
      nlohmann::json drops = nlohmann::json::object();
      for (std::size_t i = 0; i < result.frame.runs.size(); ++i) {
        const auto& a = result.frame.reports[i];
        const auto& b = result.inflated->reports[i];
        nlohmann::json d;
        d["lcsr_drop"] = a && b ? nlohmann::json(a->lcsr - b->lcsr) : nlohmann::json(nullptr);
        d["dacsr_drop"] = a && b ? nlohmann::json(a->dacsr - b->dacsr) : nlohmann::json(nullptr);
        d["lcsr_drop_percent"] = a && b && a->lcsr > 0.0
                                     ? nlohmann::json(100.0 * (a->lcsr - b->lcsr) / a->lcsr)
                                     : nlohmann::json(nullptr);
        drops[result.frame.runs[i].name] = d;
      }
      inf["drops"] = drops;
    } else {
      inf["frame"] = nullptr;
      inf["reason"] = result.inflation_error;
    }
    j["inflated"] = inf;
  }
  return j.dump(2) + "\n";
}

namespace {

void write_plots(const std::filesystem::path& dir, const std::string& prefix, const Run& run,
                 const ConvergenceParams& params) {
  std::string curve, backbone, anchored;
  for (std::size_t l = 1; l <= run.levels(); ++l) {
    const auto x = std::to_string(run.position(l));
    curve += x + ' ' + fmt(run.trace.observations()[l - 1].accuracy, "%.4f") + '\n';
    if (auto a = run.trace.alpha(l)) backbone += x + ' ' + fmt(*a) + '\n';
    if (auto a = run.trace.anchored_alpha(l)) anchored += x + ' ' + fmt(*a) + '\n';
  }
  const std::string stem = prefix + run_stem(run.name);
  write_file(dir / (stem + ".curve.dat"), curve);
  write_file(dir / (stem + ".backbone.dat"), backbone);
  write_file(dir / (stem + ".anchored_backbone.dat"), anchored);

  // Final trend sampled on a log grid up to the scope end (or twice the last
  // observed position).
  std::string trend;
  if (run.levels() > 0) {
    if (const auto t = run.trace.effective_trend(run.levels())) {
      const double lo = static_cast<double>(run.position(1));
      const double hi = params.scope_end ? static_cast<double>(*params.scope_end)
                                         : 2.0 * static_cast<double>(run.position(run.levels()));
      constexpr int kSamples = 200;
      for (int k = 0; k <= kSamples && hi > lo; ++k) {
        const double x = std::round(lo * std::pow(hi / lo, static_cast<double>(k) / kSamples));
        trend += fmt(x, "%.0f") + ' ' + fmt(value(*t, x)) + '\n';
      }
    }
  }
  write_file(dir / (stem + ".trend.dat"), trend);
}

void write_frame(const std::filesystem::path& dir, const LocalFrame& frame, const std::string& prefix) {
  for (const Run& run : frame.runs) {
    std::ostringstream csv;
    write_iteration_csv(csv, run, frame.config.params);
    write_file(dir / (prefix + run_stem(run.name) + ".csv"), csv.str());
    write_plots(dir / "plots", prefix, run, frame.config.params);
  }
}

}  // namespace

std::filesystem::path write_artifacts(const ExperimentConfig& config, const ExperimentResult& result) {
  const std::filesystem::path dir(config.out);
  std::error_code ec;
  std::filesystem::create_directories(dir / "plots", ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + (dir / "plots").string() + ": " + ec.message());
  write_frame(dir, result.frame, "");
  if (result.inflated) write_frame(dir, *result.inflated, "inflated_");
  const auto summary = dir / "summary.json";
  write_file(summary, summary_json(config, result));
  return summary;
}

}  // namespace colts
