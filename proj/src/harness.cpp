#include "colts/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <future>

#include "colts/error.hpp"
#include "colts/schedule.hpp"

namespace colts {

std::optional<std::uint64_t> Run::clevel_position() const {
  if (!clevel) return std::nullopt;
  return position(*clevel);
}

bool Run::halted_at(std::size_t level) const { return clevel && *clevel == level; }

namespace {

std::uint64_t next_step(const Run& run, std::size_t level, const std::optional<std::size_t>& pl) {
  const LearningScheme& s = run.scheme;
  const std::size_t next = level + 1;
  const std::uint64_t eta =
      s.step.kind == StepKind::Arithmetic ? s.step.difference : s.uniform_step;
  bool uniform = s.uniform_at(next);
  if (!s.plevel_guard && s.step.kind != StepKind::Arithmetic) uniform = !pl || level < *pl;
  if (uniform) return eta;

  const std::uint64_t x = run.position(level);
  if (s.step.kind == StepKind::Geometric) return geometric_step(x, s.step.ratio);
  // COLTS needs a trend at the current level, which exists from level 3.
  const auto trend = run.trace.effective_trend(level);
  if (next < 4 || !trend) return eta;
  return colts_step(*trend, static_cast<double>(x), s.step.port);
}

void fill_diagnostics(Run& run, const ConvergenceParams& params) {
  const std::size_t n = run.levels();
  run.mu.assign(n, std::nullopt);
  run.chi.assign(n, std::nullopt);
  run.step.resize(n);
  for (std::size_t l = 1; l <= n; ++l) {
    const auto t = run.trace.effective_trend(l);
    if (!t) continue;
    const double x = static_cast<double>(run.position(l));
    run.mu[l - 1] = mu(*t, x);
    run.chi[l - 1] = layer(*t, x, params.scope_end);
  }
}

}  // namespace

Run execute_run(AccuracySource& source, const LearningScheme& scheme, const RunOptions& options,
                std::string name) {
  options.params.validate();
  if (scheme.kernel_size == 0) throw Error(ErrorCode::InvalidArgument, "kernel must be positive");
  if (options.plevel && !options.omega)
    throw Error(ErrorCode::InvalidArgument, "a frame plevel needs the frame working level");

  Run run;
  run.name = std::move(name);
  run.scheme = scheme;
  std::optional<std::size_t> omega = options.omega;
  std::optional<std::size_t> pl = options.plevel;
  const auto& scope = options.params.scope_end;

  std::uint64_t target = scheme.kernel_size;
  std::size_t checked = 0;
  while (true) {
    const std::uint64_t last = run.levels() > 0 ? run.trace.observations().back().position : 0;
    std::uint64_t x = 0;
    if (target <= source.capacity()) {
      x = source.align(target);
      if (x <= last) {
        target = last + 1;
        x = target <= source.capacity() ? source.align(target) : 0;
      }
    }
    if (x == 0 || x > source.capacity()) {
      // The step overruns the data: the individual is cut at the end of the
      // training data and the run cannot converge.
      run.flags.exhausted = true;
      x = source.capacity();
      if (x <= last || (scope && x > *scope)) break;
      target = x;
    }
    if (scope && x > *scope) {
      run.flags.beyond_scope = true;
      break;
    }

    const std::size_t level = run.levels() + 1;
    const auto ov = options.overrides.find(level);
    const double acc = ov != options.overrides.end() ? ov->second : source.accuracy_at(x);
    run.word_targets.push_back(target);
    run.step.emplace_back();
    try {
      run.trace.extend({x, acc});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::FitDiverged) throw;
    }

    if (!omega) omega = wlevel(run.trace.backbone(), options.params);
    if (omega && options.anchoring && !run.trace.anchored() && level >= *omega)
      run.trace.anchor_from(*omega);
    if (omega && !pl) pl = plevel(run.trace.backbone(), *omega);
    if (run.flags.exhausted) break;

    if (pl) {
      for (std::size_t l = std::max(checked + 1, *pl); l <= level && !run.clevel; ++l) {
        checked = l;
        const auto t = run.trace.effective_trend(l);
        if (!t) continue;
        if (halted(layer(*t, static_cast<double>(run.position(l)), scope), options.params.tau))
          run.clevel = l;
      }
    }
    if (run.clevel) {
      // The baseline may have looked ahead past its convergence level to find
      // its working level; the run itself ends there.
      run.trace.truncate(*run.clevel);
      run.word_targets.resize(*run.clevel);
      run.step.resize(*run.clevel);
      run.step.back().reset();
      break;
    }
    if (level >= options.max_levels) {
      run.flags.non_viable = true;
      run.flags.reason = "level_limit";
      break;
    }

    const std::uint64_t step = next_step(run, level, pl);
    run.step.back() = step;
    target += step;
  }

  run.wlevel = omega;
  run.plevel = pl;
  if (!run.clevel && run.flags.reason.empty()) {
    run.flags.non_viable = true;
    if (!omega)
      run.flags.reason = "no_wlevel";
    else if (!pl)
      run.flags.reason = "no_plevel";
    else if (run.flags.exhausted)
      run.flags.reason = "exhausted";
    else if (run.flags.beyond_scope)
      run.flags.reason = "beyond_scope";
    else
      run.flags.reason = "no_clevel";
  }
  if (!run.clevel && !run.step.empty()) run.step.back().reset();
  fill_diagnostics(run, options.params);
  return run;
}

// ---------------------------------------------------------------------------

namespace {

void require_clevel(const Run& run) {
  if (!run.clevel)
    throw Error(ErrorCode::NoCLevel, "run '" + run.name + "' has no convergence level");
}

std::size_t frame_plevel(const Run& baseline) {
  if (!baseline.plevel || *baseline.plevel > baseline.levels())
    throw Error(ErrorCode::NoCLevel, "baseline has no prediction level");
  return *baseline.plevel;
}

}  // namespace

std::int64_t discrepancy(const Run& run, const Run& baseline) {
  require_clevel(run);
  require_clevel(baseline);
  return static_cast<std::int64_t>(*run.clevel_position()) -
         static_cast<std::int64_t>(*baseline.clevel_position());
}

double dacsr(const Run& run, const Run& baseline, std::uint64_t eta) {
  const std::int64_t delta = discrepancy(run, baseline);
  if (delta < -static_cast<std::int64_t>(eta)) return 0.0;
  const std::size_t pl = frame_plevel(baseline);
  return static_cast<double>(baseline.position(pl)) /
         static_cast<double>(*run.clevel_position());
}

double icsr(const Run& run, const Run& baseline) {
  require_clevel(run);
  require_clevel(baseline);
  const std::size_t pl = frame_plevel(baseline);
  if (*run.clevel < pl)
    throw Error(ErrorCode::NoCLevel, "run converges before the prediction level");
  std::uint64_t shared = 0;
  for (std::size_t l = 1; l < pl; ++l) shared += baseline.position(l);
  std::uint64_t tail = 0;
  for (std::size_t l = pl; l <= *run.clevel; ++l) tail += run.position(l);
  return static_cast<double>(shared + baseline.position(pl)) /
         static_cast<double>(shared + tail);
}

MetricsReport metrics(const Run& run, const Run& baseline, std::uint64_t eta) {
  MetricsReport r;
  r.delta = discrepancy(run, baseline);
  r.dacsr = dacsr(run, baseline, eta);
  r.icsr = icsr(run, baseline);
  r.lcsr = r.dacsr * r.icsr;
  return r;
}

std::string ScheduleSpec::name() const {
  char buf[64];
  switch (kind) {
    case ScheduleKind::Arithmetic: return "arithmetic";
    case ScheduleKind::Geometric:
      if (!fixed_param) return "geometric";
      std::snprintf(buf, sizeof buf, "geometric[%g]", *fixed_param);
      return buf;
    case ScheduleKind::Colts:
      if (fixed_param)
        std::snprintf(buf, sizeof buf, "colts[port=%g]", *fixed_param);
      else
        std::snprintf(buf, sizeof buf, "colts[%g]", psi);
      return buf;
  }
  return "unknown";
}

std::pair<std::int64_t, std::int64_t> LocalFrame::tolerance_interval() const {
  const auto& b = baseline();
  require_clevel(b);
  const auto end = static_cast<std::int64_t>(*b.clevel_position());
  return {end - static_cast<std::int64_t>(config.eta), end};
}

namespace {

RunOptions competitor_options(const FrameConfig& cfg, std::size_t omega, std::size_t pl) {
  RunOptions o;
  o.params = cfg.params;
  o.anchoring = cfg.anchoring;
  o.omega = omega;
  o.plevel = pl;
  return o;
}

RunOptions baseline_options(const FrameConfig& cfg) {
  RunOptions o;
  o.params = cfg.params;
  o.anchoring = cfg.anchoring;
  return o;
}

void score(LocalFrame& frame) {
  frame.reports.assign(frame.runs.size(), std::nullopt);
  for (std::size_t i = 0; i < frame.runs.size(); ++i)
    if (frame.runs[i].clevel && frame.baseline().clevel)
      frame.reports[i] = metrics(frame.runs[i], frame.baseline(), frame.config.eta);
}

std::vector<Run> run_all(AccuracySource& source, const std::vector<LearningScheme>& schemes,
                         const std::vector<RunOptions>& options,
                         const std::vector<std::string>& names, bool parallel) {
  std::vector<Run> out(schemes.size());
  if (!parallel) {
    for (std::size_t i = 0; i < schemes.size(); ++i)
      out[i] = execute_run(source, schemes[i], options[i], names[i]);
    return out;
  }
  std::vector<std::future<Run>> jobs;
  for (std::size_t i = 0; i < schemes.size(); ++i)
    jobs.push_back(std::async(std::launch::async, [&, i] {
      return execute_run(source, schemes[i], options[i], names[i]);
    }));
  for (std::size_t i = 0; i < jobs.size(); ++i) out[i] = jobs[i].get();
  return out;
}

}  // namespace

LocalFrame build_frame(AccuracySource& source, const FrameConfig& config) {
  if (config.kernel == 0 || config.eta == 0)
    throw Error(ErrorCode::InvalidArgument, "kernel and eta must be positive");
  LocalFrame frame;
  frame.config = config;
  frame.runs.push_back(execute_run(source, LearningScheme::baseline(config.kernel, config.eta),
                                   baseline_options(config), "arithmetic"));
  frame.step_params.push_back(static_cast<double>(config.eta));
  const Run& base = frame.runs.front();
  frame.omega = base.wlevel;
  frame.plevel = base.plevel;
  if (!base.clevel) {
    frame.reason = base.flags.reason;
    score(frame);
    return frame;
  }
  frame.viable = true;
  const std::size_t pl = *base.plevel;
  frame.plevel_position = base.position(pl);

  std::vector<LearningScheme> schemes;
  std::vector<RunOptions> options;
  std::vector<std::string> names;
  for (const auto& spec : config.competitors) {
    StepFunction step;
    double param = 0.0;
    switch (spec.kind) {
      case ScheduleKind::Arithmetic:
        param = spec.fixed_param.value_or(static_cast<double>(config.eta));
        if (!(param >= 1.0)) throw Error(ErrorCode::InvalidArgument, "arithmetic step below 1");
        step = StepFunction::arithmetic(static_cast<std::uint64_t>(param));
        break;
      case ScheduleKind::Geometric:
        param = spec.fixed_param.value_or(tune_geometric(config.eta, frame.plevel_position));
        step = StepFunction::geometric(param);
        break;
      case ScheduleKind::Colts: {
        if (spec.fixed_param) {
          param = *spec.fixed_param;
        } else {
          const auto trend = base.trace.effective_trend(pl);
          if (!trend) throw Error(ErrorCode::MissingTrend, "baseline has no trend at its plevel");
          const double m = mu(*trend, static_cast<double>(frame.plevel_position));
          const std::uint64_t remaining =
              source.capacity() > frame.plevel_position ? source.capacity() - frame.plevel_position
                                                        : 0;
          if (remaining == 0) throw Error(ErrorCode::InvalidArgument, "no data past the plevel");
          param = tune_port(spec.psi, config.eta, colts_step_from_mu(m, spec.psi), remaining);
        }
        step = StepFunction::colts(param);
        break;
      }
    }
    frame.step_params.push_back(param);
    schemes.push_back(LearningScheme::guarded(config.kernel, config.eta, step, pl));
    options.push_back(competitor_options(config, *base.wlevel, pl));
    names.push_back(spec.name());
  }
  auto runs = run_all(source, schemes, options, names, config.parallel);
  for (auto& r : runs) frame.runs.push_back(std::move(r));
  score(frame);
  return frame;
}

std::optional<std::size_t> inflation_level(const Run& run, const Run& baseline) {
  if (!run.clevel || !baseline.clevel) return std::nullopt;
  const std::uint64_t bound = std::min(*run.clevel_position(), *baseline.clevel_position());
  std::optional<std::size_t> best;
  for (std::size_t l = 1; l <= run.levels(); ++l)
    if (run.position(l) < bound) best = l;
  return best;
}

LocalFrame inflate_frame(const LocalFrame& frame, double iota, AccuracySource& source) {
  if (!(iota > 0.0 && iota <= 100.0))
    throw Error(ErrorCode::InvalidArgument, "inflation rate must lie in (0, 100]");
  if (!frame.viable || !frame.plevel || !frame.omega)
    throw Error(ErrorCode::NonViableInflation, "frame is not viable");
  const std::size_t pl = *frame.plevel;
  const Run& base = frame.baseline();

  std::vector<std::map<std::size_t, double>> overrides;
  std::vector<std::pair<std::size_t, double>> bumps;
  for (const Run& run : frame.runs) {
    if (!run.clevel)
      throw Error(ErrorCode::NonViableInflation, "run '" + run.name + "' never converged");
    const auto level = inflation_level(run, base);
    if (!level || *level <= pl)
      throw Error(ErrorCode::NonViableInflation,
                  "run '" + run.name + "' has no inflatable level past the plevel");
    const double a = run.trace.observations()[*level - 1].accuracy;
    auto cap = run.trace.alpha(*run.clevel);
    if (!cap) cap = run.trace.anchored_alpha(*run.clevel);
    if (!cap) throw Error(ErrorCode::MissingTrend, "no asymptote at the convergence level");
    const double inflated = std::min((1.0 + iota / 100.0) * a, *cap);
    overrides.push_back({{*level, inflated}});
    bumps.emplace_back(*level, inflated);
  }

  LocalFrame out;
  out.config = frame.config;
  out.step_params = frame.step_params;
  out.inflation = iota;
  out.omega = frame.omega;
  out.plevel = frame.plevel;
  out.plevel_position = frame.plevel_position;

  RunOptions bopt = baseline_options(frame.config);
  bopt.overrides = overrides.front();
  out.runs.push_back(execute_run(source, base.scheme, bopt, base.name));
  if (out.runs.front().plevel != frame.plevel || out.runs.front().wlevel != frame.omega)
    throw Error(ErrorCode::NonViableInflation, "inflation moved the baseline's plevel");

  std::vector<LearningScheme> schemes;
  std::vector<RunOptions> options;
  std::vector<std::string> names;
  for (std::size_t i = 1; i < frame.runs.size(); ++i) {
    schemes.push_back(frame.runs[i].scheme);
    RunOptions o = competitor_options(frame.config, *frame.omega, pl);
    o.overrides = overrides[i];
    options.push_back(std::move(o));
    names.push_back(frame.runs[i].name);
  }
  auto runs = run_all(source, schemes, options, names, frame.config.parallel);
  for (auto& r : runs) out.runs.push_back(std::move(r));
  for (std::size_t i = 0; i < out.runs.size(); ++i) {
    out.runs[i].inflated_level = bumps[i].first;
    out.runs[i].inflated_accuracy = bumps[i].second;
  }
  out.viable = out.runs.front().clevel.has_value();
  if (!out.viable) out.reason = out.runs.front().flags.reason;
  score(out);
  return out;
}

}  // namespace colts
