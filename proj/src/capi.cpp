#include "colts/colts.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "colts/config.hpp"
#include "colts/convergence.hpp"
#include "colts/error.hpp"
#include "colts/experiment.hpp"
#include "colts/pattern.hpp"
#include "colts/schedule.hpp"
#include "colts/scheme.hpp"
#include "colts/trace.hpp"

struct colts_trace {
  colts::LearningTrace trace;
};
struct colts_corpus {
  colts::SentenceCorpus corpus;
};
struct colts_config {
  colts::ExperimentConfig config;
};

namespace {

thread_local std::string last_error;

colts_status fail(colts_status s, std::string msg) {
  last_error = std::move(msg);
  return s;
}

template <class F>
colts_status guard(F&& f) {
  try {
    last_error.clear();
    return f();
  } catch (const colts::Error& e) {
    return fail(static_cast<colts_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(COLTS_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(COLTS_E_INTERNAL, e.what());
  } catch (...) {
    return fail(COLTS_E_INTERNAL, "unknown failure");
  }
}

colts_status null_arg() { return fail(COLTS_E_INVALID_ARGUMENT, "null argument"); }

colts::PowerFit to_cpp(const colts_power_fit& f) { return {f.a, f.b, f.c, f.residual_norm}; }
colts_power_fit to_c(const colts::PowerFit& f) { return {f.a, f.b, f.c, f.residual_norm}; }

void copy_out(const std::string& s, char* buffer, std::size_t capacity, std::size_t* required) {
  if (required) *required = s.size() + 1;
  if (buffer && capacity > 0) {
    const std::size_t n = std::min(s.size(), capacity - 1);
    std::memcpy(buffer, s.data(), n);
    buffer[n] = '\0';
  }
}

colts_status check_level(const colts::LearningTrace& t, std::size_t level) {
  if (level < 1 || level > t.levels())
    return fail(COLTS_E_NOT_FOUND, "level " + std::to_string(level) + " outside the trace");
  return COLTS_OK;
}

}  // namespace

extern "C" {

const char* colts_version(void) { return "1.0.0"; }

const char* colts_status_name(colts_status status) {
  switch (status) {
    case COLTS_OK: return "ok";
    case COLTS_E_NOT_FOUND: return "NotFound";
    case COLTS_E_INTERNAL: return "Internal";
    default: break;
  }
  const int v = static_cast<int>(status);
  if (v >= 1 && v <= static_cast<int>(colts::ErrorCode::Config))
    return colts::to_string(static_cast<colts::ErrorCode>(v)).data();
  return "Unknown";
}

const char* colts_last_error(void) { return last_error.c_str(); }

colts_status colts_fit(const uint64_t* positions, const double* accuracies, size_t count,
                       const double* anchor, colts_power_fit* out) {
  if ((!positions || !accuracies) && count > 0) return null_arg();
  if (!out) return null_arg();
  return guard([&] {
    std::vector<colts::Observation> obs(count);
    for (size_t i = 0; i < count; ++i) obs[i] = {positions[i], accuracies[i]};
    colts::FitOptions opt;
    if (anchor) opt.anchor = *anchor;
    *out = to_c(colts::fit(obs, opt));
    return COLTS_OK;
  });
}

colts_status colts_value(const colts_power_fit* fit, double x, double* out) {
  if (!fit || !out) return null_arg();
  return guard([&] {
    *out = colts::value(to_cpp(*fit), x);
    return COLTS_OK;
  });
}

colts_status colts_slope(const colts_power_fit* fit, double x, double* out) {
  if (!fit || !out) return null_arg();
  return guard([&] {
    *out = colts::slope(to_cpp(*fit), x);
    return COLTS_OK;
  });
}

colts_status colts_mu(const colts_power_fit* fit, double x, double* out) {
  if (!fit || !out) return null_arg();
  return guard([&] {
    *out = colts::mu(to_cpp(*fit), x);
    return COLTS_OK;
  });
}

colts_status colts_step(const colts_power_fit* fit, double x, double port, uint64_t* out) {
  if (!fit || !out) return null_arg();
  return guard([&] {
    *out = colts::colts_step(to_cpp(*fit), x, port);
    return COLTS_OK;
  });
}

colts_status colts_port_of(double step, double mu, double* out) {
  if (!out) return null_arg();
  return guard([&] {
    *out = colts::port_of(step, mu);
    return COLTS_OK;
  });
}

colts_status colts_tune_geometric(uint64_t eta, uint64_t plevel_position, double* out) {
  if (!out) return null_arg();
  return guard([&] {
    *out = colts::tune_geometric(eta, plevel_position);
    return COLTS_OK;
  });
}

colts_status colts_tune_port(double psi, uint64_t eta, uint64_t step_at_plevel, uint64_t remaining,
                             double* out) {
  if (!out) return null_arg();
  return guard([&] {
    *out = colts::tune_port(psi, eta, step_at_plevel, remaining);
    return COLTS_OK;
  });
}

colts_status colts_layer(const colts_power_fit* fit, double x, uint64_t scope_end, double* out) {
  if (!fit || !out) return null_arg();
  return guard([&] {
    std::optional<std::uint64_t> scope;
    if (scope_end > 0) scope = scope_end;
    *out = colts::layer(to_cpp(*fit), x, scope);
    return COLTS_OK;
  });
}

colts_status colts_trace_new(colts_trace** out) {
  if (!out) return null_arg();
  return guard([&] {
    *out = new colts_trace{};
    return COLTS_OK;
  });
}

void colts_trace_free(colts_trace* trace) { delete trace; }

colts_status colts_trace_extend(colts_trace* trace, uint64_t position, double accuracy) {
  if (!trace) return null_arg();
  return guard([&] {
    trace->trace.extend({position, accuracy});
    return COLTS_OK;
  });
}

colts_status colts_trace_anchor_from(colts_trace* trace, size_t omega) {
  if (!trace) return null_arg();
  return guard([&] {
    trace->trace.anchor_from(omega);
    return COLTS_OK;
  });
}

colts_status colts_trace_levels(const colts_trace* trace, size_t* out) {
  if (!trace || !out) return null_arg();
  *out = trace->trace.levels();
  last_error.clear();
  return COLTS_OK;
}

colts_status colts_trace_trend(const colts_trace* trace, size_t level, colts_power_fit* out) {
  if (!trace || !out) return null_arg();
  return guard([&] {
    if (auto s = check_level(trace->trace, level)) return s;
    const auto& t = trace->trace.trend(level);
    if (!t) return fail(COLTS_E_MISSING_TREND, "no trend at level " + std::to_string(level));
    *out = to_c(*t);
    return COLTS_OK;
  });
}

colts_status colts_trace_anchored_trend(const colts_trace* trace, size_t level, colts_power_fit* out) {
  if (!trace || !out) return null_arg();
  return guard([&] {
    if (auto s = check_level(trace->trace, level)) return s;
    const auto& t = trace->trace.anchored_trend(level);
    if (!t) return fail(COLTS_E_MISSING_TREND, "no anchored trend at level " + std::to_string(level));
    *out = to_c(*t);
    return COLTS_OK;
  });
}

colts_status colts_trace_is_relevant(const colts_trace* trace, size_t level, double tolerance,
                                     int* out) {
  if (!trace || !out) return null_arg();
  return guard([&] {
    *out = trace->trace.is_relevant(level, tolerance) ? 1 : 0;
    return COLTS_OK;
  });
}

colts_status colts_trace_wlevel(const colts_trace* trace, double nu, unsigned slowdown,
                                unsigned lookahead, size_t* out) {
  if (!trace || !out) return null_arg();
  return guard([&] {
    colts::ConvergenceParams p;
    p.nu = nu;
    p.slowdown = slowdown;
    p.lookahead = lookahead;
    p.validate();
    const auto w = colts::wlevel(trace->trace.backbone(), p);
    if (!w) return fail(COLTS_E_NOT_FOUND, "working level not reached");
    *out = *w;
    return COLTS_OK;
  });
}

colts_status colts_trace_plevel(const colts_trace* trace, size_t omega, size_t* out) {
  if (!trace || !out) return null_arg();
  return guard([&] {
    const auto p = colts::plevel(trace->trace.backbone(), omega);
    if (!p) return fail(COLTS_E_NOT_FOUND, "prediction level not reached");
    *out = *p;
    return COLTS_OK;
  });
}

colts_status colts_corpus_load(const char* path, colts_corpus** out) {
  if (!path || !out) return null_arg();
  return guard([&] {
    *out = new colts_corpus{colts::read_corpus(path)};
    return COLTS_OK;
  });
}

void colts_corpus_free(colts_corpus* corpus) { delete corpus; }

colts_status colts_corpus_sentences(const colts_corpus* corpus, size_t* out) {
  if (!corpus || !out) return null_arg();
  *out = corpus->corpus.sentence_count();
  last_error.clear();
  return COLTS_OK;
}

colts_status colts_corpus_words(const colts_corpus* corpus, uint64_t* out) {
  if (!corpus || !out) return null_arg();
  *out = corpus->corpus.word_count();
  last_error.clear();
  return COLTS_OK;
}

colts_status colts_corpus_align(const colts_corpus* corpus, uint64_t position, uint64_t* out) {
  if (!corpus || !out) return null_arg();
  return guard([&] {
    *out = colts::align_to_sentences(corpus->corpus, position);
    return COLTS_OK;
  });
}

colts_status colts_config_new(colts_config** out) {
  if (!out) return null_arg();
  return guard([&] {
    *out = new colts_config{};
    return COLTS_OK;
  });
}

void colts_config_free(colts_config* config) { delete config; }

colts_status colts_config_set(colts_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return null_arg();
  return guard([&] {
    config->config.set(key, value);
    return COLTS_OK;
  });
}

colts_status colts_config_get(const colts_config* config, const char* key, char* buffer,
                              size_t capacity, size_t* required) {
  if (!config || !key) return null_arg();
  return guard([&] {
    copy_out(config->config.get(key), buffer, capacity, required);
    return COLTS_OK;
  });
}

colts_status colts_config_key(size_t index, const char** out) {
  if (!out) return null_arg();
  const auto& keys = colts::ExperimentConfig::keys();
  if (index >= keys.size()) return fail(COLTS_E_NOT_FOUND, "no configuration key at that index");
  last_error.clear();
  *out = keys[index].c_str();
  return COLTS_OK;
}

colts_status colts_config_load_file(colts_config* config, const char* path) {
  if (!config || !path) return null_arg();
  return guard([&] {
    config->config.load_file(path);
    return COLTS_OK;
  });
}

colts_status colts_config_apply_env(colts_config* config) {
  if (!config) return null_arg();
  return guard([&] {
    config->config.apply_env();
    return COLTS_OK;
  });
}

colts_status colts_config_validate(const colts_config* config, char* buffer, size_t capacity,
                                   size_t* required, size_t* count) {
  if (!config) return null_arg();
  return guard([&] {
    const auto d = colts::diagnose(config->config);
    std::string joined;
    for (const auto& s : d) joined += (joined.empty() ? "" : "\n") + s;
    copy_out(joined, buffer, capacity, required);
    if (count) *count = d.size();
    if (d.empty()) return COLTS_OK;
    return fail(COLTS_E_CONFIG, d.front());
  });
}

colts_status colts_run_experiment(const colts_config* config, char* summary_path, size_t capacity,
                                  size_t* required) {
  if (!config) return null_arg();
  return guard([&] {
    const auto result = colts::run_experiment(config->config);
    const auto path = colts::write_artifacts(config->config, result);
    copy_out(path.string(), summary_path, capacity, required);
    return COLTS_OK;
  });
}

}  // extern "C"
