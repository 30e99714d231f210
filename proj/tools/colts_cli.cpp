// colts: run a local testing frame or validate its configuration.
//
//   colts run [--config FILE] [--kernel N] [--psi 0.2,0.5,0.8] ...
//   colts validate [--config FILE] ...
//
// Settings come from the config file, then COLTS_<KEY> environment
// variables, then flags. Exit status: 0 success, 1 invalid configuration,
// 2 runtime failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "colts/colts.h"
#include "json.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kRuntime = 2;

struct ConfigHandle {
  colts_config* ptr = nullptr;
  ~ConfigHandle() { colts_config_free(ptr); }
};

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  const char* k = nullptr;
  for (size_t i = 0; colts_config_key(i, &k) == COLTS_OK; ++i) keys.emplace_back(k);
  return keys;
}

std::string flag_name(std::string key) {
  for (char& ch : key)
    if (ch == '_') ch = '-';
  return "--" + key;
}

int status_exit(colts_status s) {
  return s == COLTS_E_CONFIG || s == COLTS_E_CORPUS_PARSE || s == COLTS_E_INVALID_ARGUMENT
             ? kInvalid
             : kRuntime;
}

int report(colts_status s, const char* what) {
  std::cerr << "colts: " << what << ": " << colts_last_error() << " [" << colts_status_name(s)
            << "]\n";
  return status_exit(s);
}

// Builds the configuration in precedence order: file, environment, flags.
int assemble(ConfigHandle& cfg, const std::string& file,
             const std::map<std::string, std::string>& flags) {
  if (auto s = colts_config_new(&cfg.ptr)) return report(s, "config");
  if (!file.empty())
    if (auto s = colts_config_load_file(cfg.ptr, file.c_str())) return report(s, "config file");
  if (auto s = colts_config_apply_env(cfg.ptr)) return report(s, "environment");
  for (const auto& [key, value] : flags)
    if (auto s = colts_config_set(cfg.ptr, key.c_str(), value.c_str()))
      return report(s, flag_name(key).c_str());
  return kOk;
}

int validate(const ConfigHandle& cfg, bool quiet_ok) {
  size_t required = 0, count = 0;
  colts_status s = colts_config_validate(cfg.ptr, nullptr, 0, &required, &count);
  if (s == COLTS_OK) {
    if (!quiet_ok) std::cout << "ok\n";
    return kOk;
  }
  if (s != COLTS_E_CONFIG) return report(s, "validate");
  std::string text(required, '\0');
  colts_config_validate(cfg.ptr, text.data(), text.size(), nullptr, nullptr);
  text.resize(required - 1);
  std::cerr << text << '\n';
  return kInvalid;
}

void print_summary(const std::string& path) {
  std::ifstream in(path);
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) return;
  auto show = [](const nlohmann::json& frame, const char* title) {
    std::printf("%s: plevel=%s\n", title, frame["plevel"].dump().c_str());
    std::printf("  %-16s %7s %9s %8s %8s %8s\n", "run", "clevel", "position", "dacsr", "icsr", "lcsr");
    for (const auto& r : frame["runs"]) {
      auto num = [&](const char* k) {
        return r[k].is_null() ? std::string("-") : [&] {
          char b[32];
          std::snprintf(b, sizeof b, "%.4f", r[k].get<double>());
          return std::string(b);
        }();
      };
      std::printf("  %-16s %7s %9s %8s %8s %8s%s\n", r["name"].get<std::string>().c_str(),
                  r["clevel"].dump().c_str(), r["clevel_position"].dump().c_str(),
                  num("dacsr").c_str(), num("icsr").c_str(), num("lcsr").c_str(),
                  r["reason"].get<std::string>().empty()
                      ? ""
                      : ("  (" + r["reason"].get<std::string>() + ")").c_str());
    }
  };
  show(j["frame"], "frame");
  if (j.contains("inflated")) {
    if (!j["inflated"]["frame"].is_null())
      show(j["inflated"]["frame"], "inflated");
    else
      std::printf("inflated: not viable (%s)\n", j["inflated"]["reason"].get<std::string>().c_str());
  }
  std::printf("summary: %s\n", path.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Concavity-limit adaptive scheduling: local testing frames"};
  app.require_subcommand(1);

  const auto keys = config_keys();
  std::string config_file;
  std::map<std::string, std::string> values;

  auto add_config_flags = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_file, "flat key = value configuration file");
    for (const auto& key : keys)
      sub->add_option_function<std::string>(
          flag_name(key), [&values, key](const std::string& v) { values[key] = v; },
          "overrides '" + key + "'");
  };
  CLI::App* run = app.add_subcommand("run", "run the frame and write its artifacts");
  CLI::App* check = app.add_subcommand("validate", "check configuration and data");
  add_config_flags(run);
  add_config_flags(check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  ConfigHandle cfg;
  if (int rc = assemble(cfg, config_file, values)) return rc;
  if (check->parsed()) return validate(cfg, false);

  if (int rc = validate(cfg, true)) return rc;
  char summary[4096];
  if (auto s = colts_run_experiment(cfg.ptr, summary, sizeof summary, nullptr))
    return report(s, "run");
  print_summary(summary);
  return kOk;
}
