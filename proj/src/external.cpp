#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "colts/error.hpp"
#include "colts/learners.hpp"

namespace colts {

namespace {

namespace fs = std::filesystem;

class TempFile {
 public:
  explicit TempFile(const std::string& suffix) {
    static std::atomic<unsigned long> counter{0};
    path_ = fs::temp_directory_path() /
            ("colts-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + suffix);
  }
  ~TempFile() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;

  const fs::path& path() const noexcept { return path_; }

  void write(const CorpusView& view) const {
    std::ofstream out(path_);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path_.string());
    for (const Sentence* s : view.sentences) write_corpus(out, std::span<const Sentence>(s, 1));
    if (!out) throw Error(ErrorCode::Io, "short write to " + path_.string());
  }

 private:
  fs::path path_;
};

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char ch : s) {
    if (ch == '\'') out += "'\\''";
    else out += ch;
  }
  return out + "'";
}

std::string substitute(std::string text, const std::string& key, const std::string& value) {
  for (auto pos = text.find(key); pos != std::string::npos; pos = text.find(key, pos + value.size()))
    text.replace(pos, key.size(), value);
  return text;
}

}  // namespace

std::optional<double> parse_external_accuracy(const std::string& output) {
  std::istringstream in(output);
  std::string line;
  std::optional<double> found;
  while (std::getline(in, line)) {
    constexpr std::string_view key = "accuracy:";
    if (line.compare(0, key.size(), key) != 0) continue;
    const std::string rest = line.substr(key.size());
    char* end = nullptr;
    const double v = std::strtod(rest.c_str(), &end);
    if (end == rest.c_str()) continue;
    while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
    if (*end != '\0' || !(v >= 0.0 && v <= 100.0)) continue;
    found = v;
  }
  return found;
}

AccuracyReport run_external(const std::string& command_template, const CorpusView& train,
                            const CorpusView& heldout) {
  TempFile train_file(".train");
  TempFile test_file(".test");
  train_file.write(train);
  test_file.write(heldout);

  std::string cmd = substitute(command_template, "{train}", shell_quote(train_file.path().string()));
  cmd = substitute(cmd, "{test}", shell_quote(test_file.path().string()));

  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) throw Error(ErrorCode::ExternalCommandFailed, "cannot spawn: " + cmd);
  std::string output;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) output.append(buf, n);
  const int status = ::pclose(pipe);
  if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0)
    throw Error(ErrorCode::ExternalCommandFailed,
                "external learner exited abnormally (status " + std::to_string(status) + "): " + cmd);

  const auto acc = parse_external_accuracy(output);
  if (!acc)
    throw Error(ErrorCode::UnparsableExternalOutput, "no 'accuracy: <decimal>' line from: " + cmd);
  return {*acc, heldout.words};
}

}  // namespace colts
