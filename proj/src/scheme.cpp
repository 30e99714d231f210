#include "colts/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "colts/error.hpp"
#include "rng.hpp"

namespace colts {

StepFunction StepFunction::arithmetic(std::uint64_t eta) {
  if (eta < 1) throw Error(ErrorCode::InvalidArgument, "common difference must be >= 1");
  return {StepKind::Arithmetic, eta, 0.0, 0.0};
}

StepFunction StepFunction::geometric(double rho) {
  if (!(rho > 1.0) || !std::isfinite(rho))
    throw Error(ErrorCode::InvalidArgument, "common ratio must exceed 1");
  return {StepKind::Geometric, 0, rho, 0.0};
}

StepFunction StepFunction::colts(double port) {
  if (!(port > 0.0 && port <= 1.0)) throw Error(ErrorCode::PortOutOfRange, "PORT out of (0,1]");
  return {StepKind::Colts, 0, 0.0, port};
}

std::string describe(const StepFunction& step) {
  std::ostringstream os;
  os.precision(10);
  switch (step.kind) {
    case StepKind::Arithmetic: os << "arithmetic(" << step.difference << ")"; break;
    case StepKind::Geometric: os << "geometric(" << step.ratio << ")"; break;
    case StepKind::Colts: os << "colts(" << step.port << ")"; break;
  }
  return os.str();
}

LearningScheme LearningScheme::baseline(std::uint64_t kernel, std::uint64_t eta) {
  return guarded(kernel, eta, StepFunction::arithmetic(eta), std::nullopt);
}

LearningScheme LearningScheme::guarded(std::uint64_t kernel, std::uint64_t eta, StepFunction step,
                                       std::optional<std::size_t> plevel_guard) {
  if (kernel < 1) throw Error(ErrorCode::InvalidArgument, "kernel must hold at least one item");
  if (eta < 1) throw Error(ErrorCode::InvalidArgument, "uniform step must be >= 1");
  if (plevel_guard && *plevel_guard < 1)
    throw Error(ErrorCode::InvalidArgument, "plevel guard must be a level >= 1");
  return {kernel, step, eta, plevel_guard};
}

bool LearningScheme::uniform_at(std::size_t level) const {
  if (step.kind == StepKind::Arithmetic) return true;
  return plevel_guard && level <= *plevel_guard;
}

std::uint64_t ceil_count(double v) {
  if (!(v > 0.0)) return 1;
  const double r = std::round(v);
  const double out = std::fabs(v - r) <= 1e-9 * std::max(1.0, std::fabs(v)) ? r : std::ceil(v);
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(out));
}

std::uint64_t geometric_step(std::uint64_t position, double rho) {
  return ceil_count(static_cast<double>(position) * (rho - 1.0));
}

std::uint64_t position_of(const LearningScheme& scheme, std::size_t level) {
  if (level < 1) throw Error(ErrorCode::InvalidArgument, "levels start at 1");
  std::uint64_t pos = scheme.kernel_size;
  for (std::size_t i = 2; i <= level; ++i) {
    if (scheme.uniform_at(i)) {
      pos += scheme.step.kind == StepKind::Arithmetic ? scheme.step.difference : scheme.uniform_step;
      continue;
    }
    switch (scheme.step.kind) {
      case StepKind::Geometric: pos += geometric_step(pos, scheme.step.ratio); break;
      case StepKind::Colts:
        throw Error(ErrorCode::InvalidArgument,
                    "COLTS positions past the plevel guard depend on the learning trace");
      case StepKind::Arithmetic: break;
    }
  }
  return pos;
}

// ---------------------------------------------------------------------------

SentenceCorpus::SentenceCorpus(std::vector<Sentence> sentences) : sentences_(std::move(sentences)) {
  ends_.reserve(sentences_.size());
  std::uint64_t total = 0;
  for (const auto& s : sentences_) {
    if (s.empty()) throw Error(ErrorCode::InvalidArgument, "sentences must be nonempty");
    total += s.size();
    ends_.push_back(total);
  }
}

std::size_t SentenceCorpus::sentences_covering(std::uint64_t word_position) const {
  if (word_position == 0) return 0;
  if (word_position > word_count())
    throw Error(ErrorCode::PositionBeyondCorpus,
                "word position " + std::to_string(word_position) + " beyond corpus of " +
                    std::to_string(word_count()) + " words");
  const auto it = std::lower_bound(ends_.begin(), ends_.end(), word_position);
  return static_cast<std::size_t>(it - ends_.begin()) + 1;
}

std::uint64_t align_to_sentences(const SentenceCorpus& corpus, std::uint64_t word_position) {
  if (word_position < 1) throw Error(ErrorCode::InvalidArgument, "word position must be >= 1");
  return corpus.sentence_end(corpus.sentences_covering(word_position) - 1);
}

SentenceCorpus scramble(const SentenceCorpus& corpus, std::uint64_t seed) {
  std::vector<Sentence> s = corpus.sentences();
  std::mt19937_64 gen(detail::splitmix64(seed));
  for (std::size_t i = s.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(detail::bounded(gen, i));
    std::swap(s[i - 1], s[j]);
  }
  return SentenceCorpus(std::move(s));
}

SentenceCorpus parse_corpus(std::istream& in, const std::string& source_name) {
  std::vector<Sentence> sentences;
  Sentence current;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (!current.empty()) sentences.push_back(std::move(current));
      current.clear();
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size())
      throw Error(ErrorCode::CorpusParse, source_name + ":" + std::to_string(lineno) +
                                              ": expected 'word<TAB>tag'");
    current.push_back({line.substr(0, tab), line.substr(tab + 1)});
  }
  if (!current.empty()) sentences.push_back(std::move(current));
  return SentenceCorpus(std::move(sentences));
}

SentenceCorpus read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open corpus " + path.string());
  return parse_corpus(in, path.string());
}

void write_corpus(std::ostream& out, std::span<const Sentence> sentences) {
  for (const auto& s : sentences) {
    for (const auto& t : s) out << t.word << '\t' << t.tag << '\n';
    out << '\n';
  }
}

}  // namespace colts
