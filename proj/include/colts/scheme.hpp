#pragma once

// Learning schemes: a kernel of initial items plus a step function that grows
// nested individuals D1 < D2 < ... over the training data.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace colts {

enum class StepKind { Arithmetic, Geometric, Colts };

struct StepFunction {
  StepKind kind = StepKind::Arithmetic;
  std::uint64_t difference = 0;  // arithmetic
  double ratio = 0.0;            // geometric
  double port = 0.0;             // colts

  static StepFunction arithmetic(std::uint64_t eta);
  static StepFunction geometric(double rho);
  static StepFunction colts(double port);
};

std::string describe(const StepFunction& step);

struct LearningScheme {
  std::uint64_t kernel_size = 0;
  StepFunction step;
  /// Uniform step used while the guard is in force.
  std::uint64_t uniform_step = 0;
  /// Levels 2..plevel_guard grow by `uniform_step`; the step function only
  /// takes over for the level after the guard.
  std::optional<std::size_t> plevel_guard;

  static LearningScheme baseline(std::uint64_t kernel, std::uint64_t eta);
  static LearningScheme guarded(std::uint64_t kernel, std::uint64_t eta, StepFunction step,
                                std::optional<std::size_t> plevel_guard);

  /// True when level `level` (>= 2) is still reached with the uniform step.
  bool uniform_at(std::size_t level) const;
};

/// Ceiling that forgives representation error (1e-9 relative) so that values
/// like 0.3 * 10 land on 3 rather than 4.
std::uint64_t ceil_count(double v);

/// Geometric increment taken from a level sitting at `position`.
std::uint64_t geometric_step(std::uint64_t position, double rho);

/// Item count of the individual at `level` for schemes whose growth does not
/// depend on observed accuracy. COLTS levels past the guard need a trace and
/// are rejected here.
std::uint64_t position_of(const LearningScheme& scheme, std::size_t level);

// ---------------------------------------------------------------------------
// Sentence corpora

struct Token {
  std::string word;
  std::string tag;

  friend bool operator==(const Token&, const Token&) = default;
  friend auto operator<=>(const Token&, const Token&) = default;
};

using Sentence = std::vector<Token>;

class SentenceCorpus {
 public:
  SentenceCorpus() = default;
  explicit SentenceCorpus(std::vector<Sentence> sentences);

  const std::vector<Sentence>& sentences() const noexcept { return sentences_; }
  std::size_t sentence_count() const noexcept { return sentences_.size(); }
  std::uint64_t word_count() const noexcept { return ends_.empty() ? 0 : ends_.back(); }
  bool empty() const noexcept { return sentences_.empty(); }

  /// Word position just past sentence `i`.
  std::uint64_t sentence_end(std::size_t i) const { return ends_.at(i); }
  /// Number of whole sentences needed to cover `word_position` words.
  std::size_t sentences_covering(std::uint64_t word_position) const;

 private:
  std::vector<Sentence> sentences_;
  std::vector<std::uint64_t> ends_;
};

/// Smallest sentence-final position >= word_position.
std::uint64_t align_to_sentences(const SentenceCorpus& corpus, std::uint64_t word_position);

/// Deterministic sentence-level permutation.
SentenceCorpus scramble(const SentenceCorpus& corpus, std::uint64_t seed);

/// `word<TAB>tag` per line, blank line between sentences.
SentenceCorpus parse_corpus(std::istream& in, const std::string& source_name = "<stream>");
SentenceCorpus read_corpus(const std::filesystem::path& path);
void write_corpus(std::ostream& out, std::span<const Sentence> sentences);

}  // namespace colts
