#pragma once

// Learners observed by the sampler: a closed-form synthetic curve, a
// most-frequent-tag baseline tagger and an adapter around external commands.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "colts/scheme.hpp"

namespace colts {

enum class LearnerKind { Synthetic, BaselineTagger, External };

struct SyntheticCurve {
  double a = 542.5451;
  double b = 0.3838;
  double c = 99.2876;
  double noise = 0.0;  // uniform in [-noise, +noise]
  std::uint64_t seed = 0;
};

struct LearnerSpec {
  LearnerKind kind = LearnerKind::Synthetic;
  SyntheticCurve synthetic;
  /// Shell command with `{train}` and `{test}` placeholders.
  std::string command;

  static LearnerSpec make_synthetic(double a, double b, double c, double noise = 0.0,
                                    std::uint64_t seed = 0);
  static LearnerSpec make_baseline_tagger();
  static LearnerSpec make_external(std::string command);

  void validate() const;
};

std::string to_string(LearnerKind kind);

struct AccuracyReport {
  double accuracy = 0.0;  // percent of tokens tagged correctly
  std::uint64_t tokens_evaluated = 0;
};

/// A run of sentences taken (in order) from a corpus. Synthetic learners only
/// read `words`.
struct CorpusView {
  std::vector<const Sentence*> sentences;
  std::uint64_t words = 0;

  static CorpusView of(const SentenceCorpus& corpus);
  static CorpusView virtual_words(std::uint64_t words);
  /// Shortest leading run of sentences holding at least `word_position` words.
  CorpusView prefix(std::uint64_t word_position) const;
};

/// `stream` separates independent noise draws (one per fold).
AccuracyReport measure(const LearnerSpec& learner, const CorpusView& train,
                       const CorpusView& heldout, std::uint64_t stream = 0);

/// Closed-form synthetic accuracy, noise included.
double synthetic_accuracy(const SyntheticCurve& curve, std::uint64_t position, std::uint64_t stream);

// ---------------------------------------------------------------------------

/// Most frequent tag per word, backing off to the most frequent tag of the
/// longest known suffix (up to five characters), then to the global one.
class BaselineTagger {
 public:
  static constexpr std::size_t kMaxSuffix = 5;

  void train(std::span<const Sentence* const> sentences);
  std::string tag(const std::string& word) const;
  AccuracyReport evaluate(std::span<const Sentence* const> sentences) const;

 private:
  using Counts = std::map<std::string, std::uint64_t>;
  static std::string best(const Counts& counts);

  std::unordered_map<std::string, std::string> lexicon_;
  std::unordered_map<std::string, std::string> suffixes_;
  std::string fallback_;
};

AccuracyReport run_external(const std::string& command_template, const CorpusView& train,
                            const CorpusView& heldout);

/// Parses the `accuracy: <decimal>` line of an external learner's output.
std::optional<double> parse_external_accuracy(const std::string& output);

// ---------------------------------------------------------------------------
// Evaluation of a learner along a training sequence.

struct FoldSplit {
  std::size_t begin = 0;  // heldout sentence range [begin, end)
  std::size_t end = 0;
};

/// Contiguous, disjoint, covering sentence blocks.
std::vector<FoldSplit> kfold_partition(std::size_t sentence_count, unsigned k);

struct EvaluationSpec {
  unsigned folds = 10;             // <= 1 means a single train/heldout split
  double heldout_fraction = 0.1;   // single split only
  std::uint64_t seed = 0;
  std::uint64_t virtual_words = 1'170'000;  // synthetic learners only
  unsigned threads = 0;            // 0: hardware concurrency
};

/// Accuracy as a function of training size: the mean over folds of the
/// learner trained on the leading `position` words of each fold's training
/// sequence. Results are memoised; concurrent callers are safe.
class AccuracySource {
 public:
  /// Synthetic learner on a virtual corpus of `spec.virtual_words` words.
  AccuracySource(LearnerSpec learner, EvaluationSpec spec);
  /// Corpus-backed learner. `heldout`, when given, replaces fold/fraction
  /// splitting: the whole corpus trains and `heldout` evaluates.
  AccuracySource(LearnerSpec learner, std::shared_ptr<const SentenceCorpus> corpus,
                 EvaluationSpec spec, std::shared_ptr<const SentenceCorpus> heldout = nullptr);

  /// Largest position every fold can train on.
  std::uint64_t capacity() const noexcept { return capacity_; }
  /// Sentence alignment on the training sequence positions are reported in.
  std::uint64_t align(std::uint64_t word_position) const;
  double accuracy_at(std::uint64_t position);
  std::vector<double> fold_accuracies(std::uint64_t position);

  const LearnerSpec& learner() const noexcept { return learner_; }
  const EvaluationSpec& spec() const noexcept { return spec_; }
  std::size_t fold_count() const noexcept { return folds_.size(); }
  const std::vector<FoldSplit>& folds() const noexcept { return splits_; }

 private:
  struct Fold {
    CorpusView train;
    CorpusView heldout;
  };

  LearnerSpec learner_;
  EvaluationSpec spec_;
  std::shared_ptr<const SentenceCorpus> corpus_;
  std::shared_ptr<const SentenceCorpus> heldout_;
  std::vector<FoldSplit> splits_;
  std::vector<Fold> folds_;
  std::uint64_t capacity_ = 0;

  std::mutex mutex_;
  std::map<std::uint64_t, double> cache_;
};

std::vector<double> kfold_curve(const LearnerSpec& learner, const SentenceCorpus& corpus,
                                std::span<const std::uint64_t> positions, unsigned k,
                                std::uint64_t seed);
/// Synthetic learners: folds over a virtual corpus of `words` items.
std::vector<double> kfold_curve(const LearnerSpec& learner, std::uint64_t words,
                                std::span<const std::uint64_t> positions, unsigned k,
                                std::uint64_t seed);

}  // namespace colts
