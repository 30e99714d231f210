#include "colts/learners.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

#include "colts/error.hpp"
#include "rng.hpp"

namespace colts {

LearnerSpec LearnerSpec::make_synthetic(double a, double b, double c, double noise,
                                        std::uint64_t seed) {
  LearnerSpec s;
  s.kind = LearnerKind::Synthetic;
  s.synthetic = {a, b, c, noise, seed};
  s.validate();
  return s;
}

LearnerSpec LearnerSpec::make_baseline_tagger() {
  LearnerSpec s;
  s.kind = LearnerKind::BaselineTagger;
  return s;
}

LearnerSpec LearnerSpec::make_external(std::string command) {
  LearnerSpec s;
  s.kind = LearnerKind::External;
  s.command = std::move(command);
  s.validate();
  return s;
}

void LearnerSpec::validate() const {
  switch (kind) {
    case LearnerKind::Synthetic: {
      const auto& c = synthetic;
      if (!(c.a > 0.0) || !(c.b > 0.0))
        throw Error(ErrorCode::InvalidArgument, "synthetic a and b must be positive");
      if (!(c.c > 0.0 && c.c <= 100.0))
        throw Error(ErrorCode::InvalidArgument, "synthetic asymptote must lie in (0,100]");
      if (!(c.noise >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise must be >= 0");
      break;
    }
    case LearnerKind::External:
      if (command.empty()) throw Error(ErrorCode::InvalidArgument, "external learner needs a command");
      break;
    case LearnerKind::BaselineTagger: break;
  }
}

std::string to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::Synthetic: return "synthetic";
    case LearnerKind::BaselineTagger: return "baseline";
    case LearnerKind::External: return "external";
  }
  return "unknown";
}

CorpusView CorpusView::of(const SentenceCorpus& corpus) {
  CorpusView v;
  v.sentences.reserve(corpus.sentence_count());
  for (const auto& s : corpus.sentences()) v.sentences.push_back(&s);
  v.words = corpus.word_count();
  return v;
}

CorpusView CorpusView::virtual_words(std::uint64_t words) {
  CorpusView v;
  v.words = words;
  return v;
}

CorpusView CorpusView::prefix(std::uint64_t word_position) const {
  if (word_position > words)
    throw Error(ErrorCode::PositionBeyondFold,
                "position " + std::to_string(word_position) + " beyond " + std::to_string(words) +
                    " training words");
  CorpusView out;
  if (sentences.empty()) {
    out.words = word_position;
    return out;
  }
  for (const Sentence* s : sentences) {
    if (out.words >= word_position) break;
    out.sentences.push_back(s);
    out.words += s->size();
  }
  return out;
}

double synthetic_accuracy(const SyntheticCurve& curve, std::uint64_t position, std::uint64_t stream) {
  double acc = curve.c - curve.a * std::pow(static_cast<double>(position), -curve.b);
  if (curve.noise > 0.0) {
    const std::uint64_t bits = detail::mix(detail::mix(curve.seed, stream), position);
    acc += (2.0 * detail::unit(bits) - 1.0) * curve.noise;
  }
  return std::clamp(acc, 1e-9, 100.0);
}

AccuracyReport measure(const LearnerSpec& learner, const CorpusView& train,
                       const CorpusView& heldout, std::uint64_t stream) {
  if (train.words == 0) throw Error(ErrorCode::InvalidArgument, "empty training sample");
  switch (learner.kind) {
    case LearnerKind::Synthetic:
      return {synthetic_accuracy(learner.synthetic, train.words, stream), heldout.words};
    case LearnerKind::BaselineTagger: {
      if (heldout.sentences.empty()) throw Error(ErrorCode::InvalidArgument, "empty heldout sample");
      BaselineTagger tagger;
      tagger.train(train.sentences);
      return tagger.evaluate(heldout.sentences);
    }
    case LearnerKind::External:
      if (heldout.sentences.empty()) throw Error(ErrorCode::InvalidArgument, "empty heldout sample");
      return run_external(learner.command, train, heldout);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown learner");
}

// ---------------------------------------------------------------------------

namespace {

// Suffix of `n` UTF-8 characters, or empty when the word is shorter.
std::string utf8_suffix(const std::string& w, std::size_t n) {
  std::size_t chars = 0;
  std::size_t i = w.size();
  while (i > 0 && chars < n) {
    --i;
    if ((static_cast<unsigned char>(w[i]) & 0xC0) != 0x80) ++chars;
  }
  return chars == n ? w.substr(i) : std::string();
}

}  // namespace

std::string BaselineTagger::best(const Counts& counts) {
  std::string tag;
  std::uint64_t top = 0;
  for (const auto& [t, n] : counts)
    if (n > top) {
      top = n;
      tag = t;
    }
  return tag;
}

void BaselineTagger::train(std::span<const Sentence* const> sentences) {
  std::unordered_map<std::string, Counts> words;
  std::unordered_map<std::string, Counts> suffixes;
  Counts global;
  for (const Sentence* s : sentences)
    for (const Token& t : *s) {
      ++words[t.word][t.tag];
      ++global[t.tag];
      for (std::size_t n = 1; n <= kMaxSuffix; ++n) {
        auto suf = utf8_suffix(t.word, n);
        if (suf.empty()) break;
        ++suffixes[suf][t.tag];
      }
    }
  lexicon_.clear();
  suffixes_.clear();
  for (const auto& [w, c] : words) lexicon_.emplace(w, best(c));
  for (const auto& [s, c] : suffixes) suffixes_.emplace(s, best(c));
  fallback_ = best(global);
}

std::string BaselineTagger::tag(const std::string& word) const {
  if (auto it = lexicon_.find(word); it != lexicon_.end()) return it->second;
  for (std::size_t n = kMaxSuffix; n >= 1; --n) {
    auto suf = utf8_suffix(word, n);
    if (suf.empty()) continue;
    if (auto it = suffixes_.find(suf); it != suffixes_.end()) return it->second;
  }
  return fallback_;
}

AccuracyReport BaselineTagger::evaluate(std::span<const Sentence* const> sentences) const {
  std::uint64_t correct = 0, total = 0;
  for (const Sentence* s : sentences)
    for (const Token& t : *s) {
      ++total;
      if (tag(t.word) == t.tag) ++correct;
    }
  if (total == 0) throw Error(ErrorCode::InvalidArgument, "nothing to evaluate");
  return {100.0 * static_cast<double>(correct) / static_cast<double>(total), total};
}

// ---------------------------------------------------------------------------

std::vector<FoldSplit> kfold_partition(std::size_t sentence_count, unsigned k) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "k-fold needs k >= 2");
  if (sentence_count < k)
    throw Error(ErrorCode::InvalidArgument, "fewer sentences than folds");
  std::vector<FoldSplit> out;
  for (unsigned f = 0; f < k; ++f)
    out.push_back({sentence_count * f / k, sentence_count * (f + 1) / k});
  return out;
}

AccuracySource::AccuracySource(LearnerSpec learner, EvaluationSpec spec)
    : learner_(std::move(learner)), spec_(spec) {
  if (learner_.kind != LearnerKind::Synthetic)
    throw Error(ErrorCode::InvalidArgument, "only synthetic learners run without a corpus");
  learner_.validate();
  const std::uint64_t n = spec_.virtual_words;
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "virtual corpus must be nonempty");
  const unsigned k = std::max(1u, spec_.folds);
  for (unsigned f = 0; f < k; ++f) {
    const std::uint64_t held = k > 1 ? n * (f + 1) / k - n * f / k : 0;
    folds_.push_back({CorpusView::virtual_words(n - held), CorpusView::virtual_words(held)});
  }
  capacity_ = n;
  for (const auto& f : folds_) capacity_ = std::min(capacity_, f.train.words);
}

AccuracySource::AccuracySource(LearnerSpec learner, std::shared_ptr<const SentenceCorpus> corpus,
                               EvaluationSpec spec, std::shared_ptr<const SentenceCorpus> heldout)
    : learner_(std::move(learner)), spec_(spec), corpus_(std::move(corpus)), heldout_(std::move(heldout)) {
  learner_.validate();
  if (!corpus_ || corpus_->empty()) throw Error(ErrorCode::InvalidArgument, "corpus is empty");
  const auto& ss = corpus_->sentences();
  const auto view = [&](std::size_t b, std::size_t e) {
    CorpusView v;
    for (std::size_t i = b; i < e; ++i) {
      v.sentences.push_back(&ss[i]);
      v.words += ss[i].size();
    }
    return v;
  };
  if (heldout_) {
    if (heldout_->empty()) throw Error(ErrorCode::InvalidArgument, "heldout corpus is empty");
    folds_.push_back({CorpusView::of(*corpus_), CorpusView::of(*heldout_)});
  } else if (spec_.folds >= 2) {
    splits_ = kfold_partition(ss.size(), spec_.folds);
    for (const auto& sp : splits_) {
      Fold f;
      f.heldout = view(sp.begin, sp.end);
      f.train = view(0, sp.begin);
      const auto tail = view(sp.end, ss.size());
      f.train.sentences.insert(f.train.sentences.end(), tail.sentences.begin(), tail.sentences.end());
      f.train.words += tail.words;
      folds_.push_back(std::move(f));
    }
  } else {
    if (!(spec_.heldout_fraction > 0.0 && spec_.heldout_fraction < 1.0))
      throw Error(ErrorCode::InvalidArgument, "heldout fraction must lie in (0,1)");
    if (ss.size() < 2) throw Error(ErrorCode::InvalidArgument, "corpus too small to hold out data");
    auto held = static_cast<std::size_t>(std::ceil(spec_.heldout_fraction * static_cast<double>(ss.size())));
    held = std::clamp<std::size_t>(held, 1, ss.size() - 1);
    folds_.push_back({view(0, ss.size() - held), view(ss.size() - held, ss.size())});
  }
  capacity_ = UINT64_MAX;
  for (const auto& f : folds_) capacity_ = std::min(capacity_, f.train.words);
}

std::uint64_t AccuracySource::align(std::uint64_t word_position) const {
  if (!corpus_) return word_position;
  return align_to_sentences(*corpus_, word_position);
}

std::vector<double> AccuracySource::fold_accuracies(std::uint64_t position) {
  if (position == 0 || position > capacity_)
    throw Error(ErrorCode::PositionBeyondFold,
                "position " + std::to_string(position) + " outside fold training size " +
                    std::to_string(capacity_));
  std::vector<double> out(folds_.size());
  const auto one = [&](std::size_t f) {
    const auto& fold = folds_[f];
    return measure(learner_, fold.train.prefix(position), fold.heldout,
                   detail::mix(spec_.seed, f)).accuracy;
  };
  unsigned threads = spec_.threads ? spec_.threads : std::max(1u, std::thread::hardware_concurrency());
  if (learner_.kind == LearnerKind::Synthetic || threads <= 1 || folds_.size() <= 1) {
    for (std::size_t f = 0; f < folds_.size(); ++f) out[f] = one(f);
    return out;
  }
  // Folds in parallel, at most `threads` at a time; the result order is fixed.
  for (std::size_t start = 0; start < folds_.size(); start += threads) {
    std::vector<std::future<double>> jobs;
    const std::size_t stop = std::min<std::size_t>(folds_.size(), start + threads);
    for (std::size_t f = start; f < stop; ++f) jobs.push_back(std::async(std::launch::async, one, f));
    for (std::size_t f = start; f < stop; ++f) out[f] = jobs[f - start].get();
  }
  return out;
}

double AccuracySource::accuracy_at(std::uint64_t position) {
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(position); it != cache_.end()) return it->second;
  }
  const auto per_fold = fold_accuracies(position);
  // Offsets from the first fold keep identical folds exactly equal to it.
  double spread = 0.0;
  for (double v : per_fold) spread += v - per_fold.front();
  const double mean = per_fold.front() + spread / static_cast<double>(per_fold.size());
  std::lock_guard lock(mutex_);
  cache_.emplace(position, mean);
  return mean;
}

std::vector<double> kfold_curve(const LearnerSpec& learner, const SentenceCorpus& corpus,
                                std::span<const std::uint64_t> positions, unsigned k,
                                std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "k-fold needs k >= 2");
  EvaluationSpec spec;
  spec.folds = k;
  spec.seed = seed;
  AccuracySource src(learner, std::make_shared<const SentenceCorpus>(corpus), spec);
  std::vector<double> out;
  for (auto p : positions) out.push_back(src.accuracy_at(p));
  return out;
}

std::vector<double> kfold_curve(const LearnerSpec& learner, std::uint64_t words,
                                std::span<const std::uint64_t> positions, unsigned k,
                                std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "k-fold needs k >= 2");
  EvaluationSpec spec;
  spec.folds = k;
  spec.seed = seed;
  spec.virtual_words = words;
  AccuracySource src(learner, spec);
  std::vector<double> out;
  for (auto p : positions) out.push_back(src.accuracy_at(p));
  return out;
}

}  // namespace colts
