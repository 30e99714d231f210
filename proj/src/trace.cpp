#include "colts/trace.hpp"

#include <cmath>
#include <span>
#include <string>

#include "colts/error.hpp"

namespace colts {

void LearningTrace::extend(const Observation& obs) {
  if (!observations_.empty() && obs.position <= observations_.back().position)
    throw Error(ErrorCode::NonMonotonePositions,
                "position " + std::to_string(obs.position) + " does not follow " +
                    std::to_string(observations_.back().position));
  check_observations(std::span<const Observation>(&obs, 1));

  observations_.push_back(obs);
  trends_.emplace_back();
  anchored_.emplace_back();
  anchors_.emplace_back();
  const std::size_t level = levels();
  if (level < 3) return;

  FitOptions opt;
  opt.warm_start = trends_[level - 2];
  trends_[level - 1] = fit(observations_, opt);
  if (omega_ && level > *omega_) fit_anchored(level);
}

std::optional<double> LearningTrace::next_anchor(std::size_t level) const {
  // Walk back to the most recent asymptote available; omega's own backbone
  // value seeds the sequence.
  for (std::size_t l = level - 1; l > *omega_; --l)
    if (anchored_[l - 1]) return anchored_[l - 1]->c;
  return alpha(*omega_);
}

void LearningTrace::fit_anchored(std::size_t level) {
  const auto anchor = next_anchor(level);
  anchors_[level - 1] = anchor;
  if (!anchor) throw Error(ErrorCode::WLevelUndefined, "working level has no asymptote");
  FitOptions opt;
  opt.anchor = anchor;
  opt.warm_start = anchored_[level - 2] ? anchored_[level - 2] : trends_[level - 1];
  anchored_[level - 1] = fit(std::span(observations_).first(level), opt);
}

void LearningTrace::anchor_from(std::size_t omega) {
  if (omega < 1 || omega > levels() || !alpha(omega))
    throw Error(ErrorCode::WLevelUndefined, "working level has no fitted trend");
  omega_ = omega;
  for (std::size_t l = 1; l <= levels(); ++l) {
    anchored_[l - 1].reset();
    anchors_[l - 1].reset();
  }
  for (std::size_t l = omega + 1; l <= levels(); ++l) {
    try {
      fit_anchored(l);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::FitDiverged) throw;
    }
  }
}

void LearningTrace::truncate(std::size_t levels) {
  if (levels >= observations_.size()) return;
  observations_.resize(levels);
  trends_.resize(levels);
  anchored_.resize(levels);
  anchors_.resize(levels);
  if (omega_ && *omega_ > levels) omega_.reset();
}

std::optional<PowerFit> LearningTrace::effective_trend(std::size_t level) const {
  if (anchored_.at(level - 1)) return anchored_[level - 1];
  return trends_.at(level - 1);
}

std::optional<double> LearningTrace::alpha(std::size_t level) const {
  const auto& t = trends_.at(level - 1);
  return t ? std::optional<double>(t->c) : std::nullopt;
}

std::optional<double> LearningTrace::anchored_alpha(std::size_t level) const {
  const auto& t = anchored_.at(level - 1);
  return t ? std::optional<double>(t->c) : std::nullopt;
}

Backbone LearningTrace::backbone() const {
  Backbone bb;
  for (std::size_t l = 1; l <= levels(); ++l) {
    bb.positions.push_back(position(l));
    bb.alpha.push_back(alpha(l));
  }
  return bb;
}

bool LearningTrace::is_relevant(std::size_t level, double tolerance) const {
  if (level < 3 || level + 1 > levels())
    throw Error(ErrorCode::MissingTrend, "relevance needs trends at two consecutive levels");
  const auto cur = effective_trend(level);
  const auto next = effective_trend(level + 1);
  if (!cur || !next) throw Error(ErrorCode::MissingTrend, "trend missing at level " + std::to_string(level));
  const double s0 = slope(*cur, static_cast<double>(position(level)));
  const double s1 = slope(*next, static_cast<double>(position(level + 1)));
  return std::fabs(s0 - s1) > tolerance;
}

std::vector<double> canonical_anchor_sequence(const LearningTrace& trace, std::size_t omega) {
  LearningTrace copy = trace;
  copy.anchor_from(omega);
  std::vector<double> out;
  for (std::size_t l = omega + 1; l <= copy.levels(); ++l) {
    const auto a = copy.anchor(l);
    if (!a) throw Error(ErrorCode::WLevelUndefined, "no anchor available");
    out.push_back(*a);
  }
  return out;
}

}  // namespace colts
