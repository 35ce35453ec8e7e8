#include "reaction_lens/star_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "reaction_lens/errors.hpp"

namespace reaction_lens {

std::optional<Polarity> polarity(Reaction r) noexcept {
  switch (r) {
    case Reaction::love:
    case Reaction::wow:
      return Polarity::positive;
    case Reaction::sad:
    case Reaction::angry:
      return Polarity::negative;
    case Reaction::haha:
      return Polarity::uncertain;
    case Reaction::like:
    case Reaction::thankful:
      return std::nullopt;
  }
  return std::nullopt;
}

PolarityMass star_normalize(const ReactionCounts& counts) {
  std::uint64_t pos = 0;
  std::uint64_t neg = 0;
  for (Reaction r : kAllReactions) {
    const auto p = polarity(r);
    if (p == Polarity::positive) pos += counts[r];
    if (p == Polarity::negative) neg += counts[r];
  }
  const std::uint64_t total = pos + neg;
  if (total == 0) throw ZeroReactionTotal("no love, wow, sad or angry reactions on entry");

  // Per-reaction shares summed, matching N'_love + N'_wow rather than a
  // single division of the pooled count.
  const auto t = static_cast<double>(total);
  PolarityMass mass;
  mass.positive = static_cast<double>(counts[Reaction::love]) / t +
                  static_cast<double>(counts[Reaction::wow]) / t;
  mass.negative = static_cast<double>(counts[Reaction::sad]) / t +
                  static_cast<double>(counts[Reaction::angry]) / t;
  return mass;
}

double star_scale(double aggregate, const StarRange& range) {
  if (!(range.max > range.min)) {
    throw DegenerateRange("star scaling needs max > min (got min=" + std::to_string(range.min) +
                          ", max=" + std::to_string(range.max) + ")");
  }
  const double s = 4.0 * ((aggregate - range.min) / (range.max - range.min)) + 1.0;
  return std::clamp(s, kStarMin, kStarMax);
}

double discretize_star(double star) noexcept {
  return std::floor(star * 2.0 + 0.5) / 2.0;
}

ComponentVector StarSentiment::to_vector() const {
  return ComponentVector{positive, negative, star_disc, star};
}

StarSentiment star_sentiment(const PolarityMass& mass, const StarRange& range) {
  StarSentiment s;
  s.positive = mass.positive;
  s.negative = mass.negative;
  s.aggregate = mass.aggregate();
  s.star = star_scale(s.aggregate, range);
  s.star_disc = std::clamp(discretize_star(s.star), kStarMin, kStarMax);
  return s;
}

StarTrainingSet build_star_vectors(std::span<const PolarityMass> masses) {
  StarTrainingSet out;
  if (masses.empty()) throw DegenerateRange("no entries to scale");
  out.range.min = out.range.max = masses.front().aggregate();
  for (const auto& m : masses) {
    out.range.min = std::min(out.range.min, m.aggregate());
    out.range.max = std::max(out.range.max, m.aggregate());
  }
  if (!(out.range.max > out.range.min)) {
    throw DegenerateRange("every entry has the same aggregate sentiment");
  }
  out.entries.reserve(masses.size());
  for (const auto& m : masses) out.entries.push_back(star_sentiment(m, out.range));
  return out;
}

StarTrainingSet build_star_vectors(std::span<const ReactionCounts> counts) {
  std::vector<PolarityMass> masses;
  masses.reserve(counts.size());
  for (const auto& c : counts) masses.push_back(star_normalize(c));
  return build_star_vectors(masses);
}

double gaussian_similarity(double predicted, double actual, double sigma) {
  if (!(sigma > 0.0)) throw NonPositiveSigma("sigma must be positive");
  const double d = predicted - actual;
  return std::exp(-(d * d) / (2.0 * sigma * sigma));
}

}  // namespace reaction_lens
