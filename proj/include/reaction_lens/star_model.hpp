#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "reaction_lens/reactions.hpp"

namespace reaction_lens {

enum class Polarity { positive, negative, uncertain };

// love, wow -> positive; sad, angry -> negative; haha -> uncertain. Like and
// thankful have no polarity and never enter the star model.
std::optional<Polarity> polarity(Reaction r) noexcept;

struct PolarityMass {
  double positive = 0.0;  // normalized love + wow
  double negative = 0.0;  // normalized sad + angry

  double aggregate() const noexcept { return positive - negative; }
};

// Normalizes over love + wow + sad + angry only. Throws ZeroReactionTotal
// when those four are all zero.
PolarityMass star_normalize(const ReactionCounts& counts);

struct StarRange {
  double min = 0.0;
  double max = 0.0;
};

inline constexpr double kStarMin = 1.0;
inline constexpr double kStarMax = 5.0;

// 4 * (aggregate - min) / (max - min) + 1, clamped to [1, 5] for values
// outside the training range. Throws DegenerateRange unless max > min.
double star_scale(double aggregate, const StarRange& range);

// Nearest multiple of 0.5; exact midpoints round up.
double discretize_star(double star) noexcept;

struct StarSentiment {
  double positive = 0.0;
  double negative = 0.0;
  double aggregate = 0.0;
  double star = 0.0;       // continuous, [1, 5]
  double star_disc = 0.0;  // multiple of 0.5 in [1, 5]

  // [positive, negative, star_disc, star] over Schema::star4().
  ComponentVector to_vector() const;
};

StarSentiment star_sentiment(const PolarityMass& mass, const StarRange& range);

struct StarTrainingSet {
  std::vector<StarSentiment> entries;
  StarRange range;
};

// Two passes: the aggregate range over all entries, then one sentiment per
// entry. Throws DegenerateRange when every aggregate is equal (including
// fewer than two entries).
StarTrainingSet build_star_vectors(std::span<const PolarityMass> masses);
StarTrainingSet build_star_vectors(std::span<const ReactionCounts> counts);

// exp(-(predicted - actual)^2 / (2 sigma^2)). Throws NonPositiveSigma.
double gaussian_similarity(double predicted, double actual, double sigma);

}  // namespace reaction_lens
