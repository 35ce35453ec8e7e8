#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "reaction_lens/corpus.hpp"
#include "reaction_lens/random.hpp"

namespace reaction_lens {

// Parameters of the synthetic reaction corpus. Each word carries a latent
// affinity over the core reactions; a post's core reactions are drawn from the
// mean affinity of its words, and Like is layered on top with a per-post share
// centred on `like_dominance`.
struct SynthSpec {
  std::uint64_t rows = 50'000;
  std::uint32_t vocab_size = 2'000;
  // Base rates of love, wow, haha, sad, angry (normalized on use). Defaults
  // follow the corpus-wide core shares of the Sinhala Facebook corpus.
  std::array<double, 5> prior = {0.4956, 0.0754, 0.2581, 0.1182, 0.0526};
  // Total Dirichlet mass of each word's affinity around the prior. Smaller is
  // a stronger word signal; 0 gives every word exactly the prior.
  double affinity_concentration = 1.5;
  std::uint32_t min_words = 4;
  std::uint32_t max_words = 12;
  // Word frequencies follow a Zipf law with this exponent (0 = uniform).
  double zipf_exponent = 1.0;
  // Mean total reactions per post (at least 1 of them non-like).
  double reaction_scale = 400.0;
  // Expected Like share of all reactions, in [0, 1).
  double like_dominance = 0.95;
  // Beta concentration of the per-post Like share; 0 fixes it at
  // `like_dominance` for every post.
  double like_concentration = 20.0;
  double thankful_rate = 0.0005;
  // Per-message probability of injecting a token the cleaner removes (URL,
  // number, @user, #tag, non-Sinhala script) and of a U+200D inside a word.
  double noise_rate = 0.0;
  std::uint64_t seed = 1;

  // Throws InvalidSpec.
  void validate() const;
};

class SyntheticCorpus {
 public:
  explicit SyntheticCorpus(const SynthSpec& spec);

  const std::vector<std::string>& words() const noexcept { return words_; }
  // Normalized core affinity (love, wow, haha, sad, angry) per word.
  const std::vector<std::array<double, 5>>& affinities() const noexcept { return affinities_; }

  // Next post; ids count up from 1.
  PostRecord next();

  // Writes `spec.rows` posts as CSV.
  void write_csv(std::ostream& out);
  // word<TAB>love<TAB>wow<TAB>haha<TAB>sad<TAB>angry, 17 significant digits.
  void write_affinities(std::ostream& out) const;

 private:
  std::size_t sample_word();
  std::uint64_t binomial(std::uint64_t n, double p);
  double beta(double a, double b);

  SynthSpec spec_;
  Rng rng_;
  std::vector<std::string> words_;
  std::vector<std::array<double, 5>> affinities_;
  std::vector<double> word_cdf_;
  std::uint64_t emitted_ = 0;
};

}  // namespace reaction_lens
