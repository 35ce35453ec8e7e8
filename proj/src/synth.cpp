#include "reaction_lens/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "reaction_lens/errors.hpp"
#include "reaction_lens/lexicon_io.hpp"
#include "reaction_lens/utf8.hpp"

namespace reaction_lens {

namespace {

// U+0D9A..U+0DAB: eighteen consecutive assigned Sinhala consonants.
constexpr char32_t kFirstConsonant = 0x0D9A;
constexpr std::uint32_t kConsonants = 18;
constexpr char32_t kWordPrefix = 0x0DC3;  // SINHALA LETTER DANTAJA SAYANNA

std::string synthetic_word(std::uint32_t index) {
  std::string w;
  utf8::append(w, kWordPrefix);
  do {
    utf8::append(w, kFirstConsonant + index % kConsonants);
    index /= kConsonants;
  } while (index > 0);
  return w;
}

}  // namespace

void SynthSpec::validate() const {
  if (rows == 0) throw InvalidSpec("rows must be positive");
  if (vocab_size == 0) throw InvalidSpec("vocabulary size must be positive");
  if (min_words == 0 || max_words < min_words) {
    throw InvalidSpec("need 1 <= min_words <= max_words");
  }
  double prior_sum = 0.0;
  for (double p : prior) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidSpec("prior entries must be >= 0");
    prior_sum += p;
  }
  if (!(prior_sum > 0.0)) throw InvalidSpec("prior must have positive mass");
  if (!(affinity_concentration >= 0.0)) throw InvalidSpec("affinity concentration must be >= 0");
  if (!(zipf_exponent >= 0.0)) throw InvalidSpec("zipf exponent must be >= 0");
  if (!(reaction_scale >= 1.0)) throw InvalidSpec("reaction scale must be >= 1");
  if (!(like_dominance >= 0.0 && like_dominance < 1.0)) {
    throw InvalidSpec("like dominance must lie in [0, 1)");
  }
  if (!(like_concentration >= 0.0)) throw InvalidSpec("like concentration must be >= 0");
  if (!(thankful_rate >= 0.0 && thankful_rate < 1.0)) {
    throw InvalidSpec("thankful rate must lie in [0, 1)");
  }
  if (!(noise_rate >= 0.0 && noise_rate <= 1.0)) throw InvalidSpec("noise rate must lie in [0, 1]");
}

SyntheticCorpus::SyntheticCorpus(const SynthSpec& spec) : spec_(spec), rng_(spec.seed) {
  spec_.validate();
  std::array<double, 5> prior = spec_.prior;
  const double prior_sum = std::accumulate(prior.begin(), prior.end(), 0.0);
  for (double& p : prior) p /= prior_sum;

  words_.reserve(spec_.vocab_size);
  affinities_.reserve(spec_.vocab_size);
  for (std::uint32_t i = 0; i < spec_.vocab_size; ++i) {
    words_.push_back(synthetic_word(i));
    std::array<double, 5> theta = prior;
    if (spec_.affinity_concentration > 0.0) {
      double total = 0.0;
      for (std::size_t k = 0; k < 5; ++k) {
        const double alpha = spec_.affinity_concentration * prior[k];
        theta[k] = alpha > 0.0 ? std::gamma_distribution<double>(alpha)(rng_.engine()) : 0.0;
        total += theta[k];
      }
      if (total > 0.0) {
        for (double& t : theta) t /= total;
      } else {
        theta = prior;
      }
    }
    affinities_.push_back(theta);
  }

  word_cdf_.resize(spec_.vocab_size);
  double acc = 0.0;
  for (std::uint32_t i = 0; i < spec_.vocab_size; ++i) {
    acc += 1.0 / std::pow(static_cast<double>(i + 1), spec_.zipf_exponent);
    word_cdf_[i] = acc;
  }
  for (double& c : word_cdf_) c /= acc;
}

std::size_t SyntheticCorpus::sample_word() {
  const double u = rng_.uniform();
  const auto it = std::upper_bound(word_cdf_.begin(), word_cdf_.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - word_cdf_.begin()),
                               word_cdf_.size() - 1);
}

std::uint64_t SyntheticCorpus::binomial(std::uint64_t n, double p) {
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  return std::binomial_distribution<std::uint64_t>(n, p)(rng_.engine());
}

double SyntheticCorpus::beta(double a, double b) {
  const double x = std::gamma_distribution<double>(a)(rng_.engine());
  const double y = std::gamma_distribution<double>(b)(rng_.engine());
  return x + y > 0.0 ? x / (x + y) : a / (a + b);
}

PostRecord SyntheticCorpus::next() {
  PostRecord post;
  post.id = std::to_string(++emitted_);

  const std::uint64_t length =
      spec_.min_words + rng_.index(spec_.max_words - spec_.min_words + 1);
  std::array<double, 5> mixture{};
  for (std::uint64_t i = 0; i < length; ++i) {
    const std::size_t w = sample_word();
    for (std::size_t k = 0; k < 5; ++k) mixture[k] += affinities_[w][k];
    if (!post.message.empty()) post.message.push_back(' ');
    if (spec_.noise_rate > 0.0 && rng_.uniform() < spec_.noise_rate) {
      // ZWJ after the first letter; the cleaner deletes it again.
      std::string word = words_[w];
      std::size_t pos = 0;
      utf8::decode_next(word, pos);
      word.insert(pos, "\xE2\x80\x8D");
      post.message += word;
    } else {
      post.message += words_[w];
    }
  }
  if (spec_.noise_rate > 0.0 && rng_.uniform() < spec_.noise_rate) {
    static constexpr const char* kNoise[] = {"https://example.com/p/", "@user", "#tag",
                                             "2020", "\xF0\x9F\x98\x80"};
    const auto pick = rng_.index(std::size(kNoise));
    std::string token = kNoise[pick];
    if (pick < 3) token += std::to_string(rng_.index(1000));
    post.message += ' ' + token;
  }
  for (double& m : mixture) m /= static_cast<double>(length);

  // Poisson total with at least one reaction that is not a like.
  const std::uint64_t total =
      1 + (spec_.reaction_scale > 1.0
               ? std::poisson_distribution<std::uint64_t>(spec_.reaction_scale - 1.0)(rng_.engine())
               : 0);
  double like_share = spec_.like_dominance;
  if (spec_.like_concentration > 0.0 && like_share > 0.0) {
    like_share = beta(spec_.like_dominance * spec_.like_concentration,
                      (1.0 - spec_.like_dominance) * spec_.like_concentration);
  }
  const std::uint64_t likes = binomial(total - 1, like_share);
  const std::uint64_t thankful = binomial(total - 1 - likes, spec_.thankful_rate);
  std::uint64_t remaining = total - likes - thankful;

  post.reactions[Reaction::like] = likes;
  post.reactions[Reaction::thankful] = thankful;
  const std::array<Reaction, 5> core = {Reaction::love, Reaction::wow, Reaction::haha,
                                        Reaction::sad, Reaction::angry};
  double mass_left = 1.0;
  for (std::size_t k = 0; k < 5; ++k) {
    std::uint64_t n = 0;
    if (k == 4 || mass_left <= 0.0) {
      n = remaining;
    } else {
      n = binomial(remaining, std::clamp(mixture[k] / mass_left, 0.0, 1.0));
    }
    post.reactions[core[k]] = n;
    remaining -= n;
    mass_left -= mixture[k];
  }
  return post;
}

void SyntheticCorpus::write_csv(std::ostream& out) {
  CorpusWriter writer(out, true);
  for (std::uint64_t i = 0; i < spec_.rows; ++i) writer.write(next());
}

void SyntheticCorpus::write_affinities(std::ostream& out) const {
  out << "word\tlove\twow\thaha\tsad\tangry\n";
  for (std::size_t i = 0; i < words_.size(); ++i) {
    out << words_[i];
    for (double a : affinities_[i]) out << '\t' << format_exact17(a);
    out << '\n';
  }
}

}  // namespace reaction_lens
