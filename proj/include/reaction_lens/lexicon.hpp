#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "reaction_lens/reactions.hpp"
#include "reaction_lens/text_cleaner.hpp"

namespace reaction_lens {

using WordId = std::uint32_t;

// Interns words to dense ids.
class Vocabulary {
 public:
  WordId intern(std::string_view word);
  std::optional<WordId> find(std::string_view word) const;
  const std::string& word(WordId id) const { return words_[id]; }
  std::size_t size() const noexcept { return words_.size(); }

 private:
  std::unordered_map<std::string, WordId, StringHash, std::equal_to<>> index_;
  std::vector<std::string> words_;
};

struct Prediction {
  ComponentVector vector;
  // Fraction of the message's distinct words found in the lexicon.
  double coverage = 0.0;
  std::size_t known_words = 0;
};

class LexiconBuilder;

// Finalized word -> averaged vector mapping. Immutable once built; safe to
// share across threads.
class ReactionLexicon {
 public:
  const Schema& schema() const noexcept { return *schema_; }

  // Absent when the lexicon was built from zero training entries.
  const std::optional<ComponentVector>& train_mean() const noexcept { return train_mean_; }
  std::uint64_t training_entries() const noexcept { return training_entries_; }

  // Number of words with at least one training occurrence.
  std::size_t size() const noexcept { return known_; }

  std::optional<ComponentVector> lookup(std::string_view word) const;
  // Number of training entries containing `word` (0 if unknown).
  std::uint64_t occurrences(std::string_view word) const;

  // Mean of the vectors of the known distinct words; the train mean when no
  // word is known. Throws EmptyTrainingSet if the lexicon has no train mean.
  Prediction predict(std::span<const std::string> words) const;
  Prediction predict(std::span<const std::string_view> words) const;

  // Fast path over ids of this lexicon's vocabulary. `ids` must be distinct.
  Prediction predict_ids(std::span<const WordId> ids) const;

  const Vocabulary& vocabulary() const noexcept { return *vocab_; }

  // Visits known words in ascending bytewise order.
  template <typename Fn>
  void for_each_sorted(Fn&& fn) const;

  // Same schema, same train mean, and the same known words with bit-identical
  // vectors and equal occurrence counts.
  friend bool operator==(const ReactionLexicon& a, const ReactionLexicon& b);

  // Assembles a finalized lexicon from persisted parts.
  static ReactionLexicon from_parts(const Schema& schema,
                                    std::vector<std::string> words,
                                    std::vector<std::uint64_t> counts,
                                    std::vector<double> means,
                                    std::optional<ComponentVector> train_mean,
                                    std::uint64_t training_entries);

 private:
  friend class LexiconBuilder;
  ReactionLexicon() = default;

  std::vector<WordId> sorted_known_ids() const;
  ComponentVector vector_at(WordId id) const;

  const Schema* schema_ = nullptr;
  std::shared_ptr<const Vocabulary> vocab_;
  std::vector<double> means_;  // vocab size x schema size, row-major
  std::vector<std::uint64_t> counts_;
  std::size_t known_ = 0;
  std::optional<ComponentVector> train_mean_;
  std::uint64_t training_entries_ = 0;
};

// Accumulates per-word (sum vector, entry count) pairs. Sums use Neumaier
// compensation. Builders over the same vocabulary merge by adding pairs, so
// shards can be built independently.
class LexiconBuilder {
 public:
  LexiconBuilder(const Schema& schema, std::shared_ptr<const Vocabulary> vocab);

  // Adds one training entry. Repeated ids within `ids` count once.
  void add(std::span<const WordId> ids, const ComponentVector& target);
  void merge(const LexiconBuilder& other);

  std::uint64_t entries() const noexcept { return entries_; }

  ReactionLexicon finalize() const;

 private:
  const Schema* schema_;
  std::shared_ptr<const Vocabulary> vocab_;
  std::size_t dims_;
  std::vector<double> sum_;
  std::vector<double> comp_;
  std::vector<std::uint64_t> counts_;
  std::vector<std::uint64_t> last_entry_;
  std::array<double, kMaxComponents> total_sum_{};
  std::array<double, kMaxComponents> total_comp_{};
  std::uint64_t entries_ = 0;
};

struct TrainingEntry {
  std::vector<std::string> words;
  ComponentVector target;
};

// Builds a lexicon from word lists; duplicate words within an entry count
// once. With no entries the result has no train mean and refuses to predict.
ReactionLexicon build_lexicon(std::span<const TrainingEntry> entries, const Schema& schema);

template <typename Fn>
void ReactionLexicon::for_each_sorted(Fn&& fn) const {
  for (WordId id : sorted_known_ids()) {
    fn(vocab_->word(id), counts_[id], vector_at(id));
  }
}

}  // namespace reaction_lens
