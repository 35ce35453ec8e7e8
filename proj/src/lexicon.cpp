#include "reaction_lens/lexicon.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "reaction_lens/errors.hpp"

namespace reaction_lens {

namespace {

inline void neumaier_add(double& sum, double& comp, double x) noexcept {
  const double t = sum + x;
  if (std::abs(sum) >= std::abs(x)) {
    comp += (sum - t) + x;
  } else {
    comp += (x - t) + sum;
  }
  sum = t;
}

}  // namespace

// ---------------------------------------------------------------------------
// Vocabulary

WordId Vocabulary::intern(std::string_view word) {
  if (auto it = index_.find(word); it != index_.end()) return it->second;
  const auto id = static_cast<WordId>(words_.size());
  words_.emplace_back(word);
  index_.emplace(words_.back(), id);
  return id;
}

std::optional<WordId> Vocabulary::find(std::string_view word) const {
  if (auto it = index_.find(word); it != index_.end()) return it->second;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// ReactionLexicon

ComponentVector ReactionLexicon::vector_at(WordId id) const {
  const std::size_t dims = schema_->size();
  ComponentVector v(dims);
  const double* row = means_.data() + static_cast<std::size_t>(id) * dims;
  std::copy(row, row + dims, v.begin());
  return v;
}

std::optional<ComponentVector> ReactionLexicon::lookup(std::string_view word) const {
  const auto id = vocab_->find(word);
  if (!id || *id >= counts_.size() || counts_[*id] == 0) return std::nullopt;
  return vector_at(*id);
}

std::uint64_t ReactionLexicon::occurrences(std::string_view word) const {
  const auto id = vocab_->find(word);
  if (!id || *id >= counts_.size()) return 0;
  return counts_[*id];
}

Prediction ReactionLexicon::predict_ids(std::span<const WordId> ids) const {
  if (!train_mean_) {
    throw EmptyTrainingSet("lexicon was built from an empty training set");
  }
  const std::size_t dims = schema_->size();
  Prediction out;
  out.vector = ComponentVector(dims);
  for (WordId id : ids) {
    if (id >= counts_.size() || counts_[id] == 0) continue;
    const double* row = means_.data() + static_cast<std::size_t>(id) * dims;
    for (std::size_t k = 0; k < dims; ++k) out.vector[k] += row[k];
    ++out.known_words;
  }
  if (out.known_words == 0) {
    out.vector = *train_mean_;
    out.coverage = 0.0;
    return out;
  }
  const auto n = static_cast<double>(out.known_words);
  for (double& x : out.vector) x /= n;
  out.coverage = n / static_cast<double>(ids.size());
  return out;
}

Prediction ReactionLexicon::predict(std::span<const std::string_view> words) const {
  std::vector<std::string_view> distinct(words.begin(), words.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  // Unknown words map past the end of the vocabulary so they still count
  // toward the coverage denominator.
  std::vector<WordId> ids;
  ids.reserve(distinct.size());
  for (std::string_view w : distinct) {
    const auto id = vocab_->find(w);
    ids.push_back(id ? *id : static_cast<WordId>(counts_.size()));
  }
  return predict_ids(ids);
}

Prediction ReactionLexicon::predict(std::span<const std::string> words) const {
  std::vector<std::string_view> views(words.begin(), words.end());
  return predict(std::span<const std::string_view>(views));
}

std::vector<WordId> ReactionLexicon::sorted_known_ids() const {
  std::vector<WordId> ids;
  ids.reserve(known_);
  for (WordId id = 0; id < counts_.size(); ++id) {
    if (counts_[id] > 0) ids.push_back(id);
  }
  std::sort(ids.begin(), ids.end(),
            [&](WordId a, WordId b) { return vocab_->word(a) < vocab_->word(b); });
  return ids;
}

bool operator==(const ReactionLexicon& a, const ReactionLexicon& b) {
  if (!(a.schema() == b.schema())) return false;
  if (a.known_ != b.known_ || a.training_entries_ != b.training_entries_) return false;
  if (a.train_mean_ != b.train_mean_) return false;
  for (WordId id = 0; id < a.counts_.size(); ++id) {
    if (a.counts_[id] == 0) continue;
    const std::string& word = a.vocab_->word(id);
    if (b.occurrences(word) != a.counts_[id]) return false;
    if (b.lookup(word) != a.vector_at(id)) return false;
  }
  return true;
}

ReactionLexicon ReactionLexicon::from_parts(const Schema& schema, std::vector<std::string> words,
                                            std::vector<std::uint64_t> counts,
                                            std::vector<double> means,
                                            std::optional<ComponentVector> train_mean,
                                            std::uint64_t training_entries) {
  if (counts.size() != words.size() || means.size() != words.size() * schema.size()) {
    throw std::invalid_argument("ReactionLexicon::from_parts: inconsistent sizes");
  }
  if (train_mean && train_mean->size() != schema.size()) {
    throw std::invalid_argument("ReactionLexicon::from_parts: train mean has wrong size");
  }
  auto vocab = std::make_shared<Vocabulary>();
  for (const auto& w : words) {
    if (vocab->intern(w) + 1 != vocab->size()) {
      throw std::invalid_argument("ReactionLexicon::from_parts: duplicate word '" + w + "'");
    }
  }
  ReactionLexicon lex;
  lex.schema_ = &schema;
  lex.vocab_ = std::move(vocab);
  lex.means_ = std::move(means);
  lex.counts_ = std::move(counts);
  lex.known_ = static_cast<std::size_t>(
      std::count_if(lex.counts_.begin(), lex.counts_.end(), [](auto c) { return c > 0; }));
  lex.train_mean_ = std::move(train_mean);
  lex.training_entries_ = training_entries;
  return lex;
}

// ---------------------------------------------------------------------------
// LexiconBuilder

LexiconBuilder::LexiconBuilder(const Schema& schema, std::shared_ptr<const Vocabulary> vocab)
    : schema_(&schema), vocab_(std::move(vocab)), dims_(schema.size()) {
  const std::size_t n = vocab_->size();
  sum_.assign(n * dims_, 0.0);
  comp_.assign(n * dims_, 0.0);
  counts_.assign(n, 0);
  last_entry_.assign(n, 0);
}

void LexiconBuilder::add(std::span<const WordId> ids, const ComponentVector& target) {
  if (target.size() != dims_) {
    throw SchemaMismatch("training vector has " + std::to_string(target.size()) +
                         " components, schema '" + std::string(schema_->name()) + "' has " +
                         std::to_string(dims_));
  }
  const std::uint64_t serial = ++entries_;
  for (WordId id : ids) {
    if (id >= counts_.size()) {
      const std::size_t n = std::max<std::size_t>(id + 1, vocab_->size());
      sum_.resize(n * dims_, 0.0);
      comp_.resize(n * dims_, 0.0);
      counts_.resize(n, 0);
      last_entry_.resize(n, 0);
    }
    if (last_entry_[id] == serial) continue;
    last_entry_[id] = serial;
    ++counts_[id];
    const std::size_t base = static_cast<std::size_t>(id) * dims_;
    for (std::size_t k = 0; k < dims_; ++k) neumaier_add(sum_[base + k], comp_[base + k], target[k]);
  }
  for (std::size_t k = 0; k < dims_; ++k) neumaier_add(total_sum_[k], total_comp_[k], target[k]);
}

void LexiconBuilder::merge(const LexiconBuilder& other) {
  if (!(*schema_ == *other.schema_) || vocab_ != other.vocab_) {
    throw std::invalid_argument("LexiconBuilder::merge: builders do not share schema and vocabulary");
  }
  if (other.counts_.size() > counts_.size()) {
    const std::size_t n = other.counts_.size();
    sum_.resize(n * dims_, 0.0);
    comp_.resize(n * dims_, 0.0);
    counts_.resize(n, 0);
    last_entry_.resize(n, 0);
  }
  for (std::size_t id = 0; id < other.counts_.size(); ++id) {
    if (other.counts_[id] == 0) continue;
    counts_[id] += other.counts_[id];
    const std::size_t base = id * dims_;
    for (std::size_t k = 0; k < dims_; ++k) {
      neumaier_add(sum_[base + k], comp_[base + k], other.sum_[base + k]);
      comp_[base + k] += other.comp_[base + k];
    }
  }
  for (std::size_t k = 0; k < dims_; ++k) {
    neumaier_add(total_sum_[k], total_comp_[k], other.total_sum_[k]);
    total_comp_[k] += other.total_comp_[k];
  }
  entries_ += other.entries_;
  // Entry serials are per builder; stale marks could collide after a merge.
  std::fill(last_entry_.begin(), last_entry_.end(), 0);
  last_entry_.resize(counts_.size(), 0);
}

ReactionLexicon LexiconBuilder::finalize() const {
  ReactionLexicon lex;
  lex.schema_ = schema_;
  lex.vocab_ = vocab_;
  lex.counts_ = counts_;
  lex.means_.assign(counts_.size() * dims_, 0.0);
  for (std::size_t id = 0; id < counts_.size(); ++id) {
    if (counts_[id] == 0) continue;
    ++lex.known_;
    const auto n = static_cast<double>(counts_[id]);
    const std::size_t base = id * dims_;
    for (std::size_t k = 0; k < dims_; ++k) {
      lex.means_[base + k] = (sum_[base + k] + comp_[base + k]) / n;
    }
  }
  lex.training_entries_ = entries_;
  if (entries_ > 0) {
    ComponentVector mean(dims_);
    const auto n = static_cast<double>(entries_);
    for (std::size_t k = 0; k < dims_; ++k) mean[k] = (total_sum_[k] + total_comp_[k]) / n;
    lex.train_mean_ = mean;
  }
  return lex;
}

ReactionLexicon build_lexicon(std::span<const TrainingEntry> entries, const Schema& schema) {
  auto vocab = std::make_shared<Vocabulary>();
  std::vector<std::vector<WordId>> ids(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (const auto& w : entries[i].words) ids[i].push_back(vocab->intern(w));
  }
  LexiconBuilder builder(schema, vocab);
  for (std::size_t i = 0; i < entries.size(); ++i) builder.add(ids[i], entries[i].target);
  return builder.finalize();
}

}  // namespace reaction_lens
