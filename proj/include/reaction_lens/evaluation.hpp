#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reaction_lens/corpus.hpp"
#include "reaction_lens/lexicon.hpp"
#include "reaction_lens/reactions.hpp"

namespace reaction_lens {

struct MetricSet {
  double accuracy = 0.0;
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;

  friend bool operator==(const MetricSet&, const MetricSet&) = default;
};

inline constexpr std::array<std::string_view, 4> kMetricNames = {"accuracy", "recall",
                                                                  "precision", "f1"};

// Min-overlap metrics for one component:
//   accuracy  = min(actual, predicted)
//   recall    = accuracy / actual     (1 when actual == 0)
//   precision = accuracy / predicted  (1 when predicted == 0)
//   f1        = harmonic mean of recall and precision (0 when both are 0)
// Both masses zero gives recall = precision = f1 = 1; exactly one zero gives
// f1 = 0.
MetricSet component_metrics(double actual, double predicted) noexcept;

struct EntryMetrics {
  std::size_t size = 0;
  std::array<MetricSet, kMaxComponents> components{};

  const MetricSet& operator[](std::size_t i) const noexcept { return components[i]; }
};

// Throws SchemaMismatch when the vectors differ in dimension.
EntryMetrics entry_metrics(const ComponentVector& actual, const ComponentVector& predicted);

// Order-insensitive mean of per-entry metrics (compensated sums).
class MetricAccumulator {
 public:
  explicit MetricAccumulator(std::size_t components);

  void add(const EntryMetrics& m);
  void add(std::size_t component, const MetricSet& m);
  // Counts one entry; call once per entry after the per-component adds.
  void commit_entry() noexcept { ++entries_; }
  void merge(const MetricAccumulator& other);

  std::uint64_t entries() const noexcept { return entries_; }
  std::vector<MetricSet> mean() const;

 private:
  struct Sum {
    double value = 0.0;
    double comp = 0.0;
  };
  std::size_t components_;
  std::vector<std::array<Sum, 4>> sums_;
  std::uint64_t entries_ = 0;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Seeded Fisher-Yates shuffle of [0, n), then the first round(fraction * n)
// indices train and the rest test. Throws InvalidConfig for a fraction
// outside (0, 1) and EmptySide when either side would be empty.
SplitIndices split_indices(std::size_t n, double train_fraction, std::uint64_t seed);

// Cleaned corpus held in memory as interned word ids, for repeated splits.
class Dataset {
 public:
  Dataset();

  // Tokenizes already-cleaned text on spaces.
  void add(std::string_view cleaned_text, const ReactionCounts& counts);
  void add(std::span<const std::string> words, const ReactionCounts& counts);

  static Dataset from_reader(CorpusReader& reader);

  std::size_t size() const noexcept { return counts_.size(); }
  // Distinct ids, ascending.
  std::span<const WordId> words(std::size_t entry) const noexcept {
    return {ids_.data() + offsets_[entry], offsets_[entry + 1] - offsets_[entry]};
  }
  const ReactionCounts& counts(std::size_t entry) const noexcept { return counts_[entry]; }
  const std::shared_ptr<Vocabulary>& vocabulary() const noexcept { return vocab_; }

 private:
  void finish_entry(std::size_t first, const ReactionCounts& counts);

  std::shared_ptr<Vocabulary> vocab_;
  std::vector<WordId> ids_;
  std::vector<std::size_t> offsets_;
  std::vector<ReactionCounts> counts_;
};

enum class ModelKind { core, all, star };

std::string_view model_name(ModelKind kind) noexcept;
std::optional<ModelKind> parse_model(std::string_view name) noexcept;

struct ExperimentConfig {
  std::vector<ModelKind> models = {ModelKind::core};
  std::vector<double> train_fractions = {0.95, 0.90, 0.80, 0.70, 0.50};
  unsigned runs = 5;
  std::uint64_t seed = 42;
  // Width of the Gaussian similarity on the star scale.
  double sigma = 1.0;
  // Worker threads; 0 picks the hardware concurrency.
  unsigned threads = 0;

  // Throws InvalidConfig / NonPositiveSigma.
  void validate() const;
};

struct ComponentResult {
  std::string name;
  MetricSet mean;
  std::vector<MetricSet> per_run;

  friend bool operator==(const ComponentResult&, const ComponentResult&) = default;
};

struct SplitResult {
  double train_fraction = 0.0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  double mean_coverage = 0.0;
  std::vector<ComponentResult> components;

  const ComponentResult* find(std::string_view name) const noexcept;

  friend bool operator==(const SplitResult&, const SplitResult&) = default;
};

struct ModelReport {
  ModelKind model = ModelKind::core;
  // Entries usable by this model and entries dropped for a zero total.
  std::size_t entries = 0;
  std::size_t excluded = 0;
  std::vector<SplitResult> splits;

  const SplitResult* find(double train_fraction) const noexcept;

  friend bool operator==(const ModelReport&, const ModelReport&) = default;
};

struct EvalReport {
  std::uint64_t seed = 0;
  unsigned runs = 0;
  double sigma = 1.0;
  std::string manifest;
  std::vector<ModelReport> models;

  const ModelReport* find(ModelKind kind) const noexcept;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// For each model, fraction and run (seed + run index): split, build the
// lexicon on train, predict every test entry, average metrics over test
// entries, then over runs. Star reports carry "positive" and "negative"
// (min-overlap on the [positive, negative] pair) and "star_rating"
// (accuracy = Gaussian similarity of the continuous star; recall, precision
// and f1 = 1 when the predicted half-star bin equals the actual bin, else 0).
EvalReport run_experiment(const Dataset& dataset, const ExperimentConfig& config);

}  // namespace reaction_lens
