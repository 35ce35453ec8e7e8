#include "reaction_lens/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "reaction_lens/errors.hpp"
#include "reaction_lens/random.hpp"
#include "reaction_lens/star_model.hpp"
#include "reaction_lens/text_cleaner.hpp"

namespace reaction_lens {

// ---------------------------------------------------------------------------
// Metrics

MetricSet component_metrics(double actual, double predicted) noexcept {
  MetricSet m;
  m.accuracy = std::min(actual, predicted);
  m.recall = actual == 0.0 ? 1.0 : m.accuracy / actual;
  m.precision = predicted == 0.0 ? 1.0 : m.accuracy / predicted;
  const double denom = m.recall + m.precision;
  m.f1 = denom == 0.0 ? 0.0 : 2.0 * m.recall * m.precision / denom;
  return m;
}

EntryMetrics entry_metrics(const ComponentVector& actual, const ComponentVector& predicted) {
  if (actual.size() != predicted.size()) {
    throw SchemaMismatch("actual has " + std::to_string(actual.size()) +
                         " components, predicted has " + std::to_string(predicted.size()));
  }
  EntryMetrics out;
  out.size = actual.size();
  for (std::size_t i = 0; i < out.size; ++i) {
    out.components[i] = component_metrics(actual[i], predicted[i]);
  }
  return out;
}

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

MetricAccumulator::MetricAccumulator(std::size_t components)
    : components_(components), sums_(components) {}

void MetricAccumulator::add(std::size_t component, const MetricSet& m) {
  auto& s = sums_[component];
  neumaier_add(s[0].value, s[0].comp, m.accuracy);
  neumaier_add(s[1].value, s[1].comp, m.recall);
  neumaier_add(s[2].value, s[2].comp, m.precision);
  neumaier_add(s[3].value, s[3].comp, m.f1);
}

void MetricAccumulator::add(const EntryMetrics& m) {
  if (m.size != components_) throw SchemaMismatch("entry metrics have the wrong dimension");
  for (std::size_t i = 0; i < components_; ++i) add(i, m.components[i]);
  commit_entry();
}

void MetricAccumulator::merge(const MetricAccumulator& other) {
  if (other.components_ != components_) throw SchemaMismatch("accumulator dimension differs");
  for (std::size_t i = 0; i < components_; ++i) {
    for (std::size_t k = 0; k < 4; ++k) {
      neumaier_add(sums_[i][k].value, sums_[i][k].comp, other.sums_[i][k].value);
      sums_[i][k].comp += other.sums_[i][k].comp;
    }
  }
  entries_ += other.entries_;
}

std::vector<MetricSet> MetricAccumulator::mean() const {
  std::vector<MetricSet> out(components_);
  if (entries_ == 0) return out;
  const auto n = static_cast<double>(entries_);
  for (std::size_t i = 0; i < components_; ++i) {
    const auto& s = sums_[i];
    out[i] = {(s[0].value + s[0].comp) / n, (s[1].value + s[1].comp) / n,
              (s[2].value + s[2].comp) / n, (s[3].value + s[3].comp) / n};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Splitting

SplitIndices split_indices(std::size_t n, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidConfig("train fraction must lie in (0, 1)");
  }
  const auto train_size =
      static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  if (train_size == 0 || train_size >= n) {
    throw EmptySide("splitting " + std::to_string(n) + " entries at " +
                    std::to_string(train_fraction) + " leaves one side empty");
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(order[i], order[rng.index(i + 1)]);
  }
  SplitIndices out;
  out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(train_size));
  out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(train_size), order.end());
  return out;
}

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset() : vocab_(std::make_shared<Vocabulary>()), offsets_{0} {}

void Dataset::finish_entry(std::size_t first, const ReactionCounts& counts) {
  auto begin = ids_.begin() + static_cast<std::ptrdiff_t>(first);
  std::sort(begin, ids_.end());
  ids_.erase(std::unique(begin, ids_.end()), ids_.end());
  offsets_.push_back(ids_.size());
  counts_.push_back(counts);
}

void Dataset::add(std::string_view cleaned_text, const ReactionCounts& counts) {
  const std::size_t first = ids_.size();
  for (std::string_view w : split_words(cleaned_text)) ids_.push_back(vocab_->intern(w));
  finish_entry(first, counts);
}

void Dataset::add(std::span<const std::string> words, const ReactionCounts& counts) {
  const std::size_t first = ids_.size();
  for (const auto& w : words) ids_.push_back(vocab_->intern(w));
  finish_entry(first, counts);
}

Dataset Dataset::from_reader(CorpusReader& reader) {
  Dataset ds;
  while (auto record = reader.next()) ds.add(record->message, record->reactions);
  ds.ids_.shrink_to_fit();
  return ds;
}

// ---------------------------------------------------------------------------
// Experiment

std::string_view model_name(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::core:
      return "core";
    case ModelKind::all:
      return "all";
    case ModelKind::star:
      return "star";
  }
  return "?";
}

std::optional<ModelKind> parse_model(std::string_view name) noexcept {
  if (name == "core") return ModelKind::core;
  if (name == "all") return ModelKind::all;
  if (name == "star") return ModelKind::star;
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  if (models.empty()) throw InvalidConfig("no models selected");
  if (train_fractions.empty()) throw InvalidConfig("no train fractions given");
  for (double f : train_fractions) {
    if (!(f > 0.0 && f < 1.0)) {
      throw InvalidConfig("train fraction " + std::to_string(f) + " is outside (0, 1)");
    }
  }
  if (runs < 1) throw InvalidConfig("runs must be at least 1");
  if (!(sigma > 0.0)) throw NonPositiveSigma("sigma must be positive");
}

const ComponentResult* SplitResult::find(std::string_view name) const noexcept {
  for (const auto& c : components) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const SplitResult* ModelReport::find(double train_fraction) const noexcept {
  for (const auto& s : splits) {
    if (std::abs(s.train_fraction - train_fraction) < 1e-12) return &s;
  }
  return nullptr;
}

const ModelReport* EvalReport::find(ModelKind kind) const noexcept {
  for (const auto& m : models) {
    if (m.model == kind) return &m;
  }
  return nullptr;
}

namespace {

// Per-model view over the dataset: usable entries and their targets.
struct ModelData {
  ModelKind kind;
  std::vector<std::size_t> entries;        // dataset indices
  std::vector<ComponentVector> targets;    // core / all
  std::vector<PolarityMass> masses;        // star
  std::size_t excluded = 0;
};

ModelData prepare(const Dataset& ds, ModelKind kind) {
  ModelData md{kind, {}, {}, {}, 0};
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& counts = ds.counts(i);
    if (kind == ModelKind::star) {
      const std::uint64_t total = counts[Reaction::love] + counts[Reaction::wow] +
                                  counts[Reaction::sad] + counts[Reaction::angry];
      if (total == 0) {
        ++md.excluded;
        continue;
      }
      md.entries.push_back(i);
      md.masses.push_back(star_normalize(counts));
    } else {
      const Schema& schema = kind == ModelKind::core ? Schema::core() : Schema::all();
      if (schema_total(counts, schema) == 0) {
        ++md.excluded;
        continue;
      }
      md.entries.push_back(i);
      md.targets.push_back(normalize(counts, schema));
    }
  }
  return md;
}

std::vector<std::string> component_names(ModelKind kind) {
  if (kind == ModelKind::star) return {"positive", "negative", "star_rating"};
  const Schema& schema = kind == ModelKind::core ? Schema::core() : Schema::all();
  return {schema.labels().begin(), schema.labels().end()};
}

struct RunResult {
  std::vector<MetricSet> metrics;
  double coverage = 0.0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
};

RunResult run_distribution(const Dataset& ds, const ModelData& md, const SplitIndices& split) {
  const Schema& schema = md.kind == ModelKind::core ? Schema::core() : Schema::all();
  LexiconBuilder builder(schema, ds.vocabulary());
  for (std::size_t t : split.train) builder.add(ds.words(md.entries[t]), md.targets[t]);
  const ReactionLexicon lexicon = builder.finalize();

  MetricAccumulator acc(schema.size());
  double coverage = 0.0;
  double coverage_comp = 0.0;
  for (std::size_t t : split.test) {
    const Prediction p = lexicon.predict_ids(ds.words(md.entries[t]));
    acc.add(entry_metrics(md.targets[t], p.vector));
    neumaier_add(coverage, coverage_comp, p.coverage);
  }
  return {acc.mean(), (coverage + coverage_comp) / static_cast<double>(split.test.size()),
          split.train.size(), split.test.size()};
}

RunResult run_star(const Dataset& ds, const ModelData& md, const SplitIndices& split,
                   double sigma) {
  StarRange range{md.masses[split.train.front()].aggregate(),
                  md.masses[split.train.front()].aggregate()};
  for (std::size_t t : split.train) {
    range.min = std::min(range.min, md.masses[t].aggregate());
    range.max = std::max(range.max, md.masses[t].aggregate());
  }
  if (!(range.max > range.min)) {
    throw DegenerateRange("every training entry has the same aggregate sentiment");
  }

  LexiconBuilder builder(Schema::star4(), ds.vocabulary());
  for (std::size_t t : split.train) {
    builder.add(ds.words(md.entries[t]), star_sentiment(md.masses[t], range).to_vector());
  }
  const ReactionLexicon lexicon = builder.finalize();

  MetricAccumulator acc(3);
  double coverage = 0.0;
  double coverage_comp = 0.0;
  for (std::size_t t : split.test) {
    const StarSentiment actual = star_sentiment(md.masses[t], range);
    const Prediction p = lexicon.predict_ids(ds.words(md.entries[t]));
    const EntryMetrics polar = entry_metrics(ComponentVector{actual.positive, actual.negative},
                                             ComponentVector{p.vector[0], p.vector[1]});
    acc.add(0, polar[0]);
    acc.add(1, polar[1]);

    const double predicted_bin =
        std::clamp(discretize_star(p.vector[2]), kStarMin, kStarMax);
    const double hit = predicted_bin == actual.star_disc ? 1.0 : 0.0;
    acc.add(2, {gaussian_similarity(p.vector[3], actual.star, sigma), hit, hit, hit});
    acc.commit_entry();
    neumaier_add(coverage, coverage_comp, p.coverage);
  }
  return {acc.mean(), (coverage + coverage_comp) / static_cast<double>(split.test.size()),
          split.train.size(), split.test.size()};
}

struct Job {
  std::size_t model;
  std::size_t fraction;
  unsigned run;
};

// Re-raises e with a longer message, keeping its concrete type.
std::exception_ptr with_context(const Error& e, const std::string& what) {
  if (dynamic_cast<const EmptySide*>(&e)) return std::make_exception_ptr(EmptySide(what));
  if (dynamic_cast<const DegenerateRange*>(&e)) return std::make_exception_ptr(DegenerateRange(what));
  if (dynamic_cast<const EmptyTrainingSet*>(&e)) return std::make_exception_ptr(EmptyTrainingSet(what));
  if (dynamic_cast<const ZeroReactionTotal*>(&e)) return std::make_exception_ptr(ZeroReactionTotal(what));
  if (dynamic_cast<const NonPositiveSigma*>(&e)) return std::make_exception_ptr(NonPositiveSigma(what));
  if (dynamic_cast<const InvalidConfig*>(&e)) return std::make_exception_ptr(InvalidConfig(what));
  return std::make_exception_ptr(Error(e.category(), what));
}

}  // namespace

EvalReport run_experiment(const Dataset& dataset, const ExperimentConfig& config) {
  config.validate();

  std::vector<ModelData> models;
  models.reserve(config.models.size());
  for (ModelKind kind : config.models) models.push_back(prepare(dataset, kind));

  std::vector<Job> jobs;
  for (std::size_t m = 0; m < models.size(); ++m) {
    for (std::size_t f = 0; f < config.train_fractions.size(); ++f) {
      for (unsigned r = 0; r < config.runs; ++r) jobs.push_back({m, f, r});
    }
  }
  std::vector<RunResult> results(jobs.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs.size()) return;
      {
        std::lock_guard lock(failure_mutex);
        if (failure) return;
      }
      const Job& job = jobs[j];
      const ModelData& md = models[job.model];
      const double fraction = config.train_fractions[job.fraction];
      try {
        const SplitIndices split =
            split_indices(md.entries.size(), fraction, config.seed + job.run);
        results[j] = md.kind == ModelKind::star ? run_star(dataset, md, split, config.sigma)
                                                : run_distribution(dataset, md, split);
      } catch (const Error& e) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = with_context(e, std::string(model_name(md.kind)) + " model, train fraction " +
                                        std::to_string(fraction) + ", run " +
                                        std::to_string(job.run) + ": " + e.what());
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  unsigned threads = config.threads ? config.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(jobs.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  EvalReport report;
  report.seed = config.seed;
  report.runs = config.runs;
  report.sigma = config.sigma;
  std::size_t j = 0;
  for (const ModelData& md : models) {
    ModelReport mr;
    mr.model = md.kind;
    mr.entries = md.entries.size();
    mr.excluded = md.excluded;
    const auto names = component_names(md.kind);
    for (double fraction : config.train_fractions) {
      SplitResult sr;
      sr.train_fraction = fraction;
      sr.train_size = results[j].train_size;
      sr.test_size = results[j].test_size;
      sr.components.resize(names.size());
      for (std::size_t c = 0; c < names.size(); ++c) sr.components[c].name = names[c];
      for (unsigned r = 0; r < config.runs; ++r, ++j) {
        sr.mean_coverage += results[j].coverage;
        for (std::size_t c = 0; c < names.size(); ++c) {
          sr.components[c].per_run.push_back(results[j].metrics[c]);
        }
      }
      const auto runs = static_cast<double>(config.runs);
      sr.mean_coverage /= runs;
      for (auto& comp : sr.components) {
        for (const MetricSet& m : comp.per_run) {
          comp.mean.accuracy += m.accuracy;
          comp.mean.recall += m.recall;
          comp.mean.precision += m.precision;
          comp.mean.f1 += m.f1;
        }
        comp.mean.accuracy /= runs;
        comp.mean.recall /= runs;
        comp.mean.precision /= runs;
        comp.mean.f1 /= runs;
      }
      mr.splits.push_back(std::move(sr));
    }
    report.models.push_back(std::move(mr));
  }
  return report;
}

}  // namespace reaction_lens
