#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "reaction_lens/errors.hpp"
#include "reaction_lens/lexicon.hpp"
#include "reaction_lens/reactions.hpp"

using namespace reaction_lens;

namespace {

ReactionCounts counts(std::initializer_list<std::uint64_t> values) {
  ReactionCounts c;
  std::size_t i = 0;
  for (auto v : values) c.n[i++] = v;
  return c;
}

ComponentVector vec(const std::vector<double>& v) {
  ComponentVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
  return out;
}

void expect_near(const ComponentVector& got, const std::vector<double>& want, double tol) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t k = 0; k < want.size(); ++k) EXPECT_NEAR(got[k], want[k], tol) << k;
}

// Two entries {a,b} -> love and {b,c} -> wow.
std::vector<TrainingEntry> two_entry_corpus() {
  return {{{"a", "b"}, ComponentVector{1, 0, 0, 0, 0}}, {{"b", "c"}, ComponentVector{0, 1, 0, 0, 0}}};
}

}  // namespace

TEST(Normalize, CoreDirectRatio) {
  EXPECT_EQ(normalize(counts({0, 2, 1, 1, 0, 0, 0}), Schema::core()),
            (ComponentVector{0.5, 0.25, 0.25, 0, 0}));
}

TEST(Normalize, CoreIgnoresLikeAndRaisesOnZero) {
  EXPECT_THROW(normalize(counts({100, 0, 0, 0, 0, 0, 9}), Schema::core()), ZeroReactionTotal);
}

TEST(Normalize, AllDirectRatio) {
  expect_near(normalize(counts({95, 2, 1, 1, 1, 0, 0}), Schema::all()),
              {0.95, 0.02, 0.01, 0.01, 0.01, 0, 0}, 1e-15);
}

TEST(Normalize, RandomCountsAgreeWithOracle) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 2000; ++i) {
    const auto c = oracle::random_counts(rng, 1'000'000, 0.4);
    for (const Schema* schema : {&Schema::core(), &Schema::all()}) {
      const auto& reactions =
          schema == &Schema::core() ? oracle::core_reactions() : oracle::all_reactions();
      if (schema_total(c, *schema) == 0) {
        EXPECT_THROW(normalize(c, *schema), ZeroReactionTotal);
        continue;
      }
      const auto v = normalize(c, *schema);
      EXPECT_TRUE(is_valid_distribution(v));
      expect_near(v, oracle::normalize(c, reactions), 1e-15);
    }
  }
}

TEST(Schema, NamesAndLookup) {
  EXPECT_EQ(Schema::core().size(), 5u);
  EXPECT_EQ(Schema::all().size(), 7u);
  EXPECT_EQ(Schema::star4().size(), 4u);
  EXPECT_EQ(Schema::parse("all"), SchemaId::all);
  EXPECT_FALSE(Schema::parse("seven").has_value());
  EXPECT_FALSE(Schema::star4().is_distribution());
  EXPECT_EQ(reaction_from_name("haha"), Reaction::haha);
}

TEST(Lexicon, TwoEntryAverage) {
  const auto lex = build_lexicon(two_entry_corpus(), Schema::core());
  EXPECT_EQ(lex.size(), 3u);
  EXPECT_EQ(*lex.lookup("a"), (ComponentVector{1, 0, 0, 0, 0}));
  EXPECT_EQ(*lex.lookup("b"), (ComponentVector{0.5, 0.5, 0, 0, 0}));
  EXPECT_EQ(*lex.lookup("c"), (ComponentVector{0, 1, 0, 0, 0}));
  EXPECT_EQ(lex.occurrences("b"), 2u);
  EXPECT_EQ(lex.occurrences("zzz"), 0u);
  EXPECT_FALSE(lex.lookup("zzz").has_value());
}

TEST(Lexicon, PredictionExamples) {
  const auto lex = build_lexicon(two_entry_corpus(), Schema::core());
  const std::vector<std::string> ac = {"a", "c"};
  auto p = lex.predict(ac);
  EXPECT_EQ(p.vector, (ComponentVector{0.5, 0.5, 0, 0, 0}));
  EXPECT_EQ(p.coverage, 1.0);

  const std::vector<std::string> a = {"a"};
  p = lex.predict(a);
  EXPECT_EQ(p.vector, *lex.lookup("a"));
  EXPECT_EQ(p.coverage, 1.0);

  const std::vector<std::string> unknown = {"x", "y"};
  p = lex.predict(unknown);
  EXPECT_EQ(p.vector, *lex.train_mean());
  EXPECT_EQ(p.vector, (ComponentVector{0.5, 0.5, 0, 0, 0}));
  EXPECT_EQ(p.coverage, 0.0);

  const std::vector<std::string> half = {"a", "a", "x"};
  p = lex.predict(half);
  EXPECT_EQ(p.vector, *lex.lookup("a"));
  EXPECT_EQ(p.coverage, 0.5);
  EXPECT_EQ(p.known_words, 1u);
}

TEST(Lexicon, RepeatedWordCountsOnce) {
  const std::vector<TrainingEntry> entries = {{{"a", "a", "a"}, ComponentVector{1, 0, 0, 0, 0}},
                                              {{"a"}, ComponentVector{0, 0, 0, 0, 1}}};
  const auto lex = build_lexicon(entries, Schema::core());
  EXPECT_EQ(*lex.lookup("a"), (ComponentVector{0.5, 0, 0, 0, 0.5}));
  EXPECT_EQ(lex.occurrences("a"), 2u);
}

TEST(Lexicon, EmptyTrainingSetRefusesToPredict) {
  const auto lex = build_lexicon({}, Schema::core());
  EXPECT_EQ(lex.size(), 0u);
  EXPECT_FALSE(lex.train_mean().has_value());
  const std::vector<std::string> w = {"a"};
  EXPECT_THROW(lex.predict(w), EmptyTrainingSet);
}

TEST(Lexicon, DimensionMismatchIsSchemaMismatch) {
  const std::vector<TrainingEntry> entries = {{{"a"}, ComponentVector{1, 0, 0}}};
  EXPECT_THROW(build_lexicon(entries, Schema::core()), SchemaMismatch);
}

TEST(Lexicon, MatchesBruteForceOracle) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t k = trial % 2 ? 7 : 5;
    const Schema& schema = k == 7 ? Schema::all() : Schema::core();
    std::vector<oracle::Entry> oe;
    std::vector<TrainingEntry> entries;
    for (int i = 0; i < 50; ++i) {
      auto words = oracle::random_words(rng, 30, 0, 6);
      auto target = oracle::random_distribution(rng, k);
      oe.push_back({words, target});
      entries.push_back({words, vec(target)});
    }
    const auto expected = oracle::build(oe);
    const auto lex = build_lexicon(entries, schema);
    ASSERT_EQ(lex.size(), expected.vectors.size());
    for (const auto& [word, v] : expected.vectors) {
      const auto got = lex.lookup(word);
      ASSERT_TRUE(got.has_value()) << word;
      expect_near(*got, v, 1e-12);
      EXPECT_EQ(lex.occurrences(word), expected.counts.at(word));
    }
    expect_near(*lex.train_mean(), expected.train_mean, 1e-12);

    for (int q = 0; q < 30; ++q) {
      const auto words = oracle::random_words(rng, 40, 0, 8);
      const auto want = oracle::predict(expected, words);
      const auto got = lex.predict(words);
      expect_near(got.vector, want.vector, 1e-12);
      EXPECT_DOUBLE_EQ(got.coverage, want.coverage);
    }
  }
}

TEST(LexiconBuilder, ShardMergeEqualsSinglePass) {
  std::mt19937_64 rng(8);
  auto vocab = std::make_shared<Vocabulary>();
  std::vector<std::vector<WordId>> ids;
  std::vector<ComponentVector> targets;
  for (int i = 0; i < 300; ++i) {
    std::vector<WordId> e;
    for (const auto& w : oracle::random_words(rng, 80, 1, 8)) e.push_back(vocab->intern(w));
    ids.push_back(e);
    targets.push_back(vec(oracle::random_distribution(rng, 5)));
  }
  LexiconBuilder whole(Schema::core(), vocab);
  for (std::size_t i = 0; i < ids.size(); ++i) whole.add(ids[i], targets[i]);

  LexiconBuilder a(Schema::core(), vocab), b(Schema::core(), vocab), c(Schema::core(), vocab);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    (i % 3 == 0 ? a : i % 3 == 1 ? b : c).add(ids[i], targets[i]);
  }
  b.merge(c);
  a.merge(b);
  EXPECT_EQ(a.entries(), whole.entries());

  const auto merged = a.finalize();
  const auto single = whole.finalize();
  EXPECT_EQ(merged.size(), single.size());
  single.for_each_sorted([&](const std::string& w, std::uint64_t n, const ComponentVector& v) {
    EXPECT_EQ(merged.occurrences(w), n);
    const auto m = *merged.lookup(w);
    for (std::size_t k = 0; k < v.size(); ++k) EXPECT_NEAR(m[k], v[k], 1e-15);
  });
}

TEST(LexiconBuilder, MergeRejectsOtherSchemaOrVocabulary) {
  auto vocab = std::make_shared<Vocabulary>();
  LexiconBuilder core(Schema::core(), vocab);
  LexiconBuilder all(Schema::all(), vocab);
  LexiconBuilder other(Schema::core(), std::make_shared<Vocabulary>());
  EXPECT_THROW(core.merge(all), std::invalid_argument);
  EXPECT_THROW(core.merge(other), std::invalid_argument);
}

TEST(LexiconBuilder, PredictIdsFastPathMatchesStrings) {
  auto vocab = std::make_shared<Vocabulary>();
  LexiconBuilder builder(Schema::core(), vocab);
  const WordId a = vocab->intern("a"), b = vocab->intern("b"), c = vocab->intern("c");
  const std::vector<WordId> ab = {a, b}, bc = {b, c};
  builder.add(ab, ComponentVector{1, 0, 0, 0, 0});
  builder.add(bc, ComponentVector{0, 1, 0, 0, 0});
  const auto lex = builder.finalize();
  const std::vector<WordId> ac = {a, c};
  EXPECT_EQ(lex.predict_ids(ac).vector, (ComponentVector{0.5, 0.5, 0, 0, 0}));
  // Words interned after training are unknown.
  const std::vector<WordId> late = {vocab->intern("late")};
  EXPECT_EQ(lex.predict_ids(late).coverage, 0.0);
}
