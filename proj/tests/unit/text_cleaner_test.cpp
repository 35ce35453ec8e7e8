#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "oracles.hpp"
#include "reaction_lens/errors.hpp"
#include "reaction_lens/text_cleaner.hpp"
#include "reaction_lens/utf8.hpp"

using namespace reaction_lens;

namespace {

CleanConfig config_with(std::initializer_list<std::string> stopwords, bool casefold = false) {
  CleanConfig c;
  for (const auto& w : stopwords) c.stopwords.words.insert(w);
  c.casefold_ascii = casefold;
  return c;
}

nlohmann::json load_golden() {
  std::ifstream in(std::string(TEST_DATA_DIR) + "/clean_golden.json");
  return nlohmann::json::parse(in);
}

}  // namespace

TEST(TextCleaner, GoldenCases) {
  const auto golden = load_golden();
  ASSERT_GE(golden.size(), 30u);
  for (const auto& c : golden) {
    CleanConfig config;
    for (const auto& w : c["stopwords"]) {
      std::istringstream line(w.get<std::string>());
      for (auto& s : parse_stopwords(line).words) config.stopwords.words.insert(s);
    }
    config.casefold_ascii = c["casefold"].get<bool>();
    const auto out = clean_message(c["input"].get<std::string>(), config);
    EXPECT_EQ(out.text, c["expected"].get<std::string>()) << c["name"];
  }
}

TEST(TextCleaner, EachRuleFiresOnce) {
  const auto out = clean_message("hello @user #tag http://a.b 123 world", {});
  EXPECT_EQ(out.text, "hello world");
  EXPECT_EQ(out.tokens, (std::vector<std::string>{"hello", "world"}));
  EXPECT_EQ(out.removed[static_cast<int>(CleanStep::url)], 1u);
  EXPECT_EQ(out.removed[static_cast<int>(CleanStep::user_tag)], 1u);
  EXPECT_EQ(out.removed[static_cast<int>(CleanStep::hashtag)], 1u);
  EXPECT_EQ(out.removed[static_cast<int>(CleanStep::numeric)], 1u);
  EXPECT_EQ(out.removed[static_cast<int>(CleanStep::email)], 0u);
}

TEST(TextCleaner, ZeroWidthJoinerIsDeletedNotSpaced) {
  const auto out = clean_message("නිර්\u200Dමාණ", {});
  EXPECT_EQ(out.text, "නිර්මාණ");
  EXPECT_EQ(out.tokens.size(), 1u);
}

TEST(TextCleaner, DegenerateInputGivesEmptyMessage) {
  const auto out = clean_message("http://x.y 12 www.a.b 99", {});
  EXPECT_TRUE(out.empty());
  EXPECT_EQ(out.text, "");
  EXPECT_TRUE(out.unique_words.empty());
}

TEST(TextCleaner, UniqueWordsAreSortedDistinctTokens) {
  const auto out = clean_message("b a b c a", {});
  EXPECT_EQ(out.tokens, (std::vector<std::string>{"b", "a", "b", "c", "a"}));
  EXPECT_EQ(out.unique_words, (std::vector<std::string>{"a", "b", "c"}));
}

TEST(TextCleaner, DisabledStepKeepsTokens) {
  CleanConfig config;
  config.enabled[static_cast<int>(CleanStep::numeric)] = false;
  EXPECT_EQ(clean_message("a 12", config).text, "a 12");
}

TEST(TextCleaner, StopwordsAfterCasefold) {
  EXPECT_EQ(clean_message("The cat", config_with({"the"})).text, "The cat");
  EXPECT_EQ(clean_message("The cat", config_with({"the"}, true)).text, "cat");
}

TEST(TextCleaner, EligibleWord) {
  EXPECT_TRUE(is_eligible_word("hello"));
  EXPECT_TRUE(is_eligible_word("ශ්රී"));
  EXPECT_FALSE(is_eligible_word("नमस्ते"));
  EXPECT_FALSE(is_eligible_word("ok\xF0\x9F\x98\x80"));
}

TEST(TextCleaner, UrlAndEmailRules) {
  EXPECT_TRUE(is_url_token("http://a"));
  EXPECT_TRUE(is_url_token("HtTpS://a"));
  EXPECT_TRUE(is_url_token("www.x"));
  EXPECT_TRUE(is_url_token("x://y"));
  EXPECT_FALSE(is_url_token("wwwx"));
  EXPECT_TRUE(is_email_token("a@b.c"));
  EXPECT_FALSE(is_email_token("@b.c"));
  EXPECT_FALSE(is_email_token("a@b"));
  EXPECT_FALSE(is_email_token("a@b@c.d"));
}

TEST(TextCleaner, NumericTokens) {
  EXPECT_TRUE(is_numeric_token("2020"));
  EXPECT_TRUE(is_numeric_token("\u0DE6\u0DEF"));
  EXPECT_TRUE(is_numeric_token("1\u0DE7"));
  EXPECT_FALSE(is_numeric_token("1a"));
  EXPECT_FALSE(is_numeric_token("3.14"));
  EXPECT_FALSE(is_numeric_token(""));
}

TEST(TextCleaner, IdempotentAndCleanAlphabetOnRandomUnicode) {
  std::mt19937_64 rng(7);
  const auto config = config_with({"w", "ක"});
  for (int i = 0; i < 2000; ++i) {
    const std::string raw = oracle::random_unicode(rng);
    const auto once = clean_message(raw, config);
    const auto twice = clean_message(once.text, config);
    ASSERT_EQ(once.text, twice.text) << raw;
    ASSERT_EQ(once.tokens, twice.tokens);
    ASSERT_EQ(once.unique_words, twice.unique_words);
    ASSERT_TRUE(utf8::is_valid(once.text));
    ASSERT_EQ(once.text.find("  "), std::string::npos);
    if (!once.text.empty()) {
      ASSERT_NE(once.text.front(), ' ');
      ASSERT_NE(once.text.back(), ' ');
    }
    std::size_t pos = 0;
    while (pos < once.text.size()) {
      const char32_t cp = utf8::decode_next(once.text, pos);
      ASSERT_TRUE(cp == ' ' || (cp > 0x20 && cp < 0x7F) || utf8::is_sinhala(cp)) << raw;
    }
  }
}

TEST(Stopwords, ParsesCommentsBomAndZwj) {
  std::istringstream in("\xEF\xBB\xBF# comment\n  ද  \n\nශ්\u200Dරී\r\n");
  const auto set = parse_stopwords(in);
  EXPECT_EQ(set.size(), 2u);
  EXPECT_TRUE(set.contains("ද"));
  EXPECT_TRUE(set.contains("ශ්රී"));
}

TEST(Stopwords, RejectsEntryWithWhitespace) {
  std::istringstream in("two words\n");
  EXPECT_THROW(parse_stopwords(in), InvalidConfig);
}

TEST(Stopwords, MissingFileIsUnreadable) {
  EXPECT_THROW(load_stopwords("/nonexistent/stopwords.txt"), UnreadableSource);
}

TEST(Utf8, IllFormedBytesBecomeReplacement) {
  const std::string bad = "a\xC0\xAF" "b\xED\xA0\x80";
  std::size_t pos = 1;
  EXPECT_EQ(utf8::decode_next(bad, pos), utf8::kReplacement);
  EXPECT_EQ(pos, 2u);
  EXPECT_FALSE(utf8::is_valid(bad));
  EXPECT_TRUE(utf8::is_valid("ශ්රී\xF0\x9F\x98\x80"));
  // Ill-formed input never survives cleaning.
  EXPECT_EQ(clean_message(bad + " ok", {}).text, "ok");
}

TEST(Utf8, Categories) {
  EXPECT_TRUE(utf8::is_control(0x00));
  EXPECT_TRUE(utf8::is_control(0x9F));
  EXPECT_FALSE(utf8::is_control(0xA0));
  EXPECT_TRUE(utf8::is_format(0x200D));
  EXPECT_TRUE(utf8::is_format(0xFEFF));
  EXPECT_TRUE(utf8::is_format(0x00AD));
  EXPECT_FALSE(utf8::is_format(0x0D9A));
  EXPECT_TRUE(utf8::is_space_separator(0x3000));
  EXPECT_FALSE(utf8::is_space_separator(0x200B));  // zero width space is Cf
  EXPECT_TRUE(utf8::is_format(0x200B));
}
