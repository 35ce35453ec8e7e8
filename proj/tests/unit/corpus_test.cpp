#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "reaction_lens/corpus.hpp"
#include "reaction_lens/errors.hpp"

using namespace reaction_lens;

namespace {

const std::string kHeader = "message,like,love,wow,haha,sad,angry,thankful\n";

std::vector<PostRecord> read_all(CorpusReader& reader) {
  std::vector<PostRecord> out;
  while (auto r = reader.next()) out.push_back(std::move(*r));
  return out;
}

ReactionCounts counts(std::initializer_list<std::uint64_t> values) {
  ReactionCounts c;
  std::size_t i = 0;
  for (auto v : values) c.n[i++] = v;
  return c;
}

}  // namespace

TEST(CorpusCsv, DirectFieldMapping) {
  std::istringstream in(kHeader + "\"hello\",3,1,0,0,0,0,0\n");
  CorpusReader reader(in, CorpusFormat::csv);
  const auto rows = read_all(reader);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].message, "hello");
  EXPECT_EQ(rows[0].reactions, counts({3, 1, 0, 0, 0, 0, 0}));
  EXPECT_FALSE(rows[0].id.has_value());
  EXPECT_EQ(reader.error_count(), 0u);
}

TEST(CorpusCsv, MalformedCountIsSkippedAndRecorded) {
  std::istringstream in(kHeader + "a,abc,1,0,0,0,0,0\nb,2,0,0,0,0,0,0\n");
  CorpusReader reader(in, CorpusFormat::csv);
  const auto rows = read_all(reader);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].message, "b");
  ASSERT_EQ(reader.error_count(), 1u);
  EXPECT_EQ(reader.errors()[0].line, 2u);
  EXPECT_NE(reader.errors()[0].reason.find("like"), std::string::npos);
}

TEST(CorpusCsv, EmptyFileYieldsNothing) {
  std::istringstream in("");
  CorpusReader reader(in, CorpusFormat::csv);
  EXPECT_FALSE(reader.next().has_value());
  EXPECT_EQ(reader.error_count(), 0u);
  EXPECT_TRUE(reader.errors().empty());
}

TEST(CorpusCsv, HeaderOnlyYieldsNothing) {
  std::istringstream in(kHeader);
  CorpusReader reader(in, CorpusFormat::csv);
  EXPECT_FALSE(reader.next().has_value());
}

TEST(CorpusCsv, MissingColumnIsSchemaMismatch) {
  std::istringstream in("message,like,love\nx,1,2\n");
  EXPECT_THROW(CorpusReader(in, CorpusFormat::csv), SchemaMismatch);
}

TEST(CorpusCsv, QuotingEmbeddedNewlinesAndCrlf) {
  std::istringstream in(
      "id,message,like,love,wow,haha,sad,angry,thankful\r\n"
      "7,\"a, \"\"quoted\"\"\nline\",1,2,3,4,5,6,7\r\n"
      "8,plain,0,0,0,0,0,0,0\r\n");
  CorpusReader reader(in, CorpusFormat::csv, SchemaMap::parse("id=id"));
  const auto rows = read_all(reader);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].message, "a, \"quoted\"\nline");
  EXPECT_EQ(rows[0].id, "7");
  EXPECT_EQ(rows[0].reactions, counts({1, 2, 3, 4, 5, 6, 7}));
  EXPECT_EQ(rows[1].message, "plain");
  EXPECT_TRUE(reader.has_id_column());
}

TEST(CorpusCsv, ColumnMappingAndReordering) {
  std::istringstream in("thanks,text,angry,sad,haha,wow,love,likes,extra\n1,hi,2,3,4,5,6,7,z\n");
  const auto map = SchemaMap::parse("message=text, like=likes, thankful=thanks");
  CorpusReader reader(in, CorpusFormat::csv, map);
  const auto rows = read_all(reader);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].message, "hi");
  EXPECT_EQ(rows[0].reactions, counts({7, 6, 5, 4, 3, 2, 1}));
}

TEST(CorpusCsv, UnknownMappingFieldRejected) {
  EXPECT_THROW(SchemaMap::parse("mesage=text"), InvalidConfig);
  EXPECT_THROW(SchemaMap::parse("like"), InvalidConfig);
}

TEST(CorpusCsv, FieldCountMismatchUnterminatedQuoteAndBadUtf8) {
  std::istringstream in(kHeader + "a,1,2\n" + "\"bad\xC3\",0,0,0,0,0,0,0\n" + "ok,1,0,0,0,0,0,0\n" +
                        "-,-1,0,0,0,0,0,0\n" + "\"open,1,0,0,0,0,0,0\n");
  CorpusReader reader(in, CorpusFormat::csv);
  const auto rows = read_all(reader);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].message, "ok");
  EXPECT_EQ(reader.error_count(), 4u);
  EXPECT_EQ(reader.records_read(), 1u);
}

TEST(CorpusCsv, ErrorLedgerKeepsFirstThousand) {
  std::string text = kHeader;
  for (int i = 0; i < 1500; ++i) text += "x,no,0,0,0,0,0,0\n";
  std::istringstream in(text);
  CorpusReader reader(in, CorpusFormat::csv);
  EXPECT_TRUE(read_all(reader).empty());
  EXPECT_EQ(reader.error_count(), 1500u);
  EXPECT_EQ(reader.errors().size(), CorpusReader::kMaxStoredErrors);
}

TEST(CorpusCsv, UnreadableFile) {
  EXPECT_THROW(CorpusReader::open("/nonexistent/corpus.csv", CorpusFormat::csv),
               UnreadableSource);
}

TEST(CorpusJsonl, ReadsObjectsAndQuarantinesBadLines) {
  std::istringstream in(
      R"({"message":"hello","like":3,"love":1,"wow":0,"haha":0,"sad":0,"angry":0,"thankful":0,"x":[1]})"
      "\n\n"
      R"({"message":"neg","like":-1,"love":1,"wow":0,"haha":0,"sad":0,"angry":0,"thankful":0})"
      "\n"
      "{not json}\n"
      R"({"message":"frac","like":1.5,"love":1,"wow":0,"haha":0,"sad":0,"angry":0,"thankful":0})"
      "\n"
      R"({"message":"no counts"})"
      "\n"
      R"({"post":9,"message":"two","like":0,"love":0,"wow":2,"haha":0,"sad":0,"angry":0,"thankful":0})"
      "\n");
  CorpusReader reader(in, CorpusFormat::jsonl, SchemaMap::parse("id=post"));
  const auto rows = read_all(reader);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].message, "hello");
  EXPECT_EQ(rows[0].reactions, counts({3, 1, 0, 0, 0, 0, 0}));
  EXPECT_FALSE(rows[0].id.has_value());
  EXPECT_EQ(rows[1].id, "9");
  EXPECT_EQ(reader.error_count(), 4u);
  EXPECT_EQ(reader.errors()[0].line, 3u);
}

TEST(CorpusWriter, RoundTripsThroughReader) {
  std::mt19937_64 rng(3);
  std::vector<PostRecord> records;
  for (int i = 0; i < 200; ++i) {
    PostRecord r;
    r.message = oracle::random_unicode(rng, 20);
    r.reactions = oracle::random_counts(rng, 1'000'000);
    r.id = std::to_string(i);
    records.push_back(r);
  }
  std::stringstream buf;
  CorpusWriter writer(buf, true);
  for (const auto& r : records) writer.write(r);
  CorpusReader reader(buf, CorpusFormat::csv, SchemaMap::parse("id=id"));
  const auto back = read_all(reader);
  ASSERT_EQ(back.size(), records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(back[i], records[i]) << i;
  }
}

TEST(CorpusStats, MatchesBruteForceSecondPass) {
  std::mt19937_64 rng(11);
  std::vector<PostRecord> records(500);
  for (auto& r : records) r.reactions = oracle::random_counts(rng, 1000);
  const CorpusStats stats = corpus_stats(records);
  EXPECT_EQ(stats.rows, records.size());
  for (Reaction reaction : kAllReactions) {
    std::uint64_t brute = 0;
    for (const auto& r : records) brute += r.reactions[reaction];
    EXPECT_EQ(stats.total(reaction), brute);
  }
  double all = 0, core = 0;
  for (double p : *stats.all_percent) all += p;
  for (double p : *stats.core_percent) core += p;
  EXPECT_NEAR(all, 100.0, 0.01);
  EXPECT_NEAR(core, 100.0, 0.01);
}

TEST(CorpusStats, TableOnePercentages) {
  PostRecord totals;
  totals.reactions = counts({528'060'209, 12'526'942, 1'906'174, 6'524'139, 2'987'589, 1'329'552,
                             13'637});
  const CorpusStats stats = corpus_stats(std::vector<PostRecord>{totals});
  const auto& all = *stats.all_percent;
  EXPECT_NEAR(all[0], 95.430, 0.01);
  EXPECT_NEAR(all[1], 2.264, 0.01);
  EXPECT_NEAR(all[2], 0.344, 0.01);
  EXPECT_NEAR(all[3], 1.179, 0.01);
  EXPECT_NEAR(all[4], 0.540, 0.01);
  EXPECT_NEAR(all[5], 0.240, 0.01);
  EXPECT_NEAR(all[6], 0.002, 0.01);
  EXPECT_NEAR((*stats.core_percent)[0], 49.56, 0.01);
}

TEST(CorpusStats, SingleLovePost) {
  PostRecord p;
  p.reactions[Reaction::love] = 1;
  const CorpusStats stats = corpus_stats(std::vector<PostRecord>{p});
  EXPECT_EQ(*stats.core_percent, (std::array<double, 5>{100, 0, 0, 0, 0}));
}

TEST(CorpusStats, EmptyCorpusHasNoPercentages) {
  const CorpusStats stats = corpus_stats(std::vector<PostRecord>{});
  EXPECT_EQ(stats.rows, 0u);
  EXPECT_FALSE(stats.all_percent.has_value());
  EXPECT_FALSE(stats.core_percent.has_value());
}
