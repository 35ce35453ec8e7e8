#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "reaction_lens/reactions.hpp"

namespace reaction_lens {

struct PostRecord {
  std::string message;
  ReactionCounts reactions;
  std::optional<std::string> id;

  friend bool operator==(const PostRecord&, const PostRecord&) = default;
};

enum class CorpusFormat { csv, jsonl };

std::optional<CorpusFormat> parse_corpus_format(std::string_view name) noexcept;

// Column (CSV) or key (JSONL) names for each record field.
struct SchemaMap {
  std::string message = "message";
  std::array<std::string, kReactionCount> reactions = {
      "like", "love", "wow", "haha", "sad", "angry", "thankful"};
  // Absent: records carry no id.
  std::optional<std::string> id;

  const std::string& column(Reaction r) const { return reactions[static_cast<std::size_t>(r)]; }

  // Parses "message=text,like=likes,id=post_id" style overrides on top of the
  // defaults. Throws InvalidConfig for unknown fields.
  static SchemaMap parse(std::string_view overrides);
};

struct RowError {
  std::uint64_t line;
  std::string reason;
};

// Streams PostRecords out of a CSV or JSON-lines source. Only the current row
// is held in memory. Rows that fail to parse are skipped and recorded in the
// error ledger; the first `kMaxStoredErrors` keep their diagnostics, the rest
// are only counted.
class CorpusReader {
 public:
  static constexpr std::size_t kMaxStoredErrors = 1000;
  static constexpr std::size_t kMaxRowBytes = 16u << 20;

  // Reads the CSV header immediately; throws SchemaMismatch when a mapped
  // column is missing. An empty CSV source has no header and yields nothing.
  CorpusReader(std::istream& in, CorpusFormat format, SchemaMap schema = {});

  // Throws UnreadableSource when the file cannot be opened.
  static CorpusReader open(const std::filesystem::path& path, CorpusFormat format,
                           SchemaMap schema = {});

  CorpusReader(CorpusReader&&) noexcept;
  CorpusReader& operator=(CorpusReader&&) noexcept;
  ~CorpusReader();

  std::optional<PostRecord> next();

  const std::vector<RowError>& errors() const noexcept { return errors_; }
  std::uint64_t error_count() const noexcept { return error_count_; }
  std::uint64_t records_read() const noexcept { return records_; }
  bool has_id_column() const noexcept;

 private:
  struct CsvState;

  CorpusReader(std::unique_ptr<std::istream> owned, CorpusFormat format, SchemaMap schema);
  void init();
  std::optional<PostRecord> next_csv();
  std::optional<PostRecord> next_jsonl();
  void record_error(std::uint64_t line, std::string reason);

  std::unique_ptr<std::istream> owned_;
  std::istream* in_;
  CorpusFormat format_;
  SchemaMap schema_;
  std::unique_ptr<CsvState> csv_;
  std::uint64_t line_ = 0;
  std::uint64_t records_ = 0;
  std::uint64_t error_count_ = 0;
  std::vector<RowError> errors_;
};

// Writes records as RFC-4180 CSV with the default column names; the id column
// comes first when `with_id` is set.
class CorpusWriter {
 public:
  CorpusWriter(std::ostream& out, bool with_id);
  void write(const PostRecord& record);

 private:
  std::ostream& out_;
  bool with_id_;
};

void write_csv_field(std::ostream& out, std::string_view field);

struct CorpusStats {
  std::uint64_t rows = 0;
  std::array<std::uint64_t, kReactionCount> totals{};
  // Share of each reaction among all seven; absent when nothing was counted.
  std::optional<std::array<double, kReactionCount>> all_percent;
  // Share among love, wow, haha, sad, angry in that order.
  std::optional<std::array<double, 5>> core_percent;

  std::uint64_t total(Reaction r) const noexcept { return totals[static_cast<std::size_t>(r)]; }
};

// Incremental form so million-row inputs can be counted while streaming.
class CorpusStatsAccumulator {
 public:
  void add(const ReactionCounts& counts) noexcept;
  CorpusStats finish() const;

 private:
  std::uint64_t rows_ = 0;
  std::array<std::uint64_t, kReactionCount> totals_{};
};

template <typename Range>
CorpusStats corpus_stats(const Range& records) {
  CorpusStatsAccumulator acc;
  for (const auto& r : records) acc.add(r.reactions);
  return acc.finish();
}

}  // namespace reaction_lens
