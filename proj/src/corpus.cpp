#include "reaction_lens/corpus.hpp"

#include <charconv>
#include <unordered_map>

#include <json.hpp>

#include "reaction_lens/errors.hpp"
#include "reaction_lens/utf8.hpp"

namespace reaction_lens {

namespace {

std::optional<std::uint64_t> parse_count(std::string_view text) noexcept {
  if (text.empty()) return std::nullopt;
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::optional<CorpusFormat> parse_corpus_format(std::string_view name) noexcept {
  if (name == "csv") return CorpusFormat::csv;
  if (name == "jsonl") return CorpusFormat::jsonl;
  return std::nullopt;
}

SchemaMap SchemaMap::parse(std::string_view overrides) {
  SchemaMap map;
  std::size_t pos = 0;
  while (pos <= overrides.size()) {
    const auto comma = overrides.find(',', pos);
    const auto end = comma == std::string_view::npos ? overrides.size() : comma;
    const std::string_view item = trim(overrides.substr(pos, end - pos));
    pos = end + 1;
    if (item.empty()) {
      if (comma == std::string_view::npos) break;
      continue;
    }
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == item.size()) {
      throw InvalidConfig("column mapping entry '" + std::string(item) +
                          "' is not field=column");
    }
    const std::string_view field = trim(item.substr(0, eq));
    const std::string column(trim(item.substr(eq + 1)));
    if (field == "message") {
      map.message = column;
    } else if (field == "id") {
      map.id = column;
    } else if (auto r = reaction_from_name(field)) {
      map.reactions[static_cast<std::size_t>(*r)] = column;
    } else {
      throw InvalidConfig("unknown column mapping field '" + std::string(field) + "'");
    }
    if (comma == std::string_view::npos) break;
  }
  return map;
}

// ---------------------------------------------------------------------------
// CSV

struct CorpusReader::CsvState {
  std::size_t field_count = 0;
  std::size_t message_col = 0;
  std::array<std::size_t, kReactionCount> reaction_cols{};
  std::optional<std::size_t> id_col;
  bool has_header = false;
  std::vector<std::string> fields;
};

namespace {

enum class RowStatus { ok, eof, error };

// Reads one RFC-4180 record. `line` counts physical lines consumed.
RowStatus read_csv_row(std::streambuf& sb, std::vector<std::string>& fields,
                       std::uint64_t& line, std::string& error, std::size_t max_bytes) {
  using traits = std::char_traits<char>;
  fields.clear();
  int c = sb.sbumpc();
  if (c == traits::eof()) return RowStatus::eof;
  ++line;

  std::size_t bytes = 0;
  std::string field;
  auto skip_rest_of_line = [&](int ch) {
    while (ch != traits::eof() && ch != '\n') ch = sb.sbumpc();
  };

  while (true) {
    if (c == '"') {
      while (true) {
        c = sb.sbumpc();
        if (c == traits::eof()) {
          error = "unterminated quoted field";
          return RowStatus::error;
        }
        if (c == '"') {
          if (sb.sgetc() == '"') {
            sb.sbumpc();
            field.push_back('"');
            continue;
          }
          c = sb.sbumpc();
          break;
        }
        if (c == '\n') ++line;
        field.push_back(static_cast<char>(c));
        if (++bytes > max_bytes) {
          error = "row exceeds size limit";
          skip_rest_of_line(c);
          return RowStatus::error;
        }
      }
      if (c != ',' && c != '\n' && c != '\r' && c != traits::eof()) {
        error = "unexpected character after closing quote";
        skip_rest_of_line(c);
        return RowStatus::error;
      }
    } else {
      while (c != ',' && c != '\n' && c != '\r' && c != traits::eof()) {
        field.push_back(static_cast<char>(c));
        if (++bytes > max_bytes) {
          error = "row exceeds size limit";
          skip_rest_of_line(c);
          return RowStatus::error;
        }
        c = sb.sbumpc();
      }
    }

    fields.push_back(std::move(field));
    field.clear();
    if (c == ',') {
      c = sb.sbumpc();
      continue;
    }
    if (c == '\r' && sb.sgetc() == '\n') sb.sbumpc();
    return RowStatus::ok;
  }
}

}  // namespace

CorpusReader::CorpusReader(std::istream& in, CorpusFormat format, SchemaMap schema)
    : in_(&in), format_(format), schema_(std::move(schema)) {
  init();
}

CorpusReader::CorpusReader(std::unique_ptr<std::istream> owned, CorpusFormat format,
                           SchemaMap schema)
    : owned_(std::move(owned)), in_(owned_.get()), format_(format), schema_(std::move(schema)) {
  init();
}

CorpusReader::CorpusReader(CorpusReader&&) noexcept = default;
CorpusReader& CorpusReader::operator=(CorpusReader&&) noexcept = default;
CorpusReader::~CorpusReader() = default;

CorpusReader CorpusReader::open(const std::filesystem::path& path, CorpusFormat format,
                                SchemaMap schema) {
  auto file = std::make_unique<std::ifstream>(path, std::ios::binary);
  if (!*file) throw UnreadableSource("cannot open corpus " + path.string());
  return CorpusReader(std::move(file), format, std::move(schema));
}

bool CorpusReader::has_id_column() const noexcept {
  if (format_ == CorpusFormat::csv) return csv_ && csv_->id_col.has_value();
  return schema_.id.has_value();
}

void CorpusReader::init() {
  if (!*in_) throw UnreadableSource("corpus stream is not readable");
  if (format_ != CorpusFormat::csv) return;

  csv_ = std::make_unique<CsvState>();
  std::string error;
  std::vector<std::string> header;
  const RowStatus status =
      read_csv_row(*in_->rdbuf(), header, line_, error, kMaxRowBytes);
  if (status == RowStatus::eof) return;
  if (status == RowStatus::error) throw SchemaMismatch("unreadable CSV header: " + error);
  if (!header.empty() && header[0].starts_with("\xEF\xBB\xBF")) header[0].erase(0, 3);

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < header.size(); ++i) index.emplace(header[i], i);

  std::string missing;
  auto lookup = [&](const std::string& name) -> std::size_t {
    auto it = index.find(name);
    if (it == index.end()) {
      missing += missing.empty() ? name : ", " + name;
      return 0;
    }
    return it->second;
  };
  csv_->message_col = lookup(schema_.message);
  for (Reaction r : kAllReactions) {
    csv_->reaction_cols[static_cast<std::size_t>(r)] = lookup(schema_.column(r));
  }
  if (schema_.id) csv_->id_col = lookup(*schema_.id);
  if (!missing.empty()) throw SchemaMismatch("CSV header lacks column(s): " + missing);
  csv_->field_count = header.size();
  csv_->has_header = true;
}

void CorpusReader::record_error(std::uint64_t line, std::string reason) {
  ++error_count_;
  if (errors_.size() < kMaxStoredErrors) errors_.push_back({line, std::move(reason)});
}

std::optional<PostRecord> CorpusReader::next() {
  auto record = format_ == CorpusFormat::csv ? next_csv() : next_jsonl();
  if (record) ++records_;
  return record;
}

std::optional<PostRecord> CorpusReader::next_csv() {
  if (!csv_ || !csv_->has_header) return std::nullopt;
  auto& fields = csv_->fields;
  while (true) {
    std::string error;
    const std::uint64_t start = line_ + 1;
    const RowStatus status = read_csv_row(*in_->rdbuf(), fields, line_, error, kMaxRowBytes);
    if (status == RowStatus::eof) return std::nullopt;
    if (status == RowStatus::error) {
      record_error(start, error);
      continue;
    }
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (fields.size() != csv_->field_count) {
      record_error(start, "expected " + std::to_string(csv_->field_count) + " fields, got " +
                              std::to_string(fields.size()));
      continue;
    }

    PostRecord record;
    std::string bad;
    for (Reaction r : kAllReactions) {
      const std::string& text = fields[csv_->reaction_cols[static_cast<std::size_t>(r)]];
      if (auto n = parse_count(text)) {
        record.reactions[r] = *n;
      } else if (bad.empty()) {
        bad = "non-integer count '" + text + "' in column " + schema_.column(r);
      }
    }
    if (!bad.empty()) {
      record_error(start, bad);
      continue;
    }
    std::string& message = fields[csv_->message_col];
    if (!utf8::is_valid(message)) {
      record_error(start, "message is not valid UTF-8");
      continue;
    }
    record.message = std::move(message);
    if (csv_->id_col) record.id = fields[*csv_->id_col];
    return record;
  }
}

// ---------------------------------------------------------------------------
// JSON lines

std::optional<PostRecord> CorpusReader::next_jsonl() {
  std::string line;
  while (std::getline(*in_, line)) {
    ++line_;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line.size() > kMaxRowBytes) {
      record_error(line_, "row exceeds size limit");
      continue;
    }
    const auto doc = nlohmann::json::parse(line, nullptr, false);
    if (doc.is_discarded()) {
      record_error(line_, "invalid JSON (or invalid UTF-8)");
      continue;
    }
    if (!doc.is_object()) {
      record_error(line_, "row is not a JSON object");
      continue;
    }

    PostRecord record;
    const auto msg = doc.find(schema_.message);
    if (msg == doc.end() || !msg->is_string()) {
      record_error(line_, "missing or non-string '" + schema_.message + "'");
      continue;
    }
    std::string bad;
    for (Reaction r : kAllReactions) {
      const auto it = doc.find(schema_.column(r));
      if (it == doc.end()) {
        if (bad.empty()) bad = "missing count '" + schema_.column(r) + "'";
      } else if (it->is_number_unsigned()) {
        record.reactions[r] = it->get<std::uint64_t>();
      } else if (bad.empty()) {
        bad = "non-integer count in '" + schema_.column(r) + "'";
      }
    }
    if (!bad.empty()) {
      record_error(line_, bad);
      continue;
    }
    record.message = msg->get<std::string>();
    if (schema_.id) {
      const auto id = doc.find(*schema_.id);
      if (id != doc.end()) record.id = id->is_string() ? id->get<std::string>() : id->dump();
    }
    return record;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Writer

void write_csv_field(std::ostream& out, std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    out << field;
    return;
  }
  out.put('"');
  for (char c : field) {
    if (c == '"') out.put('"');
    out.put(c);
  }
  out.put('"');
}

CorpusWriter::CorpusWriter(std::ostream& out, bool with_id) : out_(out), with_id_(with_id) {
  if (with_id_) out_ << "id,";
  out_ << "message";
  for (Reaction r : kAllReactions) out_ << ',' << reaction_name(r);
  out_ << '\n';
}

void CorpusWriter::write(const PostRecord& record) {
  if (with_id_) {
    write_csv_field(out_, record.id.value_or(""));
    out_.put(',');
  }
  write_csv_field(out_, record.message);
  for (Reaction r : kAllReactions) out_ << ',' << record.reactions[r];
  out_.put('\n');
}

// ---------------------------------------------------------------------------
// Stats

void CorpusStatsAccumulator::add(const ReactionCounts& counts) noexcept {
  ++rows_;
  for (std::size_t i = 0; i < kReactionCount; ++i) totals_[i] += counts.n[i];
}

CorpusStats CorpusStatsAccumulator::finish() const {
  CorpusStats stats;
  stats.rows = rows_;
  stats.totals = totals_;

  std::uint64_t all = 0;
  for (auto t : totals_) all += t;
  if (all > 0) {
    std::array<double, kReactionCount> pct{};
    for (std::size_t i = 0; i < kReactionCount; ++i) {
      pct[i] = 100.0 * static_cast<double>(totals_[i]) / static_cast<double>(all);
    }
    stats.all_percent = pct;
  }

  const auto& core = Schema::core().reactions();
  std::uint64_t core_total = 0;
  for (Reaction r : core) core_total += totals_[static_cast<std::size_t>(r)];
  if (core_total > 0) {
    std::array<double, 5> pct{};
    for (std::size_t i = 0; i < core.size(); ++i) {
      pct[i] = 100.0 * static_cast<double>(totals_[static_cast<std::size_t>(core[i])]) /
               static_cast<double>(core_total);
    }
    stats.core_percent = pct;
  }
  return stats;
}

}  // namespace reaction_lens
