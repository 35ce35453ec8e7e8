#include "reaction_lens/lexicon_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "reaction_lens/errors.hpp"

namespace reaction_lens {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    if (next == std::string_view::npos) {
      parts.push_back(s.substr(pos));
      return parts;
    }
    parts.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
}

std::string join_vector(const ComponentVector& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out.push_back(',');
    out += format_exact17(v[i]);
  }
  return out;
}

bool is_plain_token(std::string_view s) {
  return s.find_first_of("\t\n\r=") == std::string_view::npos;
}

}  // namespace

void Fnv1a64::update(std::string_view bytes) noexcept {
  for (unsigned char c : bytes) {
    hash_ ^= c;
    hash_ *= 0x100000001b3ULL;
  }
}

std::string Fnv1a64::hex() const {
  char buf[17];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, hash_, 16);
  std::string digits(buf, ptr);
  return std::string(16 - digits.size(), '0') + digits;
}

std::string format_shortest(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string format_exact17(double value) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

std::optional<double> parse_double(std::string_view text) noexcept {
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

void save_lexicon(const ReactionLexicon& lexicon, std::ostream& out,
                  const LexiconMetadata& metadata) {
  const Schema& schema = lexicon.schema();

  std::string header;
  header += kLexiconMagic;
  header += ' ';
  header += kLexiconVersion;
  header += "\tschema=";
  header += schema.name();
  header += "\treactions=";
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (i) header.push_back(',');
    header += schema.labels()[i];
  }
  header += "\tentries=" + std::to_string(lexicon.size());
  header += "\ttraining_entries=" + std::to_string(lexicon.training_entries());
  header += "\ttrain_mean=";
  header += lexicon.train_mean() ? join_vector(*lexicon.train_mean()) : "none";
  for (const auto& [key, value] : metadata.extra) {
    if (key.empty() || !is_plain_token(key) || value.find_first_of("\t\n\r") != std::string::npos) {
      throw std::invalid_argument("lexicon metadata '" + key + "' is not header-safe");
    }
    header += '\t' + key + '=' + value;
  }

  std::string body;
  lexicon.for_each_sorted([&](const std::string& word, std::uint64_t count,
                              const ComponentVector& v) {
    if (word.find_first_of("\t\n\r") != std::string::npos) {
      throw std::invalid_argument("lexicon word contains a tab or newline");
    }
    body += word;
    body += '\t';
    body += std::to_string(count);
    for (double x : v) {
      body += '\t';
      body += format_exact17(x);
    }
    body += '\n';
  });

  Fnv1a64 hash;
  hash.update(header);
  hash.update(body);
  out << header << "\tchecksum=fnv1a64:" << hash.hex() << '\n' << body;
  if (!out) throw WriteFailure("failed writing lexicon");
}

void save_lexicon(const ReactionLexicon& lexicon, const std::filesystem::path& path,
                  const LexiconMetadata& metadata) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw WriteFailure("cannot create " + path.string());
  save_lexicon(lexicon, out, metadata);
  out.close();
  if (!out) throw WriteFailure("failed writing " + path.string());
}

LoadedLexicon load_lexicon(std::istream& in, std::optional<SchemaId> expected_schema) {
  std::string header_line;
  if (!std::getline(in, header_line)) throw CorruptArtifact("empty lexicon artifact");

  if (!header_line.starts_with(kLexiconMagic)) {
    throw CorruptArtifact("not a reaction lexicon (missing '#reaction-lexicon' header)");
  }
  const auto fields = split(header_line, '\t');
  const std::string_view magic = fields[0];
  const std::string_view version = magic.substr(std::min(magic.size(), kLexiconMagic.size() + 1));
  if (magic.size() <= kLexiconMagic.size() || magic[kLexiconMagic.size()] != ' ') {
    throw CorruptArtifact("malformed lexicon header");
  }
  if (version != kLexiconVersion) {
    throw VersionMismatch("lexicon artifact version '" + std::string(version) +
                          "' is not supported (expected " + std::string(kLexiconVersion) + ")");
  }

  std::map<std::string, std::string, std::less<>> values;
  for (std::size_t i = 1; i < fields.size(); ++i) {
    const auto eq = fields[i].find('=');
    if (eq == std::string_view::npos) throw CorruptArtifact("malformed header field");
    values.emplace(std::string(fields[i].substr(0, eq)), std::string(fields[i].substr(eq + 1)));
  }
  auto require = [&](std::string_view key) -> const std::string& {
    auto it = values.find(key);
    if (it == values.end()) throw CorruptArtifact("lexicon header lacks '" + std::string(key) + "'");
    return it->second;
  };

  const std::string& checksum = require("checksum");
  const auto schema_id = Schema::parse(require("schema"));
  if (!schema_id) throw CorruptArtifact("unknown lexicon schema '" + require("schema") + "'");
  const Schema& schema = Schema::get(*schema_id);
  if (expected_schema && *expected_schema != *schema_id) {
    throw SchemaMismatch("lexicon has schema '" + std::string(schema.name()) + "', expected '" +
                         std::string(Schema::get(*expected_schema).name()) + "'");
  }

  std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Fnv1a64 hash;
  hash.update(std::string_view(header_line).substr(0, header_line.rfind("\tchecksum=")));
  hash.update(body);
  if (checksum != "fnv1a64:" + hash.hex()) throw CorruptArtifact("lexicon checksum mismatch");

  std::string labels;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (i) labels.push_back(',');
    labels += schema.labels()[i];
  }
  if (require("reactions") != labels) throw CorruptArtifact("reaction order does not match schema");

  auto parse_u64 = [](std::string_view s) -> std::optional<std::uint64_t> {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
  };
  const auto entries = parse_u64(require("entries"));
  const auto training_entries = parse_u64(require("training_entries"));
  if (!entries || !training_entries) throw CorruptArtifact("malformed entry count");

  std::optional<ComponentVector> train_mean;
  if (const std::string& tm = require("train_mean"); tm != "none") {
    const auto parts = split(tm, ',');
    if (parts.size() != schema.size()) throw CorruptArtifact("train mean has wrong dimension");
    ComponentVector v(schema.size());
    for (std::size_t k = 0; k < parts.size(); ++k) {
      const auto x = parse_double(parts[k]);
      if (!x) throw CorruptArtifact("malformed train mean");
      v[k] = *x;
    }
    train_mean = v;
  }

  std::vector<std::string> words;
  std::vector<std::uint64_t> counts;
  std::vector<double> means;
  words.reserve(*entries);
  counts.reserve(*entries);
  means.reserve(*entries * schema.size());
  std::string_view rest(body);
  while (!rest.empty()) {
    const auto nl = rest.find('\n');
    if (nl == std::string_view::npos) throw CorruptArtifact("truncated lexicon body");
    const auto cols = split(rest.substr(0, nl), '\t');
    rest.remove_prefix(nl + 1);
    if (cols.size() != 2 + schema.size() || cols[0].empty()) {
      throw CorruptArtifact("malformed lexicon row");
    }
    const auto count = parse_u64(cols[1]);
    if (!count || *count == 0) throw CorruptArtifact("malformed word count");
    words.emplace_back(cols[0]);
    counts.push_back(*count);
    for (std::size_t k = 0; k < schema.size(); ++k) {
      const auto x = parse_double(cols[2 + k]);
      if (!x) throw CorruptArtifact("malformed lexicon value");
      means.push_back(*x);
    }
  }
  if (words.size() != *entries) throw CorruptArtifact("entry count does not match header");

  LoadedLexicon loaded{
      ReactionLexicon::from_parts(schema, std::move(words), std::move(counts), std::move(means),
                                  std::move(train_mean), *training_entries),
      {}};
  static constexpr std::string_view kCoreKeys[] = {"schema",           "reactions",  "entries",
                                                   "training_entries", "train_mean", "checksum"};
  for (auto& [key, value] : values) {
    if (std::find(std::begin(kCoreKeys), std::end(kCoreKeys), key) == std::end(kCoreKeys)) {
      loaded.metadata.extra.emplace(key, value);
    }
  }
  return loaded;
}

LoadedLexicon load_lexicon(const std::filesystem::path& path,
                           std::optional<SchemaId> expected_schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UnreadableSource("cannot open lexicon " + path.string());
  return load_lexicon(in, expected_schema);
}

}  // namespace reaction_lens
