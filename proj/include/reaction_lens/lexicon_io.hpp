#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "reaction_lens/lexicon.hpp"

namespace reaction_lens {

// Lexicon artifact, UTF-8 text:
//
//   #reaction-lexicon v1<TAB>schema=core<TAB>reactions=love,wow,...<TAB>
//       entries=N<TAB>training_entries=M<TAB>train_mean=a,b,...
//       [<TAB>key=value ...]<TAB>checksum=fnv1a64:<16 hex digits>
//   word<TAB>count<TAB>v1<TAB>...<TAB>vk
//
// Words are sorted bytewise; values carry 17 significant digits so every
// double round-trips exactly. The checksum covers the header up to the
// checksum field and every body byte. `train_mean=none` marks a lexicon with
// no training entries.
inline constexpr std::string_view kLexiconMagic = "#reaction-lexicon";
inline constexpr std::string_view kLexiconVersion = "v1";

struct LexiconMetadata {
  // Extra header fields (for example the producing manifest or the star
  // model's scaling range). Keys must not contain '=', tabs or newlines.
  std::map<std::string, std::string> extra;
};

void save_lexicon(const ReactionLexicon& lexicon, std::ostream& out,
                  const LexiconMetadata& metadata = {});
void save_lexicon(const ReactionLexicon& lexicon, const std::filesystem::path& path,
                  const LexiconMetadata& metadata = {});

struct LoadedLexicon {
  ReactionLexicon lexicon;
  LexiconMetadata metadata;
};

// Throws VersionMismatch for another artifact version, CorruptArtifact for a
// malformed file or checksum failure, and SchemaMismatch when
// `expected_schema` is given and differs.
LoadedLexicon load_lexicon(std::istream& in, std::optional<SchemaId> expected_schema = {});
LoadedLexicon load_lexicon(const std::filesystem::path& path,
                           std::optional<SchemaId> expected_schema = {});

// 64-bit FNV-1a, used for artifact and input checksums.
class Fnv1a64 {
 public:
  void update(std::string_view bytes) noexcept;
  std::uint64_t value() const noexcept { return hash_; }
  std::string hex() const;

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

// Shortest text that parses back to exactly `value`.
std::string format_shortest(double value);
// Exactly 17 significant digits (trailing zeros trimmed).
std::string format_exact17(double value);
std::optional<double> parse_double(std::string_view text) noexcept;

}  // namespace reaction_lens
