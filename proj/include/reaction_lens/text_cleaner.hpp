#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace reaction_lens {

// Token-removal steps, in the order they are applied.
enum class CleanStep : std::uint8_t {
  url,
  email,
  user_tag,
  hashtag,
  ineligible_script,
  stopword,
  numeric,
};

inline constexpr std::size_t kCleanStepCount = 7;

std::string_view clean_step_name(CleanStep step) noexcept;

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};

struct StopwordSet {
  std::unordered_set<std::string, StringHash, std::equal_to<>> words;

  bool contains(std::string_view word) const;
  std::size_t size() const noexcept { return words.size(); }
};

// One word per line, UTF-8; blank lines and lines starting with '#' are
// skipped. Entries are trimmed and stripped of U+200D so they compare equal to
// cleaned tokens. Throws InvalidConfig for an entry containing whitespace.
StopwordSet parse_stopwords(std::istream& in);
StopwordSet load_stopwords(const std::filesystem::path& path);

struct CleanConfig {
  StopwordSet stopwords;
  // Lower-cases ASCII letters before stopword matching.
  bool casefold_ascii = false;
  // Individual removal steps can be disabled for diagnostics.
  std::array<bool, kCleanStepCount> enabled = {true, true, true, true, true, true, true};

  bool step_enabled(CleanStep step) const noexcept {
    return enabled[static_cast<std::size_t>(step)];
  }
};

struct CleanedMessage {
  std::string text;
  std::vector<std::string> tokens;
  // Distinct tokens, sorted bytewise.
  std::vector<std::string> unique_words;
  // Number of tokens removed by each step.
  std::array<std::uint32_t, kCleanStepCount> removed{};

  bool empty() const noexcept { return tokens.empty(); }
};

// The message cleaning pipeline:
//   1. delete every U+200D (zero width joiner)
//   2. replace other Cc/Cf characters with a space
//   3. drop URL, email, @user and #hashtag tokens
//   4. drop tokens with a character outside ASCII and U+0D80..U+0DFF
//   5. drop stopwords
//   6. drop tokens made only of ASCII or Sinhala digits
//   7. join survivors with single spaces
// Tokens are maximal runs of non-whitespace after step 2.
CleanedMessage clean_message(std::string_view raw, const CleanConfig& config);

bool is_eligible_word(std::string_view token) noexcept;
bool is_url_token(std::string_view token) noexcept;
bool is_email_token(std::string_view token) noexcept;
bool is_numeric_token(std::string_view token) noexcept;

// Splits already-cleaned text on single spaces.
std::vector<std::string_view> split_words(std::string_view text);

}  // namespace reaction_lens
