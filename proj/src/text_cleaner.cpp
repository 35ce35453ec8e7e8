#include "reaction_lens/text_cleaner.hpp"

#include <algorithm>
#include <fstream>

#include "reaction_lens/errors.hpp"
#include "reaction_lens/utf8.hpp"

namespace reaction_lens {

namespace {

constexpr char32_t kZeroWidthJoiner = 0x200D;

constexpr std::array<std::string_view, kCleanStepCount> kStepNames = {
    "url", "email", "user_tag", "hashtag", "ineligible_script", "stopword", "numeric"};

bool starts_with_ci(std::string_view s, std::string_view prefix) noexcept {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    char c = s[i];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (c != prefix[i]) return false;
  }
  return true;
}

std::string_view trim_ascii(std::string_view s) noexcept {
  const auto is_ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_ws(s.back())) s.remove_suffix(1);
  return s;
}

void casefold_ascii(std::string& s) noexcept {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
}

// Steps 1 and 2: per code point, so a single pass is equivalent to running
// them in order. Every separator ends up as a single ' ' between tokens.
std::vector<std::string> tokenize_normalized(std::string_view raw) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t pos = 0;
  while (pos < raw.size()) {
    const char32_t cp = utf8::decode_next(raw, pos);
    if (cp == kZeroWidthJoiner) continue;
    if (utf8::is_control(cp) || utf8::is_format(cp) || utf8::is_space_separator(cp)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
      continue;
    }
    utf8::append(current, cp);
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

}  // namespace

std::string_view clean_step_name(CleanStep step) noexcept {
  return kStepNames[static_cast<std::size_t>(step)];
}

bool StopwordSet::contains(std::string_view word) const {
  return words.find(word) != words.end();
}

StopwordSet parse_stopwords(std::istream& in) {
  StopwordSet set;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    std::string_view entry = trim_ascii(line);
    if (entry.empty() || entry.front() == '#') continue;
    std::string word;
    std::size_t pos = 0;
    while (pos < entry.size()) {
      const char32_t cp = utf8::decode_next(entry, pos);
      if (cp == kZeroWidthJoiner) continue;
      if (utf8::is_control(cp) || utf8::is_space_separator(cp)) {
        throw InvalidConfig("stopword on line " + std::to_string(line_no) +
                            " contains whitespace");
      }
      utf8::append(word, cp);
    }
    if (!word.empty()) set.words.insert(std::move(word));
  }
  return set;
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UnreadableSource("cannot open stopword file " + path.string());
  return parse_stopwords(in);
}

bool is_eligible_word(std::string_view token) noexcept {
  std::size_t pos = 0;
  while (pos < token.size()) {
    const char32_t cp = utf8::decode_next(token, pos);
    if (cp >= 0x80 && !utf8::is_sinhala(cp)) return false;
  }
  return true;
}

bool is_url_token(std::string_view token) noexcept {
  return starts_with_ci(token, "http://") || starts_with_ci(token, "https://") ||
         starts_with_ci(token, "www.") || token.find("://") != std::string_view::npos;
}

bool is_email_token(std::string_view token) noexcept {
  const auto at = token.find('@');
  if (at == std::string_view::npos || at == 0) return false;
  if (token.find('@', at + 1) != std::string_view::npos) return false;
  const std::string_view domain = token.substr(at + 1);
  return domain.find('.') != std::string_view::npos;
}

bool is_numeric_token(std::string_view token) noexcept {
  if (token.empty()) return false;
  std::size_t pos = 0;
  while (pos < token.size()) {
    const char32_t cp = utf8::decode_next(token, pos);
    const bool digit = (cp >= '0' && cp <= '9') || utf8::is_sinhala_digit(cp);
    if (!digit) return false;
  }
  return true;
}

CleanedMessage clean_message(std::string_view raw, const CleanConfig& config) {
  CleanedMessage out;
  auto removed_by = [&](CleanStep step, bool hit) {
    if (hit && config.step_enabled(step)) {
      ++out.removed[static_cast<std::size_t>(step)];
      return true;
    }
    return false;
  };

  for (std::string& token : tokenize_normalized(raw)) {
    if (removed_by(CleanStep::url, is_url_token(token))) continue;
    if (removed_by(CleanStep::email, is_email_token(token))) continue;
    if (removed_by(CleanStep::user_tag, token.front() == '@')) continue;
    if (removed_by(CleanStep::hashtag, token.front() == '#')) continue;
    if (removed_by(CleanStep::ineligible_script, !is_eligible_word(token))) continue;
    if (config.casefold_ascii) casefold_ascii(token);
    if (removed_by(CleanStep::stopword, config.stopwords.contains(token))) continue;
    if (removed_by(CleanStep::numeric, is_numeric_token(token))) continue;
    out.tokens.push_back(std::move(token));
  }

  std::size_t bytes = out.tokens.empty() ? 0 : out.tokens.size() - 1;
  for (const auto& t : out.tokens) bytes += t.size();
  out.text.reserve(bytes);
  for (const auto& t : out.tokens) {
    if (!out.text.empty()) out.text.push_back(' ');
    out.text += t;
  }

  out.unique_words = out.tokens;
  std::sort(out.unique_words.begin(), out.unique_words.end());
  out.unique_words.erase(std::unique(out.unique_words.begin(), out.unique_words.end()),
                         out.unique_words.end());
  return out;
}

std::vector<std::string_view> split_words(std::string_view text) {
  std::vector<std::string_view> words;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto next = text.find(' ', pos);
    const auto end = next == std::string_view::npos ? text.size() : next;
    if (end > pos) words.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  return words;
}

}  // namespace reaction_lens
