#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace mcqforge {

/// Offset of the first byte that is not part of a well-formed UTF-8 sequence.
std::optional<std::size_t> find_invalid_utf8(std::string_view text);

/// Decodes UTF-8 into code points; malformed bytes decode to U+FFFD.
std::u32string decode_utf8(std::string_view text);

/// ASCII and Latin-1 lowercase mapping; other code points pass through.
std::string casefold(std::string_view text);

/// Casefold, trim, and collapse internal whitespace runs to one space.
std::string normalize_expression(std::string_view text);

std::string_view trim(std::string_view text);
std::string collapse_whitespace(std::string_view text);
std::vector<std::string> split(std::string_view text, char delimiter);
std::vector<std::string> split_whitespace(std::string_view text);
std::string join(const std::vector<std::string>& parts, std::string_view separator);

bool is_ascii_space(char c);
bool is_ascii_alpha(char c);
bool is_ascii_digit(char c);
bool is_ascii_upper(char c);
bool has_digit(std::string_view text);

/// Whole file as bytes. Throws LoadError naming the file.
std::string read_file(const std::filesystem::path& path);

/// Lines without trailing "\r\n"; throws LoadError naming the file.
std::vector<std::string> read_lines(const std::filesystem::path& path);

/// Directory holding the bundled lexicons and resources: $MCQFORGE_DATA when
/// set, otherwise the configured source tree data/ directory.
std::filesystem::path default_data_dir();

/// A lowercase word list: one entry per line, blank lines and `#` comments
/// ignored. Entries may be multiword phrases.
class Lexicon {
public:
  Lexicon() = default;
  explicit Lexicon(std::vector<std::string> entries);

  static Lexicon load(const std::filesystem::path& path);

  bool contains(std::string_view word) const;
  void add(std::string_view entry);

  const std::vector<std::string>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

private:
  std::vector<std::string> entries_;
  std::unordered_set<std::string> index_;
};

}  // namespace mcqforge
