#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcqforge/text.hpp"

namespace mcqforge {

class PosTagger;

/// Coarse part-of-speech tags. `None` marks a token that was never tagged.
enum class PosTag : std::uint8_t {
  None,
  Noun,
  Verb,
  Modal,
  Adj,
  Adv,
  Pron,
  Det,
  Num,
  Punct,
  Sym,
  Other,
};

std::string_view to_string(PosTag tag);
std::optional<PosTag> parse_pos_tag(std::string_view name);

struct CharSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  bool operator==(const CharSpan&) const = default;
};

struct Token {
  std::string surface;
  std::string lower;
  PosTag pos = PosTag::None;
  bool is_capitalized = false;
  bool demonstrative = false;
  CharSpan char_span;

  bool is_punct() const { return pos == PosTag::Punct; }
  bool operator==(const Token&) const = default;
};

struct Sentence {
  std::string id;
  std::string text;
  std::vector<Token> tokens;
  std::string paragraph_id;
  std::size_t index_in_paragraph = 0;

  bool operator==(const Sentence&) const = default;
};

struct Paragraph {
  std::string id;
  std::string book_id;
  std::string text;
  std::vector<Sentence> sentences;
  bool exportable = true;
  bool used = false;

  bool operator==(const Paragraph&) const = default;
};

struct ManifestEntry {
  std::string book_id;
  std::string title;
  std::filesystem::path source;
  bool exportable = true;
};

struct CorpusManifest {
  std::vector<ManifestEntry> entries;

  /// Parses `book_id<TAB>title<TAB>path<TAB>0|1`. Relative paths are
  /// resolved against the manifest's directory.
  static CorpusManifest load(const std::filesystem::path& path);
};

/// Splits on whitespace and punctuation; each punctuation or symbol character
/// becomes its own token. Hyphens and apostrophes inside words, and decimal
/// separators inside numbers, stay attached. POS is left as `None`.
std::vector<Token> tokenize(std::string_view sentence_text);

/// Sentence boundaries at `.`, `!` or `?` followed by whitespace and an
/// uppercase letter or digit, unless the word ending in `.` is listed in
/// `abbreviations` (entries include the trailing dot, e.g. "dr.").
std::vector<std::string> split_sentences(std::string_view paragraph_text,
                                         const Lexicon& abbreviations);
std::vector<std::string> split_sentences(std::string_view paragraph_text);

/// Abbreviations used when none are supplied.
const Lexicon& default_abbreviations();

/// Counts the tokens of `text` that are not punctuation.
std::size_t word_count(std::string_view text);

/// Splits a book into blank-line separated paragraphs, then sentences, then
/// tagged tokens. Throws IngestError with the byte offset of the first
/// undecodable byte.
std::vector<Paragraph> ingest_book(std::string_view text, const ManifestEntry& entry,
                                   const PosTagger& tagger, const Lexicon& abbreviations);

/// Sentence record for one sentence text (tokenized and tagged).
Sentence make_sentence(std::string_view text, const PosTagger& tagger);

// Paragraph store: one JSON object per line.
void write_paragraph_store(const std::filesystem::path& path,
                           const std::vector<Paragraph>& paragraphs);
std::vector<Paragraph> read_paragraph_store(const std::filesystem::path& path);

}  // namespace mcqforge
