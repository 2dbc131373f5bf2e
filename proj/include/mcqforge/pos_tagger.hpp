#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mcqforge/corpus.hpp"

namespace mcqforge {

/// Lexicon + suffix-heuristic tagger over the coarse tag set.
///
/// Closed-class words (modals, pronouns, determiners, auxiliaries,
/// prepositions and conjunctions) come from fixed built-in lists and always
/// win. Open-class words are looked up in a `word<TAB>TAG[,TAG...]` lexicon,
/// first as written and then through inflection stripping (-s, -es, -ies,
/// -ed, -ing). Unknown words fall back to derivational suffixes, then NOUN.
/// When a word has several candidate tags the choice is made from the
/// neighbouring tokens, left to right.
class PosTagger {
public:
  /// A tagger with the closed-class lists only.
  PosTagger();

  /// Loads the open-class lexicon file.
  static PosTagger load(const std::filesystem::path& lexicon_path);

  /// Tagger over `default_data_dir()/lexicons/pos_open_class.tsv`, loaded
  /// once per process.
  static const PosTagger& shared();

  void add_entry(std::string_view word, std::vector<PosTag> tags);

  /// Fills `pos` (and the demonstrative flag) of every token.
  void tag(std::span<Token> tokens) const;

  /// Candidate open-class tags for a lowercase word, most frequent first.
  /// Empty when neither the lexicon nor inflection stripping knows the word.
  std::vector<PosTag> lexicon_tags(std::string_view lower) const;

  /// True if `lower` is a known verb lemma (not an inflected form).
  bool is_base_verb(std::string_view lower) const;

private:
  /// -ed/-ing form whose stripped stem is a verb lemma.
  bool participle_of_verb(std::string_view lower) const;

  std::unordered_map<std::string, std::vector<PosTag>> lexicon_;
};

}  // namespace mcqforge
