#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mcqforge {

class PosTagger;

enum class CandidateSource : std::uint8_t {
  EmbeddingVocab,
  ObservedDistractor,
  KbNounPhrase,
  SchoolVocab,
  Substitution,
};

std::string_view to_string(CandidateSource s);
std::optional<CandidateSource> parse_candidate_source(std::string_view name);

struct CandidateEntry {
  std::string surface;
  std::vector<std::string> tokens;
  std::uint8_t sources = 0;  // bit per CandidateSource

  bool has(CandidateSource s) const { return (sources >> static_cast<unsigned>(s)) & 1U; }
  std::vector<CandidateSource> source_list() const;
};

/// One vocabulary list tagged with the source it came from.
struct VocabularySource {
  CandidateSource source;
  std::vector<std::string> expressions;
};

/// Reads one expression per line. For embedding files only the first
/// whitespace-separated field of each line is kept. Throws LoadError.
VocabularySource load_vocabulary(const std::filesystem::path& path, CandidateSource source);

/// Immutable after construction; safe for concurrent reads.
class CandidateUniverse {
public:
  /// Adds or merges an expression; returns false when it normalizes to "".
  bool add(std::string_view expression, CandidateSource source);

  const std::vector<CandidateEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const CandidateEntry* find(std::string_view expression) const;

  /// Indices of entries containing `token`, in insertion order.
  const std::vector<std::size_t>& containing(std::string_view token) const;

  /// Versioned line format: header then `surface<TAB>source,source`.
  void save(const std::filesystem::path& path) const;
  static CandidateUniverse load(const std::filesystem::path& path);

private:
  std::vector<CandidateEntry> entries_;
  std::unordered_map<std::string, std::size_t> by_surface_;
  std::unordered_map<std::string, std::vector<std::size_t>> unigram_index_;
};

/// Union of the sources, deduplicated by normalized surface. Throws
/// ContractViolation on an empty source list.
CandidateUniverse build_universe(const std::vector<VocabularySource>& sources);

/// Single-token entries tagged school_vocab or observed_distractor whose most
/// frequent lexicon tag is NOUN (or that the lexicon does not know).
std::vector<std::string> substitution_vocabulary(const CandidateUniverse& universe,
                                                 const PosTagger& tagger);

/// Replaces one token of a multiword answer at a time with each vocabulary
/// word, ordered by position then vocabulary order. Results equal to the
/// answer and repeats are dropped; at most `cap` results.
std::vector<std::string> expand_multiword(std::string_view a_star,
                                          const std::vector<std::string>& substitution_vocab,
                                          std::size_t cap = 5000);

}  // namespace mcqforge
