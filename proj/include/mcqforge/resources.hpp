#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mcqforge/text.hpp"

namespace mcqforge {

/// Word vectors in the `token v1 ... vd` text format. Lookup is casefolded;
/// unknown tokens map to the zero vector.
class EmbeddingTable {
public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dim) : dim_(dim), zero_(dim, 0.0F) {}

  /// Dimension comes from the first line. Duplicate tokens: the last one wins
  /// and a warning is recorded. Throws LoadError with the line number on a
  /// dimension mismatch or a non-numeric field.
  static EmbeddingTable load(const std::filesystem::path& path);

  void set(std::string_view token, std::span<const float> vector);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return index_.size(); }
  bool contains(std::string_view token) const;
  std::span<const float> lookup(std::string_view token) const;
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

private:
  std::size_t dim_ = 0;
  std::vector<float> data_;
  std::vector<float> zero_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> warnings_;
};

/// Directed hyponym -> hypernym pairs over single tokens. Self-loops and
/// both halves of any 2-cycle are dropped at load.
class Taxonomy {
public:
  void add_edge(std::string_view hyponym, std::string_view hypernym);
  /// Removes pairs that occur in both directions.
  void drop_two_cycles();

  static Taxonomy load(const std::filesystem::path& path);

  const std::vector<std::string>& hypernyms(std::string_view token) const;
  bool has_hyponym(std::string_view token) const;
  bool is_hypernym(std::string_view token) const;
  std::size_t edge_count() const noexcept { return edges_; }

private:
  std::unordered_map<std::string, std::vector<std::string>> up_;
  std::unordered_set<std::string> hypernym_vocab_;
  std::size_t edges_ = 0;
};

struct Triple {
  std::string subject;
  std::string relation;
  std::string object;
};

/// Undirected entity graph over normalized triple arguments.
class KnowledgeBase {
public:
  void add(std::string_view subject, std::string_view relation, std::string_view object);
  static KnowledgeBase load(const std::filesystem::path& path);

  const std::unordered_set<std::string>& neighbours(std::string_view entity) const;
  const std::vector<Triple>& triples() const noexcept { return triples_; }
  bool empty() const noexcept { return triples_.empty(); }

private:
  std::vector<Triple> triples_;
  std::unordered_map<std::string, std::unordered_set<std::string>> adj_;
};

struct LexicalResources {
  std::unordered_map<std::string, double> frequency;
  Lexicon units;
  std::vector<std::string> suffixes;
  Lexicon first_names;
  /// plural -> singular (children -> child).
  std::unordered_map<std::string, std::string> irregular_plurals;
  /// Words ending in -s that are not plurals (gas, lens, ...).
  Lexicon plural_exceptions;
  Taxonomy taxonomy;
  KnowledgeBase kb;
  std::vector<std::string> top_concepts;

  /// Raw count of `token` (0 when unseen).
  double count(std::string_view token) const;
};

/// Reads a resource directory: frequency.tsv, units.txt, suffixes.txt,
/// irregular_plurals.txt (plural<TAB>singular), plural_exceptions.txt,
/// taxonomy.tsv and kb.tsv. first_names.txt is taken from the directory when
/// present, otherwise from the bundled lexicons. Throws LoadError.
LexicalResources load_lexical_resources(const std::filesystem::path& dir);

/// Counts of each casefolded word token in `texts`.
std::unordered_map<std::string, double> count_tokens(const std::vector<std::string>& texts);

/// Singular form of a lowercase noun: irregular plurals, then -ies, -es, -s.
std::string singularize(std::string_view word, const LexicalResources& res);
bool is_plural(std::string_view word, const LexicalResources& res);

std::filesystem::path default_resource_dir();

}  // namespace mcqforge
