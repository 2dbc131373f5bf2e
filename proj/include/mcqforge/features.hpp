#pragma once

#include <array>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "mcqforge/corpus.hpp"
#include "mcqforge/resources.hpp"

namespace mcqforge {

class PosTagger;

inline constexpr std::string_view kFeatureLayoutVersion = "phi-v1";
inline constexpr std::size_t kScalarFeatureCount = 31;

/// Names of the scalar block, in layout order.
const std::array<std::string_view, kScalarFeatureCount>& scalar_feature_names();

/// Full layout: q.emb[0..d), astar.emb[0..d), aprime.emb[0..d), scalars.
std::vector<std::string> feature_names(std::size_t dim);
inline std::size_t feature_length(std::size_t dim) { return 3 * dim + kScalarFeatureCount; }

struct FeatureVector {
  std::string layout_version{kFeatureLayoutVersion};
  std::vector<double> values;
};

/// Character-level edit distance over code points, unit costs.
std::size_t levenshtein(std::string_view x, std::string_view y);

/// Mean of the token vectors. Unknown tokens count as zero vectors; an empty
/// list gives the zero vector.
std::vector<double> embed_bag(const std::vector<std::string>& tokens, const EmbeddingTable& table);

/// Directed hyponym -> hypernym path of at most `max_hops` (1 or 2) from the
/// head (last token) of `src` to the head of `dst`. Heads are also tried in
/// singular form. An expression never reaches itself.
bool hypernym_reachable(std::string_view src, std::string_view dst, const LexicalResources& res,
                        int max_hops);

/// Some entity z, distinct from both arguments, shares a triple with each.
bool kb_two_step_connected(std::string_view a_star, std::string_view a_prime,
                           const LexicalResources& res);

/// Concepts that are <=2-hop hypernyms of all three distractors of a
/// question, ranked by the number of questions they cover, ties by name.
std::vector<std::string> compute_top_concepts(
    const std::vector<std::array<std::string, 3>>& distractor_triples, const LexicalResources& res,
    std::size_t k = 50);

/// Everything about one expression that the feature slots need. Computing
/// it once per candidate lets a whole universe be scored cheaply.
struct ExpressionAnalysis {
  std::string surface;                  // casefolded words joined by one space
  std::vector<std::string> words;       // non-punctuation tokens, casefolded
  std::unordered_set<std::string> word_set;
  PosTag final_pos = PosTag::None;
  std::string final_word;
  bool plural = false;
  double log_avg_freq = 0.0;
  std::size_t char_len = 0;
  bool numeric = false;
  std::unordered_set<std::string> units;
  std::unordered_set<std::string> heads;   // head and its singular form
  std::unordered_set<std::string> up1;     // hypernyms within one hop
  std::unordered_set<std::string> up2;     // hypernyms within two hops
  std::unordered_set<std::string> kb_keys;
  std::vector<double> embedding;
  // Only filled for questions: head sets of every noun token.
  std::vector<std::unordered_set<std::string>> noun_heads;
  std::vector<std::unordered_set<std::string>> noun_up2;
};

ExpressionAnalysis analyze_expression(const std::vector<Token>& tokens, const LexicalResources& res,
                                      const EmbeddingTable& table, bool as_question = false);

/// Slot values from three prepared analyses.
FeatureVector combine_features(const ExpressionAnalysis& q, const ExpressionAnalysis& a_star,
                               const ExpressionAnalysis& a_prime, const LexicalResources& res);

/// Tagged token lists in, full feature vector out.
FeatureVector extract_features(const std::vector<Token>& q, const std::vector<Token>& a_star,
                               const std::vector<Token>& a_prime, const LexicalResources& res,
                               const EmbeddingTable& table);

/// Tokenizes and tags a piece of text.
std::vector<Token> tagged_tokens(std::string_view text, const PosTagger& tagger);

}  // namespace mcqforge
