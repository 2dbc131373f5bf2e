#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "mcqforge/candidates.hpp"
#include "mcqforge/features.hpp"
#include "mcqforge/forest.hpp"
#include "mcqforge/resources.hpp"

namespace mcqforge {

class PosTagger;

struct TrainingQuestion {
  std::string id;
  std::string question;
  std::string answer;
  std::array<std::string, 3> distractors;
  std::string support;
};

/// `question<TAB>answer<TAB>d1<TAB>d2<TAB>d3[<TAB>support]`, `#` comments.
/// Ids are assigned from the line order (q0001, ...).
std::vector<TrainingQuestion> load_training_questions(const std::filesystem::path& path);

/// The four vocabulary sources of a resource directory: embedding vocabulary,
/// school_vocab.txt, kb_noun_phrases.txt and the questions' own distractors.
std::vector<VocabularySource> standard_sources(const std::filesystem::path& resource_dir,
                                               const std::vector<TrainingQuestion>& questions);

/// Resources shared by training and scoring.
struct FeatureContext {
  LexicalResources resources;
  EmbeddingTable embeddings;
  const PosTagger* tagger = nullptr;

  /// Loads a resource directory (embeddings.txt plus the lexical files).
  static std::shared_ptr<FeatureContext> load(const std::filesystem::path& dir, const PosTagger& tagger);

  std::vector<Token> tag(std::string_view text) const;
  FeatureVector features(std::string_view q, std::string_view a_star, std::string_view a_prime) const;
};

struct LabeledPair {
  std::size_t question;  // index into the question list
  std::string a_prime;
  bool good = false;
};

/// Three good pairs (the observed distractors) and three bad ones per
/// question. Negatives are drawn uniformly from the universe, skipping the
/// answer, the observed distractors and repeats. Throws ContractViolation
/// when the universe cannot supply enough negatives.
std::vector<LabeledPair> build_training_set(const std::vector<TrainingQuestion>& questions,
                                            const CandidateUniverse& universe, std::uint64_t seed);

/// Feature rows for labeled pairs, in order.
Dataset featurize(const std::vector<TrainingQuestion>& questions, const std::vector<LabeledPair>& pairs,
                  const FeatureContext& ctx);

/// Shuffles question indices under `seed` and takes the first
/// round(n * validation_fraction) for validation.
struct QuestionSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};
QuestionSplit split_questions(std::size_t n, double validation_fraction, std::uint64_t seed);

struct TrainingReport {
  RandomForestModel model;
  Evaluation train;
  Evaluation validation;
  std::size_t n_train_questions = 0;
  std::size_t n_validation_questions = 0;
  std::vector<std::string> top_concepts;
};

/// Splits by question, computes top concepts from the training questions,
/// builds 1:1 training sets, trains and evaluates. The context's
/// top_concepts are replaced; the model stores them as metadata.
TrainingReport train_distractor_model(const std::vector<TrainingQuestion>& questions,
                                      const CandidateUniverse& universe, FeatureContext& ctx,
                                      const ForestParams& params, double validation_fraction = 0.2);

/// Restores top concepts saved by train_distractor_model.
std::vector<std::string> model_top_concepts(const RandomForestModel& model);

struct RankedSuggestion {
  std::string surface;
  double score = 0.0;
  bool operator==(const RankedSuggestion&) const = default;
};

/// Scores whole universes against one (q, a*) at a time. Candidate analyses
/// are computed once at construction; scoring is then read-only and safe to
/// call concurrently.
class DistractorRanker {
public:
  DistractorRanker(std::shared_ptr<const RandomForestModel> model, std::shared_ptr<const FeatureContext> ctx,
                   std::shared_ptr<const CandidateUniverse> universe, std::size_t substitution_cap = 5000);

  /// Top `k` by (score desc, surface asc) over the universe plus the
  /// multiword substitutions of `a_star`; never returns `a_star` itself.
  std::vector<RankedSuggestion> suggest(std::string_view q, std::string_view a_star, std::size_t k = 6) const;

  double score(std::string_view q, std::string_view a_star, std::string_view a_prime) const;

  const CandidateUniverse& universe() const { return *universe_; }
  const RandomForestModel& model() const { return *model_; }
  const std::vector<std::string>& substitution_vocab() const { return substitution_vocab_; }

private:
  std::shared_ptr<const RandomForestModel> model_;
  std::shared_ptr<const FeatureContext> ctx_;
  std::shared_ptr<const CandidateUniverse> universe_;
  std::size_t substitution_cap_;
  std::vector<ExpressionAnalysis> analyses_;
  std::vector<std::string> substitution_vocab_;
};

}  // namespace mcqforge
