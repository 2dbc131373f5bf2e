#include "mcqforge/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <unordered_set>

#include "mcqforge/error.hpp"
#include "mcqforge/pos_tagger.hpp"
#include "mcqforge/text.hpp"

namespace mcqforge {

namespace {

constexpr std::string_view kTopConceptsKey = "top_concepts";

}  // namespace

std::vector<TrainingQuestion> load_training_questions(const std::filesystem::path& path) {
  std::vector<TrainingQuestion> out;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty() || lines[i].front() == '#') continue;
    const auto f = split(lines[i], '\t');
    if (f.size() != 5 && f.size() != 6) {
      throw LoadError(path.string() + ":" + std::to_string(i + 1) +
                      ": expected question, answer, three distractors and optional support");
    }
    TrainingQuestion q;
    char id[16];
    std::snprintf(id, sizeof id, "q%04zu", out.size() + 1);
    q.id = id;
    q.question = std::string(trim(f[0]));
    q.answer = std::string(trim(f[1]));
    for (int k = 0; k < 3; ++k) q.distractors[k] = std::string(trim(f[2 + k]));
    if (f.size() == 6) q.support = std::string(trim(f[5]));
    for (const std::string* s : {&q.question, &q.answer, &q.distractors[0], &q.distractors[1], &q.distractors[2]}) {
      if (s->empty()) throw LoadError(path.string() + ":" + std::to_string(i + 1) + ": empty field");
    }
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<VocabularySource> standard_sources(const std::filesystem::path& resource_dir,
                                               const std::vector<TrainingQuestion>& questions) {
  std::vector<VocabularySource> out;
  out.push_back(load_vocabulary(resource_dir / "embeddings.txt", CandidateSource::EmbeddingVocab));
  out.push_back(load_vocabulary(resource_dir / "school_vocab.txt", CandidateSource::SchoolVocab));
  out.push_back(load_vocabulary(resource_dir / "kb_noun_phrases.txt", CandidateSource::KbNounPhrase));
  VocabularySource observed{CandidateSource::ObservedDistractor, {}};
  for (const auto& q : questions) {
    for (const auto& d : q.distractors) observed.expressions.push_back(d);
  }
  out.push_back(std::move(observed));
  return out;
}

std::shared_ptr<FeatureContext> FeatureContext::load(const std::filesystem::path& dir, const PosTagger& tagger) {
  auto ctx = std::make_shared<FeatureContext>();
  ctx->resources = load_lexical_resources(dir);
  ctx->embeddings = EmbeddingTable::load(dir / "embeddings.txt");
  ctx->tagger = &tagger;
  return ctx;
}

std::vector<Token> FeatureContext::tag(std::string_view text) const {
  if (!tagger) throw ContractViolation("feature context has no tagger");
  return tagged_tokens(text, *tagger);
}

FeatureVector FeatureContext::features(std::string_view q, std::string_view a_star,
                                       std::string_view a_prime) const {
  return extract_features(tag(q), tag(a_star), tag(a_prime), resources, embeddings);
}

std::vector<LabeledPair> build_training_set(const std::vector<TrainingQuestion>& questions,
                                            const CandidateUniverse& universe, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<LabeledPair> out;
  out.reserve(questions.size() * 6);
  const auto& entries = universe.entries();
  for (std::size_t qi = 0; qi < questions.size(); ++qi) {
    const TrainingQuestion& q = questions[qi];
    std::unordered_set<std::string> excluded{normalize_expression(q.answer)};
    for (const std::string& d : q.distractors) {
      excluded.insert(normalize_expression(d));
      out.push_back({qi, d, true});
    }
    std::size_t eligible = entries.size();
    for (const std::string& e : excluded) eligible -= universe.find(e) ? 1 : 0;
    if (eligible < 3) {
      throw ContractViolation("universe of " + std::to_string(entries.size()) +
                              " entries cannot supply 3 negatives for question " + q.id);
    }
    for (int drawn = 0; drawn < 3;) {
      const std::string& s = entries[uniform_index(rng, entries.size())].surface;
      if (!excluded.insert(s).second) continue;
      out.push_back({qi, s, false});
      ++drawn;
    }
  }
  return out;
}

Dataset featurize(const std::vector<TrainingQuestion>& questions, const std::vector<LabeledPair>& pairs,
                  const FeatureContext& ctx) {
  Dataset data;
  data.layout_version = std::string(kFeatureLayoutVersion);
  data.dim = feature_length(ctx.embeddings.dim());
  std::size_t cached = SIZE_MAX;
  ExpressionAnalysis qa;
  ExpressionAnalysis aa;
  for (const LabeledPair& p : pairs) {
    if (p.question != cached) {
      qa = analyze_expression(ctx.tag(questions.at(p.question).question), ctx.resources, ctx.embeddings, true);
      aa = analyze_expression(ctx.tag(questions[p.question].answer), ctx.resources, ctx.embeddings);
      cached = p.question;
    }
    const ExpressionAnalysis ap = analyze_expression(ctx.tag(p.a_prime), ctx.resources, ctx.embeddings);
    data.add(combine_features(qa, aa, ap, ctx.resources).values, p.good);
  }
  return data;
}

QuestionSplit split_questions(std::size_t n, double validation_fraction, std::uint64_t seed) {
  if (validation_fraction < 0.0 || validation_fraction >= 1.0) {
    throw ContractViolation("validation fraction must be in [0, 1)");
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
  const auto n_val = static_cast<std::size_t>(std::llround(static_cast<double>(n) * validation_fraction));
  QuestionSplit s;
  s.validation.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  s.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  std::sort(s.validation.begin(), s.validation.end());
  std::sort(s.train.begin(), s.train.end());
  return s;
}

TrainingReport train_distractor_model(const std::vector<TrainingQuestion>& questions,
                                      const CandidateUniverse& universe, FeatureContext& ctx,
                                      const ForestParams& params, double validation_fraction) {
  const QuestionSplit split = split_questions(questions.size(), validation_fraction, params.seed);
  std::vector<TrainingQuestion> train_q;
  std::vector<TrainingQuestion> val_q;
  for (std::size_t i : split.train) train_q.push_back(questions[i]);
  for (std::size_t i : split.validation) val_q.push_back(questions[i]);

  std::vector<std::array<std::string, 3>> triples;
  for (const auto& q : train_q) triples.push_back(q.distractors);
  ctx.resources.top_concepts = compute_top_concepts(triples, ctx.resources, 50);

  TrainingReport report;
  report.top_concepts = ctx.resources.top_concepts;
  report.n_train_questions = train_q.size();
  report.n_validation_questions = val_q.size();
  const Dataset train = featurize(train_q, build_training_set(train_q, universe, params.seed), ctx);
  report.model = train_forest(train, params);
  report.model.metadata.emplace_back(std::string(kTopConceptsKey), join(report.top_concepts, "\n"));
  report.train = evaluate(report.model, train);
  if (!val_q.empty()) {
    const Dataset val = featurize(val_q, build_training_set(val_q, universe, params.seed + 1), ctx);
    report.validation = evaluate(report.model, val);
  }
  return report;
}

std::vector<std::string> model_top_concepts(const RandomForestModel& model) {
  const std::string* v = model.find_metadata(kTopConceptsKey);
  if (!v || v->empty()) return {};
  return split(*v, '\n');
}

DistractorRanker::DistractorRanker(std::shared_ptr<const RandomForestModel> model,
                                   std::shared_ptr<const FeatureContext> ctx,
                                   std::shared_ptr<const CandidateUniverse> universe,
                                   std::size_t substitution_cap)
    : model_(std::move(model)),
      ctx_(std::move(ctx)),
      universe_(std::move(universe)),
      substitution_cap_(substitution_cap) {
  if (!model_ || !ctx_ || !universe_) throw ContractViolation("ranker needs a model, resources and a universe");
  if (model_->layout_version != kFeatureLayoutVersion) {
    throw ContractViolation("model layout '" + model_->layout_version + "' is not '" +
                            std::string(kFeatureLayoutVersion) + "'");
  }
  if (model_->dim != feature_length(ctx_->embeddings.dim())) {
    throw ContractViolation("model dimension " + std::to_string(model_->dim) +
                            " does not match the embedding table");
  }
  if (model_top_concepts(*model_) != ctx_->resources.top_concepts) {
    throw ContractViolation("resource top concepts differ from the ones the model was trained with");
  }
  analyses_.reserve(universe_->size());
  for (const CandidateEntry& e : universe_->entries()) {
    analyses_.push_back(analyze_expression(ctx_->tag(e.surface), ctx_->resources, ctx_->embeddings));
  }
  substitution_vocab_ = substitution_vocabulary(*universe_, *ctx_->tagger);
}

double DistractorRanker::score(std::string_view q, std::string_view a_star, std::string_view a_prime) const {
  const FeatureVector fv = ctx_->features(q, a_star, a_prime);
  return model_->score(fv.values, fv.layout_version);
}

std::vector<RankedSuggestion> DistractorRanker::suggest(std::string_view q, std::string_view a_star,
                                                        std::size_t k) const {
  if (k < 1) throw ContractViolation("suggest: k must be at least 1");
  const ExpressionAnalysis qa = analyze_expression(ctx_->tag(q), ctx_->resources, ctx_->embeddings, true);
  const ExpressionAnalysis aa = analyze_expression(ctx_->tag(a_star), ctx_->resources, ctx_->embeddings);
  const std::string target = normalize_expression(a_star);

  std::vector<RankedSuggestion> scored;
  scored.reserve(analyses_.size());
  std::unordered_set<std::string> seen;
  auto consider = [&](const std::string& surface, const ExpressionAnalysis& ap) {
    if (surface == target || !seen.insert(surface).second) return;
    const FeatureVector fv = combine_features(qa, aa, ap, ctx_->resources);
    scored.push_back({surface, model_->score(fv.values)});
  };
  const auto& entries = universe_->entries();
  for (std::size_t i = 0; i < entries.size(); ++i) consider(entries[i].surface, analyses_[i]);
  for (const std::string& s : expand_multiword(a_star, substitution_vocab_, substitution_cap_)) {
    if (seen.count(s) || s == target) continue;
    consider(s, analyze_expression(ctx_->tag(s), ctx_->resources, ctx_->embeddings));
  }

  auto better = [](const RankedSuggestion& a, const RankedSuggestion& b) {
    return a.score > b.score || (a.score == b.score && a.surface < b.surface);
  };
  const std::size_t n = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(), better);
  scored.resize(n);
  return scored;
}

}  // namespace mcqforge
