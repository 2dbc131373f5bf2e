#include "mcqforge/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <unordered_set>

#include "mcqforge/corpus.hpp"
#include "mcqforge/error.hpp"
#include "mcqforge/forest.hpp"
#include "mcqforge/text.hpp"

namespace mcqforge {

namespace {

template <typename T>
void fisher_yates(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

std::vector<std::size_t> draw(std::size_t pool, std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> idx(pool);
  for (std::size_t i = 0; i < pool; ++i) idx[i] = i;
  // partial shuffle: only the first n slots are needed
  for (std::size_t i = 0; i < n; ++i) std::swap(idx[i], idx[i + uniform_index(rng, pool - i)]);
  idx.resize(n);
  return idx;
}

}  // namespace

std::vector<MCQRecord> shuffle_split(std::vector<MCQRecord> records, const SplitSpec& spec) {
  if (spec.n_validation + spec.n_test > records.size()) {
    throw ContractViolation("cannot split " + std::to_string(records.size()) + " records into " +
                            std::to_string(spec.n_validation) + " validation and " + std::to_string(spec.n_test) +
                            " test");
  }
  std::mt19937_64 rng(spec.seed);
  fisher_yates(records, rng);
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].split = i < spec.n_validation                 ? Split::Validation
                       : i < spec.n_validation + spec.n_test ? Split::Test
                                                             : Split::Train;
  }
  return records;
}

LengthStats length_stats(const std::vector<MCQRecord>& records) {
  LengthStats s;
  for (const MCQRecord& r : records) {
    ++s.question[tokenize(r.question).size()];
    ++s.answer[tokenize(r.correct_answer).size()];
    for (const Distractor& d : r.distractors) ++s.distractor[tokenize(d.text).size()];
  }
  return s;
}

void write_length_stats(std::ostream& out, const LengthStats& s) {
  out << "kind\ttokens\tcount\n";
  for (const auto& [name, h] : {std::pair{"question", &s.question}, std::pair{"answer", &s.answer},
                                std::pair{"distractor", &s.distractor}}) {
    for (const auto& [len, n] : *h) out << name << '\t' << len << '\t' << n << '\n';
  }
}

DiscriminationSet discrimination_pairs(const std::vector<std::string>& real,
                                       const std::vector<std::string>& generated, std::size_t n,
                                       std::uint64_t seed) {
  if (real.size() < n || generated.size() < n) {
    throw ContractViolation("discrimination pools of " + std::to_string(real.size()) + " and " +
                            std::to_string(generated.size()) + " cannot supply " + std::to_string(n) + " pairs");
  }
  std::mt19937_64 rng(seed);
  const auto ri = draw(real.size(), n, rng);
  const auto gi = draw(generated.size(), n, rng);
  DiscriminationSet out;
  for (std::size_t i = 0; i < n; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "pair-%04zu", i + 1);
    const bool real_first = uniform_index(rng, 2) == 0;
    const std::string& r = real[ri[i]];
    const std::string& g = generated[gi[i]];
    out.pairs.push_back({id, real_first ? r : g, real_first ? g : r});
    out.key.push_back({id, real_first ? 'A' : 'B'});
  }
  return out;
}

std::vector<std::string> overlap_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const Token& t : tokenize(text)) {
    const bool word = std::any_of(t.surface.begin(), t.surface.end(), [](char c) {
      return is_ascii_alpha(c) || is_ascii_digit(c) || static_cast<unsigned char>(c) >= 0x80;
    });
    if (word && seen.insert(t.lower).second) out.push_back(t.lower);
  }
  return out;
}

OverlapIndex::OverlapIndex(const std::vector<std::string>& passages) : n_docs_(passages.size()) {
  for (std::size_t d = 0; d < passages.size(); ++d) {
    for (std::string& t : overlap_tokens(passages[d])) postings_[std::move(t)].push_back(static_cast<std::uint32_t>(d));
  }
}

double OverlapIndex::idf(const std::string& token) const {
  const auto it = postings_.find(token);
  const double df = it == postings_.end() ? 0.0 : static_cast<double>(it->second.size());
  return std::log((static_cast<double>(n_docs_) + 1.0) / (df + 1.0));
}

double OverlapIndex::best_passage_score(const std::vector<std::string>& query_tokens) const {
  if (n_docs_ == 0) return 0.0;
  std::vector<double> score(n_docs_, 0.0);
  std::unordered_set<std::string> seen;
  for (const std::string& t : query_tokens) {
    if (!seen.insert(t).second) continue;
    const auto it = postings_.find(t);
    if (it == postings_.end()) continue;
    const double w = idf(t);
    for (std::uint32_t d : it->second) score[d] += w;
  }
  return *std::max_element(score.begin(), score.end());
}

std::size_t overlap_baseline(const MCQRecord& record, const OverlapIndex& index) {
  const OptionOrder order = shuffled_options(record);
  const std::vector<std::string> q = overlap_tokens(record.question);
  std::size_t best = 0;
  double best_score = 0.0;
  for (std::size_t i = 0; i < order.options.size(); ++i) {
    std::vector<std::string> query = q;
    for (std::string& t : overlap_tokens(order.options[i])) query.push_back(std::move(t));
    const double s = index.best_passage_score(query);
    if (i == 0 || s > best_score) {
      best = i;
      best_score = s;
    }
  }
  return best;
}

BaselineResult evaluate_baseline(const std::vector<MCQRecord>& records, const OverlapIndex& index) {
  BaselineResult r;
  for (const MCQRecord& rec : records) {
    ++r.total;
    if (overlap_baseline(rec, index) == shuffled_options(rec).answer_index) ++r.correct;
  }
  return r;
}

}  // namespace mcqforge
