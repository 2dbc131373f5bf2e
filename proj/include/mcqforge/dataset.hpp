#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "mcqforge/records.hpp"

namespace mcqforge {

struct SplitSpec {
  std::size_t n_validation = 1000;
  std::size_t n_test = 1000;
  std::uint64_t seed = 0;
};

/// Shuffles under `spec.seed` and labels the first n_validation records
/// validation, the next n_test test and the rest train. Returns the records
/// in shuffled order. Throws ContractViolation when the dataset is too small.
std::vector<MCQRecord> shuffle_split(std::vector<MCQRecord> records, const SplitSpec& spec);

/// Token-count histograms (tokens as produced by `tokenize`).
struct LengthStats {
  std::map<std::size_t, std::size_t> question;
  std::map<std::size_t, std::size_t> answer;
  std::map<std::size_t, std::size_t> distractor;
};
LengthStats length_stats(const std::vector<MCQRecord>& records);

/// `kind<TAB>tokens<TAB>count` rows, kinds question/answer/distractor.
void write_length_stats(std::ostream& out, const LengthStats& s);

struct DiscriminationPair {
  std::string pair_id;
  std::string a;
  std::string b;
};
struct DiscriminationKey {
  std::string pair_id;
  char real = 'A';  // which member is the real question
};
struct DiscriminationSet {
  std::vector<DiscriminationPair> pairs;
  std::vector<DiscriminationKey> key;
};

/// Draws `n` questions without replacement from each pool, pairs them in
/// draw order and flips the presentation order of each pair under `seed`.
DiscriminationSet discrimination_pairs(const std::vector<std::string>& real,
                                       const std::vector<std::string>& generated, std::size_t n,
                                       std::uint64_t seed);

/// IDF-weighted token overlap over a fixed passage collection, with
/// idf(t) = log((N + 1) / (df(t) + 1)).
class OverlapIndex {
public:
  explicit OverlapIndex(const std::vector<std::string>& passages);

  std::size_t size() const { return n_docs_; }
  double idf(const std::string& token) const;
  /// Max over passages of the summed idf of query tokens present in them.
  double best_passage_score(const std::vector<std::string>& query_tokens) const;

private:
  std::size_t n_docs_ = 0;
  std::unordered_map<std::string, std::vector<std::uint32_t>> postings_;
};

/// Lowercased word tokens (punctuation dropped), deduplicated in order.
std::vector<std::string> overlap_tokens(std::string_view text);

/// Index into `shuffled_options(record).options` of the predicted answer.
/// Each option is scored with query = question tokens + option tokens; ties
/// go to the lowest index.
std::size_t overlap_baseline(const MCQRecord& record, const OverlapIndex& index);

struct BaselineResult {
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy() const { return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0; }
};
BaselineResult evaluate_baseline(const std::vector<MCQRecord>& records, const OverlapIndex& index);

}  // namespace mcqforge
