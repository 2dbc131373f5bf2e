#pragma once

// Fixtures, reference oracles and the scripted API session shared by the
// unit tests and the acceptance runner.

#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "mcqforge/annotation.hpp"
#include "mcqforge/corpus.hpp"
#include "mcqforge/forest.hpp"
#include "mcqforge/ranker.hpp"
#include "mcqforge/records.hpp"
#include "mcqforge/resources.hpp"

namespace testkit {

namespace fs = std::filesystem;

fs::path fixture_dir();
fs::path data_dir();
fs::path questions_path();

/// Removed on destruction.
class TempDir {
public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

private:
  fs::path path_;
};

/// (expected rule or "-", sentence) rows of the filter fixture.
std::vector<std::pair<std::string, std::string>> filter_fixture();

/// (word, tag) sentences of the hand-tagged POS fixture.
std::vector<std::vector<std::pair<std::string, std::string>>> pos_fixture();

// ---- edit distance ---------------------------------------------------------

/// Full (m+1)x(n+1) table over code points.
std::size_t levenshtein_table(const std::string& a, const std::string& b);
/// Random string over a small alphabet that includes multibyte characters.
std::string random_word(std::mt19937_64& rng, std::size_t max_len);

// ---- taxonomy and KB -------------------------------------------------------

struct Edge {
  std::string from;
  std::string to;
};

/// `n_edges` distinct hyponym->hypernym edges over `n_nodes` nodes named
/// c00, c01, ... pointing from lower to higher index (acyclic).
std::vector<Edge> random_taxonomy(std::mt19937_64& rng, std::size_t n_nodes, std::size_t n_edges);
/// Enumerates every path of 1..max_hops edges from src; src never reaches itself.
bool path_exists(const std::vector<Edge>& edges, const std::string& src, const std::string& dst, int max_hops);

std::vector<mcqforge::Triple> random_triples(std::mt19937_64& rng, std::size_t n_entities, std::size_t n_triples);
/// Explicit two-hop closure of the undirected entity graph, excluding the
/// endpoints as intermediates.
bool two_step_closure(const std::vector<mcqforge::Triple>& triples, const std::string& a, const std::string& b);

// ---- forest ----------------------------------------------------------------

/// Label 1 iff x0 >= 0.55, label 0 iff x0 <= 0.45; remaining columns noise.
mcqforge::Dataset separable_dataset(std::size_t n, std::size_t dim, std::uint64_t seed);
/// Walks every tree node by node and averages the leaf probabilities.
double brute_force_score(const mcqforge::RandomForestModel& m, const std::vector<double>& x);

// ---- corpus ----------------------------------------------------------------

/// One paragraph per training question support; every fourth paragraph is
/// not exportable.
std::vector<mcqforge::Paragraph> support_paragraphs(const std::vector<mcqforge::TrainingQuestion>& qs);

/// Valid records with distinct options, mixed origins (at least one human)
/// and support on two of every three.
std::vector<mcqforge::MCQRecord> synthetic_records(std::size_t n, std::uint64_t seed);

// ---- scripted API session ---------------------------------------------------

struct WorkflowOutcome {
  std::size_t task1_submissions = 0;
  std::size_t task2_submissions = 0;
  std::size_t invalid_sent = 0;
  std::size_t invalid_named_correctly = 0;
  std::size_t records = 0;
  bool no_paragraph_reused = true;
  bool replay_identical = false;
  bool records_valid = false;
  bool export_round_trip = false;
  double seconds = 0.0;
  std::vector<std::string> problems;

  bool ok() const;
};

/// Drives a fresh store in `dir` over HTTP: 30 Task-1 and 30 Task-2
/// submissions including invalid ones, then checks reuse, replay, record
/// invariants and export round-trip.
WorkflowOutcome run_workflow_session(const fs::path& dir, const std::vector<mcqforge::TrainingQuestion>& qs,
                                     mcqforge::Suggester suggester);

/// Small model and universe good enough to feed the session quickly.
struct MiniRanker {
  std::shared_ptr<mcqforge::FeatureContext> ctx;
  std::shared_ptr<const mcqforge::DistractorRanker> ranker;
};
MiniRanker mini_ranker(const std::vector<mcqforge::TrainingQuestion>& qs, std::uint32_t n_trees = 60);

}  // namespace testkit
