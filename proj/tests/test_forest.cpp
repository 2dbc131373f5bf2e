#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

#include "mcqforge/error.hpp"
#include "mcqforge/forest.hpp"
#include "testkit.hpp"

using namespace mcqforge;

namespace {

ForestParams small_params(std::uint64_t seed = 3) {
  ForestParams p;
  p.n_trees = 40;
  p.min_leaf = 1;
  p.seed = seed;
  p.n_threads = 1;
  return p;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

}  // namespace

TEST(UniformIndex, StaysInRangeAndCoversIt) {
  std::mt19937_64 rng(1);
  std::map<std::uint64_t, int> seen;
  for (int i = 0; i < 7000; ++i) {
    const auto v = uniform_index(rng, 7);
    ASSERT_LT(v, 7u);
    ++seen[v];
  }
  EXPECT_EQ(seen.size(), 7u);
  for (const auto& [v, n] : seen) EXPECT_GT(n, 800) << v;
}

TEST(Forest, FitsSeparableDataPerfectly) {
  const Dataset d = testkit::separable_dataset(500, 8, 17);
  ForestParams p = small_params();
  p.n_trees = 100;
  const RandomForestModel m = train_forest(d, p);
  EXPECT_EQ(m.trees.size(), 100u);
  EXPECT_EQ(evaluate(m, d).accuracy, 1.0);
  EXPECT_EQ(evaluate(m, d).total(), 500u);
}

TEST(Forest, ScoreIsTheMeanOfLeafProbabilities) {
  const Dataset d = testkit::separable_dataset(300, 6, 4);
  const RandomForestModel m = train_forest(d, small_params());
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> x(6);
    for (double& v : x) v = u(rng);
    EXPECT_NEAR(m.score(x), testkit::brute_force_score(m, x), 1e-12);
  }
}

TEST(Forest, SaveLoadPreservesScoresBitwise) {
  testkit::TempDir dir;
  const Dataset d = testkit::separable_dataset(200, 5, 9);
  RandomForestModel m = train_forest(d, small_params());
  m.metadata.emplace_back("note", "tab\tand newline\n");
  save_model(m, dir / "m.bin");
  const RandomForestModel back = load_model(dir / "m.bin", "synthetic");
  ASSERT_EQ(back.trees.size(), m.trees.size());
  EXPECT_EQ(back.metadata, m.metadata);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double a = m.score(d.row(i));
    const double b = back.score(d.row(i));
    EXPECT_EQ(std::memcmp(&a, &b, sizeof a), 0);
  }
  EXPECT_EQ(serialize_model(back), serialize_model(m));
}

TEST(Forest, SameSeedGivesByteIdenticalFilesRegardlessOfThreads) {
  testkit::TempDir dir;
  const Dataset d = testkit::separable_dataset(250, 7, 21);
  ForestParams p = small_params(77);
  save_model(train_forest(d, p), dir / "a.bin");
  save_model(train_forest(d, p), dir / "b.bin");
  p.n_threads = 4;
  save_model(train_forest(d, p), dir / "c.bin");
  const auto a = read_bytes(dir / "a.bin");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, read_bytes(dir / "b.bin"));
  EXPECT_EQ(a, read_bytes(dir / "c.bin"));
  p.seed = 78;
  p.n_threads = 1;
  EXPECT_NE(serialize_model(train_forest(d, p)), a);
}

TEST(Forest, TrainingContracts) {
  Dataset one_class = testkit::separable_dataset(50, 3, 1);
  for (auto& y : one_class.y) y = 1;
  EXPECT_THROW(train_forest(one_class, small_params()), ContractViolation);

  Dataset empty;
  empty.dim = 3;
  empty.layout_version = "synthetic";
  EXPECT_THROW(train_forest(empty, small_params()), ContractViolation);

  Dataset unlabeled = testkit::separable_dataset(50, 3, 1);
  unlabeled.layout_version.clear();
  EXPECT_THROW(train_forest(unlabeled, small_params()), ContractViolation);
}

TEST(Forest, ScoreChecksLayoutAndDimension) {
  const Dataset d = testkit::separable_dataset(100, 4, 2);
  const RandomForestModel m = train_forest(d, small_params());
  const std::vector<double> x(4, 0.5);
  EXPECT_NO_THROW(m.score(x, "synthetic"));
  EXPECT_THROW(m.score(x, "phi-v1"), ContractViolation);
  EXPECT_THROW(m.score(std::vector<double>(3, 0.5)), ContractViolation);
}

TEST(ModelFile, CorruptionIsALoadError) {
  const Dataset d = testkit::separable_dataset(100, 4, 2);
  const auto bytes = serialize_model(train_forest(d, small_params()));
  EXPECT_NO_THROW(deserialize_model(bytes));

  auto truncated = bytes;
  truncated.resize(bytes.size() / 2);
  EXPECT_THROW(deserialize_model(truncated), LoadError);

  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_THROW(deserialize_model(trailing), LoadError);

  auto magic = bytes;
  magic[0] = 'X';
  EXPECT_THROW(deserialize_model(magic), LoadError);

  EXPECT_THROW(deserialize_model(bytes, "phi-v1"), LoadError);
  EXPECT_THROW(load_model("/nonexistent/model.bin"), LoadError);
}

namespace {

RandomForestModel stump_model(std::vector<double> leaf_p) {
  RandomForestModel m;
  m.dim = 1;
  m.layout_version = "synthetic";
  for (double p : leaf_p) {
    Tree t;
    t.nodes = {TreeNode{0, 0.0, 1, 2, 0.5, 2}, TreeNode{-1, 0, 0, 0, p, 1}, TreeNode{-1, 0, 0, 0, 1.0 - p, 1}};
    m.trees.push_back(t);
  }
  m.params.n_trees = static_cast<std::uint32_t>(leaf_p.size());
  return m;
}

}  // namespace

TEST(Forest, OneFeatureSeparable) {
  Dataset d;
  d.dim = 1;
  d.layout_version = "synthetic";
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    double x = u(rng);
    if (x == 0.0) x = 0.5;
    d.add(std::vector<double>{x}, x > 0);
  }
  EXPECT_EQ(evaluate(train_forest(d, small_params()), d).accuracy, 1.0);
}

TEST(Forest, SingleSplitFallsInTheGap) {
  Dataset d;
  d.dim = 1;
  d.layout_version = "synthetic";
  for (double x : {0.0, 0.2, 0.5, 0.9, 1.0}) d.add(std::vector<double>{x}, false);
  for (double x : {3.0, 3.1, 3.5, 4.0, 4.0}) d.add(std::vector<double>{x}, true);
  ForestParams p = small_params();
  p.n_trees = 1;
  p.bootstrap = false;
  const RandomForestModel m = train_forest(d, p);
  ASSERT_EQ(m.trees[0].nodes.size(), 3u);
  const TreeNode& root = m.trees[0].nodes[0];
  EXPECT_EQ(root.feature, 0);
  EXPECT_GT(root.threshold, 1.0);
  EXPECT_LT(root.threshold, 3.0);
}

TEST(Forest, ScoreIsTheLeafMean) {
  const RandomForestModel m = stump_model({0.2, 0.6});
  EXPECT_DOUBLE_EQ(m.score(std::vector<double>{-1.0}), 0.4);
  EXPECT_DOUBLE_EQ(stump_model({1.0, 1.0, 1.0}).score(std::vector<double>{-1.0}), 1.0);
}

TEST(Forest, RemovingATreeMovesTheScoreByAtMostOneOverN) {
  const Dataset d = testkit::separable_dataset(200, 5, 13);
  RandomForestModel m = train_forest(d, small_params());
  const double n = static_cast<double>(m.trees.size());
  std::vector<double> before;
  for (std::size_t i = 0; i < d.size(); ++i) before.push_back(m.score(d.row(i)));
  m.trees.pop_back();
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_LE(std::abs(m.score(d.row(i)) - before[i]), 1.0 / n + 1e-12);
}

TEST(Evaluate, TieRuleAndPerfectCase) {
  Dataset d;
  d.dim = 1;
  d.layout_version = "synthetic";
  for (int i = 0; i < 10; ++i) d.add(std::vector<double>{-1.0}, i < 7);
  const Evaluation e = evaluate(stump_model({0.5}), d);
  EXPECT_DOUBLE_EQ(e.accuracy, 0.7);
  EXPECT_EQ(e.true_good, 7u);
  EXPECT_EQ(e.false_good, 3u);

  Dataset all_good;
  all_good.dim = 1;
  all_good.layout_version = "synthetic";
  for (int i = 0; i < 5; ++i) all_good.add(std::vector<double>{-1.0}, true);
  EXPECT_DOUBLE_EQ(evaluate(stump_model({1.0}), all_good).accuracy, 1.0);
}
