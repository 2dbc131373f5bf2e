#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mcqforge {

/// Row-major design matrix with binary labels (1 = good distractor).
struct Dataset {
  std::size_t dim = 0;
  std::vector<double> x;
  std::vector<std::uint8_t> y;
  std::string layout_version;

  std::size_t size() const noexcept { return y.size(); }
  std::span<const double> row(std::size_t i) const { return {x.data() + i * dim, dim}; }
  void add(std::span<const double> features, bool good);
};

struct ForestParams {
  std::uint32_t n_trees = 500;
  std::uint32_t min_leaf = 4;
  /// Features tried per split; 0 means ceil(sqrt(dim)).
  std::uint32_t max_features = 0;
  bool bootstrap = true;
  std::uint64_t seed = 0;
  /// Worker threads for training; 0 uses the hardware concurrency. The
  /// trained forest does not depend on this value.
  std::uint32_t n_threads = 0;
};

/// Pre-order flat tree. A node with `feature < 0` is a leaf.
struct TreeNode {
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  double p_good = 0.0;
  std::uint32_t n_samples = 0;

  bool is_leaf() const noexcept { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;

  /// Leaf reached by `x` (x[f] <= threshold goes left).
  const TreeNode& leaf_for(std::span<const double> x) const;
};

struct RandomForestModel {
  ForestParams params;
  std::size_t dim = 0;
  std::string layout_version;
  std::vector<Tree> trees;
  /// Free-form key/value pairs saved with the model.
  std::vector<std::pair<std::string, std::string>> metadata;

  /// Mean of the per-tree leaf p_good.
  double score(std::span<const double> x) const;
  /// Same, after checking the layout version.
  double score(std::span<const double> x, std::string_view layout_version) const;

  const std::string* find_metadata(std::string_view key) const;
};

/// Uniform integer in [0, n) from 64-bit draws by rejection (portable across
/// standard libraries, unlike std::uniform_int_distribution).
std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n);

/// Throws ContractViolation on single-class data, too few instances, or a
/// missing layout version.
RandomForestModel train_forest(const Dataset& data, const ForestParams& params);

struct Evaluation {
  double accuracy = 0.0;
  std::size_t true_good = 0;
  std::size_t false_good = 0;
  std::size_t true_bad = 0;
  std::size_t false_bad = 0;

  std::size_t total() const { return true_good + false_good + true_bad + false_bad; }
};

/// Accuracy at threshold 0.5 (score >= 0.5 predicts good).
Evaluation evaluate(const RandomForestModel& model, const Dataset& heldout);

/// Little-endian binary format; doubles are stored bit-exact.
void save_model(const RandomForestModel& model, const std::filesystem::path& path);
std::vector<std::uint8_t> serialize_model(const RandomForestModel& model);
/// Throws LoadError on a corrupt or truncated file, or when
/// `expected_layout` is non-empty and differs from the file's.
RandomForestModel load_model(const std::filesystem::path& path, std::string_view expected_layout = {});
RandomForestModel deserialize_model(std::span<const std::uint8_t> bytes,
                                    std::string_view expected_layout = {});

}  // namespace mcqforge
