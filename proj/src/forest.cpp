#include "mcqforge/forest.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <thread>

#include "mcqforge/error.hpp"
#include "mcqforge/text.hpp"

namespace mcqforge {

void Dataset::add(std::span<const double> features, bool good) {
  if (dim == 0 && y.empty()) dim = features.size();
  if (features.size() != dim) {
    throw ContractViolation("feature vector of length " + std::to_string(features.size()) +
                            " in a dataset of dimension " + std::to_string(dim));
  }
  x.insert(x.end(), features.begin(), features.end());
  y.push_back(good ? 1 : 0);
}

std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) throw ContractViolation("uniform_index over an empty range");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t r = rng();
  while (r >= limit) r = rng();
  return r % n;
}

const TreeNode& Tree::leaf_for(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const TreeNode& n = nodes[i];
    i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes[i];
}

double RandomForestModel::score(std::span<const double> x) const {
  if (x.size() != dim) {
    throw ContractViolation("input of length " + std::to_string(x.size()) + " for a model of dimension " +
                            std::to_string(dim));
  }
  if (trees.empty()) return 0.0;
  double sum = 0.0;
  for (const Tree& t : trees) sum += t.leaf_for(x).p_good;
  return sum / static_cast<double>(trees.size());
}

double RandomForestModel::score(std::span<const double> x, std::string_view layout) const {
  if (layout != layout_version) {
    throw ContractViolation("feature layout '" + std::string(layout) + "' does not match model layout '" +
                            layout_version + "'");
  }
  return score(x);
}

const std::string* RandomForestModel::find_metadata(std::string_view key) const {
  for (const auto& [k, v] : metadata) {
    if (k == key) return &v;
  }
  return nullptr;
}

namespace {

struct Sample {
  std::uint32_t index;
  std::uint32_t weight;
};

double gini(double good, double total) {
  if (total <= 0) return 0.0;
  const double p = good / total;
  return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

class TreeBuilder {
public:
  TreeBuilder(const Dataset& data, std::uint32_t min_leaf, std::uint32_t mtry, std::mt19937_64& rng)
      : data_(data), min_leaf_(min_leaf), mtry_(mtry), rng_(rng), features_(data.dim) {}

  Tree build(std::vector<Sample> samples) {
    samples_ = std::move(samples);
    tree_.nodes.clear();
    grow(0, samples_.size());
    return std::move(tree_);
  }

private:
  struct Split {
    std::int32_t feature = -1;
    double threshold = 0.0;
    double impurity = 0.0;
  };

  std::uint32_t grow(std::size_t begin, std::size_t end) {
    double total = 0;
    double good = 0;
    for (std::size_t i = begin; i < end; ++i) {
      total += samples_[i].weight;
      good += samples_[i].weight * data_.y[samples_[i].index];
    }
    const auto id = static_cast<std::uint32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    auto make_leaf = [&] {
      TreeNode& n = tree_.nodes[id];
      n.feature = -1;
      n.p_good = good / total;
      n.n_samples = static_cast<std::uint32_t>(total);
      return id;
    };
    if (good == 0 || good == total || total < 2.0 * min_leaf_) return make_leaf();

    const double parent = gini(good, total);
    const Split split = best_split(begin, end, total, good, parent);
    if (split.feature < 0) return make_leaf();

    const auto f = static_cast<std::size_t>(split.feature);
    auto mid_it = std::partition(samples_.begin() + begin, samples_.begin() + end, [&](const Sample& s) {
      return data_.x[s.index * data_.dim + f] <= split.threshold;
    });
    const auto mid = static_cast<std::size_t>(mid_it - samples_.begin());
    tree_.nodes[id].feature = split.feature;
    tree_.nodes[id].threshold = split.threshold;
    tree_.nodes[id].n_samples = static_cast<std::uint32_t>(total);
    tree_.nodes[id].p_good = good / total;
    const std::uint32_t left = grow(begin, mid);
    const std::uint32_t right = grow(mid, end);
    tree_.nodes[id].left = left;
    tree_.nodes[id].right = right;
    return id;
  }

  // Features are drawn without replacement. Constant features are skipped
  // without counting toward the quota, and drawing continues past the quota
  // until some feature improves on the parent or all have been tried.
  Split best_split(std::size_t begin, std::size_t end, double total, double good, double parent) {
    std::iota(features_.begin(), features_.end(), 0U);
    Split best;
    best.impurity = parent;
    std::uint32_t visited = 0;
    const std::size_t d = features_.size();
    for (std::size_t j = 0; j < d; ++j) {
      if (visited >= mtry_ && best.feature >= 0) break;
      const std::size_t r = j + uniform_index(rng_, d - j);
      std::swap(features_[j], features_[r]);
      const std::uint32_t f = features_[j];

      column_.clear();
      for (std::size_t i = begin; i < end; ++i) {
        const Sample& s = samples_[i];
        column_.push_back({data_.x[s.index * data_.dim + f], s.index, s.weight});
      }
      std::sort(column_.begin(), column_.end(), [](const Cell& a, const Cell& b) {
        return a.value < b.value || (a.value == b.value && a.index < b.index);
      });
      if (column_.front().value == column_.back().value) continue;
      ++visited;

      double left_n = 0;
      double left_good = 0;
      for (std::size_t i = 0; i + 1 < column_.size(); ++i) {
        left_n += column_[i].weight;
        left_good += column_[i].weight * data_.y[column_[i].index];
        if (column_[i].value == column_[i + 1].value) continue;
        const double right_n = total - left_n;
        if (left_n < min_leaf_ || right_n < min_leaf_) continue;
        const double imp =
            (left_n * gini(left_good, left_n) + right_n * gini(good - left_good, right_n)) / total;
        if (imp < best.impurity - 1e-12) {
          double thr = column_[i].value + (column_[i + 1].value - column_[i].value) / 2.0;
          if (!(thr < column_[i + 1].value)) thr = column_[i].value;
          best.feature = static_cast<std::int32_t>(f);
          best.threshold = thr;
          best.impurity = imp;
        }
      }
    }
    return best;
  }

  struct Cell {
    double value;
    std::uint32_t index;
    std::uint32_t weight;
  };

  const Dataset& data_;
  std::uint32_t min_leaf_;
  std::uint32_t mtry_;
  std::mt19937_64& rng_;
  std::vector<std::uint32_t> features_;
  std::vector<Sample> samples_;
  std::vector<Cell> column_;
  Tree tree_;
};

Tree train_tree(const Dataset& data, const ForestParams& params, std::uint32_t mtry, std::size_t t) {
  std::mt19937_64 rng(params.seed + t);
  const std::size_t n = data.size();
  std::vector<std::uint32_t> counts(n, params.bootstrap ? 0 : 1);
  if (params.bootstrap) {
    for (std::size_t i = 0; i < n; ++i) ++counts[uniform_index(rng, n)];
  }
  std::vector<Sample> samples;
  for (std::size_t i = 0; i < n; ++i) {
    if (counts[i] > 0) samples.push_back({static_cast<std::uint32_t>(i), counts[i]});
  }
  TreeBuilder builder(data, params.min_leaf, mtry, rng);
  return builder.build(std::move(samples));
}

}  // namespace

RandomForestModel train_forest(const Dataset& data, const ForestParams& params) {
  if (data.layout_version.empty()) throw ContractViolation("training data has no layout version");
  if (params.n_trees == 0) throw ContractViolation("n_trees must be positive");
  if (params.min_leaf == 0) throw ContractViolation("min_leaf must be positive");
  if (data.size() < 2 * static_cast<std::size_t>(params.min_leaf)) {
    throw ContractViolation("need at least " + std::to_string(2 * params.min_leaf) +
                            " instances, got " + std::to_string(data.size()));
  }
  if (data.dim == 0) throw ContractViolation("training data has no features");
  const auto n_good = std::count(data.y.begin(), data.y.end(), 1);
  if (n_good == 0 || static_cast<std::size_t>(n_good) == data.size()) {
    throw ContractViolation("training data contains a single class");
  }

  RandomForestModel model;
  model.params = params;
  model.dim = data.dim;
  model.layout_version = data.layout_version;
  model.trees.resize(params.n_trees);
  const std::uint32_t mtry =
      params.max_features > 0
          ? std::min<std::uint32_t>(params.max_features, static_cast<std::uint32_t>(data.dim))
          : static_cast<std::uint32_t>(std::ceil(std::sqrt(static_cast<double>(data.dim))));

  unsigned workers = params.n_threads > 0 ? params.n_threads : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1U, params.n_trees);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t t = next++; t < params.n_trees; t = next++) {
      model.trees[t] = train_tree(data, params, mtry, t);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return model;
}

Evaluation evaluate(const RandomForestModel& model, const Dataset& heldout) {
  Evaluation e;
  for (std::size_t i = 0; i < heldout.size(); ++i) {
    const bool predicted = model.score(heldout.row(i)) >= 0.5;
    const bool actual = heldout.y[i] == 1;
    if (predicted && actual) ++e.true_good;
    else if (predicted) ++e.false_good;
    else if (actual) ++e.false_bad;
    else ++e.true_bad;
  }
  if (e.total() > 0) {
    e.accuracy = static_cast<double>(e.true_good + e.true_bad) / static_cast<double>(e.total());
  }
  return e;
}

namespace {

constexpr char kMagic[8] = {'M', 'C', 'Q', 'F', 'R', 'S', 'T', '1'};
constexpr char kEndMarker[4] = {'E', 'N', 'D', 'F'};

class Writer {
public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  template <typename T>
  void uint(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { uint(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    uint(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

private:
  std::vector<std::uint8_t> out_;
};

class Reader {
public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  void need(std::size_t n) const {
    if (pos_ + n > in_.size()) throw LoadError("model file is truncated");
  }
  template <typename T>
  T uint() {
    need(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(in_[pos_ + i]) << (8 * i);
    pos_ += sizeof(T);
    return v;
  }
  double f64() { return std::bit_cast<double>(uint<std::uint64_t>()); }
  std::string str() {
    const auto n = uint<std::uint32_t>();
    need(n);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  bool expect(const char* token, std::size_t n) {
    need(n);
    const bool ok = std::memcmp(in_.data() + pos_, token, n) == 0;
    pos_ += n;
    return ok;
  }
  bool at_end() const { return pos_ == in_.size(); }

private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

void write_subtree(Writer& w, const Tree& t, std::uint32_t i) {
  const TreeNode& n = t.nodes[i];
  if (n.is_leaf()) {
    w.uint<std::uint8_t>(0);
    w.f64(n.p_good);
    w.uint<std::uint32_t>(n.n_samples);
    return;
  }
  w.uint<std::uint8_t>(1);
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(n.feature));
  w.f64(n.threshold);
  w.f64(n.p_good);
  w.uint<std::uint32_t>(n.n_samples);
  write_subtree(w, t, n.left);
  write_subtree(w, t, n.right);
}

std::uint32_t read_subtree(Reader& r, Tree& t, std::size_t dim, std::uint32_t budget) {
  if (t.nodes.size() >= budget) throw LoadError("model file: tree has more nodes than declared");
  const auto id = static_cast<std::uint32_t>(t.nodes.size());
  t.nodes.emplace_back();
  const auto kind = r.uint<std::uint8_t>();
  if (kind == 0) {
    TreeNode& n = t.nodes[id];
    n.p_good = r.f64();
    n.n_samples = r.uint<std::uint32_t>();
    if (!(n.p_good >= 0.0 && n.p_good <= 1.0)) throw LoadError("model file: leaf probability out of range");
    return id;
  }
  if (kind != 1) throw LoadError("model file: bad node tag");
  const auto feature = r.uint<std::uint32_t>();
  if (feature >= dim) throw LoadError("model file: feature index out of range");
  const double threshold = r.f64();
  const double p_good = r.f64();
  const auto n_samples = r.uint<std::uint32_t>();
  const std::uint32_t left = read_subtree(r, t, dim, budget);
  const std::uint32_t right = read_subtree(r, t, dim, budget);
  TreeNode& n = t.nodes[id];
  n.feature = static_cast<std::int32_t>(feature);
  n.threshold = threshold;
  n.p_good = p_good;
  n.n_samples = n_samples;
  n.left = left;
  n.right = right;
  return id;
}

}  // namespace

std::vector<std::uint8_t> serialize_model(const RandomForestModel& m) {
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.str(m.layout_version);
  w.uint<std::uint64_t>(m.dim);
  w.uint<std::uint32_t>(m.params.n_trees);
  w.uint<std::uint32_t>(m.params.min_leaf);
  w.uint<std::uint32_t>(m.params.max_features);
  w.uint<std::uint8_t>(m.params.bootstrap ? 1 : 0);
  w.uint<std::uint64_t>(m.params.seed);
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(m.metadata.size()));
  for (const auto& [k, v] : m.metadata) {
    w.str(k);
    w.str(v);
  }
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(m.trees.size()));
  for (const Tree& t : m.trees) {
    w.uint<std::uint32_t>(static_cast<std::uint32_t>(t.nodes.size()));
    if (!t.nodes.empty()) write_subtree(w, t, 0);
  }
  w.bytes(kEndMarker, sizeof kEndMarker);
  return w.take();
}

RandomForestModel deserialize_model(std::span<const std::uint8_t> bytes, std::string_view expected_layout) {
  Reader r(bytes);
  if (!r.expect(kMagic, sizeof kMagic)) throw LoadError("not a forest model file (bad magic)");
  RandomForestModel m;
  m.layout_version = r.str();
  if (!expected_layout.empty() && m.layout_version != expected_layout) {
    throw LoadError("model layout '" + m.layout_version + "' does not match expected layout '" +
                    std::string(expected_layout) + "'");
  }
  m.dim = static_cast<std::size_t>(r.uint<std::uint64_t>());
  m.params.n_trees = r.uint<std::uint32_t>();
  m.params.min_leaf = r.uint<std::uint32_t>();
  m.params.max_features = r.uint<std::uint32_t>();
  m.params.bootstrap = r.uint<std::uint8_t>() != 0;
  m.params.seed = r.uint<std::uint64_t>();
  const auto n_meta = r.uint<std::uint32_t>();
  for (std::uint32_t i = 0; i < n_meta; ++i) {
    std::string k = r.str();
    std::string v = r.str();
    m.metadata.emplace_back(std::move(k), std::move(v));
  }
  const auto n_trees = r.uint<std::uint32_t>();
  if (n_trees != m.params.n_trees) throw LoadError("model file: tree count does not match header");
  m.trees.resize(n_trees);
  for (Tree& t : m.trees) {
    const auto count = r.uint<std::uint32_t>();
    if (count == 0) throw LoadError("model file: empty tree");
    r.need(count);  // every node takes at least one byte; rejects absurd counts early
    t.nodes.reserve(count);
    read_subtree(r, t, m.dim, count);
    if (t.nodes.size() != count) throw LoadError("model file: node count does not match header");
  }
  if (!r.expect(kEndMarker, sizeof kEndMarker)) throw LoadError("model file: missing end marker");
  if (!r.at_end()) throw LoadError("model file: trailing bytes after end marker");
  return m;
}

void save_model(const RandomForestModel& model, const std::filesystem::path& path) {
  const auto bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw LoadError("cannot write model: " + path.string());
}

RandomForestModel load_model(const std::filesystem::path& path, std::string_view expected_layout) {
  const std::string raw = read_file(path);
  try {
    return deserialize_model(
        {reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()}, expected_layout);
  } catch (const LoadError& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

}  // namespace mcqforge
