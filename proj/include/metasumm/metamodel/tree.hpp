#pragma once

// Multi-output CART regression trees and random forests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "metasumm/detail/random.hpp"
#include "metasumm/error.hpp"
#include "metasumm/metamodel/dataset.hpp"

namespace metasumm {

struct TreeConfig {
  std::size_t min_samples_split = 100;

  void validate() const {
    if (min_samples_split < 2) throw ConfigError("min_samples_split must be at least 2");
  }
};

struct ForestConfig {
  std::size_t trees = 300;
  TreeConfig tree;
  bool bootstrap = true;
  std::size_t max_features = 0;  // 0: ceil(d / 3)
  std::uint64_t seed = 1;

  void validate() const {
    if (trees == 0) throw ConfigError("forest needs at least one tree");
    tree.validate();
  }

  std::size_t features_per_split(std::size_t d) const {
    const std::size_t k = max_features == 0 ? (d + 2) / 3 : max_features;
    return std::clamp<std::size_t>(k, 1, std::max<std::size_t>(d, 1));
  }
};

/// Row-major view of the training matrices.
struct TrainingData {
  std::size_t n = 0, d = 0, outputs = 0;
  std::vector<double> x;  // n * d
  std::vector<double> y;  // n * outputs

  explicit TrainingData(const MetaDataset& ds) : n(ds.size()), d(ds.feature_dim()), outputs(ds.target_dim()) {
    ds.validate();
    x.reserve(n * d);
    y.reserve(n * outputs);
    for (const auto& r : ds.records) {
      x.insert(x.end(), r.features.begin(), r.features.end());
      y.insert(y.end(), r.targets.begin(), r.targets.end());
    }
  }

  double feature(std::size_t i, std::size_t f) const { return x[i * d + f]; }
  const double* target(std::size_t i) const { return y.data() + i * outputs; }
};

class RegressionTree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::uint32_t left = 0, right = 0;
    std::vector<double> value;  // mean target of the node's samples
  };

  RegressionTree() = default;
  RegressionTree(std::size_t n_features, std::size_t n_outputs, std::vector<Node> nodes)
      : n_features_(n_features), n_outputs_(n_outputs), nodes_(std::move(nodes)) {}

  /// Fits on `samples` (indices into data, repeats allowed). With
  /// `features_per_split` < d, each split considers that many features drawn
  /// from `rng`.
  static RegressionTree fit(const TrainingData& data, std::vector<std::size_t> samples, const TreeConfig& cfg,
                            std::size_t features_per_split = 0, detail::Rng* rng = nullptr) {
    cfg.validate();
    if (samples.empty()) throw DataError("cannot fit a tree on zero samples");
    RegressionTree t;
    t.n_features_ = data.d;
    t.n_outputs_ = data.outputs;
    Builder b{data, cfg, features_per_split == 0 ? data.d : std::min(features_per_split, data.d), rng, t.nodes_};
    b.grow(samples);
    return t;
  }

  static RegressionTree fit(const MetaDataset& ds, const TreeConfig& cfg = {}) {
    const TrainingData data(ds);
    std::vector<std::size_t> all(data.n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return fit(data, std::move(all), cfg);
  }

  std::span<const double> predict_ref(std::span<const double> x) const {
    if (x.size() != n_features_) throw DimensionError("tree expects " + std::to_string(n_features_) + " features");
    std::size_t i = 0;
    while (nodes_[i].feature >= 0) {
      const auto& nd = nodes_[i];
      i = x[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
    }
    return nodes_[i].value;
  }

  std::vector<double> predict(std::span<const double> x) const {
    const auto v = predict_ref(x);
    return {v.begin(), v.end()};
  }

  std::size_t n_features() const { return n_features_; }
  std::size_t n_outputs() const { return n_outputs_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t leaf_count() const {
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.feature < 0; }));
  }

 private:
  struct Builder {
    const TrainingData& data;
    const TreeConfig& cfg;
    std::size_t k;
    detail::Rng* rng;
    std::vector<Node>& nodes;

    std::uint32_t grow(std::vector<std::size_t>& samples) {
      const auto id = static_cast<std::uint32_t>(nodes.size());
      nodes.emplace_back();
      const std::size_t m = data.outputs;
      std::vector<double> sum(m, 0.0);
      for (auto s : samples) {
        for (std::size_t o = 0; o < m; ++o) sum[o] += data.target(s)[o];
      }
      std::vector<double> mean(m);
      for (std::size_t o = 0; o < m; ++o) mean[o] = sum[o] / static_cast<double>(samples.size());
      nodes[id].value = mean;

      if (samples.size() < cfg.min_samples_split || zero_variance(samples)) return id;
      const auto split = best_split(samples, sum);
      if (!split) return id;

      std::vector<std::size_t> left, right;
      for (auto s : samples) {
        (data.feature(s, split->feature) <= split->threshold ? left : right).push_back(s);
      }
      samples.clear();
      samples.shrink_to_fit();
      nodes[id].feature = static_cast<int>(split->feature);
      nodes[id].threshold = split->threshold;
      const auto l = grow(left);
      const auto r = grow(right);
      nodes[id].left = l;
      nodes[id].right = r;
      return id;
    }

    bool zero_variance(const std::vector<std::size_t>& samples) const {
      const double* first = data.target(samples.front());
      for (auto s : samples) {
        if (!std::equal(first, first + data.outputs, data.target(s))) return false;
      }
      return true;
    }

    struct Split {
      std::size_t feature;
      double threshold;
    };

    std::vector<std::size_t> candidate_features() {
      std::vector<std::size_t> f(data.d);
      std::iota(f.begin(), f.end(), std::size_t{0});
      if (k >= data.d || rng == nullptr) return f;
      for (std::size_t i = 0; i < k; ++i) std::swap(f[i], f[i + detail::uniform_index(*rng, data.d - i)]);
      f.resize(k);
      std::sort(f.begin(), f.end());
      return f;
    }

    /// Maximizes sum_o (SL_o^2 / nL + SR_o^2 / nR), which is equivalent to
    /// maximizing the summed variance reduction. Ties keep the earlier
    /// (lower feature, then lower threshold) candidate.
    std::optional<Split> best_split(std::vector<std::size_t>& samples, const std::vector<double>& total) {
      const std::size_t n = samples.size();
      const std::size_t m = data.outputs;
      double parent = 0.0;
      for (std::size_t o = 0; o < m; ++o) parent += total[o] * total[o] / static_cast<double>(n);
      std::optional<Split> best;
      double best_score = parent;
      const double eps = 1e-12 * std::max(1.0, std::abs(parent));
      std::vector<double> left(m);
      for (auto f : candidate_features()) {
        std::stable_sort(samples.begin(), samples.end(),
                         [&](std::size_t a, std::size_t b) { return data.feature(a, f) < data.feature(b, f); });
        std::fill(left.begin(), left.end(), 0.0);
        for (std::size_t i = 0; i + 1 < n; ++i) {
          const double* y = data.target(samples[i]);
          for (std::size_t o = 0; o < m; ++o) left[o] += y[o];
          const double xa = data.feature(samples[i], f);
          const double xb = data.feature(samples[i + 1], f);
          if (!(xa < xb)) continue;
          const double nl = static_cast<double>(i + 1);
          const double nr = static_cast<double>(n - i - 1);
          double score = 0.0;
          for (std::size_t o = 0; o < m; ++o) {
            const double r = total[o] - left[o];
            score += left[o] * left[o] / nl + r * r / nr;
          }
          if (score > best_score + eps) {
            best_score = score;
            double thr = xa + (xb - xa) / 2.0;
            if (!(thr < xb)) thr = xa;  // midpoint rounded up to xb
            best = Split{f, thr};
          }
        }
      }
      return best;
    }
  };

  std::size_t n_features_ = 0;
  std::size_t n_outputs_ = 0;
  std::vector<Node> nodes_;
};

class RandomForest {
 public:
  RandomForest() = default;
  explicit RandomForest(std::vector<RegressionTree> trees) : trees_(std::move(trees)) {}

  static RandomForest fit(const MetaDataset& ds, const ForestConfig& cfg = {}) {
    cfg.validate();
    const TrainingData data(ds);
    const std::size_t k = cfg.features_per_split(data.d);
    std::vector<RegressionTree> trees;
    trees.reserve(cfg.trees);
    for (std::size_t t = 0; t < cfg.trees; ++t) {
      detail::Rng rng(detail::derive_seed(cfg.seed, t));
      std::vector<std::size_t> samples(data.n);
      if (cfg.bootstrap) {
        for (auto& s : samples) s = detail::uniform_index(rng, data.n);
      } else {
        std::iota(samples.begin(), samples.end(), std::size_t{0});
      }
      trees.push_back(RegressionTree::fit(data, std::move(samples), cfg.tree, k, &rng));
    }
    return RandomForest(std::move(trees));
  }

  std::vector<double> predict(std::span<const double> x) const {
    if (trees_.empty()) throw DataError("forest has no trees");
    std::vector<double> out(trees_.front().n_outputs(), 0.0);
    for (const auto& t : trees_) {
      const auto v = t.predict_ref(x);
      for (std::size_t o = 0; o < out.size(); ++o) out[o] += v[o];
    }
    for (auto& v : out) v /= static_cast<double>(trees_.size());
    return out;
  }

  std::size_t n_features() const { return trees_.empty() ? 0 : trees_.front().n_features(); }
  std::size_t n_outputs() const { return trees_.empty() ? 0 : trees_.front().n_outputs(); }
  const std::vector<RegressionTree>& trees() const { return trees_; }

 private:
  std::vector<RegressionTree> trees_;
};

}  // namespace metasumm
