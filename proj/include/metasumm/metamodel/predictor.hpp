#pragma once

// Uniform predictor over the meta-model variants, and its MSP1 container
// (integers little-endian):
//
//   "MSP1"
//   u32 n, n bytes      header JSON: variant, n_features, n_outputs,
//                       uses_length_feature, variant-specific shape fields
//   u64 count           then `count` f64 values, layout per variant:
//     mean_baseline     the mean vector
//     tree / forest     per node: feature (-1 for leaves), threshold, left, right, value[n_outputs]
//     mlp               per layer: weights (column-major, in x out), biases

#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "metasumm/detail/binary_io.hpp"
#include "metasumm/metamodel/dataset.hpp"
#include "metasumm/metamodel/mlp.hpp"
#include "metasumm/metamodel/tree.hpp"

namespace metasumm {

class MeanBaseline {
 public:
  MeanBaseline() = default;
  MeanBaseline(std::size_t n_features, std::vector<double> mean) : n_features_(n_features), mean_(std::move(mean)) {}

  static MeanBaseline fit(const MetaDataset& train) {
    train.validate();
    std::vector<double> mean(train.target_dim(), 0.0);
    for (const auto& r : train.records) {
      for (std::size_t o = 0; o < mean.size(); ++o) mean[o] += r.targets[o];
    }
    for (auto& v : mean) v /= static_cast<double>(train.size());
    return MeanBaseline(train.feature_dim(), std::move(mean));
  }

  std::vector<double> predict(std::span<const double> x) const {
    if (x.size() != n_features_) throw DimensionError("predictor expects " + std::to_string(n_features_) + " features");
    return mean_;
  }

  std::size_t n_features() const { return n_features_; }
  std::size_t n_outputs() const { return mean_.size(); }
  const std::vector<double>& mean() const { return mean_; }

 private:
  std::size_t n_features_ = 0;
  std::vector<double> mean_;
};

enum class PredictorKind { mean_baseline, tree, forest, mlp };

inline std::string to_string(PredictorKind k) {
  switch (k) {
    case PredictorKind::mean_baseline: return "mean_baseline";
    case PredictorKind::tree: return "tree";
    case PredictorKind::forest: return "forest";
    case PredictorKind::mlp: return "mlp";
  }
  return "?";
}

/// Accepts the canonical names and the CLI spellings (mean, tree, forest, mlp).
inline PredictorKind parse_predictor_kind(std::string_view s) {
  if (s == "mean" || s == "mean_baseline" || s == "mean-baseline") return PredictorKind::mean_baseline;
  if (s == "tree") return PredictorKind::tree;
  if (s == "forest" || s == "random_forest") return PredictorKind::forest;
  if (s == "mlp") return PredictorKind::mlp;
  throw ConfigError("unknown predictor '" + std::string(s) + "'");
}

class Predictor {
 public:
  using Model = std::variant<MeanBaseline, RegressionTree, RandomForest, Mlp>;

  Predictor() = default;
  explicit Predictor(Model model, bool uses_length_feature = false)
      : model_(std::move(model)), uses_length_feature_(uses_length_feature) {}

  PredictorKind kind() const { return static_cast<PredictorKind>(model_.index()); }
  bool uses_length_feature() const { return uses_length_feature_; }
  const Model& model() const { return model_; }

  std::size_t n_features() const {
    return std::visit([](const auto& m) { return m.n_features(); }, model_);
  }
  std::size_t n_outputs() const {
    return std::visit([](const auto& m) { return m.n_outputs(); }, model_);
  }

  std::vector<double> predict(std::span<const double> x) const {
    auto out = std::visit([&](const auto& m) { return m.predict(x); }, model_);
    for (double v : out) {
      if (!std::isfinite(v)) throw DataError("predictor produced a non-finite score");
    }
    return out;
  }

 private:
  Model model_;
  bool uses_length_feature_ = false;
};

inline Predictor mean_baseline(const MetaDataset& train) { return Predictor(MeanBaseline::fit(train)); }

/// Argmax of the predicted per-summarizer scores; ties to the lowest index.
inline SummarizerId recommend(const Predictor& p, std::span<const double> features) {
  if (features.size() != p.n_features()) {
    throw DimensionError("feature vector has " + std::to_string(features.size()) + " values, predictor expects " +
                         std::to_string(p.n_features()));
  }
  return argmax_summarizer(p.predict(features));
}

// ---- MSP1 ----

namespace detail {

inline void flatten_tree(const RegressionTree& t, std::vector<double>& out) {
  for (const auto& n : t.nodes()) {
    out.push_back(n.feature);
    out.push_back(n.threshold);
    out.push_back(n.left);
    out.push_back(n.right);
    out.insert(out.end(), n.value.begin(), n.value.end());
  }
}

inline RegressionTree unflatten_tree(std::size_t n_features, std::size_t n_outputs, std::size_t n_nodes,
                                     std::span<const double>& in) {
  const std::size_t stride = 4 + n_outputs;
  if (in.size() < n_nodes * stride) throw DataError("corrupt predictor file: tree data too short");
  std::vector<RegressionTree::Node> nodes(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    const double* p = in.data() + i * stride;
    auto& n = nodes[i];
    n.feature = static_cast<int>(p[0]);
    n.threshold = p[1];
    n.left = static_cast<std::uint32_t>(p[2]);
    n.right = static_cast<std::uint32_t>(p[3]);
    n.value.assign(p + 4, p + stride);
    if (n.feature >= static_cast<int>(n_features) || (n.feature >= 0 && (n.left >= n_nodes || n.right >= n_nodes))) {
      throw DataError("corrupt predictor file: bad tree node");
    }
  }
  in = in.subspan(n_nodes * stride);
  return RegressionTree(n_features, n_outputs, std::move(nodes));
}

}  // namespace detail

inline void save_predictor(const Predictor& p, std::ostream& out) {
  nlohmann::json header{{"variant", to_string(p.kind())},
                        {"n_features", p.n_features()},
                        {"n_outputs", p.n_outputs()},
                        {"uses_length_feature", p.uses_length_feature()}};
  std::vector<double> blob;
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, MeanBaseline>) {
          blob = m.mean();
        } else if constexpr (std::is_same_v<M, RegressionTree>) {
          header["nodes"] = m.nodes().size();
          detail::flatten_tree(m, blob);
        } else if constexpr (std::is_same_v<M, RandomForest>) {
          std::vector<std::size_t> sizes;
          for (const auto& t : m.trees()) {
            sizes.push_back(t.nodes().size());
            detail::flatten_tree(t, blob);
          }
          header["tree_nodes"] = sizes;
        } else {
          header["layers"] = m.layer_sizes();
          blob = m.parameters();
        }
      },
      p.model());
  out.write("MSP1", 4);
  detail::write_string(out, header.dump());
  detail::write_le<std::uint64_t>(out, blob.size());
  detail::write_f64(out, blob);
  if (!out) throw DataError("failed to write predictor");
}

inline Predictor load_predictor(std::istream& in) {
  detail::expect_magic(in, "MSP1");
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(detail::read_string(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("corrupt predictor header: ") + e.what());
  }
  const auto count = detail::read_le<std::uint64_t>(in);
  if (count > (std::uint64_t{1} << 34)) throw DataError("corrupt predictor file: implausible size");
  std::vector<double> blob(count);
  detail::read_f64(in, blob);
  std::span<const double> rest(blob);
  try {
    const auto kind = parse_predictor_kind(h.at("variant").get<std::string>());
    const auto nf = h.at("n_features").get<std::size_t>();
    const auto no = h.at("n_outputs").get<std::size_t>();
    const bool length = h.value("uses_length_feature", false);
    switch (kind) {
      case PredictorKind::mean_baseline:
        if (blob.size() != no) throw DataError("corrupt predictor file: mean size");
        return Predictor(MeanBaseline(nf, blob), length);
      case PredictorKind::tree:
        return Predictor(detail::unflatten_tree(nf, no, h.at("nodes").get<std::size_t>(), rest), length);
      case PredictorKind::forest: {
        std::vector<RegressionTree> trees;
        for (auto n : h.at("tree_nodes").get<std::vector<std::size_t>>()) {
          trees.push_back(detail::unflatten_tree(nf, no, n, rest));
        }
        return Predictor(RandomForest(std::move(trees)), length);
      }
      case PredictorKind::mlp: {
        const auto sizes = h.at("layers").get<std::vector<std::size_t>>();
        if (sizes.size() < 2 || sizes.front() != nf || sizes.back() != no) {
          throw DataError("corrupt predictor file: layer sizes");
        }
        std::vector<std::size_t> hidden(sizes.begin() + 1, sizes.end() - 1);
        Mlp net(nf, hidden, no, 0);
        if (blob.size() != net.parameter_count()) throw DataError("corrupt predictor file: parameter count");
        net.set_parameters(blob);
        return Predictor(std::move(net), length);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("corrupt predictor header: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(std::string("corrupt predictor header: ") + e.what());
  }
  throw DataError("corrupt predictor file");
}

inline void save_predictor(const Predictor& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  save_predictor(p, out);
}

inline Predictor load_predictor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifactError(path, "train-meta");
  return load_predictor(in);
}

inline std::string predictor_bytes(const Predictor& p) {
  std::ostringstream out(std::ios::binary);
  save_predictor(p, out);
  return out.str();
}

}  // namespace metasumm
