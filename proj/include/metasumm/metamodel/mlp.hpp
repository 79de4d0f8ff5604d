#pragma once

// Fully connected regression network: ReLU hidden layers, linear output,
// mean squared error, Adam, early stopping on a held-out tail of the
// training set.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "metasumm/detail/random.hpp"
#include "metasumm/error.hpp"
#include "metasumm/metamodel/dataset.hpp"

namespace metasumm {

struct MlpConfig {
  std::vector<std::size_t> hidden = {1024, 1024};
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-7;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 100;
  double validation_fraction = 0.1;
  std::size_t patience = 2;
  std::uint64_t seed = 1;

  void validate() const {
    for (auto h : hidden) {
      if (h == 0) throw ConfigError("hidden layer sizes must be positive");
    }
    if (!(learning_rate > 0)) throw ConfigError("learning rate must be positive");
    if (batch_size == 0 || max_epochs == 0) throw ConfigError("batch size and max epochs must be positive");
    if (!(validation_fraction >= 0 && validation_fraction < 1)) throw ConfigError("validation fraction must be in [0, 1)");
  }
};

struct MlpHistory {
  std::vector<double> train_loss;
  std::vector<double> validation_loss;
  std::size_t best_epoch = 0;
  double best_validation_loss = std::numeric_limits<double>::infinity();
};

class Mlp {
 public:
  using Matrix = Eigen::MatrixXd;  // samples are rows
  using Vector = Eigen::VectorXd;

  Mlp() = default;

  /// Glorot-uniform weights, zero biases.
  Mlp(std::size_t inputs, const std::vector<std::size_t>& hidden, std::size_t outputs, std::uint64_t seed) {
    std::vector<std::size_t> sizes{inputs};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(outputs);
    detail::Rng rng(seed);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
      const double limit = std::sqrt(6.0 / static_cast<double>(sizes[l] + sizes[l + 1]));
      Matrix w(sizes[l], sizes[l + 1]);
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = detail::uniform(rng, -limit, limit);
      }
      weights_.push_back(std::move(w));
      biases_.push_back(Vector::Zero(static_cast<Eigen::Index>(sizes[l + 1])));
    }
  }

  std::size_t n_features() const { return weights_.empty() ? 0 : static_cast<std::size_t>(weights_.front().rows()); }
  std::size_t n_outputs() const { return biases_.empty() ? 0 : static_cast<std::size_t>(biases_.back().size()); }
  std::size_t n_layers() const { return weights_.size(); }
  std::vector<std::size_t> layer_sizes() const {
    std::vector<std::size_t> s{n_features()};
    for (const auto& b : biases_) s.push_back(static_cast<std::size_t>(b.size()));
    return s;
  }

  Vector& output_bias() { return biases_.back(); }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) n += weights_[l].size() + biases_[l].size();
    return n;
  }

  /// Layer by layer: weights (column-major, inputs x outputs), then biases.
  std::vector<double> parameters() const {
    std::vector<double> p;
    p.reserve(parameter_count());
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      p.insert(p.end(), weights_[l].data(), weights_[l].data() + weights_[l].size());
      p.insert(p.end(), biases_[l].data(), biases_[l].data() + biases_[l].size());
    }
    return p;
  }

  void set_parameters(std::span<const double> p) {
    if (p.size() != parameter_count()) throw DimensionError("parameter vector has the wrong length");
    std::size_t k = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      std::copy_n(p.data() + k, weights_[l].size(), weights_[l].data());
      k += static_cast<std::size_t>(weights_[l].size());
      std::copy_n(p.data() + k, biases_[l].size(), biases_[l].data());
      k += static_cast<std::size_t>(biases_[l].size());
    }
  }

  Matrix forward(const Matrix& x) const {
    Matrix h = x;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      Matrix z = (h * weights_[l]).rowwise() + biases_[l].transpose();
      if (l + 1 < weights_.size()) z = z.cwiseMax(0.0);
      h = std::move(z);
    }
    return h;
  }

  std::vector<double> predict(std::span<const double> x) const {
    if (x.size() != n_features()) throw DimensionError("mlp expects " + std::to_string(n_features()) + " features");
    Matrix in(1, static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) in(0, static_cast<Eigen::Index>(i)) = x[i];
    const Matrix out = forward(in);
    return {out.data(), out.data() + out.size()};
  }

  /// Mean over samples and outputs of the squared error.
  double loss(const Matrix& x, const Matrix& y) const {
    return (forward(x) - y).squaredNorm() / static_cast<double>(y.size());
  }

  /// Loss and its gradient in `parameters()` order.
  double loss_and_gradient(const Matrix& x, const Matrix& y, std::vector<double>& grad) const {
    std::vector<Matrix> gw;
    std::vector<Vector> gb;
    const double l = backprop(x, y, gw, gb);
    grad.clear();
    grad.reserve(parameter_count());
    for (std::size_t i = 0; i < gw.size(); ++i) {
      grad.insert(grad.end(), gw[i].data(), gw[i].data() + gw[i].size());
      grad.insert(grad.end(), gb[i].data(), gb[i].data() + gb[i].size());
    }
    return l;
  }

  /// Trains on `train`; the last `validation_fraction` of its records are
  /// held out for early stopping. The best-validation weights are restored.
  static Mlp fit(const MetaDataset& train, const MlpConfig& cfg, MlpHistory* history = nullptr) {
    cfg.validate();
    train.validate();
    const std::size_t n = train.size();
    std::size_t n_val = static_cast<std::size_t>(std::llround(cfg.validation_fraction * n));
    if (cfg.validation_fraction > 0 && n >= 2) n_val = std::clamp<std::size_t>(n_val, 1, n - 1);
    if (n_val >= n) n_val = 0;
    const std::size_t n_fit = n - n_val;
    const Matrix x = features_of(train, 0, n);
    const Matrix y = targets_of(train, 0, n);
    const Matrix x_fit = x.topRows(static_cast<Eigen::Index>(n_fit));
    const Matrix y_fit = y.topRows(static_cast<Eigen::Index>(n_fit));
    const Matrix x_val = x.bottomRows(static_cast<Eigen::Index>(n_val));
    const Matrix y_val = y.bottomRows(static_cast<Eigen::Index>(n_val));

    Mlp net(train.feature_dim(), cfg.hidden, train.target_dim(), detail::derive_seed(cfg.seed, 1));
    net.output_bias() = y_fit.colwise().mean().transpose();

    Adam adam(net, cfg);
    detail::Rng rng(detail::derive_seed(cfg.seed, 2));
    std::vector<std::size_t> order(n_fit);
    std::iota(order.begin(), order.end(), std::size_t{0});
    MlpHistory h;
    Mlp best = net;
    std::size_t wait = 0;
    std::vector<Matrix> gw;
    std::vector<Vector> gb;
    for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
      detail::shuffle(order, rng);
      double sum = 0.0;
      for (std::size_t start = 0; start < n_fit; start += cfg.batch_size) {
        const std::size_t m = std::min(cfg.batch_size, n_fit - start);
        Matrix xb(static_cast<Eigen::Index>(m), x.cols());
        Matrix yb(static_cast<Eigen::Index>(m), y.cols());
        for (std::size_t i = 0; i < m; ++i) {
          xb.row(static_cast<Eigen::Index>(i)) = x_fit.row(static_cast<Eigen::Index>(order[start + i]));
          yb.row(static_cast<Eigen::Index>(i)) = y_fit.row(static_cast<Eigen::Index>(order[start + i]));
        }
        const double l = net.backprop(xb, yb, gw, gb);
        if (!std::isfinite(l)) throw DivergenceError(epoch, "mlp loss became non-finite");
        sum += l * static_cast<double>(m);
        adam.step(net, gw, gb);
      }
      const double train_loss = sum / static_cast<double>(n_fit);
      const double monitored = n_val > 0 ? net.loss(x_val, y_val) : train_loss;
      if (!std::isfinite(monitored)) throw DivergenceError(epoch, "mlp validation loss became non-finite");
      h.train_loss.push_back(train_loss);
      h.validation_loss.push_back(monitored);
      if (monitored < h.best_validation_loss) {
        h.best_validation_loss = monitored;
        h.best_epoch = epoch;
        best = net;
        wait = 0;
      } else if (++wait >= cfg.patience) {
        break;
      }
    }
    if (history) *history = std::move(h);
    return best;
  }

  static Matrix features_of(const MetaDataset& ds, std::size_t begin, std::size_t end) {
    Matrix x(static_cast<Eigen::Index>(end - begin), static_cast<Eigen::Index>(ds.feature_dim()));
    for (std::size_t i = begin; i < end; ++i) {
      const auto& f = ds.records[i].features;
      for (std::size_t j = 0; j < f.size(); ++j) x(static_cast<Eigen::Index>(i - begin), static_cast<Eigen::Index>(j)) = f[j];
    }
    return x;
  }

  static Matrix targets_of(const MetaDataset& ds, std::size_t begin, std::size_t end) {
    Matrix y(static_cast<Eigen::Index>(end - begin), static_cast<Eigen::Index>(ds.target_dim()));
    for (std::size_t i = begin; i < end; ++i) {
      const auto& t = ds.records[i].targets;
      for (std::size_t j = 0; j < t.size(); ++j) y(static_cast<Eigen::Index>(i - begin), static_cast<Eigen::Index>(j)) = t[j];
    }
    return y;
  }

 private:
  double backprop(const Matrix& x, const Matrix& y, std::vector<Matrix>& gw, std::vector<Vector>& gb) const {
    const std::size_t L = weights_.size();
    std::vector<Matrix> act{x};  // act[l] is the input to layer l
    act.reserve(L + 1);
    for (std::size_t l = 0; l < L; ++l) {
      Matrix z = (act[l] * weights_[l]).rowwise() + biases_[l].transpose();
      if (l + 1 < L) z = z.cwiseMax(0.0);
      act.push_back(std::move(z));
    }
    const Matrix diff = act[L] - y;
    const double count = static_cast<double>(y.size());
    Matrix delta = diff * (2.0 / count);
    gw.resize(L);
    gb.resize(L);
    for (std::size_t l = L; l-- > 0;) {
      gw[l].noalias() = act[l].transpose() * delta;
      gb[l] = delta.colwise().sum().transpose();
      if (l > 0) {
        Matrix back = delta * weights_[l].transpose();
        delta = back.cwiseProduct((act[l].array() > 0.0).cast<double>().matrix());
      }
    }
    return diff.squaredNorm() / count;
  }

  class Adam {
   public:
    Adam(const Mlp& net, const MlpConfig& cfg) : cfg_(cfg) {
      for (std::size_t l = 0; l < net.weights_.size(); ++l) {
        mw_.push_back(Matrix::Zero(net.weights_[l].rows(), net.weights_[l].cols()));
        vw_.push_back(mw_.back());
        mb_.push_back(Vector::Zero(net.biases_[l].size()));
        vb_.push_back(mb_.back());
      }
    }

    void step(Mlp& net, const std::vector<Matrix>& gw, const std::vector<Vector>& gb) {
      ++t_;
      const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
      const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
      const double lr = cfg_.learning_rate * std::sqrt(c2) / c1;
      for (std::size_t l = 0; l < gw.size(); ++l) {
        update(net.weights_[l], mw_[l], vw_[l], gw[l], lr);
        update(net.biases_[l], mb_[l], vb_[l], gb[l], lr);
      }
    }

   private:
    template <class P, class G>
    void update(P& p, P& m, P& v, const G& g, double lr) {
      m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
      v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
      p.array() -= lr * m.array() / (v.array().sqrt() + cfg_.adam_epsilon);
    }

    const MlpConfig& cfg_;
    std::size_t t_ = 0;
    std::vector<Matrix> mw_, vw_;
    std::vector<Vector> mb_, vb_;
  };

  std::vector<Matrix> weights_;
  std::vector<Vector> biases_;
};

}  // namespace metasumm
