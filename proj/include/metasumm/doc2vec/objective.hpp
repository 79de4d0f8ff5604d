#pragma once

// Negative-sampling objective of the distributed-memory paragraph-vector
// model for a single (document, context, target) example:
//
//   h    = (d + sum_c w_c) / (1 + |C|)
//   loss = -sum_k log sigmoid(s_k * u_k . h),  s_k = +1 for the target, -1 for noise words
//
// Gradients are exact, so the same code serves training (float) and the
// finite-difference check (double).

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "metasumm/error.hpp"

namespace metasumm {

template <class Real>
class PvdmObjective {
 public:
  explicit PvdmObjective(std::size_t dim) : dim_(dim), hidden_(dim), grad_hidden_(dim), grad_input_(dim) {}

  std::size_t dim() const { return dim_; }

  /// `inputs[0]` is the document vector, the rest are context word vectors.
  /// `outputs[k]` pairs with `labels[k]` (1 for the target, 0 for noise).
  /// Returns the loss and leaves gradients in input_gradient()/output_gradient().
  Real evaluate(std::span<const Real* const> inputs, std::span<const Real* const> outputs,
                std::span<const int> labels) {
    if (inputs.empty()) throw DimensionError("objective needs at least the document vector");
    if (outputs.size() != labels.size()) throw DimensionError("one label per output vector");
    const Real scale = Real(1) / static_cast<Real>(inputs.size());
    for (std::size_t i = 0; i < dim_; ++i) {
      Real s = 0;
      for (const Real* in : inputs) s += in[i];
      hidden_[i] = s * scale;
      grad_hidden_[i] = 0;
    }
    grad_outputs_.assign(outputs.size() * dim_, Real(0));
    Real loss = 0;
    for (std::size_t k = 0; k < outputs.size(); ++k) {
      const Real* u = outputs[k];
      Real score = 0;
      for (std::size_t i = 0; i < dim_; ++i) score += u[i] * hidden_[i];
      const Real label = static_cast<Real>(labels[k]);
      const Real sig = sigmoid(score);
      loss += labels[k] ? softplus(-score) : softplus(score);
      const Real g = sig - label;  // d loss / d score
      Real* gu = grad_outputs_.data() + k * dim_;
      for (std::size_t i = 0; i < dim_; ++i) {
        grad_hidden_[i] += g * u[i];
        gu[i] = g * hidden_[i];
      }
    }
    for (std::size_t i = 0; i < dim_; ++i) grad_input_[i] = grad_hidden_[i] * scale;
    return loss;
  }

  /// Gradient with respect to each input vector (identical for all of them).
  std::span<const Real> input_gradient() const { return grad_input_; }

  std::span<const Real> output_gradient(std::size_t k) const {
    return std::span<const Real>(grad_outputs_).subspan(k * dim_, dim_);
  }

  static Real sigmoid(Real x) {
    if (x >= 0) return Real(1) / (Real(1) + std::exp(-x));
    const Real e = std::exp(x);
    return e / (Real(1) + e);
  }

  /// log(1 + exp(x)) without overflow.
  static Real softplus(Real x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

 private:
  std::size_t dim_;
  std::vector<Real> hidden_;
  std::vector<Real> grad_hidden_;
  std::vector<Real> grad_input_;
  std::vector<Real> grad_outputs_;
};

}  // namespace metasumm
