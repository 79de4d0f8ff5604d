#pragma once

// TextRank-style centrality: stationary distribution of a damped random walk
// over a row-normalized similarity graph.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "metasumm/error.hpp"

namespace metasumm {

using SimilarityMatrix = std::vector<std::vector<double>>;

struct CentralityConfig {
  double damping = 0.85;
  double epsilon = 1e-6;
  std::size_t max_iter = 100;
};

struct CentralityScores {
  std::vector<double> scores;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Row-stochastic transition matrix; rows summing to zero become uniform.
inline SimilarityMatrix transition_matrix(const SimilarityMatrix& sim) {
  const std::size_t n = sim.size();
  SimilarityMatrix p(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    if (sim[i].size() != n) throw DimensionError("similarity matrix must be square");
    double row = 0.0;
    for (double v : sim[i]) {
      if (!(v >= 0.0)) throw DataError("similarity entries must be nonnegative");
      row += v;
    }
    for (std::size_t j = 0; j < n; ++j) p[i][j] = row > 0.0 ? sim[i][j] / row : 1.0 / static_cast<double>(n);
  }
  return p;
}

/// One damped power-iteration step: (1-d)/n + d * P^T r.
inline std::vector<double> centrality_step(const SimilarityMatrix& transition, const std::vector<double>& r,
                                           double damping) {
  const std::size_t n = r.size();
  std::vector<double> next(n, (1.0 - damping) / static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double mass = damping * r[i];
    for (std::size_t j = 0; j < n; ++j) next[j] += mass * transition[i][j];
  }
  return next;
}

inline CentralityScores centrality(const SimilarityMatrix& sim, const CentralityConfig& cfg = {}) {
  const std::size_t n = sim.size();
  CentralityScores out;
  if (n == 0) {
    out.converged = true;
    return out;
  }
  const auto p = transition_matrix(sim);
  std::vector<double> r(n, 1.0 / static_cast<double>(n));
  while (out.iterations < cfg.max_iter) {
    auto next = centrality_step(p, r, cfg.damping);
    ++out.iterations;
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) delta = std::max(delta, std::abs(next[i] - r[i]));
    r = std::move(next);
    if (delta < cfg.epsilon) {
      out.converged = true;
      break;
    }
  }
  double total = 0.0;
  for (double v : r) total += v;
  for (double& v : r) v /= total;
  out.scores = std::move(r);
  return out;
}

}  // namespace metasumm
