#pragma once

// Paragraph vectors (distributed memory, mean-combined context) trained with
// negative sampling.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "metasumm/detail/hash.hpp"
#include "metasumm/detail/random.hpp"
#include "metasumm/doc2vec/objective.hpp"
#include "metasumm/error.hpp"
#include "metasumm/textproc.hpp"

namespace metasumm {

/// A document reduced to its normalized word stream.
struct TaggedDocument {
  std::string id;
  std::vector<std::string> words;
};

inline TaggedDocument to_tagged(const Document& doc, const NormalizationConfig& cfg) {
  return {doc.id, normalized_words(doc, cfg)};
}

struct Doc2VecConfig {
  std::size_t dim = 256;
  std::size_t window = 5;
  std::size_t max_vocab = 100000;
  std::size_t min_count = 1;
  std::size_t epochs = 5;
  std::size_t negative = 5;
  double alpha = 0.025;
  double min_alpha = 1e-4;
  std::uint64_t seed = 1;
  std::size_t infer_steps = 50;
  std::size_t workers = 1;  // > 1 enables unsynchronized parallel updates
  NormalizationConfig normalization;

  void validate() const {
    if (dim == 0 || window == 0 || max_vocab == 0 || min_count == 0 || epochs == 0 || negative == 0 ||
        workers == 0) {
      throw ConfigError("doc2vec sizes and counts must be positive");
    }
    if (!(alpha > 0.0) || min_alpha < 0.0 || min_alpha > alpha) throw ConfigError("invalid doc2vec learning rates");
  }
};

struct Vocab {
  std::vector<std::string> words;    // id -> word
  std::vector<std::uint64_t> counts;  // id -> count
  std::unordered_map<std::string, std::uint32_t> index;
  std::uint64_t total = 0;  // sum of retained counts

  std::size_t size() const { return words.size(); }

  std::optional<std::uint32_t> find(const std::string& w) const {
    auto it = index.find(w);
    if (it == index.end()) return std::nullopt;
    return it->second;
  }

  std::uint64_t count(const std::string& w) const {
    auto id = find(w);
    return id ? counts[*id] : 0;
  }
};

/// Keeps words with count >= min_count; above max_vocab, the most frequent
/// (ties: lexicographic). Ids follow that order.
inline Vocab build_vocab(std::span<const TaggedDocument> corpus, const Doc2VecConfig& cfg) {
  if (corpus.empty()) throw DataError("cannot build a vocabulary from an empty corpus");
  std::map<std::string, std::uint64_t> counts;
  for (const auto& d : corpus) {
    for (const auto& w : d.words) ++counts[w];
  }
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [w, c] : counts) {
    if (c >= cfg.min_count) kept.emplace_back(w, c);
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (kept.size() > cfg.max_vocab) kept.resize(cfg.max_vocab);
  Vocab v;
  for (auto& [w, c] : kept) {
    v.index.emplace(w, static_cast<std::uint32_t>(v.words.size()));
    v.words.push_back(w);
    v.counts.push_back(c);
    v.total += c;
  }
  return v;
}

inline Vocab build_vocab(std::span<const Document> corpus, const Doc2VecConfig& cfg) {
  std::vector<TaggedDocument> tagged;
  tagged.reserve(corpus.size());
  for (const auto& d : corpus) tagged.push_back(to_tagged(d, cfg.normalization));
  return build_vocab(tagged, cfg);
}

/// Row-major float matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0f) {}

  float* row(std::size_t i) { return data.data() + i * cols; }
  const float* row(std::size_t i) const { return data.data() + i * cols; }
  std::span<const float> row_span(std::size_t i) const { return {row(i), cols}; }
};

struct Doc2VecModel {
  Doc2VecConfig config;
  Vocab vocab;
  Matrix word_input;
  Matrix word_output;
  Matrix doc_vectors;
  std::vector<std::string> doc_ids;
  std::unordered_map<std::string, std::size_t> doc_index;
  std::vector<double> epoch_loss;  // mean loss per epoch; not persisted

  std::span<const float> doc_vector(const std::string& id) const {
    auto it = doc_index.find(id);
    if (it == doc_index.end()) throw DataError("unknown document id '" + id + "'");
    return doc_vectors.row_span(it->second);
  }
};

namespace detail {

/// Draws noise words from the unigram distribution raised to 0.75.
class NoiseSampler {
 public:
  explicit NoiseSampler(const Vocab& vocab) {
    cumulative_.reserve(vocab.size());
    double acc = 0.0;
    for (auto c : vocab.counts) {
      acc += std::pow(static_cast<double>(c), 0.75);
      cumulative_.push_back(acc);
    }
  }

  std::uint32_t draw(Rng& rng) const {
    const double x = uniform01(rng) * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
    return static_cast<std::uint32_t>(std::min<std::size_t>(it - cumulative_.begin(), cumulative_.size() - 1));
  }

 private:
  std::vector<double> cumulative_;
};

inline void init_uniform(Matrix& m, Rng& rng) {
  const double half = 0.5 / static_cast<double>(m.cols);
  for (float& v : m.data) v = static_cast<float>(uniform(rng, -half, half));
}

/// Plain or relaxed-atomic parameter access; the latter for unsynchronized
/// multi-threaded training.
template <bool Concurrent>
struct ParamAccess {
  static float load(const float* p) {
    if constexpr (Concurrent) {
      return std::atomic_ref<float>(*const_cast<float*>(p)).load(std::memory_order_relaxed);
    } else {
      return *p;
    }
  }
  static void add(float* p, float delta) {
    if constexpr (Concurrent) {
      std::atomic_ref<float>(*p).fetch_add(delta, std::memory_order_relaxed);
    } else {
      *p += delta;
    }
  }
};

/// Per-thread scratch space for one training example.
struct ExampleWorkspace {
  explicit ExampleWorkspace(std::size_t dim) : objective(dim) {}

  PvdmObjective<float> objective;
  std::vector<float> input_buffer;
  std::vector<float> output_buffer;
  std::vector<const float*> input_ptrs;
  std::vector<const float*> output_ptrs;
  std::vector<std::uint32_t> context_ids;
  std::vector<std::uint32_t> output_ids;
  std::vector<int> labels;
};

/// One SGD step on the example at `pos` of `ids`. Updates the document
/// vector and, unless `freeze_words`, the context and output word vectors.
template <bool Concurrent>
float train_position(Doc2VecModel& model, float* doc, std::span<const std::uint32_t> ids, std::size_t pos,
                     const NoiseSampler& noise, Rng& rng, float lr, bool freeze_words, ExampleWorkspace& ws) {
  using Access = ParamAccess<Concurrent>;
  const std::size_t dim = model.config.dim;
  const std::size_t window = model.config.window;

  ws.context_ids.clear();
  const std::size_t lo = pos >= window ? pos - window : 0;
  const std::size_t hi = std::min(ids.size() - 1, pos + window);
  for (std::size_t j = lo; j <= hi; ++j) {
    if (j != pos) ws.context_ids.push_back(ids[j]);
  }
  const std::uint32_t target = ids[pos];
  ws.output_ids.assign(1, target);
  ws.labels.assign(1, 1);
  for (std::size_t k = 0; k < model.config.negative; ++k) {
    const auto w = noise.draw(rng);
    if (w == target) continue;
    ws.output_ids.push_back(w);
    ws.labels.push_back(0);
  }

  const std::size_t n_in = 1 + ws.context_ids.size();
  ws.input_buffer.resize(n_in * dim);
  ws.output_buffer.resize(ws.output_ids.size() * dim);
  for (std::size_t i = 0; i < dim; ++i) ws.input_buffer[i] = Access::load(doc + i);
  for (std::size_t c = 0; c < ws.context_ids.size(); ++c) {
    const float* src = model.word_input.row(ws.context_ids[c]);
    float* dst = ws.input_buffer.data() + (c + 1) * dim;
    for (std::size_t i = 0; i < dim; ++i) dst[i] = Access::load(src + i);
  }
  for (std::size_t k = 0; k < ws.output_ids.size(); ++k) {
    const float* src = model.word_output.row(ws.output_ids[k]);
    float* dst = ws.output_buffer.data() + k * dim;
    for (std::size_t i = 0; i < dim; ++i) dst[i] = Access::load(src + i);
  }
  ws.input_ptrs.resize(n_in);
  for (std::size_t c = 0; c < n_in; ++c) ws.input_ptrs[c] = ws.input_buffer.data() + c * dim;
  ws.output_ptrs.resize(ws.output_ids.size());
  for (std::size_t k = 0; k < ws.output_ids.size(); ++k) ws.output_ptrs[k] = ws.output_buffer.data() + k * dim;

  const float loss = ws.objective.evaluate(ws.input_ptrs, ws.output_ptrs, ws.labels);

  const auto g_in = ws.objective.input_gradient();
  for (std::size_t i = 0; i < dim; ++i) Access::add(doc + i, -lr * g_in[i]);
  if (!freeze_words) {
    for (auto c : ws.context_ids) {
      float* row = model.word_input.row(c);
      for (std::size_t i = 0; i < dim; ++i) Access::add(row + i, -lr * g_in[i]);
    }
    for (std::size_t k = 0; k < ws.output_ids.size(); ++k) {
      const auto g = ws.objective.output_gradient(k);
      float* row = model.word_output.row(ws.output_ids[k]);
      for (std::size_t i = 0; i < dim; ++i) Access::add(row + i, -lr * g[i]);
    }
  }
  return loss;
}

inline std::vector<std::uint32_t> to_ids(const Vocab& vocab, const std::vector<std::string>& words) {
  std::vector<std::uint32_t> ids;
  ids.reserve(words.size());
  for (const auto& w : words) {
    if (auto id = vocab.find(w)) ids.push_back(*id);
  }
  return ids;
}

inline std::uint64_t words_fingerprint(const std::vector<std::string>& words) {
  Fnv1a h;
  for (const auto& w : words) {
    h.update(w);
    h.update(std::string_view("\0", 1));
  }
  return h.value();
}

}  // namespace detail

/// Trains word and document vectors. With `workers == 1` the result is
/// bit-reproducible for a given seed.
inline Doc2VecModel train_doc2vec(std::span<const TaggedDocument> corpus, const Doc2VecConfig& cfg) {
  cfg.validate();
  Doc2VecModel model;
  model.config = cfg;
  model.vocab = build_vocab(corpus, cfg);
  if (model.vocab.size() == 0) throw DataError("vocabulary is empty after min_count filtering");

  const std::size_t dim = cfg.dim;
  model.word_input = Matrix(model.vocab.size(), dim);
  model.word_output = Matrix(model.vocab.size(), dim);
  model.doc_vectors = Matrix(corpus.size(), dim);
  for (const auto& d : corpus) {
    if (!model.doc_index.emplace(d.id, model.doc_ids.size()).second) {
      throw DataError("duplicate document id '" + d.id + "'");
    }
    model.doc_ids.push_back(d.id);
  }
  detail::Rng init_rng(detail::derive_seed(cfg.seed, 1));
  detail::init_uniform(model.word_input, init_rng);
  detail::init_uniform(model.doc_vectors, init_rng);

  std::vector<std::vector<std::uint32_t>> docs;
  docs.reserve(corpus.size());
  std::size_t positions_per_epoch = 0;
  for (const auto& d : corpus) {
    docs.push_back(detail::to_ids(model.vocab, d.words));
    positions_per_epoch += docs.back().size();
  }
  const double total_positions = static_cast<double>(positions_per_epoch * cfg.epochs);
  const detail::NoiseSampler noise(model.vocab);

  auto rate = [&](std::size_t processed) {
    const double progress = total_positions > 0 ? static_cast<double>(processed) / total_positions : 0.0;
    return static_cast<float>(cfg.alpha - (cfg.alpha - cfg.min_alpha) * progress);
  };

  std::size_t processed = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double epoch_loss = 0.0;
    if (cfg.workers == 1) {
      detail::Rng rng(detail::derive_seed(cfg.seed, 100 + epoch));
      detail::ExampleWorkspace ws(dim);
      for (std::size_t d = 0; d < docs.size(); ++d) {
        for (std::size_t pos = 0; pos < docs[d].size(); ++pos) {
          epoch_loss += detail::train_position<false>(model, model.doc_vectors.row(d), docs[d], pos, noise, rng,
                                                      rate(processed++), false, ws);
        }
      }
    } else {
      std::atomic<std::size_t> shared_processed{processed};
      std::vector<double> losses(cfg.workers, 0.0);
      std::vector<std::thread> threads;
      for (std::size_t w = 0; w < cfg.workers; ++w) {
        threads.emplace_back([&, w] {
          detail::Rng rng(detail::derive_seed(cfg.seed, 100 + epoch * 1000 + w));
          detail::ExampleWorkspace ws(dim);
          for (std::size_t d = w; d < docs.size(); d += cfg.workers) {
            for (std::size_t pos = 0; pos < docs[d].size(); ++pos) {
              losses[w] += detail::train_position<true>(model, model.doc_vectors.row(d), docs[d], pos, noise, rng,
                                                        rate(shared_processed++), false, ws);
            }
          }
        });
      }
      for (auto& t : threads) t.join();
      processed = shared_processed.load();
      for (double l : losses) epoch_loss += l;
    }
    const double mean = positions_per_epoch > 0 ? epoch_loss / static_cast<double>(positions_per_epoch) : 0.0;
    if (!std::isfinite(mean)) throw DivergenceError(epoch, "non-finite doc2vec loss");
    model.epoch_loss.push_back(mean);
  }
  return model;
}

inline Doc2VecModel train_doc2vec(std::span<const Document> corpus, const Doc2VecConfig& cfg) {
  std::vector<TaggedDocument> tagged;
  tagged.reserve(corpus.size());
  for (const auto& d : corpus) tagged.push_back(to_tagged(d, cfg.normalization));
  return train_doc2vec(tagged, cfg);
}

struct InferResult {
  std::vector<float> vector;
  bool no_known_words = false;  // vector is all zeros
};

/// Fits a fresh document vector against frozen word parameters. The random
/// start and noise draws are seeded from the model seed and the words, so
/// the same input always yields the same vector.
inline InferResult infer_vector(const Doc2VecModel& model, const std::vector<std::string>& words,
                                std::size_t steps = 0) {
  if (steps == 0) steps = model.config.infer_steps;
  const std::size_t dim = model.config.dim;
  InferResult out;
  const auto ids = detail::to_ids(model.vocab, words);
  if (ids.empty()) {
    out.vector.assign(dim, 0.0f);
    out.no_known_words = true;
    return out;
  }
  const std::uint64_t seed = detail::derive_seed(model.config.seed, detail::words_fingerprint(words));
  detail::Rng rng(seed);
  Matrix doc(1, dim);
  detail::init_uniform(doc, rng);
  const detail::NoiseSampler noise(model.vocab);
  detail::ExampleWorkspace ws(dim);
  // Word parameters are never written when frozen.
  auto& frozen = const_cast<Doc2VecModel&>(model);
  const double total = static_cast<double>(steps * ids.size());
  std::size_t processed = 0;
  for (std::size_t step = 0; step < steps; ++step) {
    for (std::size_t pos = 0; pos < ids.size(); ++pos) {
      const double progress = static_cast<double>(processed++) / total;
      const auto lr = static_cast<float>(model.config.alpha - (model.config.alpha - model.config.min_alpha) * progress);
      detail::train_position<false>(frozen, doc.row(0), ids, pos, noise, rng, lr, true, ws);
    }
  }
  out.vector = std::move(doc.data);
  return out;
}

inline InferResult infer_vector(const Doc2VecModel& model, const Document& doc, std::size_t steps = 0) {
  return infer_vector(model, normalized_words(doc, model.config.normalization), steps);
}

inline double cosine(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) throw DimensionError("cosine of vectors with different dimensions");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

struct SimilarDocument {
  std::string id;
  double cosine = 0.0;
};

/// Top-k stored documents by cosine similarity; ties by id.
inline std::vector<SimilarDocument> most_similar(const Doc2VecModel& model, std::span<const float> query,
                                                 std::size_t k) {
  if (k == 0) throw ConfigError("most_similar requires k >= 1");
  if (query.size() != model.config.dim) throw DimensionError("query dimension does not match the model");
  std::vector<SimilarDocument> all;
  all.reserve(model.doc_ids.size());
  for (std::size_t i = 0; i < model.doc_ids.size(); ++i) {
    all.push_back({model.doc_ids[i], cosine(query, model.doc_vectors.row_span(i))});
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    if (a.cosine != b.cosine) return a.cosine > b.cosine;
    return a.id < b.id;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

}  // namespace metasumm
