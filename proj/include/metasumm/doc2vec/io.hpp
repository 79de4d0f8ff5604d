#pragma once

// D2V1 model container (all integers little-endian):
//
//   "D2V1"
//   u32 n, n bytes      config as JSON
//   u64 |V|             then per word: u32 n, n bytes word; u64 count
//   u64 total
//   u64 N               then per document: u32 n, n bytes id
//   f32[|V| * dim]      word input vectors, row-major
//   f32[|V| * dim]      word output vectors
//   f32[N * dim]        document vectors

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "metasumm/detail/binary_io.hpp"
#include "metasumm/doc2vec/model.hpp"

namespace metasumm {

inline nlohmann::json normalization_to_json(const NormalizationConfig& c) {
  return {{"lowercase", c.lowercase}, {"stopwords", c.stopwords}, {"lemmatizer", c.lemmatizer}};
}

inline NormalizationConfig normalization_from_json(const nlohmann::json& j) {
  NormalizationConfig c;
  c.lowercase = j.value("lowercase", c.lowercase);
  if (j.contains("stopwords")) c.stopwords = j.at("stopwords").get<std::set<std::string>>();
  c.lemmatizer = j.value("lemmatizer", c.lemmatizer);
  return c;
}

inline nlohmann::json doc2vec_config_to_json(const Doc2VecConfig& c) {
  return {{"dim", c.dim},
          {"window", c.window},
          {"max_vocab", c.max_vocab},
          {"min_count", c.min_count},
          {"epochs", c.epochs},
          {"negative", c.negative},
          {"alpha", c.alpha},
          {"min_alpha", c.min_alpha},
          {"seed", c.seed},
          {"infer_steps", c.infer_steps},
          {"workers", c.workers},
          {"normalization", normalization_to_json(c.normalization)}};
}

/// Missing keys keep their defaults.
inline Doc2VecConfig doc2vec_config_from_json(const nlohmann::json& j) {
  Doc2VecConfig c;
  try {
    c.dim = j.value("dim", c.dim);
    c.window = j.value("window", c.window);
    c.max_vocab = j.value("max_vocab", c.max_vocab);
    c.min_count = j.value("min_count", c.min_count);
    c.epochs = j.value("epochs", c.epochs);
    c.negative = j.value("negative", c.negative);
    c.alpha = j.value("alpha", c.alpha);
    c.min_alpha = j.value("min_alpha", c.min_alpha);
    c.seed = j.value("seed", c.seed);
    c.infer_steps = j.value("infer_steps", c.infer_steps);
    c.workers = j.value("workers", c.workers);
    if (j.contains("normalization")) c.normalization = normalization_from_json(j.at("normalization"));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid doc2vec config: ") + e.what());
  }
  return c;
}

inline void save_doc2vec(const Doc2VecModel& m, std::ostream& out) {
  out.write("D2V1", 4);
  detail::write_string(out, doc2vec_config_to_json(m.config).dump());
  detail::write_le<std::uint64_t>(out, m.vocab.size());
  for (std::size_t i = 0; i < m.vocab.size(); ++i) {
    detail::write_string(out, m.vocab.words[i]);
    detail::write_le<std::uint64_t>(out, m.vocab.counts[i]);
  }
  detail::write_le<std::uint64_t>(out, m.vocab.total);
  detail::write_le<std::uint64_t>(out, m.doc_ids.size());
  for (const auto& id : m.doc_ids) detail::write_string(out, id);
  detail::write_f32(out, m.word_input.data);
  detail::write_f32(out, m.word_output.data);
  detail::write_f32(out, m.doc_vectors.data);
  if (!out) throw DataError("failed to write doc2vec model");
}

inline Doc2VecModel load_doc2vec(std::istream& in) {
  detail::expect_magic(in, "D2V1");
  Doc2VecModel m;
  try {
    m.config = doc2vec_config_from_json(nlohmann::json::parse(detail::read_string(in)));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("corrupt doc2vec config: ") + e.what());
  }
  m.config.validate();
  const auto nv = detail::read_le<std::uint64_t>(in);
  if (nv > m.config.max_vocab) throw DataError("corrupt doc2vec model: vocabulary larger than max_vocab");
  for (std::uint64_t i = 0; i < nv; ++i) {
    auto w = detail::read_string(in);
    const auto c = detail::read_le<std::uint64_t>(in);
    if (!m.vocab.index.emplace(w, static_cast<std::uint32_t>(i)).second) {
      throw DataError("corrupt doc2vec model: duplicate word");
    }
    m.vocab.words.push_back(std::move(w));
    m.vocab.counts.push_back(c);
  }
  m.vocab.total = detail::read_le<std::uint64_t>(in);
  const auto nd = detail::read_le<std::uint64_t>(in);
  for (std::uint64_t i = 0; i < nd; ++i) {
    auto id = detail::read_string(in);
    m.doc_index.emplace(id, m.doc_ids.size());
    m.doc_ids.push_back(std::move(id));
  }
  m.word_input = Matrix(nv, m.config.dim);
  m.word_output = Matrix(nv, m.config.dim);
  m.doc_vectors = Matrix(nd, m.config.dim);
  detail::read_f32(in, m.word_input.data);
  detail::read_f32(in, m.word_output.data);
  detail::read_f32(in, m.doc_vectors.data);
  return m;
}

inline void save_doc2vec(const Doc2VecModel& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  save_doc2vec(m, out);
}

inline Doc2VecModel load_doc2vec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifactError(path, "train-doc2vec");
  return load_doc2vec(in);
}

inline std::string doc2vec_bytes(const Doc2VecModel& m) {
  std::ostringstream out(std::ios::binary);
  save_doc2vec(m, out);
  return out.str();
}

}  // namespace metasumm
