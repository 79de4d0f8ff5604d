#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "metasumm/detail/parallel.hpp"
#include "metasumm/detail/random.hpp"
#include "metasumm/doc2vec/model.hpp"
#include "metasumm/error.hpp"
#include "metasumm/rouge.hpp"
#include "metasumm/summarizers/summarize_all.hpp"
#include "metasumm/textproc.hpp"

namespace metasumm {

/// Aggregate: one score per summarizer (mean of the four F1s x 100).
/// PerMetric: 16 scores, summarizer-major, each F1 x 100 in the order
/// ROUGE-1, ROUGE-2, ROUGE-L, ROUGE-Lsum.
enum class TargetMode { Aggregate, PerMetric };

inline std::size_t target_width(TargetMode m) { return m == TargetMode::Aggregate ? 4 : 16; }

struct MetaRecord {
  std::string id;
  std::vector<double> features;
  std::vector<double> targets;
  LengthClass length_class = LengthClass::Short;
  std::size_t token_count = 0;
};

struct MetaDataset {
  std::vector<MetaRecord> records;
  std::string corpus_id;
  std::string config_hash;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
  std::size_t feature_dim() const { return records.empty() ? 0 : records.front().features.size(); }
  std::size_t target_dim() const { return records.empty() ? 0 : records.front().targets.size(); }

  /// Non-empty, uniform widths, finite targets, 4 or 16 targets.
  void validate() const {
    if (records.empty()) throw DataError("meta dataset is empty");
    const auto d = feature_dim();
    const auto t = target_dim();
    if (t != 4 && t != 16) throw DimensionError("meta dataset must have 4 or 16 targets");
    for (const auto& r : records) {
      if (r.features.size() != d || r.targets.size() != t) {
        throw DimensionError("non-uniform record widths at '" + r.id + "'");
      }
      for (double v : r.targets) {
        if (!std::isfinite(v)) throw DataError("non-finite target at '" + r.id + "'");
      }
    }
  }

  MetaDataset subset(std::span<const std::size_t> indices) const {
    MetaDataset out;
    out.corpus_id = corpus_id;
    out.config_hash = config_hash;
    out.records.reserve(indices.size());
    for (auto i : indices) out.records.push_back(records.at(i));
    return out;
  }
};

/// Collapses a 16-wide prediction to one aggregate per summarizer.
inline std::array<double, kNumSummarizers> summarizer_scores(std::span<const double> outputs) {
  std::array<double, kNumSummarizers> s{};
  if (outputs.size() == kNumSummarizers) {
    std::copy(outputs.begin(), outputs.end(), s.begin());
  } else if (outputs.size() == 4 * kNumSummarizers) {
    for (std::size_t i = 0; i < kNumSummarizers; ++i) {
      s[i] = (outputs[4 * i] + outputs[4 * i + 1] + outputs[4 * i + 2] + outputs[4 * i + 3]) / 4.0;
    }
  } else {
    throw DimensionError("expected 4 or 16 predicted scores, got " + std::to_string(outputs.size()));
  }
  return s;
}

/// Argmax; ties go to the lowest canonical index.
inline SummarizerId argmax_summarizer(std::span<const double> outputs) {
  const auto s = summarizer_scores(outputs);
  std::size_t best = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i] > s[best]) best = i;
  }
  return summarizer_at(best);
}

inline SummarizerId true_class(const MetaRecord& r) { return argmax_summarizer(r.targets); }

// ---- JSON lines ----

inline nlohmann::json to_json(const MetaRecord& r) {
  return {{"id", r.id},
          {"features", r.features},
          {"targets", r.targets},
          {"length_class", to_string(r.length_class)},
          {"token_count", r.token_count}};
}

inline MetaRecord meta_record_from_json(const nlohmann::json& j) {
  MetaRecord r;
  r.id = j.at("id").get<std::string>();
  r.features = j.at("features").get<std::vector<double>>();
  r.targets = j.at("targets").get<std::vector<double>>();
  r.length_class = parse_length_class(j.at("length_class").get<std::string>());
  r.token_count = j.value("token_count", std::size_t{0});
  return r;
}

inline void write_meta_dataset(const MetaDataset& ds, std::ostream& out) {
  for (const auto& r : ds.records) out << to_json(r).dump() << '\n';
}

inline MetaDataset read_meta_dataset(std::istream& in) {
  MetaDataset ds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      ds.records.push_back(meta_record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("meta dataset line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ConfigError& e) {
      throw DataError("meta dataset line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  ds.validate();
  return ds;
}

inline MetaDataset read_meta_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError(path, "build-meta-dataset");
  return read_meta_dataset(in);
}

// ---- splitting and transforms ----

struct SplitSpec {
  double train = 0.90;
  double validation = 0.05;
  double test = 0.05;
  std::uint64_t seed = 1;

  void validate() const {
    if (!(train > 0 && validation > 0 && test > 0)) throw ConfigError("split fractions must be positive");
    if (std::abs(train + validation + test - 1.0) > 1e-9) throw ConfigError("split fractions must sum to 1");
  }
};

struct DatasetSplit {
  MetaDataset train;
  MetaDataset validation;
  MetaDataset test;
};

/// Seeded shuffle, then test and validation sizes round(n * fraction)
/// (at least 1 each); the rest is train.
inline DatasetSplit split(const MetaDataset& ds, const SplitSpec& spec) {
  spec.validate();
  const std::size_t n = ds.size();
  if (n < 3) throw DataError("splitting needs at least 3 records");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  detail::Rng rng(spec.seed);
  detail::shuffle(order, rng);
  auto part = [n](double f) { return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(n * f))); };
  const std::size_t n_test = std::min(part(spec.test), n - 2);
  const std::size_t n_val = std::min(part(spec.validation), n - 1 - n_test);
  const std::size_t n_train = n - n_test - n_val;
  std::span<const std::size_t> all(order);
  return {ds.subset(all.subspan(0, n_train)), ds.subset(all.subspan(n_train, n_val)),
          ds.subset(all.subspan(n_train + n_val))};
}

inline constexpr double kLengthFeatureScale = 1000.0;

/// Appends token_count / 1000 to every feature vector.
inline MetaDataset add_length_feature(MetaDataset ds) {
  for (auto& r : ds.records) r.features.push_back(static_cast<double>(r.token_count) / kLengthFeatureScale);
  return ds;
}

/// Seeded down-sample of the majority length class to the minority count;
/// kept records stay in their original order.
inline MetaDataset balance_dataset(const MetaDataset& ds, std::uint64_t seed) {
  std::vector<std::size_t> short_idx, long_idx;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    (ds.records[i].length_class == LengthClass::Long ? long_idx : short_idx).push_back(i);
  }
  if (short_idx.empty() || long_idx.empty()) throw DataError("balancing needs both short and long documents");
  auto& majority = short_idx.size() >= long_idx.size() ? short_idx : long_idx;
  const auto& minority = short_idx.size() >= long_idx.size() ? long_idx : short_idx;
  detail::Rng rng(seed);
  detail::shuffle(majority, rng);
  majority.resize(minority.size());
  std::vector<std::size_t> keep(short_idx);
  keep.insert(keep.end(), long_idx.begin(), long_idx.end());
  std::sort(keep.begin(), keep.end());
  return ds.subset(keep);
}

// ---- construction from a corpus ----

/// Per-document ROUGE F1s of every engine: f1[engine] = {R1, R2, RL, RLsum}.
struct EngineRouge {
  std::string id;
  std::array<std::array<double, 4>, kNumSummarizers> f1{};

  double aggregate(std::size_t engine) const {
    const auto& f = f1[engine];
    return 100.0 * (f[0] + f[1] + f[2] + f[3]) / 4.0;
  }
};

inline nlohmann::json to_json(const EngineRouge& r) {
  nlohmann::json engines = nlohmann::json::object();
  for (auto id : kAllSummarizers) engines[std::string(to_string(id))] = r.f1[index_of(id)];
  return {{"id", r.id}, {"f1", engines}};
}

inline EngineRouge engine_rouge_from_json(const nlohmann::json& j) {
  EngineRouge r;
  r.id = j.at("id").get<std::string>();
  for (auto id : kAllSummarizers) r.f1[index_of(id)] = j.at("f1").at(std::string(to_string(id))).get<std::array<double, 4>>();
  return r;
}

struct ExcludedDocument {
  std::string id;
  std::string reason;
};

struct MetaBuildOptions {
  TargetMode targets = TargetMode::Aggregate;
  std::size_t length_threshold = kDefaultLengthThreshold;
  std::size_t infer_steps = 0;  // 0: model default
  std::size_t workers = 1;
};

struct MetaBuildResult {
  MetaDataset dataset;
  std::vector<EngineRouge> rouge;  // parallel to dataset.records
  std::vector<ExcludedDocument> excluded;
};

inline std::vector<double> targets_from(const std::array<RougeSuite, kNumSummarizers>& suites, TargetMode mode) {
  std::vector<double> t;
  for (const auto& s : suites) {
    if (mode == TargetMode::Aggregate) {
      t.push_back(aggregate_score(s));
    } else {
      for (double f : s.f1s()) t.push_back(100.0 * f);
    }
  }
  return t;
}

/// One record per document: features from `infer_vector`, targets from the
/// ROUGE of each engine's summary against the reference. Documents without
/// a reference or with any failing engine are excluded and reported.
inline MetaBuildResult build_meta_dataset(std::span<const Document> corpus, const Doc2VecModel& d2v,
                                          const SummarizerSuite& engines, const MetaBuildOptions& opt = {}) {
  struct PerDoc {
    std::optional<MetaRecord> record;
    EngineRouge rouge;
    std::string reason;
  };
  auto per_doc = detail::parallel_map<PerDoc>(corpus.size(), opt.workers, [&](std::size_t i) {
    const Document& doc = corpus[i];
    PerDoc out;
    if (!doc.reference_summary || doc.reference_summary->empty()) {
      out.reason = "no reference summary";
      return out;
    }
    if (doc.empty()) {
      out.reason = "empty document";
      return out;
    }
    const auto outcomes = engines.run_all(doc);
    std::array<RougeSuite, kNumSummarizers> suites;
    for (auto id : kAllSummarizers) {
      const auto& o = outcomes[index_of(id)];
      if (!o.ok()) {
        out.reason = std::string(to_string(id)) + ": " + o.error;
        return out;
      }
      suites[index_of(id)] = rouge_suite(o.result->text, *doc.reference_summary);
    }
    MetaRecord r;
    r.id = doc.id;
    const auto v = infer_vector(d2v, doc, opt.infer_steps).vector;
    r.features.assign(v.begin(), v.end());
    r.targets = targets_from(suites, opt.targets);
    r.length_class = classify_length(doc, opt.length_threshold);
    r.token_count = doc.token_count;
    out.rouge.id = doc.id;
    for (std::size_t e = 0; e < kNumSummarizers; ++e) out.rouge.f1[e] = suites[e].f1s();
    out.record = std::move(r);
    return out;
  });
  MetaBuildResult result;
  for (std::size_t i = 0; i < per_doc.size(); ++i) {
    if (per_doc[i].record) {
      result.dataset.records.push_back(std::move(*per_doc[i].record));
      result.rouge.push_back(per_doc[i].rouge);
    } else {
      result.excluded.push_back({corpus[i].id, per_doc[i].reason});
    }
  }
  if (result.dataset.empty()) {
    std::string why = result.excluded.empty() ? "empty corpus" : result.excluded.front().reason;
    throw DataError("no document produced a meta record (first failure: " + why + ")");
  }
  return result;
}

}  // namespace metasumm
