#pragma once

// Pipeline stages over a work directory. Each stage reads the artifacts of
// the stages before it, writes its own atomically, and records a manifest.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "metasumm/detail/random.hpp"
#include "metasumm/doc2vec.hpp"
#include "metasumm/metamodel.hpp"
#include "metasumm/pipeline/artifacts.hpp"
#include "metasumm/pipeline/corpus.hpp"
#include "metasumm/summarizers.hpp"

namespace metasumm {

struct RunConfig {
  fs::path work_dir = "work";
  std::uint64_t seed = 1;
  std::size_t workers = 1;  // per-document work in build-meta-dataset
  std::size_t length_threshold = kDefaultLengthThreshold;
  SummaryBudget budget;
  Doc2VecConfig doc2vec;
  TargetMode targets = TargetMode::Aggregate;
  std::optional<std::size_t> sample;  // meta-dataset documents, seeded
  SplitSpec split;
  MlpConfig mlp;
  TreeConfig tree;
  ForestConfig forest;
  std::string abstractive_url;
  double abstractive_timeout = 30.0;
  std::size_t abstractive_in_flight = 4;
  std::size_t max_input_tokens = 512;

  WorkDir dir() const { return {work_dir}; }

  /// Copy with every module seed taken from `seed`.
  RunConfig seeded() const {
    RunConfig c = *this;
    c.doc2vec.seed = seed;
    c.split.seed = seed;
    c.mlp.seed = seed;
    c.forest.seed = seed;
    return c;
  }

  void validate() const {
    if (workers == 0) throw ConfigError("workers must be at least 1");
    if (length_threshold == 0) throw ConfigError("length threshold must be positive");
    if (sample && *sample == 0) throw ConfigError("sample size must be positive");
    budget.validate();
    doc2vec.validate();
    split.validate();
    mlp.validate();
    tree.validate();
    forest.validate();
  }

  AbstractiveClientConfig abstractive() const {
    AbstractiveClientConfig c;
    c.endpoint = abstractive_url;
    c.timeout_seconds = abstractive_timeout;
    c.max_in_flight = abstractive_in_flight;
    c.max_input_tokens = max_input_tokens;
    c.max_length = budget.target_words;
    return c;
  }
};

inline nlohmann::json split_spec_to_json(const SplitSpec& s) {
  return {{"train", s.train}, {"validation", s.validation}, {"test", s.test}, {"seed", s.seed}};
}

inline nlohmann::json mlp_config_to_json(const MlpConfig& c) {
  return {{"hidden", c.hidden},         {"learning_rate", c.learning_rate}, {"beta1", c.beta1},
          {"beta2", c.beta2},           {"adam_epsilon", c.adam_epsilon},   {"batch_size", c.batch_size},
          {"max_epochs", c.max_epochs}, {"patience", c.patience},           {"seed", c.seed}};
}

inline nlohmann::json forest_config_to_json(const ForestConfig& c) {
  return {{"trees", c.trees},
          {"min_samples_split", c.tree.min_samples_split},
          {"bootstrap", c.bootstrap},
          {"max_features", c.max_features},
          {"seed", c.seed}};
}

// ---- ingest ----

struct IngestResult {
  IngestStats stats;
  std::vector<std::string> skipped;
  Manifest manifest;
};

inline IngestResult run_ingest(const RunConfig& cfg, const fs::path& input,
                               SummarySource source = SummarySource::Field) {
  cfg.validate();
  if (!fs::exists(input)) throw DataError("corpus file '" + input.string() + "' does not exist");
  const auto dir = cfg.dir();
  StageRecorder rec(dir, "ingest",
                    {{"summary_from", std::string(to_string(source))}, {"length_threshold", cfg.length_threshold}},
                    cfg.seed);
  rec.input(input);
  auto corpus = read_corpus(input.string(), source);
  if (corpus.records.empty()) throw DataError("corpus '" + input.string() + "' has no usable documents");
  const auto docs = to_documents(corpus.records);
  IngestResult out;
  out.stats = compute_ingest_stats(docs, corpus.skipped.size(), cfg.length_threshold);
  out.skipped = corpus.skipped;
  write_atomic(dir.corpus(), [&](std::ostream& o) { write_corpus(corpus.records, o); });
  write_atomic(dir.ingest_stats(), to_json(out.stats).dump(2) + "\n");
  rec.output(dir.corpus());
  rec.output(dir.ingest_stats());
  out.manifest = rec.finish();
  return out;
}

inline std::vector<Document> load_ingested(const WorkDir& dir) {
  const auto p = WorkDir::require(dir.corpus(), "ingest");
  auto records = read_corpus(p.string()).records;
  return to_documents(records);
}

// ---- train-doc2vec ----

struct Doc2VecStageResult {
  std::size_t vocabulary = 0;
  std::size_t documents = 0;
  std::vector<double> epoch_loss;
  Manifest manifest;
};

inline Doc2VecStageResult run_train_doc2vec(const RunConfig& base) {
  const auto cfg = base.seeded();
  cfg.validate();
  const auto dir = cfg.dir();
  const auto docs = load_ingested(dir);
  StageRecorder rec(dir, "train-doc2vec", doc2vec_config_to_json(cfg.doc2vec), cfg.seed);
  rec.input(dir.corpus());
  const auto model = train_doc2vec(std::span<const Document>(docs), cfg.doc2vec);
  write_atomic(dir.doc2vec(), [&](std::ostream& o) { save_doc2vec(model, o); });
  rec.output(dir.doc2vec());
  return {model.vocab.size(), model.doc_ids.size(), model.epoch_loss, rec.finish()};
}

// ---- build-meta-dataset ----

inline SummarizerSuite make_suite(const RunConfig& cfg, bool with_abstractive) {
  std::optional<AbstractiveClient> client;
  if (with_abstractive) client.emplace(cfg.abstractive());
  return SummarizerSuite(SumBasic(), GraphSummarizer(), std::move(client), cfg.budget);
}

/// Seeded choice of `n` indices out of `total`, returned in ascending order.
inline std::vector<std::size_t> sample_indices(std::size_t total, std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(total);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (n >= total) return idx;
  detail::Rng rng(detail::derive_seed(seed, 3));
  detail::shuffle(idx, rng);
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  return idx;
}

struct MetaStageResult {
  std::size_t records = 0;
  std::vector<ExcludedDocument> excluded;
  Manifest manifest;
};

inline MetaStageResult run_build_meta(const RunConfig& base) {
  const auto cfg = base.seeded();
  cfg.validate();
  const auto dir = cfg.dir();
  auto docs = load_ingested(dir);
  const auto d2v = load_doc2vec(WorkDir::require(dir.doc2vec(), "train-doc2vec").string());
  AbstractiveClient probe(cfg.abstractive());
  if (!probe.healthy()) {
    throw TransportError("abstractive service at " + cfg.abstractive_url + " is not reachable (GET /health failed)");
  }
  if (cfg.sample) {
    std::vector<Document> picked;
    for (auto i : sample_indices(docs.size(), *cfg.sample, cfg.seed)) picked.push_back(std::move(docs[i]));
    docs = std::move(picked);
  }
  nlohmann::json config{{"targets", cfg.targets == TargetMode::Aggregate ? "aggregate" : "per_metric"},
                        {"budget_words", cfg.budget.target_words},
                        {"length_threshold", cfg.length_threshold},
                        {"max_input_tokens", cfg.max_input_tokens},
                        {"sample", cfg.sample ? nlohmann::json(*cfg.sample) : nlohmann::json()},
                        {"infer_steps", cfg.doc2vec.infer_steps}};
  StageRecorder rec(dir, "build-meta-dataset", config, cfg.seed);
  rec.input(dir.corpus());
  rec.input(dir.doc2vec());

  MetaBuildOptions opt;
  opt.targets = cfg.targets;
  opt.length_threshold = cfg.length_threshold;
  opt.workers = cfg.workers;
  auto built = build_meta_dataset(docs, d2v, make_suite(cfg, true), opt);
  built.dataset.corpus_id = detail::hash_file(dir.corpus().string());
  built.dataset.config_hash = detail::hash_hex(config.dump());

  write_atomic(dir.meta_dataset(), [&](std::ostream& o) { write_meta_dataset(built.dataset, o); });
  write_atomic(dir.meta_rouge(), [&](std::ostream& o) {
    for (const auto& r : built.rouge) o << to_json(r).dump() << '\n';
  });
  rec.output(dir.meta_dataset());
  rec.output(dir.meta_rouge());
  auto manifest = rec.finish();
  return {built.dataset.size(), std::move(built.excluded), std::move(manifest)};
}

inline std::vector<EngineRouge> load_meta_rouge(const WorkDir& dir) {
  std::istringstream in(read_file(WorkDir::require(dir.meta_rouge(), "build-meta-dataset")));
  std::vector<EngineRouge> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(engine_rouge_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("meta rouge line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

// ---- train-meta ----

/// Stored split: record ids per partition plus the hash of the dataset it
/// was drawn from.
struct StoredSplit {
  std::string dataset_hash;
  SplitSpec spec;
  std::vector<std::string> train, validation, test;
};

inline nlohmann::json to_json(const StoredSplit& s) {
  return {{"dataset_hash", s.dataset_hash},
          {"spec", split_spec_to_json(s.spec)},
          {"train", s.train},
          {"validation", s.validation},
          {"test", s.test}};
}

inline StoredSplit read_split(const WorkDir& dir) {
  const auto text = read_file(WorkDir::require(dir.split(), "train-meta"));
  try {
    const auto j = nlohmann::json::parse(text);
    StoredSplit s;
    s.dataset_hash = j.at("dataset_hash").get<std::string>();
    const auto& spec = j.at("spec");
    s.spec = {spec.at("train").get<double>(), spec.at("validation").get<double>(), spec.at("test").get<double>(),
              spec.at("seed").get<std::uint64_t>()};
    s.train = j.at("train").get<std::vector<std::string>>();
    s.validation = j.at("validation").get<std::vector<std::string>>();
    s.test = j.at("test").get<std::vector<std::string>>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed split file: " + std::string(e.what()));
  }
}

inline std::vector<std::string> ids_of(const MetaDataset& ds) {
  std::vector<std::string> ids;
  for (const auto& r : ds.records) ids.push_back(r.id);
  return ids;
}

inline MetaDataset select_ids(const MetaDataset& ds, const std::vector<std::string>& ids) {
  std::map<std::string, std::size_t> at;
  for (std::size_t i = 0; i < ds.size(); ++i) at[ds.records[i].id] = i;
  std::vector<std::size_t> idx;
  for (const auto& id : ids) {
    const auto it = at.find(id);
    if (it == at.end()) throw DataError("split references unknown record '" + id + "'; rerun train-meta");
    idx.push_back(it->second);
  }
  return ds.subset(idx);
}

/// Model file name: variant, then _length and _balanced suffixes.
inline std::string model_name(PredictorKind kind, bool length_feature, bool balanced) {
  auto name = to_string(kind);
  if (length_feature) name += "_length";
  if (balanced) name += "_balanced";
  return name;
}

struct TrainMetaResult {
  std::string name;
  std::size_t train_records = 0;
  std::size_t validation_records = 0;
  std::size_t test_records = 0;
  std::optional<MlpHistory> history;
  Manifest manifest;
};

inline TrainMetaResult run_train_meta(const RunConfig& base, PredictorKind kind, bool length_feature = false,
                                      bool balanced = false) {
  const auto cfg = base.seeded();
  cfg.validate();
  const auto dir = cfg.dir();
  const auto ds = read_meta_dataset(WorkDir::require(dir.meta_dataset(), "build-meta-dataset").string());
  const auto parts = split(ds, cfg.split);
  StoredSplit stored{detail::hash_file(dir.meta_dataset().string()), cfg.split, ids_of(parts.train),
                     ids_of(parts.validation), ids_of(parts.test)};

  TrainMetaResult out;
  out.name = model_name(kind, length_feature, balanced);
  nlohmann::json config{{"model", out.name},
                        {"variant", to_string(kind)},
                        {"length_feature", length_feature},
                        {"balanced", balanced},
                        {"split", split_spec_to_json(cfg.split)}};
  if (kind == PredictorKind::mlp) config["mlp"] = mlp_config_to_json(cfg.mlp);
  if (kind == PredictorKind::tree) config["min_samples_split"] = cfg.tree.min_samples_split;
  if (kind == PredictorKind::forest) config["forest"] = forest_config_to_json(cfg.forest);
  StageRecorder rec(dir, "train-meta_" + out.name, config, cfg.seed);
  rec.input(dir.meta_dataset());

  auto train = balanced ? balance_dataset(parts.train, detail::derive_seed(cfg.seed, 4)) : parts.train;
  auto validation = parts.validation;
  if (length_feature) {
    train = add_length_feature(std::move(train));
    validation = add_length_feature(std::move(validation));
  }
  out.train_records = train.size();
  out.validation_records = validation.size();
  out.test_records = parts.test.size();

  Predictor p;
  switch (kind) {
    case PredictorKind::mean_baseline: p = Predictor(MeanBaseline::fit(train), length_feature); break;
    case PredictorKind::tree: p = Predictor(RegressionTree::fit(train, cfg.tree), length_feature); break;
    case PredictorKind::forest: p = Predictor(RandomForest::fit(train, cfg.forest), length_feature); break;
    case PredictorKind::mlp: {
      // Validation partition goes last, where fit() takes its early-stopping tail.
      MetaDataset joined = train;
      joined.records.insert(joined.records.end(), validation.records.begin(), validation.records.end());
      auto mcfg = cfg.mlp;
      mcfg.validation_fraction = static_cast<double>(validation.size()) / static_cast<double>(joined.size());
      MlpHistory h;
      p = Predictor(Mlp::fit(joined, mcfg, &h), length_feature);
      out.history = std::move(h);
      break;
    }
  }
  write_atomic(dir.split(), to_json(stored).dump(2) + "\n");
  write_atomic(dir.model(out.name), [&](std::ostream& o) { save_predictor(p, o); });
  rec.output(dir.split());
  rec.output(dir.model(out.name));
  out.manifest = rec.finish();
  return out;
}

// ---- evaluate ----

enum class ReportKind { Mse, Classification, Frequencies, FinalRouge };

inline ReportKind parse_report_kind(std::string_view s) {
  if (s == "mse") return ReportKind::Mse;
  if (s == "classification") return ReportKind::Classification;
  if (s == "frequencies") return ReportKind::Frequencies;
  if (s == "final-rouge" || s == "final_rouge") return ReportKind::FinalRouge;
  throw ConfigError("unknown report '" + std::string(s) + "' (expected mse, classification, frequencies or final-rouge)");
}

/// Trained model names in the work directory: the four base variants first,
/// then the rest by name.
inline std::vector<std::string> trained_models(const WorkDir& dir) {
  std::vector<std::string> names;
  if (fs::exists(dir.models())) {
    for (const auto& e : fs::directory_iterator(dir.models())) {
      if (e.path().extension() == ".msp") names.push_back(e.path().stem().string());
    }
  }
  auto rank = [](const std::string& n) {
    static const std::vector<std::string> order = {"mean_baseline", "tree", "forest", "mlp"};
    const auto it = std::find(order.begin(), order.end(), n);
    return static_cast<std::size_t>(it - order.begin());
  };
  std::sort(names.begin(), names.end(), [&](const auto& a, const auto& b) {
    return std::pair(rank(a), a) < std::pair(rank(b), b);
  });
  return names;
}

struct EvaluateResult {
  std::string name;  // report file stem
  Table table;
  Manifest manifest;
};

/// Test partition of the stored split, checked against the current dataset.
inline MetaDataset load_test_partition(const WorkDir& dir) {
  const auto ds = read_meta_dataset(WorkDir::require(dir.meta_dataset(), "build-meta-dataset").string());
  const auto s = read_split(dir);
  if (s.dataset_hash != detail::hash_file(dir.meta_dataset().string())) {
    throw DataError("meta dataset changed since the split was drawn; rerun train-meta");
  }
  return select_ids(ds, s.test);
}

inline Predictor load_model(const WorkDir& dir, const std::string& name) {
  const auto p = dir.model(name);
  if (!fs::exists(p)) throw MissingArtifactError(p.string(), "train-meta --model " + name);
  return load_predictor(p.string());
}

inline MetaDataset features_for(const Predictor& p, const MetaDataset& ds) {
  return p.uses_length_feature() ? add_length_feature(ds) : ds;
}

inline EvaluateResult run_evaluate(const RunConfig& cfg, ReportKind report, const std::string& model = "mlp") {
  const auto dir = cfg.dir();
  const auto test = load_test_partition(dir);
  EvaluateResult out;
  nlohmann::json config{{"model", model}};
  std::vector<fs::path> inputs = {dir.meta_dataset(), dir.split()};
  switch (report) {
    case ReportKind::Mse: {
      const auto names = trained_models(dir);
      if (names.empty()) throw MissingArtifactError(dir.models().string(), "train-meta");
      std::vector<std::pair<std::string, double>> rows;
      for (const auto& n : names) {
        const auto p = load_model(dir, n);
        rows.emplace_back(n, evaluate_mse(p, features_for(p, test)));
        inputs.push_back(dir.model(n));
      }
      out.name = "mse";
      out.table = mse_table(rows);
      config = {{"models", names}};
      break;
    }
    case ReportKind::Classification: {
      const auto p = load_model(dir, model);
      out.name = "classification_" + model;
      out.table = classification_table(classification_report(p, features_for(p, test)));
      inputs.push_back(dir.model(model));
      break;
    }
    case ReportKind::Frequencies: {
      const auto p = load_model(dir, model);
      out.name = "frequencies_" + model;
      out.table = frequency_table(recommendation_frequencies(p, features_for(p, test)));
      inputs.push_back(dir.model(model));
      break;
    }
    case ReportKind::FinalRouge: {
      const auto p = load_model(dir, model);
      const auto rouge = load_meta_rouge(dir);
      out.name = "final_rouge_" + model;
      out.table = rouge_table(final_rouge_comparison(features_for(p, test), rouge, p));
      inputs.push_back(dir.model(model));
      inputs.push_back(dir.meta_rouge());
      break;
    }
  }
  StageRecorder rec(dir, "evaluate_" + out.name, config, cfg.seed);
  for (const auto& i : inputs) rec.input(i);
  const auto csv = dir.reports() / (out.name + ".csv");
  const auto txt = dir.reports() / (out.name + ".txt");
  write_atomic(csv, out.table.csv());
  write_atomic(txt, out.table.text());
  rec.output(csv);
  rec.output(txt);
  out.manifest = rec.finish();
  return out;
}

// ---- summarize ----

struct SummarizeResult {
  SummarizerId summarizer = SummarizerId::sumbasic;
  std::string summary;
  std::optional<std::vector<double>> predicted;  // per-summarizer scores, auto only
  std::string model;                             // predictor used, auto only
};

/// `engine` is "auto" or a summarizer name. Only auto touches the embedding
/// model and the predictor; fixed engines bypass them.
inline SummarizeResult run_summarize(const RunConfig& cfg, const std::string& text, const std::string& engine,
                                     const std::string& model = "mlp") {
  const auto doc = make_document("input", text);
  if (doc.empty()) throw DataError("input text is empty");
  SummarizeResult out;
  if (engine == "auto") {
    const auto dir = cfg.dir();
    const auto d2v = load_doc2vec(WorkDir::require(dir.doc2vec(), "train-doc2vec").string());
    const auto p = load_model(dir, model);
    auto v = infer_vector(d2v, doc).vector;
    std::vector<double> x(v.begin(), v.end());
    if (p.uses_length_feature()) x.push_back(static_cast<double>(doc.token_count) / kLengthFeatureScale);
    const auto scores = summarizer_scores(p.predict(x));
    out.predicted = std::vector<double>(scores.begin(), scores.end());
    out.summarizer = recommend(p, x);
    out.model = model;
  } else {
    out.summarizer = parse_summarizer(engine);
  }
  const bool abstractive = out.summarizer == SummarizerId::t5_article || out.summarizer == SummarizerId::hybrid_long;
  if (abstractive && cfg.abstractive_url.empty()) {
    throw ConfigError(std::string(to_string(out.summarizer)) + " needs the abstractive service (set " +
                      kAbstractiveUrlEnv + " or pass --abstractive-url)");
  }
  out.summary = make_suite(cfg, abstractive).run(out.summarizer, doc).text;
  return out;
}

}  // namespace metasumm
