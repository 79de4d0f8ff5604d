// metasumm command-line front end.
//
// Exit codes: 0 success, 1 usage or configuration, 2 data, 3 transport.

#include <csignal>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <string>

#include <pthread.h>

#include "CLI11.hpp"
#include "metasumm/pipeline.hpp"

namespace {

using namespace metasumm;

enum Exit { kOk = 0, kUsage = 1, kData = 2, kTransport = 3 };

std::string read_all(std::istream& in) {
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void print_table(const Table& t) { std::cout << t.text(); }

/// Starts the in-process mock when requested and points the config at it.
std::unique_ptr<MockAbstractiveServer> maybe_mock(bool wanted, RunConfig& cfg) {
  if (!wanted) return nullptr;
  auto server = std::make_unique<MockAbstractiveServer>();
  server->start();
  cfg.abstractive_url = server->url();
  std::cerr << "mock abstractive service on " << cfg.abstractive_url << "\n";
  return server;
}

int serve_mock(const std::string& host, int port, std::size_t lead) {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  MockAbstractiveServer server(lead);
  server.start(host, port);
  std::cout << "serving mock abstractive service on " << server.url() << " (Ctrl-C to stop)" << std::endl;
  int sig = 0;
  sigwait(&set, &sig);
  server.stop();
  std::cout << "served " << server.requests_served() << " request(s)\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Per-document summarizer selection: corpus ingestion, embeddings, meta-model training and routing"};
  app.set_config("--config", "", "Key-value (TOML/INI) config file; flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  std::string work_dir = cfg.work_dir.string();
  std::string url;
  app.add_option("--work-dir", work_dir, "Directory holding artifacts, models and reports")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Seed for every stochastic step")->capture_default_str();
  app.add_option("--workers", cfg.workers, "Worker threads for per-document work")->capture_default_str();
  app.add_option("--abstractive-url", url, "Abstractive service endpoint (default: $METASUMM_ABSTRACTIVE_URL)");
  app.add_option("--budget", cfg.budget.target_words, "Summary budget in words")->capture_default_str();
  app.add_option("--length-threshold", cfg.length_threshold, "Token count above which a document is long")
      ->capture_default_str();
  app.add_option("--max-input-tokens", cfg.max_input_tokens, "Abstractive input cap in tokens")->capture_default_str();
  app.add_option("--timeout", cfg.abstractive_timeout, "Abstractive request timeout in seconds")->capture_default_str();

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Validate a JSON-lines corpus and copy it into the work directory");
  std::string corpus_path, summary_from = "field";
  ingest->add_option("corpus", corpus_path, "JSON-lines corpus: {\"id\", \"text\", \"summary\"?}")->required();
  ingest->add_option("--summary-from", summary_from, "Reference source: field or first-paragraph")
      ->check(CLI::IsMember({"field", "first-paragraph"}))
      ->capture_default_str();

  // train-doc2vec
  auto* d2v = app.add_subcommand("train-doc2vec", "Train paragraph vectors on the ingested corpus");
  auto& dc = cfg.doc2vec;
  d2v->add_option("--dim", dc.dim, "Vector size")->capture_default_str();
  d2v->add_option("--window", dc.window, "Context half-width")->capture_default_str();
  d2v->add_option("--epochs", dc.epochs)->capture_default_str();
  d2v->add_option("--negative", dc.negative, "Noise words per target")->capture_default_str();
  d2v->add_option("--min-count", dc.min_count)->capture_default_str();
  d2v->add_option("--max-vocab", dc.max_vocab)->capture_default_str();
  d2v->add_option("--alpha", dc.alpha, "Initial learning rate")->capture_default_str();
  d2v->add_option("--min-alpha", dc.min_alpha, "Final learning rate")->capture_default_str();
  d2v->add_option("--infer-steps", dc.infer_steps, "Gradient steps when embedding unseen text")->capture_default_str();

  // build-meta-dataset
  auto* meta = app.add_subcommand("build-meta-dataset", "Score every engine per document and embed the documents");
  std::size_t sample = 0;
  std::string targets = "aggregate";
  bool use_mock = false;
  meta->add_option("--sample", sample, "Seeded random subset of this many documents (0: all)");
  meta->add_option("--targets", targets, "aggregate (4 scores) or per-metric (16)")
      ->check(CLI::IsMember({"aggregate", "per-metric"}))
      ->capture_default_str();
  meta->add_flag("--mock-abstractive", use_mock, "Serve the abstractive engines from an in-process mock");

  // train-meta
  auto* train = app.add_subcommand("train-meta", "Train a meta-model on the meta dataset");
  std::string variant = "mlp";
  bool length_feature = false, balanced = false;
  train->add_option("--model", variant, "mlp, tree, forest or mean")
      ->check(CLI::IsMember({"mlp", "tree", "forest", "mean"}))
      ->capture_default_str();
  train->add_flag("--length-feature", length_feature, "Append the scaled token count to the features");
  train->add_flag("--balanced", balanced, "Down-sample the training partition to equal short and long counts");
  train->add_option("--hidden", cfg.mlp.hidden, "MLP hidden layer sizes")->capture_default_str();
  train->add_option("--max-epochs", cfg.mlp.max_epochs)->capture_default_str();
  train->add_option("--batch-size", cfg.mlp.batch_size)->capture_default_str();
  train->add_option("--learning-rate", cfg.mlp.learning_rate)->capture_default_str();
  train->add_option("--patience", cfg.mlp.patience)->capture_default_str();
  train->add_option("--trees", cfg.forest.trees, "Forest size")->capture_default_str();
  train->add_option("--min-samples-split", cfg.tree.min_samples_split, "Tree and forest node split minimum")
      ->capture_default_str();

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Write a report over the held-out test partition");
  std::string report = "mse", eval_model = "mlp";
  eval->add_option("--report", report, "mse, classification, frequencies or final-rouge")
      ->check(CLI::IsMember({"mse", "classification", "frequencies", "final-rouge"}))
      ->capture_default_str();
  eval->add_option("--model", eval_model, "Model name for per-model reports (e.g. mlp, forest, mlp_length)")
      ->capture_default_str();

  // summarize
  auto* summ = app.add_subcommand("summarize", "Summarize one document");
  std::string engine = "auto", input, predictor = "mlp";
  summ->add_option("--model", engine, "auto, sumbasic, graph, t5 or hybrid")
      ->check(CLI::IsMember({"auto", "sumbasic", "graph", "t5", "hybrid"}))
      ->capture_default_str();
  summ->add_option("--predictor", predictor, "Meta-model used by auto")->capture_default_str();
  summ->add_option("--input", input, "Text file to summarize (default: stdin)");
  bool summ_mock = false;
  summ->add_flag("--mock-abstractive", summ_mock, "Serve the abstractive engines from an in-process mock");

  // serve-mock
  auto* serve = app.add_subcommand("serve-mock", "Run the deterministic mock abstractive service");
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t lead = 2;
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--lead", lead, "Sentences returned per summary")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  cfg.work_dir = work_dir;
  cfg.abstractive_url = url.empty() ? AbstractiveClientConfig::endpoint_from_env().value_or("") : url;
  if (sample > 0) cfg.sample = sample;
  if (targets == "per-metric") cfg.targets = TargetMode::PerMetric;

  try {
    if (*ingest) {
      const auto r = run_ingest(cfg, corpus_path, parse_summary_source(summary_from));
      std::cout << to_json(r.stats).dump(2) << "\n";
      if (!r.skipped.empty()) std::cerr << r.skipped.size() << " document(s) had no second paragraph and were skipped\n";
    } else if (*d2v) {
      const auto r = run_train_doc2vec(cfg);
      std::cout << "doc2vec: " << r.documents << " documents, " << r.vocabulary << " words, final epoch loss "
                << (r.epoch_loss.empty() ? 0.0 : r.epoch_loss.back()) << "\n";
    } else if (*meta) {
      auto mock = maybe_mock(use_mock, cfg);
      const auto r = run_build_meta(cfg);
      std::cout << "meta dataset: " << r.records << " records, " << r.excluded.size() << " excluded\n";
      for (const auto& e : r.excluded) std::cerr << "  excluded " << e.id << ": " << e.reason << "\n";
    } else if (*train) {
      const auto r = run_train_meta(cfg, parse_predictor_kind(variant), length_feature, balanced);
      std::cout << "trained " << r.name << " on " << r.train_records << " records (validation "
                << r.validation_records << ", test " << r.test_records << ")";
      if (r.history) std::cout << ", best epoch " << r.history->best_epoch;
      std::cout << "\n";
    } else if (*eval) {
      print_table(run_evaluate(cfg, parse_report_kind(report), eval_model).table);
    } else if (*summ) {
      std::string text;
      if (input.empty()) {
        text = read_all(std::cin);
      } else {
        std::ifstream in(input, std::ios::binary);
        if (!in) throw DataError("cannot open '" + input + "'");
        text = read_all(in);
      }
      auto mock = maybe_mock(summ_mock, cfg);
      const auto r = run_summarize(cfg, text, engine, predictor);
      if (r.predicted) {
        std::cerr << "recommended " << to_string(r.summarizer) << " by " << r.model << ":";
        for (auto id : kAllSummarizers) std::cerr << " " << to_string(id) << "=" << fixed((*r.predicted)[index_of(id)]);
        std::cerr << "\n";
      }
      std::cout << r.summary << "\n";
    } else if (*serve) {
      return serve_mock(host, port, lead);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const TransportError& e) {
    std::cerr << "transport error: " << e.what() << "\n";
    return kTransport;
  } catch (const ServiceError& e) {
    std::cerr << "service error: " << e.what() << "\n";
    return kTransport;
  } catch (const ProtocolError& e) {
    std::cerr << "protocol error: " << e.what() << "\n";
    return kTransport;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  }
  return kOk;
}
