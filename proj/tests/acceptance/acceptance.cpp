// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances, seeds and time limits are pinned below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "metasumm/detail/random.hpp"
#include "metasumm/doc2vec.hpp"
#include "metasumm/metamodel.hpp"
#include "metasumm/pipeline.hpp"
#include "metasumm/rouge.hpp"
#include "metasumm/summarizers.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace metasumm;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---- 1. ROUGE oracle equivalence ----

constexpr std::size_t kOraclePairs = 2000;
constexpr std::size_t kOracleMaxLen = 8;
constexpr std::size_t kOracleVocab = 4;

std::vector<std::string> random_tokens(detail::Rng& rng, std::size_t max_len, std::size_t vocab) {
  std::vector<std::string> out(detail::uniform_index(rng, max_len + 1));
  for (auto& t : out) t = std::string(1, static_cast<char>('a' + detail::uniform_index(rng, vocab)));
  return out;
}

bool same(const PrecisionRecallF1& a, const oracle::Prf& b) {
  return a.precision == b.p && a.recall == b.r && a.f1 == b.f;
}

Outcome rouge_oracle() {
  detail::Rng rng(101);
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < kOraclePairs; ++i) {
    const auto c = random_tokens(rng, kOracleMaxLen, kOracleVocab);
    const auto r = random_tokens(rng, kOracleMaxLen, kOracleVocab);
    mismatches += !same(rouge_n(c, r, 1), oracle::rouge_n(c, r, 1));
    mismatches += !same(rouge_n(c, r, 2), oracle::rouge_n(c, r, 2));
    mismatches += !same(rouge_l(c, r), oracle::rouge_l(c, r));
  }
  return {mismatches == 0,
          std::to_string(kOraclePairs) + " pairs x {R1, R2, RL}, " + std::to_string(mismatches) + " mismatches"};
}

// ---- 2. ROUGE-1 dominates ROUGE-L ----

constexpr std::size_t kDominancePairs = 10000;

Outcome rouge_dominance() {
  detail::Rng rng(202);
  std::size_t violations = 0;
  for (std::size_t i = 0; i < kDominancePairs; ++i) {
    const auto c = random_tokens(rng, 12, 6);
    const auto r = random_tokens(rng, 12, 6);
    violations += rouge_n(c, r, 1).f1 < rouge_l(c, r).f1;
  }
  return {violations == 0, std::to_string(kDominancePairs) + " pairs, " + std::to_string(violations) + " violations"};
}

// ---- 3. SumBasic trace and monotonicity ----

Outcome sumbasic_trace() {
  // S1 "apple apple banana", S2 "apple pear", S3 "kiwi kiwi": p(apple)=3/7,
  // weights 1/3, 2/7, 2/7 pick S1; apple squares to 9/49, S2 drops to 8/49,
  // S3 stays at 2/7 and is picked next.
  const auto doc = make_document_from_sentences("fruit", {"apple apple banana", "apple pear", "kiwi kiwi"});
  SumBasicTrace trace;
  const auto r = SumBasic(NormalizationConfig::without_stopwords()).summarize(doc, SummaryBudget{5}, &trace);
  bool ok = trace.rounds.size() == 2 && trace.rounds[0].picked == 0 && trace.rounds[1].picked == 2 &&
            std::abs(trace.rounds[0].weights[0] - 1.0 / 3.0) < 1e-15 &&
            std::abs(trace.rounds[1].weights[1] - 8.0 / 49.0) < 1e-15 &&
            std::abs(trace.rounds[1].weights[2] - 2.0 / 7.0) < 1e-15 && r.text == "apple apple banana kiwi kiwi";

  detail::Rng rng(303);
  std::size_t bad_docs = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> sentences(1 + detail::uniform_index(rng, 8));
    for (auto& s : sentences) {
      const auto len = 1 + detail::uniform_index(rng, 6);
      for (std::size_t i = 0; i < len; ++i) s += std::string(1, static_cast<char>('a' + detail::uniform_index(rng, 8))) + "w ";
    }
    SumBasicTrace t;
    SumBasic(NormalizationConfig::without_stopwords())
        .summarize(make_document_from_sentences("r", sentences), SummaryBudget{1000}, &t);
    auto prev = t.initial;
    bool good = true;
    for (const auto& round : t.rounds) {
      for (const auto& [w, p] : round.probabilities_after) good = good && p <= prev.at(w);
      prev = round.probabilities_after;
    }
    bad_docs += !good;
  }
  return {ok && bad_docs == 0, std::string("worked example ") + (ok ? "S1 then S3" : "MISMATCH") +
                                   ", monotonicity violated on " + std::to_string(bad_docs) + "/200 documents"};
}

// ---- 4. Centrality ----

Outcome centrality_properties() {
  double uniform_err = 0;
  for (std::size_t n : {2, 5, 10}) {
    for (double v : {1.0, 0.3}) {
      const auto r = centrality(SimilarityMatrix(n, std::vector<double>(n, v)));
      for (double s : r.scores) uniform_err = std::max(uniform_err, std::abs(s - 1.0 / n));
    }
  }
  detail::Rng rng(404);
  double scale_err = 0;
  std::size_t unconverged = 0, worst_iter = 0;
  for (int t = 0; t < 100; ++t) {
    SimilarityMatrix m(10, std::vector<double>(10));
    for (auto& row : m) {
      for (auto& v : row) v = detail::uniform01(rng);
    }
    const auto a = centrality(m);
    unconverged += !a.converged || a.iterations > 100;
    worst_iter = std::max(worst_iter, a.iterations);
    const double c = detail::uniform(rng, 0.01, 100.0);
    for (auto& row : m) {
      for (auto& v : row) v *= c;
    }
    const auto b = centrality(m);
    for (std::size_t i = 0; i < 10; ++i) scale_err = std::max(scale_err, std::abs(a.scores[i] - b.scores[i]));
  }
  const bool ok = uniform_err <= 1e-9 && scale_err <= 1e-9 && unconverged == 0;
  return {ok, "uniform err " + fmt("%.1e", uniform_err) + ", scale err " + fmt("%.1e", scale_err) + ", " +
                  std::to_string(unconverged) + "/100 unconverged (max " + std::to_string(worst_iter) + " iterations)"};
}

// ---- 5. MLP gradient check ----

Outcome mlp_gradient() {
  detail::Rng rng(505);
  Mlp::Matrix x(5, 6), y(5, 4);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = detail::uniform(rng, -1, 1);
  for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = detail::uniform(rng, -2, 2);
  double worst = 0;
  for (std::uint64_t point = 0; point < 3; ++point) {
    Mlp net(6, {8, 8}, 4, 500 + point);
    auto params = net.parameters();
    for (auto& p : params) p += detail::uniform(rng, -0.2, 0.2);
    net.set_parameters(params);
    std::vector<double> grad;
    net.loss_and_gradient(x, y, grad);
    const double h = 1e-6;
    for (std::size_t k = 0; k < params.size(); ++k) {
      auto p = params;
      p[k] = params[k] + h;
      net.set_parameters(p);
      const double up = net.loss(x, y);
      p[k] = params[k] - h;
      net.set_parameters(p);
      const double down = net.loss(x, y);
      const double numeric = (up - down) / (2 * h);
      const double scale = std::max({std::abs(numeric), std::abs(grad[k]), 1e-6});
      worst = std::max(worst, std::abs(numeric - grad[k]) / scale);
    }
  }
  return {worst < 1e-4, "3 points on [6-8-8-4], worst relative error " + fmt("%.2e", worst)};
}

// ---- 6. Baseline ordering ----

constexpr std::size_t kOrderingSamples = 2000;
constexpr std::size_t kOrderingFeatures = 16;
constexpr std::size_t kOrderingSeeds = 10;
constexpr std::size_t kOrderingRequired = 9;

/// Four smooth nonlinear targets of 16 uniform features, plus N(0, 1) noise.
MetaDataset ordering_dataset(std::uint64_t seed) {
  detail::Rng rng(seed);
  MetaDataset ds;
  for (std::size_t i = 0; i < kOrderingSamples; ++i) {
    MetaRecord r;
    r.id = "s" + std::to_string(i);
    r.features.resize(kOrderingFeatures);
    for (auto& v : r.features) v = detail::uniform01(rng);
    const auto& x = r.features;
    for (std::size_t k = 0; k < 4; ++k) {
      const double y = 40.0 + 20.0 * std::sin(M_PI * x[k]) * x[k + 4] + 10.0 * x[k + 8] * x[k + 8] +
                       5.0 * std::cos(2.0 * M_PI * x[k + 12]) + detail::normal01(rng);
      r.targets.push_back(y);
    }
    ds.records.push_back(std::move(r));
  }
  return ds;
}

Outcome baseline_ordering() {
  std::size_t passed = 0;
  std::ostringstream log;
  for (std::uint64_t seed = 1; seed <= kOrderingSeeds; ++seed) {
    const auto parts = split(ordering_dataset(seed), SplitSpec{0.8, 0.1, 0.1, seed});
    MetaDataset fit_set = parts.train;
    fit_set.records.insert(fit_set.records.end(), parts.validation.records.begin(), parts.validation.records.end());
    MlpConfig mc;
    mc.hidden = {64, 64};
    mc.seed = seed;
    mc.validation_fraction = static_cast<double>(parts.validation.size()) / static_cast<double>(fit_set.size());
    ForestConfig fc;
    fc.trees = 100;
    fc.seed = seed;
    const double mean = evaluate_mse(mean_baseline(parts.train), parts.test);
    const double tree = evaluate_mse(Predictor(RegressionTree::fit(parts.train, TreeConfig{})), parts.test);
    const double forest = evaluate_mse(Predictor(RandomForest::fit(parts.train, fc)), parts.test);
    const double mlp = evaluate_mse(Predictor(Mlp::fit(fit_set, mc)), parts.test);
    const bool ok = mlp < mean && forest < tree && tree < mean;
    passed += ok;
    log << (seed > 1 ? "; " : "") << "s" << seed << (ok ? "" : "!") << " mean " << fmt("%.1f", mean) << " tree "
        << fmt("%.1f", tree) << " forest " << fmt("%.1f", forest) << " mlp " << fmt("%.1f", mlp);
  }
  return {passed >= kOrderingRequired,
          std::to_string(passed) + "/" + std::to_string(kOrderingSeeds) + " seeds ordered [" + log.str() + "]"};
}

// ---- 7. Meta-selection beats fixed summarizers ----

constexpr std::size_t kRegimeDocs = 120;
constexpr std::size_t kRegimeSeeds = 5;
constexpr std::size_t kRegimeBudget = 10;

/// Pseudo-words of a regime: two or three consonant-vowel syllables after a
/// regime-specific onset, so the two vocabularies never share a word.
std::vector<std::string> regime_vocab(char onset, std::size_t n, detail::Rng& rng) {
  static const std::string cons = "bdfgklmnprstvz", vow = "aeiou";
  std::set<std::string> words;
  while (words.size() < n) {
    std::string w(1, onset);
    w += vow[detail::uniform_index(rng, vow.size())];
    const auto syll = 2 + detail::uniform_index(rng, 2);
    for (std::size_t s = 0; s < syll; ++s) {
      w += cons[detail::uniform_index(rng, cons.size())];
      w += vow[detail::uniform_index(rng, vow.size())];
    }
    words.insert(w);
  }
  return {words.begin(), words.end()};
}

std::string sentence_of(const std::vector<std::string>& words) {
  std::string s;
  for (const auto& w : words) s += (s.empty() ? "" : " ") + w;
  s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s + ".";
}

/// Each document: two junk lead sentences (what the lead-based abstractive
/// mock returns), a sentence F of two words repeated (highest mean word
/// probability, isolated in the similarity graph), a hub sentence H sharing
/// one word with each of six spoke sentences (highest centrality). Regime A
/// references F, regime B references H.
std::vector<Document> regime_corpus(std::uint64_t seed) {
  detail::Rng rng(seed);
  const std::array<std::vector<std::string>, 2> vocab = {regime_vocab('k', 400, rng), regime_vocab('j', 400, rng)};
  std::vector<Document> docs;
  for (std::size_t d = 0; d < kRegimeDocs; ++d) {
    const std::size_t regime = d % 2;
    auto pool = vocab[regime];
    detail::shuffle(pool, rng);
    std::size_t next = 0;
    auto take = [&](std::size_t n) {
      std::vector<std::string> out(pool.begin() + static_cast<std::ptrdiff_t>(next),
                                   pool.begin() + static_cast<std::ptrdiff_t>(next + n));
      next += n;
      return out;
    };
    const auto j1 = sentence_of(take(8)), j2 = sentence_of(take(8));
    const auto fw = take(2);
    const auto f = sentence_of({fw[0], fw[1], fw[0], fw[1], fw[0], fw[1], fw[0], fw[1]});
    const auto hub = take(6);
    auto hw = hub;
    for (const auto& w : take(2)) hw.push_back(w);
    const auto h = sentence_of(hw);
    std::vector<std::string> body = {f, h};
    for (const auto& w : hub) {
      auto spoke = take(7);
      spoke.insert(spoke.begin() + static_cast<std::ptrdiff_t>(detail::uniform_index(rng, 8)), w);
      body.push_back(sentence_of(spoke));
    }
    detail::shuffle(body, rng);
    std::vector<std::string> sentences = {j1, j2};
    sentences.insert(sentences.end(), body.begin(), body.end());
    auto doc = make_document_from_sentences((regime ? "b" : "a") + std::to_string(d), sentences);
    doc.reference_summary = regime == 0 ? f : h;
    docs.push_back(std::move(doc));
  }
  return docs;
}

Outcome meta_selection(const std::string& mock_url) {
  std::size_t passed = 0;
  std::ostringstream log;
  for (std::uint64_t seed = 1; seed <= kRegimeSeeds; ++seed) {
    const auto docs = regime_corpus(seed);
    Doc2VecConfig dc;
    dc.dim = 32;
    dc.epochs = 40;
    dc.seed = seed;
    dc.normalization = NormalizationConfig::without_stopwords();
    const auto d2v = train_doc2vec(std::span<const Document>(docs), dc);

    AbstractiveClientConfig ac;
    ac.endpoint = mock_url;
    ac.max_length = kRegimeBudget;
    SummarizerSuite suite(SumBasic(NormalizationConfig::without_stopwords()), GraphSummarizer(),
                          AbstractiveClient(ac), SummaryBudget{kRegimeBudget});
    const auto built = build_meta_dataset(docs, d2v, suite);
    const auto parts = split(built.dataset, SplitSpec{0.6, 0.1, 0.3, seed});
    MetaDataset fit_set = parts.train;
    fit_set.records.insert(fit_set.records.end(), parts.validation.records.begin(), parts.validation.records.end());
    MlpConfig mc;
    mc.hidden = {64, 64};
    mc.learning_rate = 1e-2;
    mc.batch_size = 16;
    mc.patience = 5;
    mc.seed = seed;
    mc.validation_fraction = static_cast<double>(parts.validation.size()) / static_cast<double>(fit_set.size());
    const Predictor meta(Mlp::fit(fit_set, mc));
    const auto rows = final_rouge_comparison(parts.test, built.rouge, meta);

    const auto& m = rows[kNumSummarizers];
    const auto& o = rows[kNumSummarizers + 1];
    bool ok = true;
    double best_fixed = 0;
    for (std::size_t e = 0; e < kNumSummarizers; ++e) {
      ok = ok && m.aggregate > rows[e].aggregate;
      best_fixed = std::max(best_fixed, rows[e].aggregate);
    }
    for (const auto& r : rows) ok = ok && o.aggregate >= r.aggregate;
    passed += ok;
    log << (seed > 1 ? "; " : "") << "s" << seed << (ok ? "" : "!") << " meta " << fmt("%.1f", m.aggregate)
        << " best fixed " << fmt("%.1f", best_fixed) << " oracle " << fmt("%.1f", o.aggregate);
  }
  return {passed == kRegimeSeeds,
          std::to_string(passed) + "/" + std::to_string(kRegimeSeeds) + " seeds [" + log.str() + "]"};
}

// ---- 8. Doc2vec clustering ----

constexpr std::size_t kClusterSeeds = 5;

Outcome doc2vec_clustering() {
  std::size_t passed = 0;
  std::ostringstream log;
  for (std::uint64_t seed = 1; seed <= kClusterSeeds; ++seed) {
    const auto corpus = synthetic::two_clusters(1000 + seed);
    Doc2VecConfig cfg;
    cfg.dim = 24;
    cfg.epochs = 60;
    cfg.seed = seed;
    cfg.normalization = NormalizationConfig::without_stopwords();
    const auto m = train_doc2vec(corpus, cfg);
    double intra = 0, inter = 0;
    int ni = 0, nx = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      for (std::size_t j = i + 1; j < corpus.size(); ++j) {
        const double c = cosine(m.doc_vectors.row_span(i), m.doc_vectors.row_span(j));
        if (corpus[i].id[1] == corpus[j].id[1]) {
          intra += c;
          ++ni;
        } else {
          inter += c;
          ++nx;
        }
      }
    }
    intra /= ni;
    inter /= nx;
    std::size_t misranked = 0;
    for (std::size_t d = 0; d < corpus.size(); ++d) {
      const auto v = infer_vector(m, corpus[d].words).vector;
      const double own = cosine(v, m.doc_vectors.row_span(d));
      std::size_t beaten = 0;
      for (std::size_t o = 0; o < corpus.size(); ++o) {
        if (o != d && own > cosine(v, m.doc_vectors.row_span(o))) ++beaten;
      }
      misranked += static_cast<double>(beaten) < 0.9 * static_cast<double>(corpus.size() - 1);
    }
    const bool ok = intra > inter && misranked == 0;
    passed += ok;
    log << (seed > 1 ? "; " : "") << "s" << seed << (ok ? "" : "!") << " intra " << fmt("%.2f", intra) << " inter "
        << fmt("%.2f", inter) << " misranked " << misranked;
  }
  return {passed == kClusterSeeds,
          std::to_string(passed) + "/" + std::to_string(kClusterSeeds) + " seeds [" + log.str() + "]"};
}

// ---- 9. End-to-end determinism ----

std::map<std::string, std::string> artifact_bytes(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), root).generic_string();
    if (rel.rfind("manifests/", 0) == 0) continue;
    out[rel] = read_file(e.path());
  }
  return out;
}

/// Manifest content that must repeat: stage, config hash, seed and the
/// hashes of inputs and outputs (paths and wall time differ between runs).
std::map<std::string, std::string> manifest_digests(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(root / "manifests")) {
    const auto m = read_manifest(e.path());
    std::string d = m.stage + "|" + m.config_hash() + "|" + std::to_string(m.seed);
    for (const auto& r : m.inputs) d += "|in:" + r.hash;
    for (const auto& r : m.outputs) d += "|out:" + r.hash;
    out[e.path().filename().string()] = d;
  }
  return out;
}

void toy_run(const fs::path& dir, const std::string& mock_url) {
  fs::remove_all(dir);
  RunConfig cfg;
  cfg.work_dir = dir;
  cfg.seed = 42;
  cfg.abstractive_url = mock_url;
  run_ingest(cfg, std::string(METASUMM_TEST_DATA) + "/toy_corpus.jsonl");
  run_train_doc2vec(cfg);
  run_build_meta(cfg);
  run_train_meta(cfg, PredictorKind::mlp);
  for (auto r : {ReportKind::Mse, ReportKind::Classification, ReportKind::Frequencies, ReportKind::FinalRouge}) {
    run_evaluate(cfg, r);
  }
}

Outcome end_to_end_determinism(const std::string& mock_url) {
  const auto base = fs::temp_directory_path() / "metasumm_acceptance";
  toy_run(base / "run_a", mock_url);
  toy_run(base / "run_b", mock_url);
  const auto a = artifact_bytes(base / "run_a"), b = artifact_bytes(base / "run_b");
  std::size_t differing = 0;
  for (const auto& [path, bytes] : a) differing += !b.count(path) || b.at(path) != bytes;
  const bool manifests_match = manifest_digests(base / "run_a") == manifest_digests(base / "run_b");
  const bool ok = a.size() == b.size() && differing == 0 && manifests_match && a.count("reports/mse.csv");
  std::size_t total = 0;
  for (const auto& [_, bytes] : a) total += bytes.size();
  fs::remove_all(base);
  return {ok, std::to_string(a.size()) + " artifacts and reports (" + std::to_string(total) + " bytes), " +
                  std::to_string(differing) + " differing, manifest hashes " + (manifests_match ? "equal" : "DIFFER")};
}

// ---- 10. Report arithmetic ----

Outcome report_arithmetic() {
  std::size_t failures = 0;
  double worst_var = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    detail::Rng rng(seed);
    MetaDataset ds;
    for (int i = 0; i < 400; ++i) {
      MetaRecord r;
      r.id = "r" + std::to_string(i);
      for (int f = 0; f < 6; ++f) r.features.push_back(detail::uniform01(rng));
      for (int t = 0; t < 4; ++t) r.targets.push_back(detail::uniform(rng, 0, 100) + 30 * r.features[t]);
      ds.records.push_back(std::move(r));
    }
    const auto parts = split(ds, SplitSpec{0.7, 0.1, 0.2, seed});
    const Predictor tree(RegressionTree::fit(parts.train, TreeConfig{20}));
    const auto rep = classification_report(tree, parts.test);
    std::size_t support = 0;
    for (const auto& c : rep.per_class) support += c.support;
    failures += support != parts.test.size();
    const auto freq = recommendation_frequencies(tree, ds);
    std::size_t nfreq = 0;
    for (auto c : freq) nfreq += c;
    failures += nfreq != ds.size();

    // Population variance per output, two-pass, averaged over outputs.
    double var = 0;
    for (std::size_t o = 0; o < 4; ++o) {
      double mu = 0;
      for (const auto& r : parts.train.records) mu += r.targets[o];
      mu /= static_cast<double>(parts.train.size());
      double ss = 0;
      for (const auto& r : parts.train.records) ss += (r.targets[o] - mu) * (r.targets[o] - mu);
      var += ss / static_cast<double>(parts.train.size());
    }
    var /= 4;
    const double err = std::abs(evaluate_mse(mean_baseline(parts.train), parts.train) - var);
    worst_var = std::max(worst_var, err);
    failures += err > 1e-9;
  }
  return {failures == 0, "5 seeds: supports = test size, frequencies = N, |train MSE - variance| <= " +
                             fmt("%.1e", worst_var)};
}

}  // namespace

int main() {
  MockAbstractiveServer mock;
  mock.start();
  const auto url = mock.url();

  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "ROUGE oracle equivalence", 10, rouge_oracle},
      {2, "ROUGE-1 F1 >= ROUGE-L F1", 10, rouge_dominance},
      {3, "SumBasic trace and monotonicity", 5, sumbasic_trace},
      {4, "Centrality uniform, scale-invariant, convergent", 5, centrality_properties},
      {5, "MLP gradient check", 5, mlp_gradient},
      {6, "Baseline ordering", 120, baseline_ordering},
      {7, "Meta-selection beats fixed summarizers", 180, [&] { return meta_selection(url); }},
      {8, "Doc2vec clustering and self-retrieval", 60, doc2vec_clustering},
      {9, "End-to-end determinism", 120, [&] { return end_to_end_determinism(url); }},
      {10, "Report arithmetic", 60, report_arithmetic},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_seconds;
    const bool pass = out.pass && in_time;
    failed += !pass;
    std::cout << (pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << out.detail << " ("
              << fmt("%.2f", secs) << " s, limit " << fmt("%.0f", c.limit_seconds) << " s"
              << (in_time ? "" : ", TOO SLOW") << ")" << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
