#include <gtest/gtest.h>

#include "metasumm/pipeline/mock_server.hpp"
#include "metasumm/summarizers.hpp"

using namespace metasumm;

namespace {

class MockServerFixture : public ::testing::Test {
 protected:
  void SetUp() override { server_.start(); }

  AbstractiveClientConfig config() const {
    AbstractiveClientConfig cfg;
    cfg.endpoint = server_.url();
    cfg.timeout_seconds = 5;
    return cfg;
  }

  MockAbstractiveServer server_;
};

/// "w0 w1 ...", optionally ending a sentence (". B") after every tenth word.
std::string numbered_words(std::size_t n, bool sentences = false) {
  std::string text;
  for (std::size_t i = 0; i < n; ++i) {
    text += "w" + std::to_string(i) + (sentences && i % 10 == 9 ? ". B " : " ");
  }
  return text;
}

/// A port that nothing listens on.
int closed_port() {
  httplib::Server probe;
  const int port = probe.bind_to_any_port("127.0.0.1");
  return port;  // socket closes when `probe` goes out of scope
}

}  // namespace

TEST(Truncate, KeepsExactlyTheFirstTokens) {
  const std::string text = numbered_words(700);
  const auto cut = truncate_to_tokens(text, 512);
  const auto tokens = tokenize(cut);
  ASSERT_EQ(tokens.size(), 512u);
  EXPECT_EQ(tokens.back().surface, "w511");
  EXPECT_EQ(truncate_to_tokens("a b", 5), "a b");
}

TEST(MockRule, FirstTwoSentences) {
  EXPECT_EQ(mock_summary("A. B. C.", 2, std::nullopt), "A. B.");
  EXPECT_EQ(mock_summary("Ena dva tri. Štiri pet. Šest.", 2, 3), "Ena dva tri");
}

TEST_F(MockServerFixture, ClientReturnsFirstSentences) {
  const auto doc = make_document("d", "Prvi stavek. Drugi stavek. Tretji stavek.");
  AbstractiveClientConfig cfg = config();
  const auto r1 = AbstractiveClient(cfg).summarize(doc);
  EXPECT_EQ(r1.summarizer, SummarizerId::t5_article);
  EXPECT_EQ(r1.text, "Prvi stavek. Drugi stavek.");
  EXPECT_FALSE(r1.selected_sentence_indices.has_value());

  MockAbstractiveServer one_sentence(1);
  one_sentence.start();
  cfg.endpoint = one_sentence.url();
  EXPECT_EQ(abstractive_summarize(doc, cfg).text, "Prvi stavek.");
}

TEST_F(MockServerFixture, HealthEndpoint) {
  EXPECT_TRUE(AbstractiveClient(config()).healthy());
}

TEST_F(MockServerFixture, RequestBodyIsTruncated) {
  // With max_length large and one lead sentence per 10 words, the mock echoes
  // what it received, so the echoed text shows the truncation.
  MockAbstractiveServer echo(1000);
  echo.start();
  AbstractiveClientConfig cfg = config();
  cfg.endpoint = echo.url();
  const auto doc = make_document("long", numbered_words(700, true));
  ASSERT_EQ(doc.token_count, 770u);
  const auto summary = AbstractiveClient(cfg).summarize(doc).text;
  EXPECT_EQ(tokenize(summary).size(), 512u);
}

TEST(Client, UnreachableEndpointIsTransportError) {
  AbstractiveClientConfig cfg;
  cfg.endpoint = "http://127.0.0.1:" + std::to_string(closed_port());
  cfg.timeout_seconds = 1;
  cfg.retries = 2;
  const auto doc = make_document("d", "Nekaj besedila.");
  EXPECT_THROW(AbstractiveClient(cfg).summarize(doc), TransportError);
  EXPECT_FALSE(AbstractiveClient(cfg).healthy());
}

TEST(Client, ConfigValidation) {
  AbstractiveClientConfig cfg;
  EXPECT_THROW(AbstractiveClient{cfg}, ConfigError);
  cfg.endpoint = "http://127.0.0.1:1";
  cfg.max_input_tokens = 0;
  EXPECT_THROW(AbstractiveClient{cfg}, ConfigError);
}

TEST(Client, NonSuccessStatusAndMalformedResponse) {
  httplib::Server server;
  server.Post("/bad/summarize", [](const httplib::Request&, httplib::Response& res) {
    res.status = 503;
    res.set_content("model overloaded", "text/plain");
  });
  server.Post("/odd/summarize", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"text":"no summary field"})", "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  const auto doc = make_document("d", "Nekaj besedila.");
  AbstractiveClientConfig cfg;
  cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/bad";
  try {
    AbstractiveClient(cfg).summarize(doc);
    ADD_FAILURE() << "expected ServiceError";
  } catch (const ServiceError& e) {
    EXPECT_EQ(e.status(), 503);
    EXPECT_EQ(e.body(), "model overloaded");
  }
  cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/odd";
  EXPECT_THROW(AbstractiveClient(cfg).summarize(doc), ProtocolError);

  server.stop();
  t.join();
}

TEST_F(MockServerFixture, HybridEqualsAbstractiveOnShortDocument) {
  const auto doc = make_document("d", "Sonce sije. Ptice pojejo. Otroci se igrajo.");
  EXPECT_EQ(hybrid_long(doc, config()).text, abstractive_summarize(doc, config()).text);
  EXPECT_EQ(hybrid_long(doc, config()).summarizer, SummarizerId::hybrid_long);
}

TEST_F(MockServerFixture, HybridWithIdentityMockEqualsGraphExtract) {
  MockAbstractiveServer identity(1000);
  identity.start();
  AbstractiveClientConfig cfg = config();
  cfg.endpoint = identity.url();
  cfg.max_input_tokens = 8;
  const auto doc = make_document(
      "d", "Mačke lovijo miši na vrtu. Psi lovijo mačke. Miši bežijo pred mačkami in psi.");
  const auto extract = GraphSummarizer().summarize(doc, SummaryBudget{8});
  EXPECT_EQ(hybrid_long(doc, cfg).text, extract.text);
}

TEST_F(MockServerFixture, HybridRequestStaysUnderCap) {
  MockAbstractiveServer identity(100000);
  identity.start();
  AbstractiveClientConfig cfg = config();
  cfg.endpoint = identity.url();
  std::string text;
  for (int s = 0; s < 200; ++s) {
    text += "Stavek " + std::to_string(s) + " govori o temi " + std::to_string(s % 7) + " in še o čem drugem. ";
  }
  const auto doc = make_document("long", text);
  ASSERT_GT(doc.token_count, 2000u);
  EXPECT_LE(tokenize(hybrid_long(doc, cfg).text).size(), 512u);
}

TEST_F(MockServerFixture, SummarizeAllHasFourEntriesAndIsDeterministic) {
  const SummarizerSuite suite(SumBasic(), GraphSummarizer(), AbstractiveClient(config()), SummaryBudget{10});
  const auto doc = make_document("d", "Vlada je sprejela proračun. Opozicija ga kritizira. Vreme bo lepo.");
  const auto a = summarize_all(doc, suite);
  const auto b = summarize_all(doc, suite);
  for (auto id : kAllSummarizers) {
    ASSERT_TRUE(a[index_of(id)].ok()) << a[index_of(id)].error;
    EXPECT_EQ(a[index_of(id)].result->summarizer, id);
    EXPECT_EQ(a[index_of(id)].result->text, b[index_of(id)].result->text);
  }
}

TEST(SummarizeAll, RemoteDownRecordsErrors) {
  AbstractiveClientConfig cfg;
  cfg.endpoint = "http://127.0.0.1:" + std::to_string(closed_port());
  cfg.timeout_seconds = 1;
  cfg.retries = 0;
  const SummarizerSuite suite(SumBasic(), GraphSummarizer(), AbstractiveClient(cfg), SummaryBudget{});
  const auto out = summarize_all(make_document("d", "Prvi stavek. Drugi stavek."), suite);
  EXPECT_TRUE(out[index_of(SummarizerId::sumbasic)].ok());
  EXPECT_TRUE(out[index_of(SummarizerId::graph_based)].ok());
  for (auto id : {SummarizerId::t5_article, SummarizerId::hybrid_long}) {
    EXPECT_FALSE(out[index_of(id)].ok());
    EXPECT_TRUE(out[index_of(id)].transport_failure);
    EXPECT_FALSE(out[index_of(id)].error.empty());
  }
  EXPECT_THROW(summarize_all(make_document("e", ""), suite), DataError);
}

TEST(RemoteEncoderTest, UsesEncodeContract) {
  httplib::Server server;
  server.Post("/encode", [](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    nlohmann::json vectors = nlohmann::json::array();
    for (const auto& s : body["sentences"]) {
      const auto text = s.get<std::string>();
      vectors.push_back({static_cast<double>(text.size()), 1.0});
    }
    res.set_content(nlohmann::json{{"vectors", vectors}}.dump(), "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  const auto doc = make_document_from_sentences("d", {"ab", "abcd", "ab"});
  RemoteEncoder encoder("http://127.0.0.1:" + std::to_string(port));
  const auto v = encoder.encode(doc.sentences);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v[1], (Vector{4.0, 1.0}));
  const auto r = GraphSummarizer(std::make_shared<RemoteEncoder>(encoder)).summarize(doc, SummaryBudget{1});
  EXPECT_EQ(r.selected_sentence_indices->size(), 1u);

  server.stop();
  t.join();

  RemoteEncoder down("http://127.0.0.1:" + std::to_string(closed_port()), 1.0, 0);
  EXPECT_THROW(down.encode(doc.sentences), TransportError);
}
