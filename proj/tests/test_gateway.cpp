#include <atomic>
#include <chrono>
#include <thread>

#include "doctest.h"
#include "forge/gateway.hpp"
#include "forge/util.hpp"
#include "test_helpers.hpp"

using namespace forge;

namespace {

LLMProviderHandle mock_handle(int max_retries = 3) {
  LLMProviderHandle h;
  h.provider_name = "mock";
  h.model_name = "scripted";
  h.rate_limit_rpm = 600000;
  h.max_retries = max_retries;
  h.backoff_base_ms = 1;
  return h;
}

}  // namespace

TEST_CASE("scripted pass-through") {
  auto mock = std::make_shared<MockTransport>();
  mock->script_exact("hi", MockTransport::Entry{"hello", 0, 0});
  Gateway gw(mock_handle(), mock);
  ChatRequest req;
  req.user = "hi";
  req.tag = "t";
  auto resp = gw.complete(req);
  CHECK(resp.text == "hello");
  CHECK(resp.attempt_count == 1);
}

TEST_CASE("fail twice then succeed lands on attempt 3") {
  auto mock = std::make_shared<MockTransport>();
  mock->script_tag_entry("flaky", MockTransport::Entry{"ok", 2, 0});
  Gateway gw(mock_handle(3), mock);
  gw.set_sleeper([](int) {});
  ChatRequest req;
  req.user = "x";
  req.tag = "flaky";
  auto resp = gw.complete(req);
  CHECK(resp.text == "ok");
  CHECK(resp.attempt_count == 3);
  CHECK(gw.attempt_log().size() == 3);
}

TEST_CASE("max_retries=0 fails after one attempt") {
  auto mock = std::make_shared<MockTransport>();
  mock->script_tag_entry("flaky", MockTransport::Entry{"ok", 1, 0});
  Gateway gw(mock_handle(0), mock);
  gw.set_sleeper([](int) {});
  ChatRequest req;
  req.user = "x";
  req.tag = "flaky";
  try {
    gw.complete(req);
    FAIL("expected GatewayError");
  } catch (const GatewayError& e) {
    CHECK(e.kind() == GatewayError::Kind::Exhausted);
    CHECK(gw.attempt_log().size() == 1);
  }
}

TEST_CASE("batch keeps request order at any parallelism") {
  auto mock = std::make_shared<MockTransport>();
  mock->set_handler([](const ChatRequest& r) { return std::optional<std::string>("echo:" + r.user); });
  Gateway gw(mock_handle(), mock);

  Rng rng(99);
  for (int round = 0; round < 8; ++round) {
    size_t n = 1 + rng.below(40);
    int parallelism = 1 + static_cast<int>(rng.below(8));
    std::vector<ChatRequest> reqs(n);
    for (size_t i = 0; i < n; ++i) {
      reqs[i].user = std::to_string(i);
      reqs[i].tag = "batch";
    }
    auto results = gw.complete_batch(reqs, parallelism);
    REQUIRE(results.size() == n);
    for (size_t i = 0; i < n; ++i) {
      REQUIRE(results[i].ok());
      CHECK(results[i].response->text == "echo:" + std::to_string(i));
    }
  }
}

TEST_CASE("empty batch returns empty list") {
  Gateway gw(mock_handle(), std::make_shared<MockTransport>());
  CHECK(gw.complete_batch({}, 3).empty());
}

TEST_CASE("one failing item does not abort the batch") {
  auto mock = std::make_shared<MockTransport>();
  mock->set_handler([](const ChatRequest& r) -> std::optional<std::string> {
    if (r.user == "2") throw GatewayError(GatewayError::Kind::Http, "boom");
    return "ok:" + r.user;
  });
  Gateway gw(mock_handle(0), mock);
  gw.set_sleeper([](int) {});
  std::vector<ChatRequest> reqs(5);
  for (size_t i = 0; i < 5; ++i) reqs[i].user = std::to_string(i);
  auto results = gw.complete_batch(reqs, 2);
  int failures = 0;
  for (size_t i = 0; i < 5; ++i) {
    if (!results[i].ok()) {
      ++failures;
      CHECK(i == 2);
      CHECK(results[i].error.find("boom") != std::string::npos);
    }
  }
  CHECK(failures == 1);
}

TEST_CASE("in-flight never exceeds parallelism") {
  auto mock = std::make_shared<MockTransport>();
  std::atomic<int> in_flight{0};
  std::atomic<int> peak{0};
  mock->set_handler([&](const ChatRequest&) -> std::optional<std::string> {
    int now = ++in_flight;
    int prev = peak.load();
    while (now > prev && !peak.compare_exchange_weak(prev, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
    --in_flight;
    return "ok";
  });
  Gateway gw(mock_handle(), mock);
  std::vector<ChatRequest> reqs(24);
  gw.complete_batch(reqs, 3);
  CHECK(peak.load() <= 3);
}

TEST_CASE("cache hit returns byte-identical text and skips the provider") {
  std::string dir = forge::testing::temp_dir("cache");
  auto mock = std::make_shared<MockTransport>();
  int calls = 0;
  mock->set_handler([&](const ChatRequest&) -> std::optional<std::string> {
    ++calls;
    return "payload-42";
  });
  Gateway gw(mock_handle(), mock);
  gw.enable_cache(dir);
  ChatRequest req;
  req.user = "question";
  req.temperature = 0.7;
  auto first = gw.complete(req);
  auto second = gw.complete(req);
  CHECK(calls == 1);
  CHECK(first.text == second.text);

  // different prompt, different key
  ChatRequest other = req;
  other.user = "question!";
  gw.complete(other);
  CHECK(calls == 2);
}

TEST_CASE("disabled cache always misses") {
  auto mock = std::make_shared<MockTransport>();
  int calls = 0;
  mock->set_handler([&](const ChatRequest&) -> std::optional<std::string> {
    ++calls;
    return "x";
  });
  Gateway gw(mock_handle(), mock);
  ChatRequest req;
  req.user = "q";
  gw.complete(req);
  gw.complete(req);
  CHECK(calls == 2);
}

TEST_CASE("distinct prompts produce distinct cache keys") {
  Rng rng(4);
  std::set<std::string> keys;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    ChatRequest req;
    req.user = "prompt-" + std::to_string(i) + "-" +
               forge::testing::random_words(rng, 1, 4);
    req.temperature = 0.0;
    keys.insert(ResponseCache::key("m", req));
  }
  CHECK(keys.size() == n);
  CHECK(ResponseCache::key("m", ChatRequest{}).size() == 64);
}

TEST_CASE("corrupt cache entry treated as miss") {
  std::string dir = forge::testing::temp_dir("cache-corrupt");
  auto mock = std::make_shared<MockTransport>();
  int calls = 0;
  mock->set_handler([&](const ChatRequest&) -> std::optional<std::string> {
    ++calls;
    return "fresh";
  });
  Gateway gw(mock_handle(), mock);
  gw.enable_cache(dir);
  ChatRequest req;
  req.user = "q";
  gw.complete(req);
  std::string key = ResponseCache::key("scripted", req);
  write_file(dir + "/" + key + ".json", "{not json");
  auto resp = gw.complete(req);
  CHECK(resp.text == "fresh");
  CHECK(calls == 2);
}

TEST_CASE("handle validation") {
  LLMProviderHandle h = mock_handle();
  h.rate_limit_rpm = 0;
  CHECK_THROWS_AS(h.validate(), GatewayError);
  h = mock_handle();
  h.max_retries = -1;
  CHECK_THROWS_AS(h.validate(), GatewayError);
}

TEST_CASE("mock script file round-trip") {
  std::string dir = forge::testing::temp_dir("mockscript");
  Json spec{{"entries", Json::array({Json{{"tag", "a"}, {"response", "first"}},
                                     Json{{"tag", "a"}, {"response", "second"}},
                                     Json{{"prompt", "exact q"}, {"response", "matched"}}})},
            {"fallback", "canned"}};
  std::string path = dir + "/script.json";
  write_file(path, spec.dump());
  auto mock = MockTransport::from_script_file(path);
  Gateway gw(mock_handle(), mock);
  ChatRequest req;
  req.tag = "a";
  req.user = "whatever";
  CHECK(gw.complete(req).text == "first");
  CHECK(gw.complete(req).text == "second");
  CHECK(gw.complete(req).text == "canned");
  ChatRequest exact;
  exact.tag = "other";
  exact.user = "exact q";
  CHECK(gw.complete(exact).text == "matched");
}
