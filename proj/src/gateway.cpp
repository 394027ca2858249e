#include "forge/gateway.hpp"

#include "forge/fixture.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <thread>

#include "forge/util.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

namespace forge {

namespace {

int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

TokenUsage fake_usage(const ChatRequest& req, const std::string& text) {
  return TokenUsage{static_cast<int64_t>((req.system.size() + req.user.size()) / 4),
                    static_cast<int64_t>(text.size() / 4)};
}

}  // namespace

void LLMProviderHandle::validate() const {
  if (provider_name.empty())
    throw GatewayError(GatewayError::Kind::BadConfig, "provider_name is empty");
  if (rate_limit_rpm <= 0)
    throw GatewayError(GatewayError::Kind::BadConfig, "rate_limit_rpm must be positive");
  if (max_retries < 0)
    throw GatewayError(GatewayError::Kind::BadConfig, "max_retries must be >= 0");
  if (provider_name != "mock" && provider_name != "fixture" && endpoint.empty())
    throw GatewayError(GatewayError::Kind::BadConfig,
                       "endpoint required for provider " + provider_name);
}

Json handle_to_json(const LLMProviderHandle& h) {
  return Json{{"provider", h.provider_name},   {"model", h.model_name},
              {"endpoint", h.endpoint},        {"auth_env", h.auth_env},
              {"rpm", h.rate_limit_rpm},       {"max_retries", h.max_retries},
              {"timeout_s", h.timeout_s},      {"backoff_base_ms", h.backoff_base_ms},
              {"script", h.script_path}};
}

LLMProviderHandle handle_from_json(const Json& j) {
  LLMProviderHandle h;
  h.provider_name = j.at("provider").get<std::string>();
  h.model_name = j.value("model", "");
  h.endpoint = j.value("endpoint", "");
  h.auth_env = j.value("auth_env", "");
  if (h.auth_env.empty() && h.provider_name != "mock" && h.provider_name != "fixture") {
    // convention: FORGE_<PROVIDER>_KEY
    std::string upper;
    for (char c : h.provider_name)
      upper += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    h.auth_env = "FORGE_" + upper + "_KEY";
  }
  h.rate_limit_rpm = j.value("rpm", 600);
  h.max_retries = j.value("max_retries", 3);
  h.timeout_s = j.value("timeout_s", 60.0);
  h.backoff_base_ms = j.value("backoff_base_ms", 1000);
  h.script_path = j.value("script", "");
  return h;
}

// --- MockTransport ----------------------------------------------------------

void MockTransport::script_tag(const std::string& tag, std::vector<std::string> responses) {
  std::lock_guard<std::mutex> lk(mu_);
  auto& entries = by_tag_[tag];
  for (std::string& r : responses) entries.push_back(Entry{std::move(r), 0, 0});
}

void MockTransport::script_tag_entry(const std::string& tag, Entry entry) {
  std::lock_guard<std::mutex> lk(mu_);
  by_tag_[tag].push_back(std::move(entry));
}

void MockTransport::script_exact(const std::string& user_prompt, Entry entry) {
  std::lock_guard<std::mutex> lk(mu_);
  exact_[user_prompt] = std::move(entry);
}

std::shared_ptr<MockTransport> MockTransport::from_script_file(const std::string& path) {
  auto mock = std::make_shared<MockTransport>();
  Json spec = Json::parse(read_file(path));
  for (const Json& e : spec.value("entries", Json::array())) {
    Entry entry;
    entry.response = e.value("response", "");
    entry.fail_times = e.value("fail_times", 0);
    if (e.contains("prompt"))
      mock->script_exact(e.at("prompt").get<std::string>(), std::move(entry));
    else
      mock->script_tag_entry(e.value("tag", ""), std::move(entry));
  }
  if (spec.contains("fallback")) mock->set_fallback(spec.at("fallback").get<std::string>());
  return mock;
}

ChatResponse MockTransport::send_once(const ChatRequest& request, const LLMProviderHandle&) {
  if (handler_) {
    if (auto text = handler_(request)) {
      ChatResponse r{*text, fake_usage(request, *text), 0, 1};
      return r;
    }
  }
  std::lock_guard<std::mutex> lk(mu_);
  auto serve = [&](Entry& e) -> ChatResponse {
    if (e.failed_so_far < e.fail_times) {
      ++e.failed_so_far;
      throw GatewayError(GatewayError::Kind::Http, "scripted failure");
    }
    return ChatResponse{e.response, fake_usage(request, e.response), 0, 1};
  };
  if (auto it = exact_.find(request.user); it != exact_.end()) return serve(it->second);
  if (auto it = by_tag_.find(request.tag); it != by_tag_.end()) {
    size_t& cursor = tag_cursor_[request.tag];
    if (cursor < it->second.size()) {
      Entry& e = it->second[cursor];
      if (e.failed_so_far < e.fail_times) {
        ++e.failed_so_far;
        throw GatewayError(GatewayError::Kind::Http, "scripted failure");
      }
      ++cursor;
      return ChatResponse{e.response, fake_usage(request, e.response), 0, 1};
    }
  }
  if (fallback_) return ChatResponse{*fallback_, fake_usage(request, *fallback_), 0, 1};
  throw GatewayError(GatewayError::Kind::BadConfig,
                     "mock has no script for tag '" + request.tag + "'");
}

// --- HttpTransport ----------------------------------------------------------

namespace {

std::string auth_key(const LLMProviderHandle& handle) {
  if (handle.auth_env.empty()) return "";
  const char* v = std::getenv(handle.auth_env.c_str());
  return v ? v : "";
}

struct WireCall {
  std::string path;
  httplib::Headers headers;
  std::string body;
};

WireCall build_call(const ChatRequest& req, const LLMProviderHandle& handle) {
  WireCall call;
  const std::string key = auth_key(handle);
  if (handle.provider_name == "openai") {
    call.path = "/v1/chat/completions";
    call.headers = {{"Authorization", "Bearer " + key}};
    Json body{{"model", handle.model_name},
              {"temperature", req.temperature},
              {"messages", Json::array()}};
    if (!req.system.empty()) body["messages"].push_back({{"role", "system"}, {"content", req.system}});
    body["messages"].push_back({{"role", "user"}, {"content", req.user}});
    if (req.seed) body["seed"] = *req.seed;
    call.body = body.dump();
  } else if (handle.provider_name == "anthropic") {
    call.path = "/v1/messages";
    call.headers = {{"x-api-key", key}, {"anthropic-version", "2023-06-01"}};
    Json body{{"model", handle.model_name},
              {"max_tokens", 4096},
              {"temperature", req.temperature},
              {"messages", Json::array({Json{{"role", "user"}, {"content", req.user}}})}};
    if (!req.system.empty()) body["system"] = req.system;
    call.body = body.dump();
  } else if (handle.provider_name == "gemini") {
    call.path = "/v1beta/models/" + handle.model_name + ":generateContent?key=" + key;
    Json body{{"contents", Json::array({Json{
                  {"role", "user"},
                  {"parts", Json::array({Json{{"text", req.user}}})}}})},
              {"generationConfig", Json{{"temperature", req.temperature}}}};
    if (!req.system.empty())
      body["systemInstruction"] = Json{{"parts", Json::array({Json{{"text", req.system}}})}};
    call.body = body.dump();
  } else {
    throw GatewayError(GatewayError::Kind::BadConfig,
                       "no HTTP adapter for provider " + handle.provider_name);
  }
  call.headers.emplace("Content-Type", "application/json");
  return call;
}

std::string extract_text(const Json& body, const LLMProviderHandle& handle) {
  try {
    if (handle.provider_name == "openai")
      return body.at("choices").at(0).at("message").at("content").get<std::string>();
    if (handle.provider_name == "anthropic")
      return body.at("content").at(0).at("text").get<std::string>();
    if (handle.provider_name == "gemini")
      return body.at("candidates").at(0).at("content").at("parts").at(0).at("text")
          .get<std::string>();
  } catch (const Json::exception& e) {
    throw GatewayError(GatewayError::Kind::BadResponse,
                       std::string("unexpected response shape: ") + e.what());
  }
  throw GatewayError(GatewayError::Kind::BadConfig, "no adapter");
}

TokenUsage extract_usage(const Json& body, const LLMProviderHandle& handle) {
  TokenUsage u;
  if (handle.provider_name == "openai" && body.contains("usage")) {
    u.prompt = body["usage"].value("prompt_tokens", 0);
    u.completion = body["usage"].value("completion_tokens", 0);
  } else if (handle.provider_name == "anthropic" && body.contains("usage")) {
    u.prompt = body["usage"].value("input_tokens", 0);
    u.completion = body["usage"].value("output_tokens", 0);
  } else if (handle.provider_name == "gemini" && body.contains("usageMetadata")) {
    u.prompt = body["usageMetadata"].value("promptTokenCount", 0);
    u.completion = body["usageMetadata"].value("candidatesTokenCount", 0);
  }
  return u;
}

}  // namespace

ChatResponse HttpTransport::send_once(const ChatRequest& request, const LLMProviderHandle& handle) {
  WireCall call = build_call(request, handle);
  httplib::Client client(handle.endpoint);
  client.set_connection_timeout(static_cast<time_t>(handle.timeout_s), 0);
  client.set_read_timeout(static_cast<time_t>(handle.timeout_s), 0);
  client.set_write_timeout(static_cast<time_t>(handle.timeout_s), 0);

  int64_t start = now_ms();
  httplib::Result res = client.Post(call.path, call.headers, call.body, "application/json");
  int64_t elapsed = now_ms() - start;

  if (!res) {
    auto err = res.error();
    auto kind = (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
                 err == httplib::Error::Write)
                    ? GatewayError::Kind::Timeout
                    : GatewayError::Kind::Http;
    throw GatewayError(kind, "http error: " + httplib::to_string(err));
  }
  if (res->status == 429)
    throw GatewayError(GatewayError::Kind::RateLimit, "provider rate limit (429)");
  if (res->status < 200 || res->status >= 300)
    throw GatewayError(GatewayError::Kind::Http,
                       "http status " + std::to_string(res->status) + ": " + res->body);

  Json body = Json::parse(res->body, nullptr, false);
  if (body.is_discarded())
    throw GatewayError(GatewayError::Kind::BadResponse, "response is not JSON");
  ChatResponse out;
  out.text = extract_text(body, handle);
  out.token_usage = extract_usage(body, handle);
  out.latency_ms = elapsed;
  if (out.text.empty())
    throw GatewayError(GatewayError::Kind::BadResponse, "empty completion text");
  return out;
}

std::shared_ptr<ChatTransport> make_transport(const LLMProviderHandle& handle) {
  if (handle.provider_name == "fixture") return std::make_shared<FixtureTransport>();
  if (handle.provider_name == "mock") {
    if (!handle.script_path.empty()) return MockTransport::from_script_file(handle.script_path);
    return std::make_shared<MockTransport>();
  }
  return std::make_shared<HttpTransport>();
}

// --- TokenBucket ------------------------------------------------------------

TokenBucket::TokenBucket(double rpm)
    : capacity_(rpm), tokens_(rpm), refill_per_ms_(rpm / 60000.0), last_ms_(now_ms()) {}

void TokenBucket::acquire() {
  while (true) {
    int64_t wait_ms = 0;
    {
      std::lock_guard<std::mutex> lk(mu_);
      int64_t now = now_ms();
      tokens_ = std::min(capacity_, tokens_ + refill_per_ms_ * static_cast<double>(now - last_ms_));
      last_ms_ = now;
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return;
      }
      wait_ms = static_cast<int64_t>((1.0 - tokens_) / refill_per_ms_) + 1;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(std::min<int64_t>(wait_ms, 250)));
  }
}

// --- ResponseCache ----------------------------------------------------------

std::string ResponseCache::key(const std::string& model, const ChatRequest& request) {
  Json j{{"model", model},
         {"system", request.system},
         {"user", request.user},
         {"temperature", request.temperature}};
  if (request.seed)
    j["seed"] = *request.seed;
  else
    j["seed"] = nullptr;
  return sha256_hex(j.dump());
}

std::optional<ChatResponse> ResponseCache::lookup(const std::string& key) const {
  if (!enabled()) return std::nullopt;
  std::filesystem::path p = std::filesystem::path(dir_) / (key + ".json");
  std::error_code ec;
  if (!std::filesystem::exists(p, ec)) return std::nullopt;
  Json j = Json::parse(read_file(p.string()), nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("text")) {
    std::cerr << "[cache] corrupt entry treated as miss: " << p << "\n";
    return std::nullopt;
  }
  ChatResponse r;
  r.text = j.at("text").get<std::string>();
  r.token_usage.prompt = j.value("prompt_tokens", int64_t{0});
  r.token_usage.completion = j.value("completion_tokens", int64_t{0});
  r.attempt_count = 0;  // served from cache, no provider attempt
  return r;
}

void ResponseCache::store(const std::string& key, const ChatResponse& response) const {
  if (!enabled()) return;
  Json j{{"text", response.text},
         {"prompt_tokens", response.token_usage.prompt},
         {"completion_tokens", response.token_usage.completion}};
  write_file((std::filesystem::path(dir_) / (key + ".json")).string(), j.dump());
}

// --- Gateway ----------------------------------------------------------------

Gateway::Gateway(LLMProviderHandle handle, std::shared_ptr<ChatTransport> transport)
    : handle_(std::move(handle)),
      transport_(transport ? std::move(transport) : make_transport(handle_)),
      limiter_(static_cast<double>(handle_.rate_limit_rpm)) {
  handle_.validate();
  sleeper_ = [](int ms) { std::this_thread::sleep_for(std::chrono::milliseconds(ms)); };
}

void Gateway::log_attempt(const std::string& tag, int attempt, bool ok, const std::string& error) {
  std::lock_guard<std::mutex> lk(log_mu_);
  attempts_.push_back(AttemptRecord{tag, attempt, ok, error});
}

std::vector<AttemptRecord> Gateway::attempt_log() const {
  std::lock_guard<std::mutex> lk(log_mu_);
  return attempts_;
}

ChatResponse Gateway::complete(const ChatRequest& request) {
  std::string key;
  if (cache_.enabled()) {
    key = ResponseCache::key(handle_.model_name, request);
    if (auto hit = cache_.lookup(key)) return *hit;
  }
  ChatResponse response = complete_uncached(request);
  if (cache_.enabled()) cache_.store(key, response);
  return response;
}

ChatResponse Gateway::complete_uncached(const ChatRequest& request) {
  const int attempts_allowed = 1 + handle_.max_retries;
  std::string last_error;
  GatewayError::Kind last_kind = GatewayError::Kind::Http;
  for (int attempt = 1; attempt <= attempts_allowed; ++attempt) {
    limiter_.acquire();
    try {
      ChatResponse r = transport_->send_once(request, handle_);
      r.attempt_count = attempt;
      if (r.text.empty())
        throw GatewayError(GatewayError::Kind::BadResponse, "empty completion text");
      log_attempt(request.tag, attempt, true, "");
      return r;
    } catch (const GatewayError& e) {
      last_error = e.what();
      last_kind = e.kind();
      log_attempt(request.tag, attempt, false, last_error);
      if (e.kind() == GatewayError::Kind::BadConfig) throw;
      if (attempt < attempts_allowed) {
        // base * 2^k with +/-20% jitter; jitter seeded per request so reruns
        // behave identically.
        double base = static_cast<double>(handle_.backoff_base_ms) * static_cast<double>(1 << (attempt - 1));
        Rng jitter(derive_seed(static_cast<uint64_t>(attempt),
                               request.tag + "|" + request.user.substr(0, 64)));
        double factor = 0.8 + 0.4 * jitter.unit();
        sleeper_(static_cast<int>(base * factor));
      }
    }
  }
  std::string kind_note = last_kind == GatewayError::Kind::RateLimit ? "rate-limit exhaustion: "
                                                                     : "retries exhausted: ";
  throw GatewayError(GatewayError::Kind::Exhausted,
                     kind_note + last_error + " (tag=" + request.tag + ", attempts=" +
                         std::to_string(attempts_allowed) + ")");
}

std::vector<Gateway::BatchResult> Gateway::complete_batch(const std::vector<ChatRequest>& requests,
                                                          int parallelism) {
  if (parallelism < 1)
    throw GatewayError(GatewayError::Kind::BadConfig, "parallelism must be >= 1");
  std::vector<BatchResult> results(requests.size());
  if (requests.empty()) return results;

  std::atomic<size_t> next{0};
  auto worker = [&] {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= requests.size()) return;
      try {
        results[i].response = complete(requests[i]);
      } catch (const std::exception& e) {
        results[i].error = e.what();
      }
    }
  };

  size_t n_threads = std::min<size_t>(static_cast<size_t>(parallelism), requests.size());
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace forge
