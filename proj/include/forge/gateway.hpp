#pragma once
// Uniform chat-completion access: one retry/rate-limit/cache wrapper around a
// per-provider transport. The scripted mock transport is the test workhorse;
// HTTP adapters cover openai-, anthropic- and gemini-style wire formats.

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "forge/jsonl.hpp"

namespace forge {

struct LLMProviderHandle {
  std::string provider_name;  // mock | openai | anthropic | gemini
  std::string model_name;
  std::string endpoint;  // base URL; unused by mock
  std::string auth_env;  // name of the env var holding the key; value never persisted
  int rate_limit_rpm = 600;
  int max_retries = 3;
  double timeout_s = 60.0;
  int backoff_base_ms = 1000;
  std::string script_path;  // mock only: scripted responses file

  void validate() const;  // rate_limit > 0, max_retries >= 0
};

Json handle_to_json(const LLMProviderHandle& h);  // never includes key material
LLMProviderHandle handle_from_json(const Json& j);

struct ChatRequest {
  std::string system;
  std::string user;
  double temperature = 0.0;
  std::optional<int64_t> seed;
  std::string tag;  // run-scoped label, propagated for audit
};

struct TokenUsage {
  int64_t prompt = 0;
  int64_t completion = 0;
};

struct ChatResponse {
  std::string text;
  TokenUsage token_usage;
  int64_t latency_ms = 0;
  int attempt_count = 1;
};

class GatewayError : public std::runtime_error {
 public:
  enum class Kind { Timeout, Http, RateLimit, Exhausted, BadConfig, BadResponse };
  GatewayError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// One attempt against a provider; throws GatewayError on failure.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual ChatResponse send_once(const ChatRequest& request, const LLMProviderHandle& handle) = 0;
};

// Deterministic scripted mock. Resolution order per request:
//   handler fn -> exact user-prompt match -> (tag, ordinal) script -> fallback.
// Entries can be told to fail a number of times before answering, which
// exercises the retry path.
class MockTransport : public ChatTransport {
 public:
  struct Entry {
    std::string response;
    int fail_times = 0;
    int failed_so_far = 0;
  };

  void script_tag(const std::string& tag, std::vector<std::string> responses);
  void script_tag_entry(const std::string& tag, Entry entry);
  void script_exact(const std::string& user_prompt, Entry entry);
  void set_fallback(std::string text) { fallback_ = std::move(text); }
  // In-process scripting hook; return nullopt to fall through to the script.
  void set_handler(std::function<std::optional<std::string>(const ChatRequest&)> fn) {
    handler_ = std::move(fn);
  }

  static std::shared_ptr<MockTransport> from_script_file(const std::string& path);

  ChatResponse send_once(const ChatRequest& request, const LLMProviderHandle& handle) override;

 private:
  std::mutex mu_;
  std::function<std::optional<std::string>(const ChatRequest&)> handler_;
  std::map<std::string, Entry> exact_;
  std::map<std::string, std::vector<Entry>> by_tag_;
  std::map<std::string, size_t> tag_cursor_;
  std::optional<std::string> fallback_;
};

// openai/anthropic/gemini chat endpoints over cpp-httplib.
class HttpTransport : public ChatTransport {
 public:
  ChatResponse send_once(const ChatRequest& request, const LLMProviderHandle& handle) override;
};

std::shared_ptr<ChatTransport> make_transport(const LLMProviderHandle& handle);

// Blocking token bucket, shared across gateway threads.
class TokenBucket {
 public:
  explicit TokenBucket(double rpm);
  void acquire();

 private:
  double capacity_;
  double tokens_;
  double refill_per_ms_;
  int64_t last_ms_;
  std::mutex mu_;
};

// Content-addressed response cache; key covers (model, system, user,
// temperature, seed) so any prompt edit invalidates.
class ResponseCache {
 public:
  ResponseCache() = default;
  explicit ResponseCache(std::string dir) : dir_(std::move(dir)) {}
  bool enabled() const { return !dir_.empty(); }

  static std::string key(const std::string& model, const ChatRequest& request);
  std::optional<ChatResponse> lookup(const std::string& key) const;
  void store(const std::string& key, const ChatResponse& response) const;

 private:
  std::string dir_;
};

struct AttemptRecord {
  std::string tag;
  int attempt = 0;
  bool ok = false;
  std::string error;
};

class Gateway {
 public:
  explicit Gateway(LLMProviderHandle handle, std::shared_ptr<ChatTransport> transport = nullptr);

  void enable_cache(const std::string& dir) { cache_ = ResponseCache(dir); }
  void set_sleeper(std::function<void(int)> fn) { sleeper_ = std::move(fn); }

  ChatResponse complete(const ChatRequest& request);

  struct BatchResult {
    std::optional<ChatResponse> response;
    std::string error;
    bool ok() const { return response.has_value(); }
  };
  // Results come back in request order; at most `parallelism` in flight.
  std::vector<BatchResult> complete_batch(const std::vector<ChatRequest>& requests,
                                          int parallelism);

  const LLMProviderHandle& handle() const { return handle_; }
  std::vector<AttemptRecord> attempt_log() const;

 private:
  ChatResponse complete_uncached(const ChatRequest& request);
  void log_attempt(const std::string& tag, int attempt, bool ok, const std::string& error);

  LLMProviderHandle handle_;
  std::shared_ptr<ChatTransport> transport_;
  TokenBucket limiter_;
  ResponseCache cache_;
  std::function<void(int)> sleeper_;
  mutable std::mutex log_mu_;
  std::vector<AttemptRecord> attempts_;
};

}  // namespace forge
