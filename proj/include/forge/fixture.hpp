#pragma once
// Offline fixture provider: fabricates deterministic, format-conforming
// responses for every pipeline stage by inspecting the request. Lets the
// whole pipeline run end-to-end with no credentials, for demos, smoke runs,
// and the determinism contract. Responses are pure functions of the prompt
// text, so reruns are byte-identical.

#include <string>
#include <vector>

#include "forge/gateway.hpp"

namespace forge {

namespace fixture {

uint64_t stable_hash(const std::string& s);

// Items of a "1. ..." numbered list appearing after `marker` in `text`.
std::vector<std::string> numbered_items_after(const std::string& text,
                                              const std::string& marker);

std::string scenario_response(const ChatRequest& req);
std::string conversation_response(const ChatRequest& req);
std::string pattern_report(const ChatRequest& req);
std::string checklist_items(const ChatRequest& req);
std::string observability_response(const ChatRequest& req);
std::string generalize_response(const ChatRequest& req);
std::string judge_response(const ChatRequest& req);
std::string roleplay_turn(const ChatRequest& req);

}  // namespace fixture

// Dispatches on the request tag prefix set by each pipeline stage.
class FixtureTransport : public ChatTransport {
 public:
  ChatResponse send_once(const ChatRequest& request, const LLMProviderHandle& handle) override;
};

}  // namespace forge
