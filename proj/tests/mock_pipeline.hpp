#pragma once
// Pipeline test fixtures: the library's deterministic fixture transport plus
// a small on-disk input corpus whose pattern frequencies pin the held-out
// picks exactly.

#include <memory>
#include <string>
#include <vector>

#include "forge/fixture.hpp"
#include "forge/gateway.hpp"
#include "forge/jsonl.hpp"
#include "forge/util.hpp"

namespace forge::testing {

inline uint64_t text_hash(const std::string& s) { return fixture::stable_hash(s); }

inline std::vector<std::string> parse_block_items(const std::string& text,
                                                  const std::string& marker) {
  return fixture::numbered_items_after(text, marker);
}

inline std::shared_ptr<ChatTransport> make_pipeline_mock() {
  return std::make_shared<FixtureTransport>();
}

// Five-combination fixture whose frequencies pin the held-out pattern picks
// to {awe, groupthink, just-world-hypothesis, spotlight-effect} plus
// {cruel, dull, nervous, timid}: combos 1-3 stay fully in-domain, 4-5 are
// entirely held-out.
inline std::string write_pipeline_fixture(const std::string& dir) {
  std::vector<std::vector<std::string>> combos = {
      {"anchoring", "bright", "kind", "organized", "shy"},
      {"calm", "conformity", "kind", "organized"},
      {"anchoring", "bright", "calm", "conformity", "shy"},
      {"awe", "dull", "groupthink", "nervous"},
      {"cruel", "just-world-hypothesis", "spotlight-effect", "timid"},
  };
  std::string combos_text;
  for (const auto& combo : combos) combos_text += Json(combo).dump() + "\n";
  write_file(dir + "/combos.jsonl", combos_text);

  Json names{{"male", {"Arlen", "Baxter", "Corin", "Dmitri", "Emeric", "Farid"}},
             {"female", {"Greta", "Halia", "Imara", "Junia", "Kiona", "Lena"}}};
  write_file(dir + "/names.json", names.dump(2));

  write_file(dir + "/corpus/doc1.txt",
             "Field notes on disposition and habit across workplace studies.\n");
  write_file(dir + "/corpus/doc2.txt",
             "A synthesis of observational coding schemes for dyadic interaction.\n");

  std::string general;
  for (int i = 0; i < 20; ++i) {
    Json row{{"conversations",
              Json::array({Json{{"from", "human"}, {"value", "question " + std::to_string(i)}},
                           Json{{"from", "gpt"}, {"value", "answer " + std::to_string(i)}}})}};
    general += row.dump() + "\n";
  }
  write_file(dir + "/general.jsonl", general);
  std::string roleplay;
  for (int i = 0; i < 10; ++i) {
    Json row{{"messages",
              Json::array({Json{{"role", "user"}, {"content", "cue " + std::to_string(i)}},
                           Json{{"role", "assistant"}, {"content", "line " + std::to_string(i)}}})}};
    roleplay += row.dump() + "\n";
  }
  write_file(dir + "/roleplay.jsonl", roleplay);
  return dir;
}

}  // namespace forge::testing
