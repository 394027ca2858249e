#include "forge/fixture.hpp"

#include "forge/jsonl.hpp"
#include "forge/util.hpp"

namespace forge {

namespace fixture {

uint64_t stable_hash(const std::string& s) {
  return std::stoull(short_hash(s).substr(0, 12), nullptr, 16);
}

std::vector<std::string> numbered_items_after(const std::string& text,
                                              const std::string& marker) {
  std::vector<std::string> items;
  size_t pos = text.find(marker);
  if (pos == std::string::npos) return items;
  for (const std::string& raw : split_lines(text.substr(pos))) {
    std::string t = trim(raw);
    size_t i = 0;
    while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
    if (i == 0 || i >= t.size() || t[i] != '.') continue;
    items.push_back(trim(t.substr(i + 1)));
  }
  return items;
}

namespace {

// "3. Candidate Names: A, B, C (5 Males, 5 Females)" -> {A, B, C}
std::vector<std::string> candidate_names(const std::string& prompt) {
  std::vector<std::string> names;
  for (const std::string& line : split_lines(prompt)) {
    std::string t = trim(line);
    const std::string label = "3. Candidate Names:";
    if (t.rfind(label, 0) != 0) continue;
    std::string rest = t.substr(label.size());
    size_t paren = rest.find('(');
    if (paren != std::string::npos) rest = rest.substr(0, paren);
    for (const std::string& piece : split(rest, ',')) {
      std::string n = trim(piece);
      if (!n.empty()) names.push_back(n);
    }
  }
  return names;
}

std::string construct_name(const std::string& prompt) {
  for (const std::string& line : split_lines(prompt)) {
    std::string t = trim(line);
    if (t.rfind("Construct Name:", 0) == 0) return trim(t.substr(15));
  }
  return "construct";
}

}  // namespace

std::string scenario_response(const ChatRequest& req) {
  std::vector<std::string> names = candidate_names(req.user);
  if (names.size() < 10)
    throw GatewayError(GatewayError::Kind::BadResponse, "prompt carries no candidate names");
  uint64_t h = stable_hash(req.user);
  std::string prot = names[h % 5];
  std::string sup1 = names[5 + h % 5];
  std::string sup2 = names[(h + 2) % 5];

  std::string suffix = std::to_string(h % 97);
  std::string out;
  out += "## Part 1\n";
  out += "Design Rationale:\nEach pattern surfaces through " + prot +
         "'s choices under review pressure, variant key " + suffix + ".\n\n";
  out += "Catalyst Details:\n";
  out += "* [A disputed ledger entry]: [Forces the first confrontation]\n";
  out += "* [An unscheduled visitor]: [Interrupts and raises the stakes]\n\n";
  out += "Expected Character Tendencies:\n";
  out += "@ [" + prot + "]: 1. [Leans on familiar routines under scrutiny " + suffix +
         "]; 2. [Reads neutral remarks as pointed]; 3. [Defends early estimates]\n";
  out += "@ [" + sup1 + "]: 1. [Probes for inconsistencies]; 2. [Withholds their own doubts]\n\n";
  out += "## Part 2\n";
  out += "Story Background:\nA cramped records office an hour before closing. " + prot +
         " aligns a stack of folders while " + sup1 + " checks figures at the side desk. " +
         sup2 + " waits by the door with a sealed envelope. Key " + suffix +
         " is chalked on the noticeboard.\n\n";
  out += "Characters' Profiles:\n\n";
  out += "### Protagonist: " + prot + "\n";
  out += "* About Self:\n  A meticulous clerk who measures worth in tidy ledgers; motivation: "
         "close the quarter without reopening old disputes.\n";
  out += "* About Others:\n";
  out += "  * " + sup1 + ": A sharp-eyed auditor whose questions rarely feel casual.\n";
  out += "  * " + sup2 + ": A courier, regarded as harmless but badly timed.\n";
  out += "### Supporting Character 1: " + sup1 + "\n";
  out += "* About Self:\n  An auditor who trusts totals over stories; motivation: leave with "
         "one inconsistency explained.\n";
  out += "* About Others:\n";
  out += "  * " + prot + ": Capable but defensive about early estimates.\n";
  out += "  * " + sup2 + ": Unknown; assumed to be waiting for a signature.\n";
  out += "### Supporting Character 2: " + sup2 + "\n";
  out += "* About Self:\n  A courier between offices; motivation: hand over the envelope and "
         "go.\n";
  out += "* About Others:\n";
  out += "  * " + prot + ": The person whose signature is required.\n";
  out += "  * " + sup1 + ": A stranger absorbed in figures.\n";
  return out;
}

std::string conversation_response(const ChatRequest& req) {
  std::string prot, supporting_csv;
  for (const std::string& line : split_lines(req.user)) {
    std::string t = trim(line);
    if (t.rfind("3. **Protagonist**:", 0) == 0) prot = trim(t.substr(19));
    if (t.rfind("4. **Supporting Characters**:", 0) == 0) supporting_csv = trim(t.substr(29));
  }
  std::vector<std::string> supporting;
  for (const std::string& piece : split(supporting_csv, ','))
    if (!trim(piece).empty()) supporting.push_back(trim(piece));
  if (prot.empty() || supporting.empty())
    throw GatewayError(GatewayError::Kind::BadResponse, "prompt carries no cast");

  uint64_t h = stable_hash(req.user);
  int turns = 12 + static_cast<int>(h % 9);
  std::vector<std::string> lines;
  for (int i = 0; i < turns; ++i) {
    std::string who = (i == turns - 1)
                          ? prot
                          : (i % 2 == 0 ? supporting[static_cast<size_t>(i / 2) % supporting.size()]
                                        : prot);
    std::string n = std::to_string(i) + "-" + std::to_string(h % 89);
    lines.push_back(who + ": [weighing reply " + n + "] (shifts papers " + n +
                    ") The figures say otherwise, entry " + n + ".");
  }
  return join(lines, "\n");
}

std::string pattern_report(const ChatRequest& req) {
  std::string name = construct_name(req.user);
  std::string out;
  out += "Definition\n" + name + " is a stable disposition shaping how situations are read.\n\n";
  out += "Core Mechanisms\nAttention narrows toward cues that fit " + name +
         ", and ambiguous signals resolve in its favor.\n\n";
  out += "Real-World Manifestation\nUnder pressure, " + name +
         " surfaces as characteristic wording, pacing, and posture.\n";
  return out;
}

std::string checklist_items(const ChatRequest& req) {
  std::string name = construct_name(req.user);
  std::string out;
  for (int i = 1; i <= 15; ++i)
    out += std::to_string(i) + ". Does the subject show facet " + std::to_string(i) + " of " +
           name + " in their turns?\n";
  return out;
}

std::string observability_response(const ChatRequest& req) {
  Json results = Json::array();
  for (const std::string& item : numbered_items_after(req.user, "Items:"))
    results.push_back(Json{{"item", item}, {"observable", true}});
  return Json{{"results", results}}.dump();
}

std::string generalize_response(const ChatRequest& req) {
  std::string out;
  auto items = numbered_items_after(req.user, "Items:");
  for (size_t i = 0; i < items.size(); ++i)
    out += std::to_string(i + 1) + ". " + items[i] + "\n";
  return out;
}

std::string judge_response(const ChatRequest& req) {
  Json results = Json::array();
  for (const std::string& item : numbered_items_after(req.user, "[Checklist Chunk]")) {
    int score = static_cast<int>(stable_hash(item) % 3) - 1;
    results.push_back(
        Json{{"criterion", item}, {"score", score}, {"reason", "keyed to transcript evidence"}});
  }
  return Json{{"results", results}}.dump();
}

std::string roleplay_turn(const ChatRequest& req) {
  std::string speaker = "Someone";
  for (const std::string& line : split_lines(req.system)) {
    std::string t = trim(line);
    if (t.rfind("You are ", 0) == 0 && !t.empty() && t.back() == '.') {
      speaker = t.substr(8, t.size() - 9);
      break;
    }
  }
  uint64_t h = stable_hash(req.system + "|" + req.user);
  std::string n = std::to_string(h % 997);
  return "[recalling the ledger " + n + "] (taps the margin " + n + ") I stand by entry " + n +
         ", as " + speaker + " would.";
}

}  // namespace fixture

ChatResponse FixtureTransport::send_once(const ChatRequest& request, const LLMProviderHandle&) {
  const std::string& tag = request.tag;
  auto has_prefix = [&](const char* p) { return tag.rfind(p, 0) == 0; };
  std::string text;
  if (has_prefix("combo_validate:"))
    text = Json{{"compatible", true}, {"reason", "no direct contradiction"}}.dump();
  else if (has_prefix("scenario:"))
    text = fixture::scenario_response(request);
  else if (has_prefix("conversation:"))
    text = fixture::conversation_response(request);
  else if (has_prefix("pattern_synth:"))
    text = fixture::pattern_report(request);
  else if (has_prefix("checklist_generate:"))
    text = fixture::checklist_items(request);
  else if (has_prefix("checklist_observability:"))
    text = fixture::observability_response(request);
  else if (has_prefix("checklist_generalize:"))
    text = fixture::generalize_response(request);
  else if (has_prefix("checklist_validate:") || has_prefix("judge"))
    text = fixture::judge_response(request);
  else if (has_prefix("eval_model:") || has_prefix("eval_sim:"))
    text = fixture::roleplay_turn(request);
  else
    text = "fixture response for tag " + tag;
  ChatResponse r;
  r.text = std::move(text);
  r.token_usage = TokenUsage{static_cast<int64_t>((request.system.size() + request.user.size()) / 4),
                             static_cast<int64_t>(r.text.size() / 4)};
  return r;
}

}  // namespace forge
