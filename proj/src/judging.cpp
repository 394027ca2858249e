#include "forge/judging.hpp"

#include <map>

#include "forge/util.hpp"

namespace forge {

namespace {

std::string strip_numbering(const std::string& s) {
  std::string t = trim(s);
  size_t i = 0;
  while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
  if (i > 0 && i < t.size() && t[i] == '.') return trim(t.substr(i + 1));
  return t;
}

std::string render_chunk(const std::vector<std::string>& items) {
  std::string out;
  for (size_t i = 0; i < items.size(); ++i)
    out += std::to_string(i + 1) + ". " + items[i] + "\n";
  return trim(out);
}

}  // namespace

ChunkParse parse_judge_response(const std::string& response_text,
                                const std::vector<std::string>& chunk_items) {
  ChunkParse out;
  Json j = Json::parse(response_text, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("results") || !j["results"].is_array()) {
    out.error = "response is not the required JSON object";
    return out;
  }
  const Json& results = j["results"];
  if (results.size() != chunk_items.size()) {
    out.error = "result count " + std::to_string(results.size()) + " != item count " +
                std::to_string(chunk_items.size());
    return out;
  }
  out.structurally_valid = true;
  out.judgments.resize(chunk_items.size());

  // Criterion strings match back to items by text; duplicates or rewrites
  // fall back to position.
  std::map<std::string, std::vector<size_t>> by_text;
  for (size_t i = 0; i < chunk_items.size(); ++i) by_text[trim(chunk_items[i])].push_back(i);

  std::vector<bool> taken(chunk_items.size(), false);
  std::vector<std::pair<size_t, const Json*>> unplaced;
  for (size_t r = 0; r < results.size(); ++r) {
    const Json& entry = results[r];
    std::string criterion =
        entry.is_object() && entry.contains("criterion") && entry["criterion"].is_string()
            ? strip_numbering(entry["criterion"].get<std::string>())
            : "";
    auto it = by_text.find(criterion);
    size_t slot = chunk_items.size();
    if (it != by_text.end()) {
      for (size_t cand : it->second)
        if (!taken[cand]) {
          slot = cand;
          break;
        }
    }
    if (slot == chunk_items.size()) {
      unplaced.emplace_back(r, &entry);
      continue;
    }
    taken[slot] = true;
    RawJudgment& rj = out.judgments[slot];
    if (entry.is_object() && entry.contains("score") && entry["score"].is_number_integer()) {
      int score = entry["score"].get<int>();
      if (score >= -1 && score <= 1) {
        rj.score = score;
        rj.reason = entry.value("reason", "");
        if (rj.reason.empty()) rj.reason = "(no reason given)";
        continue;
      }
    }
    rj.failed = true;
    rj.score = 0;
    rj.reason = "invalid score in judge response";
  }
  // positional fallback for entries whose criterion text did not match
  size_t cursor = 0;
  for (auto& [r, entry] : unplaced) {
    while (cursor < taken.size() && taken[cursor]) ++cursor;
    if (cursor >= taken.size()) break;
    taken[cursor] = true;
    RawJudgment& rj = out.judgments[cursor];
    if (entry->is_object() && entry->contains("score") && (*entry)["score"].is_number_integer()) {
      int score = (*entry)["score"].get<int>();
      if (score >= -1 && score <= 1) {
        rj.score = score;
        rj.reason = entry->value("reason", "");
        if (rj.reason.empty()) rj.reason = "judge omitted reason";
        continue;
      }
    }
    rj.failed = true;
    rj.score = 0;
    rj.reason = "invalid score in judge response";
  }
  return out;
}

std::vector<RawJudgment> judge_item_texts(const std::string& conversation_text,
                                          const std::string& protagonist,
                                          const std::vector<std::string>& item_texts,
                                          Gateway& judge, const PromptLibrary& prompts,
                                          const JudgeCallOptions& options) {
  if (item_texts.empty()) return {};
  if (options.chunk_size < 1) throw PromptError("chunk_size must be >= 1");

  std::vector<RawJudgment> out;
  out.reserve(item_texts.size());

  for (size_t start = 0; start < item_texts.size();
       start += static_cast<size_t>(options.chunk_size)) {
    size_t end = std::min(item_texts.size(), start + static_cast<size_t>(options.chunk_size));
    std::vector<std::string> chunk(item_texts.begin() + static_cast<long>(start),
                                   item_texts.begin() + static_cast<long>(end));

    ChatRequest req;
    req.system = prompts.raw("judge.system");
    req.user = prompts.render("judge.user", {{"protagonist", protagonist},
                                             {"conversation", conversation_text},
                                             {"checklist", render_chunk(chunk)}});
    req.temperature = options.temperature;
    req.seed = options.seed;
    req.tag = options.tag;

    ChunkParse best;
    std::string last_error = "no attempt made";
    for (int attempt = 1; attempt <= options.max_attempts; ++attempt) {
      ChatResponse resp = judge.complete(req);
      ChunkParse parsed = parse_judge_response(resp.text, chunk);
      if (!parsed.structurally_valid) {
        last_error = parsed.error;
        continue;  // whole chunk retried
      }
      best = parsed;
      bool any_failed = false;
      for (const RawJudgment& rj : parsed.judgments) any_failed |= rj.failed;
      if (!any_failed) break;  // clean chunk, done
      // some items malformed: retry the chunk, keep the best-shaped answer
    }
    if (!best.structurally_valid) {
      best.judgments.assign(chunk.size(),
                            RawJudgment{0, "judge failed after retries: " + last_error, true});
    }
    for (RawJudgment& rj : best.judgments) out.push_back(std::move(rj));
  }
  return out;
}

}  // namespace forge
