#include "forge/checklist.hpp"

#include <algorithm>

#include "forge/dialogue.hpp"
#include "forge/util.hpp"

namespace forge {

Json checklist_item_to_json(const ChecklistItem& item) {
  Json j{{"id", item.id},
         {"text", item.text},
         {"level", item.level == ChecklistLevel::Pattern ? "pattern" : "scenario"}};
  if (item.level == ChecklistLevel::Pattern) {
    j["pattern_id"] = item.pattern_id;
  } else {
    j["scenario_id"] = item.scenario_id;
    j["character"] = item.character;
  }
  return j;
}

ChecklistItem checklist_item_from_json(const Json& j) {
  ChecklistItem item;
  item.id = j.at("id").get<std::string>();
  item.text = j.at("text").get<std::string>();
  item.level = j.at("level").get<std::string>() == "pattern" ? ChecklistLevel::Pattern
                                                             : ChecklistLevel::Scenario;
  item.pattern_id = j.value("pattern_id", "");
  item.scenario_id = j.value("scenario_id", "");
  item.character = j.value("character", "");
  return item;
}

Json pattern_checklist_to_json(const PatternChecklist& c) {
  Json items = Json::array();
  for (const ChecklistItem& item : c.items) items.push_back(checklist_item_to_json(item));
  return Json{{"level", "pattern"},
              {"pattern_id", c.pattern_id},
              {"items", items},
              {"provenance",
               Json{{"generated_count", c.provenance.generated_count},
                    {"removed_count", c.provenance.removed_count},
                    {"generalized_count", c.provenance.generalized_count}}},
              {"degraded", c.degraded},
              {"short_count", c.short_count}};
}

PatternChecklist pattern_checklist_from_json(const Json& j) {
  PatternChecklist c;
  c.pattern_id = j.at("pattern_id").get<std::string>();
  for (const Json& item : j.at("items")) c.items.push_back(checklist_item_from_json(item));
  if (j.contains("provenance")) {
    const Json& p = j["provenance"];
    c.provenance.generated_count = p.value("generated_count", 0);
    c.provenance.removed_count = p.value("removed_count", 0);
    c.provenance.generalized_count = p.value("generalized_count", 0);
  }
  c.degraded = j.value("degraded", false);
  c.short_count = j.value("short_count", false);
  return c;
}

std::string normalize_item_text(std::string text) {
  std::string t = trim(text);
  while (!t.empty() && (t.back() == '.' || t.back() == '!' || t.back() == ';')) {
    t.pop_back();
    t = trim(t);
  }
  if (t.empty()) return t;
  if (t.back() != '?') t += '?';
  return t;
}

std::string checklist_item_id(const std::string& prefix, size_t ordinal) {
  std::string n = std::to_string(ordinal);
  if (n.size() < 2) n = "0" + n;
  return prefix + "-" + n;
}

std::vector<std::string> parse_numbered_list(const std::string& text) {
  std::vector<std::string> out;
  for (const std::string& raw : split_lines(text)) {
    std::string t = trim(raw);
    if (t.empty()) continue;
    size_t i = 0;
    while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
    if (i == 0 || i >= t.size() || (t[i] != '.' && t[i] != ')')) continue;
    std::string item = trim(t.substr(i + 1));
    if (!item.empty()) out.push_back(std::move(item));
  }
  return out;
}

namespace {

// Case-sensitive scan: character names are capitalized tokens, and matching
// "Grace" should not flag lowercase "grace".
std::optional<std::string> find_known_name(const std::string& text,
                                           const std::set<std::string>& known_names) {
  for (const std::string& name : known_names)
    if (!name.empty() && contains_word(text, name)) return name;
  return std::nullopt;
}

}  // namespace

ChecklistBuilder::ChecklistBuilder(Gateway& provider, Gateway& judge,
                                   const PromptLibrary& prompts, ChecklistBuildOptions options)
    : provider_(provider), judge_(judge), prompts_(prompts), options_(options) {}

PatternChecklist ChecklistBuilder::build(const Pattern& pattern,
                                         const std::vector<Conversation>& samples,
                                         const std::set<std::string>& known_names) const {
  PatternChecklist out;
  out.pattern_id = pattern.id;

  // Step 1: candidate generation from the pattern structure.
  ChatRequest gen;
  gen.system = prompts_.raw("checklist_generate.system");
  gen.user = prompts_.render("checklist_generate.user",
                             {{"pattern_name", pattern.name},
                              {"definition", pattern.definition},
                              {"core_mechanisms", pattern.core_mechanisms},
                              {"manifestations", pattern.manifestations},
                              {"item_count", std::to_string(options_.target_items)}});
  gen.temperature = options_.generate_temperature;
  gen.tag = "checklist_generate:" + pattern.id;
  std::vector<std::string> candidates = parse_numbered_list(provider_.complete(gen).text);
  if (candidates.empty())
    throw ChecklistError("checklist generation produced no items for " + pattern.id);
  for (std::string& c : candidates) c = normalize_item_text(c);
  out.provenance.generated_count = static_cast<int>(candidates.size());

  // Step 2: validate against sample conversations; drop items that are never
  // observed anywhere AND that the judge calls unobservable in dialogue.
  if (samples.empty()) {
    out.degraded = true;
  } else {
    size_t k = std::min<size_t>(samples.size(), static_cast<size_t>(options_.validation_samples));
    std::vector<bool> observed(candidates.size(), false);
    for (size_t s = 0; s < k; ++s) {
      const Conversation& conv = samples[s];
      std::string transcript = serialize_conversation(conv);
      std::string focus = conv.turns.empty() ? "" : conv.turns.back().speaker;
      JudgeCallOptions jopts;
      jopts.chunk_size = options_.chunk_size;
      jopts.tag = "checklist_validate:" + pattern.id;
      auto judgments =
          judge_item_texts(transcript, focus, candidates, judge_, prompts_, jopts);
      for (size_t i = 0; i < candidates.size(); ++i)
        if (!judgments[i].failed && judgments[i].score != 0) observed[i] = true;
    }
    std::vector<size_t> never_observed;
    for (size_t i = 0; i < candidates.size(); ++i)
      if (!observed[i]) never_observed.push_back(i);

    if (!never_observed.empty()) {
      std::vector<std::string> texts;
      for (size_t i : never_observed) texts.push_back(candidates[i]);
      std::string listing;
      for (size_t i = 0; i < texts.size(); ++i)
        listing += std::to_string(i + 1) + ". " + texts[i] + "\n";
      ChatRequest obs;
      obs.system = prompts_.raw("judge.system");
      obs.user = prompts_.render("checklist_observability.user",
                                 {{"sample_count", std::to_string(k)}, {"items", trim(listing)}});
      obs.temperature = 0.0;
      obs.tag = "checklist_observability:" + pattern.id;
      Json verdict = Json::parse(judge_.complete(obs).text, nullptr, false);
      std::set<size_t> to_drop;
      if (!verdict.is_discarded() && verdict.is_object() && verdict.contains("results") &&
          verdict["results"].is_array() && verdict["results"].size() == texts.size()) {
        for (size_t i = 0; i < texts.size(); ++i) {
          const Json& entry = verdict["results"][i];
          if (entry.is_object() && entry.value("observable", true) == false)
            to_drop.insert(never_observed[i]);
        }
      }
      if (!to_drop.empty()) {
        std::vector<std::string> kept;
        for (size_t i = 0; i < candidates.size(); ++i)
          if (!to_drop.count(i)) kept.push_back(candidates[i]);
        out.provenance.removed_count += static_cast<int>(to_drop.size());
        candidates = std::move(kept);
      }
    }
  }

  // Step 3: generalize items that leak character names; drop incorrigible ones.
  std::vector<size_t> flagged;
  for (size_t i = 0; i < candidates.size(); ++i)
    if (find_known_name(candidates[i], known_names)) flagged.push_back(i);
  if (!flagged.empty()) {
    std::string listing;
    for (size_t i = 0; i < flagged.size(); ++i)
      listing += std::to_string(i + 1) + ". " + candidates[flagged[i]] + "\n";
    ChatRequest gener;
    gener.system = prompts_.raw("checklist_generate.system");
    gener.user = prompts_.render("checklist_generalize.user", {{"items", trim(listing)}});
    gener.temperature = 0.0;
    gener.tag = "checklist_generalize:" + pattern.id;
    std::vector<std::string> rewritten = parse_numbered_list(provider_.complete(gener).text);

    std::set<size_t> to_drop;
    for (size_t i = 0; i < flagged.size(); ++i) {
      std::string replacement =
          i < rewritten.size() ? normalize_item_text(rewritten[i]) : std::string();
      if (!replacement.empty() && !find_known_name(replacement, known_names)) {
        candidates[flagged[i]] = replacement;
        out.provenance.generalized_count += 1;
      } else {
        to_drop.insert(flagged[i]);
      }
    }
    if (!to_drop.empty()) {
      std::vector<std::string> kept;
      for (size_t i = 0; i < candidates.size(); ++i)
        if (!to_drop.count(i)) kept.push_back(candidates[i]);
      out.provenance.removed_count += static_cast<int>(to_drop.size());
      candidates = std::move(kept);
    }
  }

  if (candidates.empty())
    throw ChecklistError("no checklist items survived refinement for " + pattern.id);
  if (candidates.size() > static_cast<size_t>(options_.target_items)) {
    out.provenance.removed_count +=
        static_cast<int>(candidates.size()) - options_.target_items;
    candidates.resize(static_cast<size_t>(options_.target_items));
  }
  out.short_count = candidates.size() < static_cast<size_t>(options_.min_items);

  for (size_t i = 0; i < candidates.size(); ++i) {
    ChecklistItem item;
    item.id = checklist_item_id(pattern.id, i + 1);
    item.text = candidates[i];
    item.level = ChecklistLevel::Pattern;
    item.pattern_id = pattern.id;
    out.items.push_back(std::move(item));
  }
  return out;
}

std::vector<ChecklistItem> extract_scenario_checklist(const Scenario& scenario) {
  std::vector<ChecklistItem> out;
  for (const CharacterProfile& c : scenario.characters) {
    if (c.assigned_patterns.empty()) continue;
    auto it = scenario.tendencies.find(c.name);
    if (it == scenario.tendencies.end() || it->second.empty())
      throw ChecklistError("scenario " + scenario.id + ": pattern bearer " + c.name +
                           " has no tendencies");
    for (size_t i = 0; i < it->second.size(); ++i) {
      ChecklistItem item;
      item.id = checklist_item_id(scenario.id + "-" + slugify(c.name), i + 1);
      item.text = it->second[i];
      item.level = ChecklistLevel::Scenario;
      item.scenario_id = scenario.id;
      item.character = c.name;
      out.push_back(std::move(item));
    }
  }
  return out;
}

}  // namespace forge
