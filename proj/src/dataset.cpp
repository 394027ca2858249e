#include "forge/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "forge/synthesis.hpp"
#include "forge/util.hpp"

namespace forge {

std::string split_name(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::IdEval: return "id_eval";
    case Split::OodEval: return "ood_eval";
    case Split::MixedEval: return "mixed_eval";
  }
  return "train";
}

Split split_from_name(const std::string& s) {
  if (s == "train") return Split::Train;
  if (s == "id_eval") return Split::IdEval;
  if (s == "ood_eval") return Split::OodEval;
  if (s == "mixed_eval") return Split::MixedEval;
  throw DatasetError("unknown split: " + s);
}

std::set<std::string> OodSet::all() const {
  std::set<std::string> out(social.begin(), social.end());
  out.insert(traits.begin(), traits.end());
  return out;
}

namespace {

int64_t freq_of(const std::map<std::string, int64_t>& freq, const std::string& id) {
  auto it = freq.find(id);
  return it == freq.end() ? 0 : it->second;
}

}  // namespace

OodSet select_ood_patterns(const Registry& registry,
                           const std::map<std::string, int64_t>& train_frequency) {
  OodSet out;

  // Social-cognitive: sort by (frequency, id); zero-frequency naturally first.
  std::vector<std::pair<int64_t, std::string>> socials;
  for (const Pattern* p : registry.socials()) socials.emplace_back(freq_of(train_frequency, p->id), p->id);
  std::sort(socials.begin(), socials.end());
  if (socials.size() < 4)
    throw DatasetError("registry has fewer than 4 social-cognitive patterns");
  for (size_t i = 0; i < 4; ++i) out.social.push_back(socials[i].second);

  // Traits: least frequent marker per dimension, then keep the 4 lowest.
  std::vector<std::pair<int64_t, std::string>> per_dimension;
  for (TraitDimension d : all_trait_dimensions()) {
    std::vector<std::pair<int64_t, std::string>> cell;
    for (const Pattern* p : registry.by_dimension(d))
      cell.emplace_back(freq_of(train_frequency, p->id), p->id);
    if (cell.empty())
      throw DatasetError("registry lacks dimension " + trait_dimension_name(d));
    std::sort(cell.begin(), cell.end());
    per_dimension.push_back(cell.front());
  }
  std::sort(per_dimension.begin(), per_dimension.end());
  for (size_t i = 0; i < 4 && i < per_dimension.size(); ++i)
    out.traits.push_back(per_dimension[i].second);
  std::sort(out.social.begin(), out.social.end());
  std::sort(out.traits.begin(), out.traits.end());
  return out;
}

std::vector<SplitAssignment> split_scenarios(const std::vector<Scenario>& scenarios,
                                             const std::set<std::string>& ood_patterns,
                                             int id_eval_size, uint64_t seed) {
  std::vector<SplitAssignment> out;
  out.reserve(scenarios.size());
  std::vector<std::string> in_domain_ids;

  for (const Scenario& s : scenarios) {
    size_t ood_hits = 0;
    for (const std::string& p : s.combo)
      if (ood_patterns.count(p)) ++ood_hits;
    if (!ood_patterns.empty() && ood_hits == s.combo.size()) {
      out.push_back({s.id, Split::OodEval});
    } else if (ood_hits > 0) {
      out.push_back({s.id, Split::MixedEval});
    } else {
      in_domain_ids.push_back(s.id);
    }
  }

  if (static_cast<int>(in_domain_ids.size()) < id_eval_size)
    throw DatasetError("in-domain pool (" + std::to_string(in_domain_ids.size()) +
                       ") smaller than id_eval size " + std::to_string(id_eval_size));

  // Seeded, order-independent: sample over the sorted id list.
  std::sort(in_domain_ids.begin(), in_domain_ids.end());
  Rng rng(derive_seed(seed, "id_eval"));
  std::vector<std::string> held = rng.sample(in_domain_ids, static_cast<size_t>(id_eval_size));
  std::set<std::string> held_set(held.begin(), held.end());
  for (const std::string& id : in_domain_ids)
    out.push_back({id, held_set.count(id) ? Split::IdEval : Split::Train});
  return out;
}

std::string split_manifest_csv(const std::vector<SplitAssignment>& assignments) {
  std::string out = "scenario_id,split\n";
  for (const SplitAssignment& a : assignments) out += a.scenario_id + "," + split_name(a.split) + "\n";
  return out;
}

std::vector<SplitAssignment> parse_split_manifest_csv(const std::string& csv) {
  std::vector<SplitAssignment> out;
  auto lines = split_lines(csv);
  for (size_t i = 1; i < lines.size(); ++i) {
    std::string line = trim(lines[i]);
    if (line.empty()) continue;
    auto parts = split(line, ',');
    if (parts.size() != 2) throw DatasetError("bad split manifest line: " + line);
    out.push_back({trim(parts[0]), split_from_name(trim(parts[1]))});
  }
  return out;
}

// --- SFT export -----------------------------------------------------------------

std::string SftSample::sample_id() const {
  if (!scenario_id.empty()) return scenario_id + ":" + character;
  return source + ":" + short_hash(system + "|" + (messages.empty() ? "" : messages[0].content));
}

Json sft_to_sharegpt(const SftSample& s) {
  Json conv = Json::array();
  for (const SftMessage& m : s.messages)
    conv.push_back(Json{{"from", m.role == "assistant" ? "gpt" : "human"}, {"value", m.content}});
  return Json{{"system", s.system},
              {"conversations", conv},
              {"source", s.source},
              {"meta", Json{{"scenario_id", s.scenario_id}, {"character", s.character}}}};
}

SftSample sft_from_sharegpt(const Json& j) {
  SftSample s;
  s.system = j.value("system", "");
  for (const Json& m : j.at("conversations")) {
    std::string from = m.value("from", "human");
    s.messages.push_back(SftMessage{from == "gpt" ? "assistant" : "user", m.value("value", "")});
  }
  s.source = j.value("source", "");
  if (j.contains("meta") && j["meta"].is_object()) {
    s.scenario_id = j["meta"].value("scenario_id", "");
    s.character = j["meta"].value("character", "");
  }
  return s;
}

SftSample sft_from_external(const Json& j, const std::string& source_label, size_t index) {
  SftSample s;
  s.source = source_label;
  s.system = j.value("system", "");
  if (j.contains("conversations") && j["conversations"].is_array()) {
    for (const Json& m : j["conversations"]) {
      std::string from = m.value("from", "human");
      if (from == "system") {
        s.system = m.value("value", "");
        continue;
      }
      s.messages.push_back(
          SftMessage{from == "gpt" || from == "assistant" ? "assistant" : "user",
                     m.value("value", "")});
    }
  } else if (j.contains("messages") && j["messages"].is_array()) {
    for (const Json& m : j["messages"]) {
      std::string role = m.value("role", "user");
      if (role == "system") {
        s.system = m.value("content", "");
        continue;
      }
      s.messages.push_back(SftMessage{role == "assistant" ? "assistant" : "user",
                                      m.value("content", "")});
    }
  } else {
    throw DatasetError("external sample " + std::to_string(index) +
                       " has neither conversations nor messages");
  }
  s.character = std::to_string(index);
  return s;
}

SftSample export_sft_sample(const Scenario& scenario, const Conversation& conversation,
                            const std::string& target, const PromptLibrary& prompts) {
  const CharacterProfile* profile = scenario.find_character(target);
  if (!profile) throw DatasetError("scenario " + scenario.id + " has no character " + target);

  SftSample sample;
  sample.source = "humanllm";
  sample.scenario_id = scenario.id;
  sample.character = target;
  sample.system = prompts.render("roleplay.system",
                                 {{"protagonist_name", target},
                                  {"about_self", profile->about_self},
                                  {"about_others", render_about_others_text(*profile)},
                                  {"story_background", scenario.background}});

  bool target_seen = false;
  std::vector<std::string> pending_user;
  std::vector<std::string> pending_assistant;
  auto flush_user = [&] {
    if (!pending_user.empty()) {
      sample.messages.push_back(SftMessage{"user", join(pending_user, "\n")});
      pending_user.clear();
    }
  };
  auto flush_assistant = [&] {
    if (!pending_assistant.empty()) {
      sample.messages.push_back(SftMessage{"assistant", join(pending_assistant, "\n")});
      pending_assistant.clear();
    }
  };

  for (const Turn& t : conversation.turns) {
    if (t.speaker == target) {
      flush_user();
      pending_assistant.push_back(serialize_segments(t.segments));
      target_seen = true;
    } else {
      flush_assistant();
      pending_user.push_back(serialize_turn(t));
    }
  }
  flush_assistant();
  // a trailing non-target block teaches nothing; drop it
  pending_user.clear();

  if (!target_seen)
    throw DatasetError("character " + target + " has no turns in scenario " + scenario.id);
  return sample;
}

std::vector<SftSample> export_sft(const std::vector<Scenario>& scenarios,
                                  const std::map<std::string, Conversation>& conversations,
                                  const PromptLibrary& prompts, std::vector<ExportSkip>* skips) {
  std::vector<SftSample> out;
  for (const Scenario& s : scenarios) {
    auto conv_it = conversations.find(s.id);
    if (conv_it == conversations.end()) {
      if (skips)
        skips->push_back(ExportSkip{s.id, "", "scenario has no conversation"});
      continue;
    }
    for (const std::string& bearer : s.pattern_bearers()) {
      try {
        out.push_back(export_sft_sample(s, conv_it->second, bearer, prompts));
      } catch (const DatasetError& e) {
        if (skips) skips->push_back(ExportSkip{s.id, bearer, e.what()});
      }
    }
  }
  return out;
}

// --- mixture ---------------------------------------------------------------------

MixtureSpec resolve_mixture(const std::array<size_t, 3>& pool_sizes,
                            const std::array<int64_t, 3>& ratio) {
  for (int64_t r : ratio)
    if (r < 0) throw DatasetError("mixture ratio parts must be >= 0");
  if (ratio[0] <= 0) throw DatasetError("anchor ratio part must be positive");
  MixtureSpec spec;
  spec.ratio = ratio;
  spec.pool_sizes = pool_sizes;
  spec.resolved[0] = pool_sizes[0];
  for (size_t i = 1; i < 3; ++i) {
    double want = static_cast<double>(pool_sizes[0]) * static_cast<double>(ratio[i]) /
                  static_cast<double>(ratio[0]);
    auto count = static_cast<size_t>(std::llround(want));
    if (count > pool_sizes[i])
      throw DatasetError("mixture pool " + std::to_string(i) + " underflow: need " +
                         std::to_string(count) + ", have " + std::to_string(pool_sizes[i]));
    spec.resolved[i] = count;
  }
  return spec;
}

std::vector<MixtureEntry> build_mixture(const std::array<std::vector<std::string>, 3>& pool_ids,
                                        const std::array<int64_t, 3>& ratio, uint64_t seed,
                                        MixtureSpec* spec_out) {
  static const char* kSources[3] = {"humanllm", "general", "roleplay"};
  MixtureSpec spec = resolve_mixture(
      {pool_ids[0].size(), pool_ids[1].size(), pool_ids[2].size()}, ratio);
  if (spec_out) *spec_out = spec;

  std::vector<MixtureEntry> out;
  out.reserve(spec.total());
  for (size_t b = 0; b < 3; ++b) {
    std::vector<std::string> ids = pool_ids[b];
    if (spec.resolved[b] < ids.size()) {
      Rng rng(derive_seed(seed, std::string("mixture:") + kSources[b]));
      ids = rng.sample(ids, spec.resolved[b]);
    }
    for (std::string& id : ids) out.push_back(MixtureEntry{kSources[b], std::move(id)});
  }
  return out;
}

// --- statistics ------------------------------------------------------------------

namespace {

DistributionStat distribution_of(const std::vector<int64_t>& values) {
  DistributionStat d;
  if (values.empty()) return d;
  d.min = values[0];
  d.max = values[0];
  double sum = 0;
  for (int64_t v : values) {
    d.min = std::min(d.min, v);
    d.max = std::max(d.max, v);
    sum += static_cast<double>(v);
    d.histogram[v] += 1;
  }
  d.mean = sum / static_cast<double>(values.size());
  return d;
}

Json distribution_to_json(const DistributionStat& d) {
  Json hist = Json::object();
  for (const auto& [k, v] : d.histogram) hist[std::to_string(k)] = v;
  return Json{{"min", d.min}, {"max", d.max}, {"mean", d.mean}, {"histogram", hist}};
}

}  // namespace

StatReport corpus_stats(const std::vector<Scenario>& scenarios,
                        const std::vector<Conversation>& conversations) {
  StatReport r;
  r.scenario_count = scenarios.size();
  r.conversation_count = conversations.size();
  std::vector<int64_t> patterns, characters, turns, tendencies;
  for (const Scenario& s : scenarios) {
    patterns.push_back(static_cast<int64_t>(s.combo.size()));
    characters.push_back(static_cast<int64_t>(s.characters.size()));
    for (const auto& [name, items] : s.tendencies) {
      (void)name;
      tendencies.push_back(static_cast<int64_t>(items.size()));
      r.pattern_bearing_characters += 1;
    }
  }
  for (const Conversation& c : conversations)
    turns.push_back(static_cast<int64_t>(c.turns.size()));
  r.patterns_per_scenario = distribution_of(patterns);
  r.characters_per_scenario = distribution_of(characters);
  r.turns_per_conversation = distribution_of(turns);
  r.tendencies_per_bearer = distribution_of(tendencies);
  return r;
}

Json stat_report_to_json(const StatReport& r) {
  return Json{{"scenario_count", r.scenario_count},
              {"conversation_count", r.conversation_count},
              {"pattern_bearing_characters", r.pattern_bearing_characters},
              {"patterns_per_scenario", distribution_to_json(r.patterns_per_scenario)},
              {"characters_per_scenario", distribution_to_json(r.characters_per_scenario)},
              {"turns_per_conversation", distribution_to_json(r.turns_per_conversation)},
              {"tendencies_per_bearer", distribution_to_json(r.tendencies_per_bearer)}};
}

std::string histogram_csv(const StatReport& r) {
  std::string out = "metric,value,count\n";
  auto add = [&](const char* metric, const DistributionStat& d) {
    for (const auto& [k, v] : d.histogram)
      out += std::string(metric) + "," + std::to_string(k) + "," + std::to_string(v) + "\n";
  };
  add("patterns_per_scenario", r.patterns_per_scenario);
  add("characters_per_scenario", r.characters_per_scenario);
  add("turns_per_conversation", r.turns_per_conversation);
  add("tendencies_per_bearer", r.tendencies_per_bearer);
  return out;
}

}  // namespace forge
