#include "forge/pipeline.hpp"

#include <atomic>
#include <filesystem>
#include <iostream>
#include <thread>

#include "forge/util.hpp"

namespace forge {

void parallel_for(size_t n, int parallelism, const std::function<void(size_t)>& fn) {
  if (n == 0) return;
  size_t workers = std::min<size_t>(static_cast<size_t>(std::max(parallelism, 1)), n);
  if (workers == 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        while (true) {
          size_t i = next.fetch_add(1);
          if (i >= n) return;
          fn(i);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<std::vector<std::string>> read_combos(const std::string& path) {
  std::vector<std::vector<std::string>> out;
  for (const std::string& line : split_lines(read_file(path))) {
    std::string t = trim(line);
    if (t.empty()) continue;
    Json j = Json::parse(t, nullptr, false);
    if (j.is_discarded()) throw PipelineError("combos file has a non-JSON line: " + t);
    std::vector<std::string> combo;
    if (j.is_array())
      combo = j.get<std::vector<std::string>>();
    else if (j.is_object() && j.contains("patterns"))
      combo = j.at("patterns").get<std::vector<std::string>>();
    else
      throw PipelineError("combos line must be an array or {\"patterns\": [...]}: " + t);
    std::sort(combo.begin(), combo.end());
    out.push_back(std::move(combo));
  }
  return out;
}

Pipeline::Pipeline(PipelineConfig config)
    : config_(std::move(config)), prompts_(PromptLibrary::load(config_.paths.prompts)) {
  config_.validate();
  config_hash_ = config_hash(config_, prompts_);
}

void Pipeline::set_transport(const std::string& role, std::shared_ptr<ChatTransport> transport) {
  transport_overrides_[role] = std::move(transport);
  gateways_.erase(role);
}

Gateway& Pipeline::gateway(const std::string& role) {
  auto it = gateways_.find(role);
  if (it != gateways_.end()) return *it->second;
  LLMProviderHandle handle = config_.handle_for_role(role);
  std::shared_ptr<ChatTransport> transport;
  if (auto ov = transport_overrides_.find(role); ov != transport_overrides_.end())
    transport = ov->second;
  auto gw = std::make_unique<Gateway>(handle, transport);
  if (!config_.paths.cache.empty()) gw->enable_cache(config_.paths.cache);
  return *gateways_.emplace(role, std::move(gw)).first->second;
}

std::string Pipeline::store_path(const std::string& name) const {
  return (std::filesystem::path(config_.paths.out) / name).string();
}

RunManifest Pipeline::begin_manifest(const std::string& stage,
                                     const std::vector<std::string>& inputs) {
  RunManifest m;
  m.stage = stage;
  m.config_hash = config_hash_;
  m.seed = config_.seed;
  m.started = iso8601_now();
  m.run_id = stage + "-" + short_hash(config_hash_ + m.started + std::to_string(config_.seed));
  for (const std::string& in : inputs)
    if (!in.empty()) m.input_versions[in] = store_version(in);
  return m;
}

void Pipeline::finish_manifest(RunManifest& m) {
  m.finished = iso8601_now();
  store_append(store_path("manifests.jsonl"), manifest_to_json(m));
}

void Pipeline::quarantine(const std::string& stage, const std::string& reason,
                          const std::string& raw_text) {
  store_append(store_path("quarantine.jsonl"),
               Json{{"stage", stage}, {"reason", reason}, {"raw_text", raw_text}});
}

NamePool Pipeline::load_name_pool() const {
  if (config_.paths.names.empty()) throw PipelineError("config paths.names is required");
  return NamePool::load(config_.paths.names);
}

Registry Pipeline::load_registry_store() const {
  Registry r;
  std::vector<Pattern> patterns;
  for (const Json& j : store_scan(store_path("patterns.jsonl")))
    patterns.push_back(pattern_from_json(j));
  return Registry::from_patterns(std::move(patterns));
}

std::vector<Scenario> Pipeline::load_scenarios() const {
  std::vector<Scenario> out;
  for (const Json& j : store_scan(store_path("scenarios.jsonl"))) {
    Scenario s = scenario_from_json(j);
    validate_scenario(s);  // re-checked at read time
    out.push_back(std::move(s));
  }
  return out;
}

std::map<std::string, Conversation> Pipeline::load_conversations() const {
  std::map<std::string, Conversation> out;
  for (const Json& j : store_scan(store_path("conversations.jsonl"))) {
    Conversation c = conversation_from_json(j);
    out[c.scenario_id] = std::move(c);
  }
  return out;
}

std::map<std::string, PatternChecklist> Pipeline::load_pattern_checklists() const {
  std::map<std::string, PatternChecklist> out;
  for (const Json& j : store_scan(store_path("checklists.jsonl"))) {
    if (j.value("level", "") != "pattern") continue;
    PatternChecklist c = pattern_checklist_from_json(j);
    out[c.pattern_id] = std::move(c);
  }
  return out;
}

std::map<std::string, std::vector<ChecklistItem>> Pipeline::load_scenario_checklists() const {
  std::map<std::string, std::vector<ChecklistItem>> out;
  for (const Json& j : store_scan(store_path("checklists.jsonl"))) {
    if (j.value("level", "") != "scenario") continue;
    std::string key = j.at("scenario_id").get<std::string>() + ":" +
                      j.at("character").get<std::string>();
    std::vector<ChecklistItem> items;
    for (const Json& item : j.at("items")) items.push_back(checklist_item_from_json(item));
    out[key] = std::move(items);
  }
  return out;
}

std::map<std::string, Split> Pipeline::load_splits() const {
  std::map<std::string, Split> out;
  std::string path = store_path("splits.csv");
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return out;
  for (const SplitAssignment& a : parse_split_manifest_csv(read_file(path)))
    out[a.scenario_id] = a.split;
  return out;
}

// --- stages -------------------------------------------------------------------

RunManifest Pipeline::synth_patterns() {
  RunManifest m = begin_manifest("patterns", {config_.paths.combos, config_.paths.corpus});
  if (config_.paths.combos.empty()) throw PipelineError("config paths.combos is required");
  if (config_.paths.corpus.empty()) throw PipelineError("config paths.corpus is required");

  std::set<std::string> wanted;
  for (const auto& combo : read_combos(config_.paths.combos))
    for (const auto& id : combo) wanted.insert(id);

  std::map<std::string, TaxonomyEntry> taxonomy;
  for (const TaxonomyEntry& e : builtin_taxonomy()) taxonomy[e.id] = e;
  for (const std::string& id : wanted)
    if (!taxonomy.count(id)) throw PipelineError("combo pattern not in taxonomy: " + id);

  std::set<std::string> have;
  std::error_code ec;
  if (std::filesystem::exists(store_path("patterns.jsonl"), ec))
    for (const Json& j : store_scan(store_path("patterns.jsonl")))
      have.insert(j.at("id").get<std::string>());

  std::vector<CorpusDoc> corpus;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(config_.paths.corpus))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) corpus.push_back({f.filename().string(), read_file(f.string())});
  if (corpus.empty()) throw PipelineError("corpus directory is empty: " + config_.paths.corpus);

  std::vector<std::string> todo;
  for (const std::string& id : wanted)
    if (!have.count(id)) todo.push_back(id);

  Gateway& gw = gateway("synthesis");
  std::vector<std::optional<SynthesizedPattern>> results(todo.size());
  std::vector<std::string> failures(todo.size());
  parallel_for(todo.size(), config_.parallelism, [&](size_t i) {
    const TaxonomyEntry& e = taxonomy.at(todo[i]);
    try {
      results[i] = synthesize_pattern(e.name, e.kind, corpus, gw, prompts_,
                                      config_.synthesis_temperature);
    } catch (const SynthError& ex) {
      failures[i] = ex.what();  // provider failures propagate and fail the stage
    }
  });

  int64_t written = 0, incomplete = 0;
  for (size_t i = 0; i < todo.size(); ++i) {
    if (!results[i]) {
      quarantine("patterns", failures[i], todo[i]);
      continue;
    }
    if (results[i]->incomplete) {
      ++incomplete;
      quarantine("patterns", "incomplete sections", todo[i]);
      continue;
    }
    store_append(store_path("patterns.jsonl"), pattern_to_json(results[i]->pattern));
    ++written;
  }
  m.output_counts["patterns_new"] = written;
  m.output_counts["patterns_existing"] = static_cast<int64_t>(have.size());
  m.output_counts["patterns_incomplete"] = incomplete;
  m.quarantine_count = static_cast<int64_t>(todo.size()) - written;
  finish_manifest(m);
  return m;
}

RunManifest Pipeline::synth_scenarios() {
  RunManifest m = begin_manifest(
      "scenarios",
      {config_.paths.combos, config_.paths.names, store_path("patterns.jsonl")});
  if (config_.paths.combos.empty()) throw PipelineError("config paths.combos is required");

  Registry registry = load_registry_store();
  NamePool pool = load_name_pool();
  auto combos = read_combos(config_.paths.combos);

  std::set<std::string> have;
  for (const Json& j : store_scan(store_path("scenarios.jsonl")))
    have.insert(j.at("id").get<std::string>());

  ComboValidator validator(registry, gateway("validation"), prompts_);
  SynthesisOptions options;
  options.temperature = config_.synthesis_temperature;
  options.situations = config_.situations;
  ScenarioSynthesizer synth(registry, gateway("synthesis"), prompts_, options);

  // plan all variants first (cheap, deterministic), then generate the missing
  struct Item {
    VariantSpec spec;
    NameSample names;
  };
  std::vector<Item> todo;
  int64_t incompatible = 0;
  for (const auto& combo : combos) {
    CompatibilityVerdict verdict = validator.validate(combo);
    if (!verdict.compatible) {
      quarantine("combo_validation", verdict.reason, join(combo, "+"));
      ++incompatible;
      continue;
    }
    Rng rng(derive_seed(config_.seed, "variants:" + join(combo, "+")));
    for (VariantSpec& spec : plan_variants(combo, rng)) {
      if (have.count(spec.id)) continue;
      NameSample names = sample_names(pool, spec.name_seed);
      todo.push_back(Item{std::move(spec), std::move(names)});
    }
  }

  std::vector<std::optional<Scenario>> results(todo.size());
  std::vector<std::pair<std::string, std::string>> rejects(todo.size());
  parallel_for(todo.size(), config_.parallelism, [&](size_t i) {
    try {
      results[i] = synth.generate(todo[i].spec, todo[i].names);
    } catch (const SynthesisRejection& r) {
      rejects[i] = {r.reason(), r.raw_text()};
    }
  });

  int64_t written = 0;
  for (size_t i = 0; i < todo.size(); ++i) {
    if (results[i]) {
      validate_scenario(*results[i]);  // checked at write time
      store_append(store_path("scenarios.jsonl"), scenario_to_json(*results[i]));
      ++written;
    } else {
      quarantine("scenario", rejects[i].first, rejects[i].second);
    }
  }
  m.output_counts["scenarios_new"] = written;
  m.output_counts["scenarios_existing"] = static_cast<int64_t>(have.size());
  m.output_counts["combos_incompatible"] = incompatible;
  m.quarantine_count = static_cast<int64_t>(todo.size()) - written + incompatible;
  finish_manifest(m);
  return m;
}

RunManifest Pipeline::synth_conversations() {
  RunManifest m = begin_manifest("conversations",
                                 {store_path("scenarios.jsonl"), store_path("patterns.jsonl")});
  Registry registry = load_registry_store();
  std::vector<Scenario> scenarios = load_scenarios();
  auto have = load_conversations();

  SynthesisOptions options;
  options.temperature = config_.synthesis_temperature;
  ConversationSynthesizer synth(registry, gateway("synthesis"), prompts_, options);

  std::vector<const Scenario*> todo;
  for (const Scenario& s : scenarios)
    if (!have.count(s.id)) todo.push_back(&s);

  std::vector<std::optional<Conversation>> results(todo.size());
  std::vector<std::pair<std::string, std::string>> rejects(todo.size());
  parallel_for(todo.size(), config_.parallelism, [&](size_t i) {
    try {
      results[i] = synth.generate(*todo[i]);
    } catch (const SynthesisRejection& r) {
      rejects[i] = {r.reason(), r.raw_text()};
    }
  });

  int64_t written = 0;
  for (size_t i = 0; i < todo.size(); ++i) {
    if (results[i]) {
      store_append(store_path("conversations.jsonl"), conversation_to_json(*results[i]));
      ++written;
    } else {
      quarantine("conversation", rejects[i].first, rejects[i].second);
    }
  }
  m.output_counts["conversations_new"] = written;
  m.output_counts["conversations_existing"] = static_cast<int64_t>(have.size());
  m.quarantine_count = static_cast<int64_t>(todo.size()) - written;
  finish_manifest(m);
  return m;
}

RunManifest Pipeline::build_checklists() {
  RunManifest m = begin_manifest(
      "checklists", {store_path("patterns.jsonl"), store_path("conversations.jsonl")});
  Registry registry = load_registry_store();
  std::vector<Scenario> scenarios = load_scenarios();
  auto conversations = load_conversations();
  auto have = load_pattern_checklists();

  std::set<std::string> wanted;
  for (const Scenario& s : scenarios)
    for (const std::string& id : s.combo) wanted.insert(id);

  std::set<std::string> known_names;
  for (const Scenario& s : scenarios)
    for (const auto& name : s.character_names()) known_names.insert(name);

  // per-pattern samples: conversations whose scenario carries the pattern
  std::map<std::string, std::vector<Conversation>> samples;
  ChecklistBuildOptions opts;
  opts.chunk_size = config_.chunk_size;
  opts.generate_temperature = config_.synthesis_temperature;
  for (const Scenario& s : scenarios) {
    auto it = conversations.find(s.id);
    if (it == conversations.end()) continue;
    for (const std::string& id : s.combo) {
      auto& vec = samples[id];
      if (vec.size() < static_cast<size_t>(opts.validation_samples)) vec.push_back(it->second);
    }
  }

  std::vector<std::string> todo;
  for (const std::string& id : wanted)
    if (!have.count(id)) todo.push_back(id);

  ChecklistBuilder builder(gateway("synthesis"), gateway("judge"), prompts_, opts);
  std::vector<std::optional<PatternChecklist>> results(todo.size());
  std::vector<std::string> failures(todo.size());
  parallel_for(todo.size(), config_.parallelism, [&](size_t i) {
    try {
      auto sample_it = samples.find(todo[i]);
      results[i] = builder.build(registry.at(todo[i]),
                                 sample_it == samples.end() ? std::vector<Conversation>{}
                                                            : sample_it->second,
                                 known_names);
    } catch (const ChecklistError& ex) {
      failures[i] = ex.what();  // provider failures propagate and fail the stage
    }
  });

  int64_t written = 0;
  for (size_t i = 0; i < todo.size(); ++i) {
    if (results[i]) {
      store_append(store_path("checklists.jsonl"), pattern_checklist_to_json(*results[i]));
      ++written;
    } else {
      quarantine("checklist", failures[i], todo[i]);
    }
  }
  m.output_counts["pattern_checklists_new"] = written;
  m.output_counts["pattern_checklists_existing"] = static_cast<int64_t>(have.size());
  m.quarantine_count = static_cast<int64_t>(todo.size()) - written;
  finish_manifest(m);
  return m;
}

RunManifest Pipeline::extract_checklists() {
  RunManifest m = begin_manifest("extract", {store_path("scenarios.jsonl")});
  std::vector<Scenario> scenarios = load_scenarios();
  auto have = load_scenario_checklists();

  int64_t written = 0;
  for (const Scenario& s : scenarios) {
    auto items = extract_scenario_checklist(s);
    std::map<std::string, std::vector<ChecklistItem>> by_character;
    for (ChecklistItem& item : items) by_character[item.character].push_back(std::move(item));
    for (auto& [character, char_items] : by_character) {
      if (have.count(s.id + ":" + character)) continue;
      Json arr = Json::array();
      for (const ChecklistItem& item : char_items) arr.push_back(checklist_item_to_json(item));
      store_append(store_path("checklists.jsonl"), Json{{"level", "scenario"},
                                                        {"scenario_id", s.id},
                                                        {"character", character},
                                                        {"items", arr}});
      ++written;
    }
  }
  m.output_counts["scenario_checklists_new"] = written;
  m.output_counts["scenario_checklists_existing"] = static_cast<int64_t>(have.size());
  finish_manifest(m);
  return m;
}

RunManifest Pipeline::split_stage() {
  RunManifest m = begin_manifest("split",
                                 {store_path("scenarios.jsonl"), store_path("patterns.jsonl")});
  Registry registry = load_registry_store();
  std::vector<Scenario> scenarios = load_scenarios();

  std::map<std::string, int64_t> freq;
  for (const Scenario& s : scenarios)
    for (const std::string& id : s.combo) freq[id] += 1;

  OodSet ood = select_ood_patterns(registry, freq);
  auto assignments = split_scenarios(scenarios, ood.all(), config_.id_eval_size, config_.seed);
  write_file(store_path("splits.csv"), split_manifest_csv(assignments));
  write_file(store_path("ood_patterns.json"),
             Json{{"social", ood.social}, {"traits", ood.traits}}.dump(2) + "\n");

  for (const SplitAssignment& a : assignments)
    m.output_counts[split_name(a.split)] += 1;
  finish_manifest(m);
  return m;
}

RunManifest Pipeline::export_stage() {
  RunManifest m = begin_manifest("export", {store_path("scenarios.jsonl"),
                                            store_path("conversations.jsonl"),
                                            store_path("splits.csv")});
  std::vector<Scenario> scenarios = load_scenarios();
  auto conversations = load_conversations();
  auto splits = load_splits();
  if (splits.empty()) throw PipelineError("run the split stage before export");

  std::vector<Scenario> train;
  for (Scenario& s : scenarios) {
    auto it = splits.find(s.id);
    if (it != splits.end() && it->second == Split::Train) train.push_back(std::move(s));
  }

  std::vector<ExportSkip> skips;
  std::vector<SftSample> samples = export_sft(train, conversations, prompts_, &skips);
  std::filesystem::remove(store_path("sft_humanllm.jsonl"));
  std::vector<Json> rows;
  rows.reserve(samples.size());
  for (const SftSample& s : samples) rows.push_back(sft_to_sharegpt(s));
  store_append(store_path("sft_humanllm.jsonl"), rows);
  for (const ExportSkip& skip : skips)
    quarantine("export", skip.reason, skip.scenario_id + ":" + skip.character);

  m.output_counts["sft_samples"] = static_cast<int64_t>(samples.size());
  m.output_counts["train_scenarios"] = static_cast<int64_t>(train.size());
  m.quarantine_count = static_cast<int64_t>(skips.size());
  finish_manifest(m);
  return m;
}

RunManifest Pipeline::mixture_stage() {
  RunManifest m = begin_manifest("mixture", {store_path("sft_humanllm.jsonl"),
                                             config_.paths.general_sft,
                                             config_.paths.roleplay_sft});
  std::array<std::vector<std::string>, 3> pools;
  std::map<std::string, Json> by_id;

  for (const Json& j : store_scan(store_path("sft_humanllm.jsonl"))) {
    SftSample s = sft_from_sharegpt(j);
    pools[0].push_back(s.sample_id());
    by_id["humanllm:" + s.sample_id()] = j;
  }
  auto load_external = [&](const std::string& path, const std::string& source, size_t bucket) {
    if (path.empty()) return;
    size_t index = 0;
    for (const std::string& line : split_lines(read_file(path))) {
      std::string t = trim(line);
      if (t.empty()) continue;
      Json j = Json::parse(t, nullptr, false);
      if (j.is_discarded()) throw PipelineError("bad JSONL line in " + path);
      SftSample s = sft_from_external(j, source, index);
      std::string id = source + "-" + std::to_string(index);
      pools[bucket].push_back(id);
      by_id[source + ":" + id] = sft_to_sharegpt(s);
      ++index;
    }
  };
  load_external(config_.paths.general_sft, "general", 1);
  load_external(config_.paths.roleplay_sft, "roleplay", 2);

  MixtureSpec spec;
  auto manifest = build_mixture(pools, config_.mixture_ratio, config_.seed, &spec);

  std::string csv = "source,sample_id\n";
  std::filesystem::remove(store_path("mixture.jsonl"));
  std::vector<Json> rows;
  for (const MixtureEntry& e : manifest) {
    csv += e.source + "," + e.sample_id + "\n";
    rows.push_back(by_id.at(e.source + ":" + e.sample_id));
  }
  write_file(store_path("mixture.csv"), csv);
  store_append(store_path("mixture.jsonl"), rows);

  m.output_counts["humanllm"] = static_cast<int64_t>(spec.resolved[0]);
  m.output_counts["general"] = static_cast<int64_t>(spec.resolved[1]);
  m.output_counts["roleplay"] = static_cast<int64_t>(spec.resolved[2]);
  m.output_counts["total"] = static_cast<int64_t>(spec.total());
  finish_manifest(m);
  return m;
}

RunManifest Pipeline::stats_stage() {
  RunManifest m = begin_manifest("stats", {store_path("scenarios.jsonl"),
                                           store_path("conversations.jsonl")});
  std::vector<Scenario> scenarios = load_scenarios();
  std::vector<Conversation> conversations;
  for (auto& [id, c] : load_conversations()) conversations.push_back(std::move(c));
  StatReport report = corpus_stats(scenarios, conversations);
  write_file(store_path("stats.json"), stat_report_to_json(report).dump(2) + "\n");
  write_file(store_path("stats_hist.csv"), histogram_csv(report));
  m.output_counts["scenarios"] = static_cast<int64_t>(report.scenario_count);
  m.output_counts["conversations"] = static_cast<int64_t>(report.conversation_count);
  finish_manifest(m);
  return m;
}

RunManifest Pipeline::eval_stage(const std::string& split, EvalMode mode) {
  RunManifest m = begin_manifest(
      "eval", {store_path("scenarios.jsonl"), store_path("conversations.jsonl"),
               store_path("checklists.jsonl"), store_path("splits.csv")});
  std::vector<Scenario> scenarios = load_scenarios();
  auto conversations = load_conversations();
  auto pattern_checklists = load_pattern_checklists();
  auto scenario_checklists = load_scenario_checklists();
  auto splits = load_splits();
  if (splits.empty()) throw PipelineError("run the split stage before eval");
  Split wanted = split_from_name(split);

  std::set<std::string> have;
  std::error_code ec;
  if (std::filesystem::exists(store_path("eval_results.jsonl"), ec))
    for (const Json& j : store_scan(store_path("eval_results.jsonl")))
      have.insert(j.at("sample_id").get<std::string>());

  TranscriptOptions topts;
  topts.selfplay_turns = config_.selfplay_turns;
  topts.temperature = config_.synthesis_temperature;
  Gateway* simulator = mode == EvalMode::Selfplay ? &gateway("simulator") : nullptr;
  TranscriptGenerator gen(gateway("model"), simulator, prompts_, topts);

  struct Task {
    const Scenario* scenario;
    std::string target;
    std::string sample_id;
  };
  std::vector<Task> todo;
  int64_t skipped = 0;
  for (const Scenario& s : scenarios) {
    auto split_it = splits.find(s.id);
    if (split_it == splits.end() || split_it->second != wanted) continue;
    std::string target = s.protagonist().name;
    std::string sample_id = s.id + ":" + target;
    if (have.count(sample_id)) continue;
    if (mode == EvalMode::Replay && !conversations.count(s.id)) {
      quarantine("eval", "no gold conversation for replay", s.id);
      ++skipped;
      continue;
    }
    todo.push_back(Task{&s, target, sample_id});
  }

  std::vector<std::optional<EvalRecord>> results(todo.size());
  std::vector<std::string> failures(todo.size());
  parallel_for(todo.size(), config_.parallelism, [&](size_t i) {
    const Task& task = todo[i];
    const Scenario& s = *task.scenario;
    try {
      TranscriptResult transcript =
          mode == EvalMode::Replay ? gen.replay(s, conversations.at(s.id), task.target)
                                   : gen.selfplay(s, task.target);

      std::vector<ChecklistItem> pattern_items;
      const CharacterProfile* profile = s.find_character(task.target);
      for (const std::string& pid : profile->assigned_patterns) {
        auto it = pattern_checklists.find(pid);
        if (it == pattern_checklists.end())
          throw PipelineError("no pattern checklist for " + pid);
        for (const ChecklistItem& item : it->second.items) pattern_items.push_back(item);
      }
      std::vector<ChecklistItem> scenario_items;
      if (auto it = scenario_checklists.find(s.id + ":" + task.target);
          it != scenario_checklists.end())
        scenario_items = it->second;

      EvalRecord record;
      record.sample_id = task.sample_id;
      record.split = split_name(wanted);
      if (!pattern_items.empty())
        record.pattern_items =
            judge_checklist(transcript.conversation, task.target, pattern_items,
                            gateway("judge"), prompts_, config_.chunk_size,
                            config_.judge_repeats, "judge:" + task.sample_id);
      if (!scenario_items.empty())
        record.scenario_items =
            judge_checklist(transcript.conversation, task.target, scenario_items,
                            gateway("judge"), prompts_, config_.chunk_size,
                            config_.judge_repeats, "judge:" + task.sample_id);
      record.scores = compute_scores(record.pattern_items, record.scenario_items);
      results[i] = std::move(record);
    } catch (const GatewayError&) {
      throw;  // provider exhaustion fails the stage
    } catch (const std::exception& ex) {
      failures[i] = ex.what();
    }
  });

  int64_t written = 0;
  std::vector<EvalRecord> all_records;
  for (size_t i = 0; i < todo.size(); ++i) {
    if (results[i]) {
      store_append(store_path("eval_results.jsonl"), eval_record_to_json(*results[i]));
      ++written;
    } else {
      quarantine("eval", failures[i], todo[i].sample_id);
    }
  }
  for (const Json& j : store_scan(store_path("eval_results.jsonl")))
    all_records.push_back(eval_record_from_json(j));
  RunReport report = aggregate_run(all_records);
  write_file(store_path("eval_report.json"), run_report_to_json(report).dump(2) + "\n");

  m.output_counts["eval_new"] = written;
  m.output_counts["eval_existing"] = static_cast<int64_t>(have.size());
  m.quarantine_count = static_cast<int64_t>(todo.size()) - written + skipped;
  finish_manifest(m);
  return m;
}

RunManifest Pipeline::run_stage(const std::string& stage_name) {
  if (stage_name == "patterns") return synth_patterns();
  if (stage_name == "scenarios") return synth_scenarios();
  if (stage_name == "conversations") return synth_conversations();
  if (stage_name == "checklists") return build_checklists();
  if (stage_name == "extract") return extract_checklists();
  if (stage_name == "split") return split_stage();
  if (stage_name == "export") return export_stage();
  if (stage_name == "mixture") return mixture_stage();
  if (stage_name == "stats") return stats_stage();
  throw PipelineError("unknown stage: " + stage_name);
}

}  // namespace forge
