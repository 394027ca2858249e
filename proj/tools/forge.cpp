// forge: pattern registry, scenario/conversation synthesis, checklist
// construction, dataset splitting and export, and checklist-based evaluation,
// driven by one JSON config with per-stage provider roles.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "forge/pipeline.hpp"
#include "forge/util.hpp"

namespace {

using namespace forge;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitProviderExhausted = 2;

struct GlobalArgs {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<std::string> provider;
  std::optional<int> parallelism;
  bool dry_run = false;
};

PipelineConfig load_config(const GlobalArgs& args) {
  PipelineConfig config = args.config_path.empty() ? PipelineConfig::defaults()
                                                   : PipelineConfig::load(args.config_path);
  if (args.seed) config.seed = *args.seed;
  if (args.parallelism) config.parallelism = *args.parallelism;
  if (args.provider) {
    std::string p = *args.provider;
    config.roles = RoleNames{p, p, p, p, p};
  }
  return config;
}

void print_manifest(const RunManifest& m) {
  std::cout << manifest_to_json(m).dump(2) << "\n";
}

int run_pipeline_stage(const GlobalArgs& args, const std::string& stage) {
  PipelineConfig config = load_config(args);
  if (args.dry_run) {
    config.validate();
    PromptLibrary prompts = PromptLibrary::load(config.paths.prompts);
    std::cout << "dry-run ok: stage '" << stage << "', config hash "
              << config_hash(config, prompts) << ", seed " << config.seed << "\n";
    return kExitOk;
  }
  Pipeline pipeline(std::move(config));
  print_manifest(pipeline.run_stage(stage));
  return kExitOk;
}

std::string prompt_kind_help() {
  return "pattern kind: trait:<Dimension>:<positive|negative> or social:<Category>";
}

PatternKind parse_kind(const std::string& text) {
  auto parts = split(text, ':');
  if (parts.size() == 3 && parts[0] == "trait")
    return PatternKind::trait(trait_dimension_from_name(parts[1]),
                              trait_pole_from_name(parts[2]));
  if (parts.size() == 2 && parts[0] == "social")
    return PatternKind::social(social_category_from_name(parts[1]));
  throw ConfigError("cannot parse kind '" + text + "'; " + prompt_kind_help());
}

int cmd_patterns_load(const std::string& path) {
  Registry registry = Registry::load(path);
  std::cout << registry.counts_summary() << (registry.full() ? " [full taxonomy]" : "") << "\n";
  return kExitOk;
}

int cmd_patterns_taxonomy(const std::string& out_path) {
  Json arr = Json::array();
  for (const TaxonomyEntry& e : builtin_taxonomy()) {
    Json j{{"id", e.id}, {"name", e.name}};
    if (e.kind.is_trait()) {
      j["kind"] = "personality_trait";
      j["dimension"] = trait_dimension_name(e.kind.dimension);
      j["pole"] = trait_pole_name(e.kind.pole);
    } else {
      j["kind"] = "social_cognitive";
      j["category"] = social_category_name(e.kind.category);
    }
    arr.push_back(std::move(j));
  }
  if (out_path.empty()) {
    std::cout << arr.dump(2) << "\n";
  } else {
    write_file(out_path, arr.dump(2) + "\n");
    std::cout << "wrote " << arr.size() << " taxonomy entries to " << out_path << "\n";
  }
  return kExitOk;
}

int cmd_patterns_synth(const GlobalArgs& args, const std::string& name, std::string kind_text,
                       const std::string& corpus_dir) {
  PipelineConfig config = load_config(args);
  config.validate();
  PromptLibrary prompts = PromptLibrary::load(config.paths.prompts);

  PatternKind kind;
  if (kind_text.empty()) {
    std::string id = slugify(name);
    bool found = false;
    for (const TaxonomyEntry& e : builtin_taxonomy())
      if (e.id == id) {
        kind = e.kind;
        found = true;
        break;
      }
    if (!found)
      throw ConfigError("pattern '" + name + "' is not in the built-in taxonomy; pass --kind");
  } else {
    kind = parse_kind(kind_text);
  }

  std::vector<CorpusDoc> corpus;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(corpus_dir))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) corpus.push_back({f.filename().string(), read_file(f.string())});

  Gateway gw(config.handle_for_role("synthesis"));
  if (!config.paths.cache.empty()) gw.enable_cache(config.paths.cache);
  SynthesizedPattern result =
      synthesize_pattern(name, kind, corpus, gw, prompts, config.synthesis_temperature);
  if (result.incomplete)
    std::cerr << "warning: provider response left at least one section empty\n";
  std::cout << pattern_to_json(result.pattern).dump(2) << "\n";
  return kExitOk;
}

int cmd_lint(const std::string& conversations_path, const std::string& scenarios_path) {
  std::map<std::string, Scenario> scenarios;
  if (!scenarios_path.empty())
    for (const Json& j : store_scan(scenarios_path)) {
      Scenario s = scenario_from_json(j);
      scenarios[s.id] = std::move(s);
    }
  size_t clean = 0, dirty = 0;
  for (const Json& j : store_scan(conversations_path)) {
    Conversation c = conversation_from_json(j);
    ValidationReport report;
    if (auto it = scenarios.find(c.scenario_id); it != scenarios.end()) {
      report = validate_conversation(c, it->second.rules());
    } else {
      ConversationRules rules;
      rules.protagonist = c.turns.empty() ? "" : c.turns.back().speaker;
      for (const Turn& t : c.turns) rules.characters.insert(t.speaker);
      report = validate_conversation(c, rules);
    }
    if (report.clean()) {
      ++clean;
    } else {
      ++dirty;
      std::cout << c.scenario_id << ": " << report.summary() << "\n";
    }
  }
  std::cout << clean << " clean, " << dirty << " with violations\n";
  return dirty == 0 ? kExitOk : kExitValidation;
}

int cmd_eval_run(const GlobalArgs& args, const std::string& split, const std::string& mode,
                 const std::string& model_name) {
  PipelineConfig config = load_config(args);
  if (!model_name.empty()) config.roles.model = model_name;
  if (args.dry_run) {
    config.validate();
    std::cout << "dry-run ok: eval split=" << split << " mode=" << mode << "\n";
    return kExitOk;
  }
  Pipeline pipeline(std::move(config));
  RunManifest m = pipeline.eval_stage(split, eval_mode_from_name(mode));
  print_manifest(m);
  std::cout << run_report_table(aggregate_run([&] {
    std::vector<EvalRecord> records;
    for (const Json& j : store_scan(pipeline.store_path("eval_results.jsonl")))
      records.push_back(eval_record_from_json(j));
    return records;
  }()));
  return kExitOk;
}

int cmd_eval_agreement(const std::string& human_csv, const std::string& judge_csv) {
  auto human = parse_rater_scores_csv(read_file(human_csv));
  auto judge = parse_rater_scores_csv(read_file(judge_csv));
  AgreementReport report = agreement(human, judge);
  std::cout << agreement_report_to_json(report).dump(2) << "\n";
  return kExitOk;
}

int cmd_eval_annotate(const GlobalArgs& args, const std::string& sample_id,
                      const std::string& rater_id, const std::string& out_csv) {
  PipelineConfig config = load_config(args);
  Pipeline pipeline(std::move(config));
  size_t colon = sample_id.find(':');
  if (colon == std::string::npos)
    throw ConfigError("sample id must be <scenario_id>:<character>");
  std::string scenario_id = sample_id.substr(0, colon);
  std::string character = sample_id.substr(colon + 1);

  auto conversations = pipeline.load_conversations();
  auto it = conversations.find(scenario_id);
  if (it == conversations.end())
    throw ConfigError("no conversation in store for scenario " + scenario_id);
  std::vector<Scenario> scenarios = pipeline.load_scenarios();
  const Scenario* scenario = nullptr;
  for (const Scenario& s : scenarios)
    if (s.id == scenario_id) scenario = &s;
  if (!scenario) throw ConfigError("no scenario in store with id " + scenario_id);

  std::cout << "=== transcript (" << scenario_id << ") ===\n"
            << serialize_conversation(it->second) << "\n\n";

  auto read_score = [&](const ChecklistItem& item) {
    while (true) {
      std::cout << "[" << item.id << "] " << item.text << "\n  score (-1/0/1): " << std::flush;
      std::string line;
      if (!std::getline(std::cin, line)) return 0;
      std::string t = trim(line);
      if (t == "-1") return -1;
      if (t == "0" || t.empty()) return 0;
      if (t == "1" || t == "+1") return 1;
      std::cout << "  please answer -1, 0, or 1\n";
    }
  };

  auto pattern_checklists = pipeline.load_pattern_checklists();
  const CharacterProfile* profile = scenario->find_character(character);
  if (!profile) throw ConfigError("scenario has no character " + character);
  double ipe_sum = 0;
  size_t ipe_n = 0;
  for (const std::string& pid : profile->assigned_patterns) {
    auto pc = pattern_checklists.find(pid);
    if (pc == pattern_checklists.end()) continue;
    for (const ChecklistItem& item : pc->second.items) {
      ipe_sum += read_score(item);
      ++ipe_n;
    }
  }
  auto scenario_checklists = pipeline.load_scenario_checklists();
  double mpd_sum = 0;
  size_t mpd_n = 0;
  if (auto sc = scenario_checklists.find(sample_id); sc != scenario_checklists.end()) {
    for (const ChecklistItem& item : sc->second) {
      mpd_sum += read_score(item);
      ++mpd_n;
    }
  }

  std::vector<RaterScore> rows;
  if (ipe_n) rows.push_back({sample_id, rater_id, "IPE", ipe_sum / static_cast<double>(ipe_n)});
  if (mpd_n) rows.push_back({sample_id, rater_id, "MPD", mpd_sum / static_cast<double>(mpd_n)});

  bool exists = std::filesystem::exists(out_csv);
  std::string csv = exists ? read_file(out_csv) : std::string("sample_id,rater_id,metric,score\n");
  for (const RaterScore& r : rows)
    csv += r.sample_id + "," + r.rater_id + "," + r.metric + "," + std::to_string(r.score) + "\n";
  write_file(out_csv, csv);
  std::cout << "wrote " << rows.size() << " rows to " << out_csv << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"forge: psychologically grounded scenario synthesis and evaluation"};
  app.require_subcommand(1);

  GlobalArgs g;
  app.add_option("--config", g.config_path, "pipeline config JSON");
  std::optional<uint64_t> seed_opt;
  app.add_option("--seed", seed_opt, "override config seed");
  std::optional<std::string> provider_opt;
  app.add_option("--provider", provider_opt, "override every provider role");
  std::optional<int> parallelism_opt;
  app.add_option("--parallelism", parallelism_opt, "override config parallelism");
  app.add_flag("--dry-run", g.dry_run, "validate config and plan without provider calls");

  // patterns
  auto* patterns = app.add_subcommand("patterns", "pattern registry operations");
  auto* p_load = patterns->add_subcommand("load", "load and validate a registry");
  std::string p_load_dir;
  p_load->add_option("--dir,--file", p_load_dir, "registry directory or file")->required();
  auto* p_synth = patterns->add_subcommand("synth", "synthesize one pattern from a corpus");
  std::string p_name, p_kind, p_corpus;
  p_synth->add_option("--name", p_name, "pattern display name")->required();
  p_synth->add_option("--kind", p_kind, prompt_kind_help());
  p_synth->add_option("--corpus-dir", p_corpus, "directory of corpus documents")->required();
  auto* p_tax = patterns->add_subcommand("taxonomy", "emit the built-in taxonomy");
  std::string p_tax_out;
  p_tax->add_option("--out", p_tax_out, "output file (stdout if omitted)");
  auto* p_stage = patterns->add_subcommand("build", "synthesize records for combo patterns");

  // synth
  auto* synth = app.add_subcommand("synth", "scenario and conversation synthesis");
  auto* s_scen = synth->add_subcommand("scenarios", "generate scenarios from combos");
  std::string combos_override, names_override;
  s_scen->add_option("--combos", combos_override, "combos JSONL (overrides config)");
  s_scen->add_option("--names", names_override, "name pool JSON (overrides config)");
  auto* s_conv = synth->add_subcommand("conversations", "generate conversations for scenarios");

  // checklists
  auto* checklists = app.add_subcommand("checklists", "dual-level checklist construction");
  auto* c_build = checklists->add_subcommand("build", "pattern-level checklists");
  auto* c_extract = checklists->add_subcommand("extract", "scenario-level checklists");

  // dataset
  auto* split_cmd = app.add_subcommand("split", "select OOD patterns and split scenarios");
  auto* export_cmd = app.add_subcommand("export", "export training data");
  auto* export_sft_cmd = export_cmd->add_subcommand("sft", "ShareGPT-style SFT JSONL");
  auto* mixture_cmd = app.add_subcommand("mixture", "build the training mixture");
  auto* stats_cmd = app.add_subcommand("stats", "corpus statistics");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "checklist evaluation");
  auto* e_run = eval_cmd->add_subcommand("run", "judge a model on a split");
  std::string e_split = "id_eval", e_mode = "replay", e_model;
  e_run->add_option("--split", e_split, "train|id_eval|ood_eval|mixed_eval");
  e_run->add_option("--mode", e_mode, "replay|selfplay");
  e_run->add_option("--model", e_model, "provider name for the model under test");
  auto* e_agree = eval_cmd->add_subcommand("agreement", "human vs judge agreement");
  std::string human_csv, judge_csv;
  e_agree->add_option("--human-csv", human_csv, "human scores CSV")->required();
  e_agree->add_option("--judge-csv", judge_csv, "judge scores CSV")->required();
  auto* e_annotate = eval_cmd->add_subcommand("annotate", "interactive human annotation");
  std::string a_sample, a_rater = "human", a_out = "annotations.csv";
  e_annotate->add_option("--sample", a_sample, "<scenario_id>:<character>")->required();
  e_annotate->add_option("--rater", a_rater, "rater id");
  e_annotate->add_option("--out", a_out, "output CSV (appended)");

  // lint
  auto* lint_cmd = app.add_subcommand("lint", "validate a conversation store");
  std::string lint_conversations, lint_scenarios;
  lint_cmd->add_option("--conversations", lint_conversations, "conversation JSONL")->required();
  lint_cmd->add_option("--scenarios", lint_scenarios, "scenario JSONL for role rules");

  CLI11_PARSE(app, argc, argv);
  g.seed = seed_opt;
  g.provider = provider_opt;
  g.parallelism = parallelism_opt;

  try {
    if (p_load->parsed()) return cmd_patterns_load(p_load_dir);
    if (p_synth->parsed()) return cmd_patterns_synth(g, p_name, p_kind, p_corpus);
    if (p_tax->parsed()) return cmd_patterns_taxonomy(p_tax_out);
    if (p_stage->parsed()) return run_pipeline_stage(g, "patterns");
    if (s_scen->parsed()) {
      if (!combos_override.empty() || !names_override.empty()) {
        PipelineConfig config = load_config(g);
        if (!combos_override.empty()) config.paths.combos = combos_override;
        if (!names_override.empty()) config.paths.names = names_override;
        if (g.dry_run) {
          config.validate();
          std::cout << "dry-run ok: stage 'scenarios'\n";
          return kExitOk;
        }
        Pipeline pipeline(std::move(config));
        print_manifest(pipeline.synth_scenarios());
        return kExitOk;
      }
      return run_pipeline_stage(g, "scenarios");
    }
    if (s_conv->parsed()) return run_pipeline_stage(g, "conversations");
    if (c_build->parsed()) return run_pipeline_stage(g, "checklists");
    if (c_extract->parsed()) return run_pipeline_stage(g, "extract");
    if (split_cmd->parsed()) return run_pipeline_stage(g, "split");
    if (export_sft_cmd->parsed() || export_cmd->parsed()) return run_pipeline_stage(g, "export");
    if (mixture_cmd->parsed()) return run_pipeline_stage(g, "mixture");
    if (stats_cmd->parsed()) return run_pipeline_stage(g, "stats");
    if (e_run->parsed()) return cmd_eval_run(g, e_split, e_mode, e_model);
    if (e_agree->parsed()) return cmd_eval_agreement(human_csv, judge_csv);
    if (e_annotate->parsed()) return cmd_eval_annotate(g, a_sample, a_rater, a_out);
    if (lint_cmd->parsed()) return cmd_lint(lint_conversations, lint_scenarios);
    std::cerr << app.help() << "\n";
    return kExitValidation;
  } catch (const GatewayError& e) {
    std::cerr << "provider error: " << e.what() << "\n";
    return e.kind() == GatewayError::Kind::Exhausted ? kExitProviderExhausted : kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}
