#include "forge/config.hpp"

#include <cstdlib>
#include <filesystem>

#include "forge/util.hpp"

namespace forge {

PipelineConfig PipelineConfig::defaults() {
  PipelineConfig c;
  LLMProviderHandle mock;
  mock.provider_name = "mock";
  mock.model_name = "scripted";
  mock.rate_limit_rpm = 600000;
  mock.backoff_base_ms = 1;
  c.providers["mock"] = mock;
  LLMProviderHandle fixture = mock;
  fixture.provider_name = "fixture";
  fixture.model_name = "fixture";
  c.providers["fixture"] = fixture;
  return c;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  Json j = Json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw ConfigError("config file is not a JSON object: " + path);

  PipelineConfig c = defaults();
  if (j.contains("providers")) {
    c.providers.clear();
    for (const auto& [name, spec] : j.at("providers").items())
      c.providers[name] = handle_from_json(spec);
  }
  if (j.contains("roles")) {
    const Json& r = j["roles"];
    c.roles.synthesis = r.value("synthesis", c.roles.synthesis);
    c.roles.validation = r.value("validation", c.roles.validation);
    c.roles.judge = r.value("judge", c.roles.judge);
    c.roles.model = r.value("model", c.roles.model);
    c.roles.simulator = r.value("simulator", c.roles.simulator);
  }
  c.seed = j.value("seed", c.seed);
  c.parallelism = j.value("parallelism", c.parallelism);
  c.chunk_size = j.value("chunk_size", c.chunk_size);
  c.judge_repeats = j.value("judge_repeats", c.judge_repeats);
  c.id_eval_size = j.value("id_eval_size", c.id_eval_size);
  c.selfplay_turns = j.value("selfplay_turns", c.selfplay_turns);
  if (j.contains("mixture_ratio")) {
    auto v = j.at("mixture_ratio").get<std::vector<int64_t>>();
    if (v.size() != 3) throw ConfigError("mixture_ratio must have 3 parts");
    c.mixture_ratio = {v[0], v[1], v[2]};
  }
  if (j.contains("temperatures")) {
    c.synthesis_temperature = j["temperatures"].value("synthesis", c.synthesis_temperature);
    c.judge_temperature = j["temperatures"].value("judge", c.judge_temperature);
  }
  if (j.contains("situations"))
    for (const auto& [dim, text] : j.at("situations").items())
      c.situations[diamonds_from_name(dim)] = text.get<std::string>();
  if (j.contains("paths")) {
    const Json& p = j["paths"];
    c.paths.prompts = p.value("prompts", c.paths.prompts);
    c.paths.out = p.value("out", c.paths.out);
    c.paths.cache = p.value("cache", c.paths.cache);
    c.paths.combos = p.value("combos", c.paths.combos);
    c.paths.names = p.value("names", c.paths.names);
    c.paths.corpus = p.value("corpus", c.paths.corpus);
    c.paths.general_sft = p.value("general_sft", c.paths.general_sft);
    c.paths.roleplay_sft = p.value("roleplay_sft", c.paths.roleplay_sft);
  }

  if (const char* seed_env = std::getenv("FORGE_SEED")) c.seed = std::stoull(seed_env);
  if (const char* par_env = std::getenv("FORGE_PARALLELISM")) c.parallelism = std::stoi(par_env);
  if (const char* prov_env = std::getenv("FORGE_PROVIDER")) {
    std::string p = prov_env;
    c.roles = RoleNames{p, p, p, p, p};
  }
  return c;
}

const LLMProviderHandle& PipelineConfig::handle_for_role(const std::string& role) const {
  const std::string* name = nullptr;
  if (role == "synthesis") name = &roles.synthesis;
  else if (role == "validation") name = &roles.validation;
  else if (role == "judge") name = &roles.judge;
  else if (role == "model") name = &roles.model;
  else if (role == "simulator") name = &roles.simulator;
  else throw ConfigError("unknown provider role: " + role);
  auto it = providers.find(*name);
  if (it == providers.end())
    throw ConfigError("role '" + role + "' references unknown provider '" + *name + "'");
  return it->second;
}

void PipelineConfig::validate() const {
  if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
  if (chunk_size < 1) throw ConfigError("chunk_size must be >= 1");
  if (judge_repeats < 1) throw ConfigError("judge_repeats must be >= 1");
  if (id_eval_size < 0) throw ConfigError("id_eval_size must be >= 0");
  for (const char* role : {"synthesis", "validation", "judge", "model", "simulator"}) {
    const LLMProviderHandle& h = handle_for_role(role);
    try {
      h.validate();
    } catch (const GatewayError& e) {
      throw ConfigError(std::string("provider for role '") + role + "': " + e.what());
    }
  }
  namespace fs = std::filesystem;
  if (!fs::is_directory(paths.prompts))
    throw ConfigError("prompts directory not found: " + paths.prompts);
  auto must_exist = [](const std::string& label, const std::string& p) {
    if (!p.empty() && !fs::exists(p))
      throw ConfigError(label + " path not found: " + p);
  };
  must_exist("combos", paths.combos);
  must_exist("names", paths.names);
  must_exist("corpus", paths.corpus);
  must_exist("general_sft", paths.general_sft);
  must_exist("roleplay_sft", paths.roleplay_sft);
}

Json PipelineConfig::to_json() const {
  Json providers_json = Json::object();
  for (const auto& [name, h] : providers) providers_json[name] = handle_to_json(h);
  Json situations_json = Json::object();
  for (const auto& [dim, text] : situations) situations_json[diamonds_name(dim)] = text;
  return Json{
      {"providers", providers_json},
      {"roles", Json{{"synthesis", roles.synthesis},
                     {"validation", roles.validation},
                     {"judge", roles.judge},
                     {"model", roles.model},
                     {"simulator", roles.simulator}}},
      {"seed", seed},
      {"parallelism", parallelism},
      {"chunk_size", chunk_size},
      {"judge_repeats", judge_repeats},
      {"id_eval_size", id_eval_size},
      {"selfplay_turns", selfplay_turns},
      {"mixture_ratio", std::vector<int64_t>{mixture_ratio[0], mixture_ratio[1], mixture_ratio[2]}},
      {"temperatures",
       Json{{"synthesis", synthesis_temperature}, {"judge", judge_temperature}}},
      {"situations", situations_json},
      {"paths", Json{{"prompts", paths.prompts},
                     {"out", paths.out},
                     {"cache", paths.cache},
                     {"combos", paths.combos},
                     {"names", paths.names},
                     {"corpus", paths.corpus},
                     {"general_sft", paths.general_sft},
                     {"roleplay_sft", paths.roleplay_sft}}}};
}

std::string config_hash(const PipelineConfig& config, const PromptLibrary& prompts) {
  return short_hash(config.to_json().dump() + "|" + prompts.content_hash());
}

Json manifest_to_json(const RunManifest& m) {
  return Json{{"run_id", m.run_id},
              {"stage", m.stage},
              {"config_hash", m.config_hash},
              {"seed", m.seed},
              {"inputs", m.input_versions},
              {"output_counts", m.output_counts},
              {"quarantine_count", m.quarantine_count},
              {"started", m.started},
              {"finished", m.finished}};
}

}  // namespace forge
