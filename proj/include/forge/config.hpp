#pragma once
// Run configuration and provenance. One structured config file drives every
// stage; the config hash binds a run to its exact prompts and parameters, so
// manifests can reconstruct how any store row came to exist.

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "forge/gateway.hpp"
#include "forge/jsonl.hpp"
#include "forge/prompts.hpp"
#include "forge/scenario.hpp"

namespace forge {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RoleNames {
  std::string synthesis = "mock";
  std::string validation = "mock";
  std::string judge = "mock";
  std::string model = "mock";      // model under test
  std::string simulator = "mock";  // selfplay interlocutors
};

struct PipelinePaths {
  std::string prompts = "prompts";
  std::string out = "out";
  std::string cache;        // empty disables the response cache
  std::string combos;       // input: pattern combinations
  std::string names;        // input: name pool JSON
  std::string corpus;       // input: literature corpus directory
  std::string general_sft;  // external instruction pool (JSONL)
  std::string roleplay_sft; // external role-play pool (JSONL)
};

struct PipelineConfig {
  std::map<std::string, LLMProviderHandle> providers;
  RoleNames roles;
  uint64_t seed = 0;
  int parallelism = 4;
  int chunk_size = 15;
  int judge_repeats = 1;
  int id_eval_size = 50;
  int selfplay_turns = 16;
  std::array<int64_t, 3> mixture_ratio{4, 4, 2};
  double synthesis_temperature = 0.7;
  double judge_temperature = 0.0;
  std::map<DiamondsDimension, std::string> situations = default_situations();
  PipelinePaths paths;

  static PipelineConfig defaults();
  // Reads the JSON file, then applies FORGE_SEED / FORGE_PARALLELISM /
  // FORGE_PROVIDER environment overrides.
  static PipelineConfig load(const std::string& path);

  const LLMProviderHandle& handle_for_role(const std::string& role) const;

  // Fails fast before any provider call: roles resolve, handles validate,
  // referenced input paths exist.
  void validate() const;

  Json to_json() const;  // auth appears only as the env var name
};

std::string config_hash(const PipelineConfig& config, const PromptLibrary& prompts);

struct RunManifest {
  std::string run_id;
  std::string stage;
  std::string config_hash;
  uint64_t seed = 0;
  std::map<std::string, std::string> input_versions;
  std::map<std::string, int64_t> output_counts;
  int64_t quarantine_count = 0;
  std::string started;
  std::string finished;
};

Json manifest_to_json(const RunManifest& m);

}  // namespace forge
