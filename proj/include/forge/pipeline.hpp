#pragma once
// Stage orchestration over the JSONL stores. Stages are resumable: existing
// ids are never regenerated, and reruns with the same config hash and seed
// append nothing new. Rejected items land in the quarantine store with the
// stage and reason.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "forge/checklist.hpp"
#include "forge/config.hpp"
#include "forge/dataset.hpp"
#include "forge/eval.hpp"
#include "forge/pattern.hpp"
#include "forge/synthesis.hpp"

namespace forge {

class PipelineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Combos input: plain JSONL, one line per combination, either a bare array
// of pattern ids or {"patterns": [...]}.
std::vector<std::vector<std::string>> read_combos(const std::string& path);

class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config);

  // Test seam: use this transport for a role instead of the configured one.
  void set_transport(const std::string& role, std::shared_ptr<ChatTransport> transport);

  Gateway& gateway(const std::string& role);
  const PromptLibrary& prompts() const { return prompts_; }
  const PipelineConfig& config() const { return config_; }
  std::string hash() const { return config_hash_; }

  // store paths under paths.out
  std::string store_path(const std::string& name) const;

  RunManifest synth_patterns();        // combos' patterns -> registry store
  RunManifest synth_scenarios();       // combos -> scenario store
  RunManifest synth_conversations();   // scenarios -> conversation store
  RunManifest build_checklists();      // pattern-level checklists
  RunManifest extract_checklists();    // scenario-level checklists
  RunManifest split_stage();           // OOD selection + split manifest
  RunManifest export_stage();          // train scenarios -> ShareGPT JSONL
  RunManifest mixture_stage();         // three pools -> mixture manifest
  RunManifest stats_stage();           // corpus statistics
  RunManifest eval_stage(const std::string& split, EvalMode mode);

  // Dispatch by stage name ("patterns", "scenarios", "conversations",
  // "checklists", "extract", "split", "export", "mixture", "stats").
  RunManifest run_stage(const std::string& stage_name);

  // loaded views over the stores
  Registry load_registry_store() const;
  std::vector<Scenario> load_scenarios() const;
  std::map<std::string, Conversation> load_conversations() const;
  std::map<std::string, PatternChecklist> load_pattern_checklists() const;
  std::map<std::string, std::vector<ChecklistItem>> load_scenario_checklists() const;
  std::map<std::string, Split> load_splits() const;

 private:
  RunManifest begin_manifest(const std::string& stage, const std::vector<std::string>& inputs);
  void finish_manifest(RunManifest& m);
  void quarantine(const std::string& stage, const std::string& reason,
                  const std::string& raw_text);
  NamePool load_name_pool() const;

  PipelineConfig config_;
  PromptLibrary prompts_;
  std::string config_hash_;
  std::map<std::string, std::shared_ptr<ChatTransport>> transport_overrides_;
  std::map<std::string, std::unique_ptr<Gateway>> gateways_;
};

// Deterministic parallel map: applies fn over [0, n) with at most
// `parallelism` workers, collecting results in index order.
void parallel_for(size_t n, int parallelism, const std::function<void(size_t)>& fn);

}  // namespace forge
