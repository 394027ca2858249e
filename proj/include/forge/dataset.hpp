#pragma once
// Dataset operations: held-out pattern selection, the four-way scenario
// split, supervised-fine-tuning export, mixture construction, and corpus
// statistics. Everything here is deterministic given (inputs, seed); ties
// break lexicographically by id.

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "forge/checklist.hpp"
#include "forge/dialogue.hpp"
#include "forge/pattern.hpp"
#include "forge/prompts.hpp"
#include "forge/scenario.hpp"

namespace forge {

enum class Split { Train, IdEval, OodEval, MixedEval };
std::string split_name(Split s);
Split split_from_name(const std::string& s);

struct SplitAssignment {
  std::string scenario_id;
  Split split = Split::Train;
};

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OodSet {
  std::vector<std::string> social;  // 4 ids
  std::vector<std::string> traits;  // 4 ids
  std::set<std::string> all() const;
};

// Social-cognitive picks: zero-frequency first, then lowest frequency, ties
// lexicographic. Trait picks: the least frequent trait of each of the five
// dimensions, keeping the four lowest of those five.
OodSet select_ood_patterns(const Registry& registry,
                           const std::map<std::string, int64_t>& train_frequency);

// Rule order: all-OOD combo -> ood_eval; any-OOD -> mixed_eval; otherwise the
// in-domain pool, from which id_eval_size scenarios are sampled (seeded) into
// id_eval and the rest train.
std::vector<SplitAssignment> split_scenarios(const std::vector<Scenario>& scenarios,
                                             const std::set<std::string>& ood_patterns,
                                             int id_eval_size, uint64_t seed);

std::string split_manifest_csv(const std::vector<SplitAssignment>& assignments);
std::vector<SplitAssignment> parse_split_manifest_csv(const std::string& csv);

// --- SFT export -----------------------------------------------------------------

struct SftMessage {
  std::string role;  // "user" | "assistant"
  std::string content;
  bool operator==(const SftMessage&) const = default;
};

struct SftSample {
  std::string system;
  std::vector<SftMessage> messages;
  std::string source;  // humanllm | general | roleplay
  std::string scenario_id;
  std::string character;
  std::string sample_id() const;
};

Json sft_to_sharegpt(const SftSample& s);
SftSample sft_from_sharegpt(const Json& j);
// Adapter for external drops: accepts ShareGPT-style {conversations:[{from,value}]}
// or chat-style {messages:[{role,content}]} records.
SftSample sft_from_external(const Json& j, const std::string& source_label, size_t index);

struct ExportSkip {
  std::string scenario_id;
  std::string character;
  std::string reason;
};

// One sample per pattern-bearing character. Consecutive non-target turns
// merge into one user message of "Name: ..." lines; the target's turns become
// assistant messages holding the serialized segments without the speaker
// prefix. A trailing non-target block is dropped.
std::vector<SftSample> export_sft(const std::vector<Scenario>& scenarios,
                                  const std::map<std::string, Conversation>& conversations,
                                  const PromptLibrary& prompts,
                                  std::vector<ExportSkip>* skips = nullptr);

SftSample export_sft_sample(const Scenario& scenario, const Conversation& conversation,
                            const std::string& target, const PromptLibrary& prompts);

// --- mixture ---------------------------------------------------------------------

struct MixtureSpec {
  std::array<int64_t, 3> ratio{4, 4, 2};           // humanllm : general : roleplay
  std::array<size_t, 3> pool_sizes{0, 0, 0};
  std::array<size_t, 3> resolved{0, 0, 0};
  size_t total() const { return resolved[0] + resolved[1] + resolved[2]; }
};

// Anchored on the first bucket: all of pool 0 is used and the other buckets
// scale by the ratio (round half up). Throws on pool underflow.
MixtureSpec resolve_mixture(const std::array<size_t, 3>& pool_sizes,
                            const std::array<int64_t, 3>& ratio);

struct MixtureEntry {
  std::string source;
  std::string sample_id;
};

std::vector<MixtureEntry> build_mixture(const std::array<std::vector<std::string>, 3>& pool_ids,
                                        const std::array<int64_t, 3>& ratio, uint64_t seed,
                                        MixtureSpec* spec_out = nullptr);

// --- statistics ------------------------------------------------------------------

struct DistributionStat {
  int64_t min = 0;
  int64_t max = 0;
  double mean = 0.0;
  std::map<int64_t, int64_t> histogram;
};

struct StatReport {
  size_t scenario_count = 0;
  size_t conversation_count = 0;
  DistributionStat patterns_per_scenario;
  DistributionStat characters_per_scenario;
  DistributionStat turns_per_conversation;
  DistributionStat tendencies_per_bearer;
  size_t pattern_bearing_characters = 0;
};

StatReport corpus_stats(const std::vector<Scenario>& scenarios,
                        const std::vector<Conversation>& conversations);
Json stat_report_to_json(const StatReport& r);
std::string histogram_csv(const StatReport& r);

}  // namespace forge
