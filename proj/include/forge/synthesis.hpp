#pragma once
// Scenario and conversation generation: variant planning over validated
// pattern combinations, candidate-name sampling, the two-part scenario
// prompt with its structured-output parser, and conversation synthesis
// gated by the dialogue validator. Items that still violate their contract
// after one regeneration are rejected with a reason for the quarantine store.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "forge/gateway.hpp"
#include "forge/pattern.hpp"
#include "forge/prompts.hpp"
#include "forge/scenario.hpp"
#include "forge/util.hpp"

namespace forge {

struct VariantSpec {
  std::string id;  // hash of (combo, variant, name seed): stable dedup across resumes
  std::vector<std::string> combo;  // sorted
  std::optional<DiamondsDimension> dimension;
  uint64_t name_seed = 0;
};

// Three specs per combo: two with independently drawn situational dimensions,
// one dimension-free.
std::vector<VariantSpec> plan_variants(std::vector<std::string> combo, Rng& rng);

struct NameSample {
  std::vector<std::string> male;    // 5
  std::vector<std::string> female;  // 5
  std::vector<std::string> all() const;
};

NameSample sample_names(const NamePool& pool, uint64_t seed);

// --- structured scenario output ----------------------------------------------

struct ParsedProfile {
  std::string name;
  bool is_protagonist = false;
  std::string about_self;
  std::map<std::string, std::string> about_others;
};

struct ParsedScenario {
  std::string rationale;
  std::vector<Catalyst> catalysts;
  // insertion-ordered: tendency block order defines bearer order
  std::vector<std::pair<std::string, std::vector<std::string>>> tendencies;
  std::string background;
  std::vector<ParsedProfile> profiles;
};

class ScenarioParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws ScenarioParseError on a missing Part1/Part2 boundary, malformed
// tendency line, or missing profile structure.
ParsedScenario parse_scenario_response(const std::string& text);

// "@ [Name]: 1. [T1]; 2. [T2]" -> (Name, {T1, T2})
std::pair<std::string, std::vector<std::string>> parse_tendency_line(const std::string& line);

// Heuristic for the background's no-spoken-dialogue constraint: a turn-shaped
// line or a quotation adjacent to a speech verb counts as dialogue; bare
// quoted phrases (mottoes, titles) do not.
bool detect_dialogue_in_background(const std::string& background,
                                   const std::set<std::string>& names);

// --- prompt assembly ----------------------------------------------------------

std::string render_pattern_information(const Registry& registry,
                                       const std::vector<std::string>& combo);
std::string render_scenario_text(const Scenario& s);
std::string render_analysis_text(const Scenario& s);
std::string render_about_others_text(const CharacterProfile& c);

// --- generation ----------------------------------------------------------------

// Raised after the single regeneration attempt also fails.
class SynthesisRejection : public std::runtime_error {
 public:
  SynthesisRejection(std::string stage, std::string reason, std::string raw_text)
      : std::runtime_error(stage + ": " + reason),
        stage_(std::move(stage)),
        reason_(std::move(reason)),
        raw_text_(std::move(raw_text)) {}
  const std::string& stage() const { return stage_; }
  const std::string& reason() const { return reason_; }
  const std::string& raw_text() const { return raw_text_; }

 private:
  std::string stage_, reason_, raw_text_;
};

struct SynthesisOptions {
  double temperature = 0.7;
  int max_regenerations = 1;
  std::map<DiamondsDimension, std::string> situations = default_situations();
};

class ScenarioSynthesizer {
 public:
  ScenarioSynthesizer(const Registry& registry, Gateway& provider, const PromptLibrary& prompts,
                      SynthesisOptions options = {});
  Scenario generate(const VariantSpec& spec, const NameSample& names) const;

  // Exposed so rejection reasons can be unit-tested without a provider.
  Scenario assemble(const VariantSpec& spec, const NameSample& names,
                    const ParsedScenario& parsed) const;

 private:
  const Registry& registry_;
  Gateway& provider_;
  const PromptLibrary& prompts_;
  SynthesisOptions options_;
};

class ConversationSynthesizer {
 public:
  ConversationSynthesizer(const Registry& registry, Gateway& provider,
                          const PromptLibrary& prompts, SynthesisOptions options = {});
  Conversation generate(const Scenario& scenario) const;

 private:
  const Registry& registry_;
  Gateway& provider_;
  const PromptLibrary& prompts_;
  SynthesisOptions options_;
};

}  // namespace forge
