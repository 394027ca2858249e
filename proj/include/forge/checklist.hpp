#pragma once
// Dual-level behavioral checklists. Pattern-level checklists are built by a
// three-step refinement: generate candidates from the pattern structure,
// validate them against sample conversations, then generalize or drop items
// that smuggle in scenario specifics. Scenario-level checklists fall out of
// the expected tendencies with no provider call at all.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "forge/gateway.hpp"
#include "forge/judging.hpp"
#include "forge/pattern.hpp"
#include "forge/prompts.hpp"
#include "forge/scenario.hpp"

namespace forge {

enum class ChecklistLevel { Pattern, Scenario };

struct ChecklistItem {
  std::string id;
  std::string text;  // yes/no-scoreable behavioral question
  ChecklistLevel level = ChecklistLevel::Pattern;
  std::string pattern_id;               // pattern level
  std::string scenario_id, character;   // scenario level
};

Json checklist_item_to_json(const ChecklistItem& item);
ChecklistItem checklist_item_from_json(const Json& j);

struct ChecklistProvenance {
  int generated_count = 0;
  int removed_count = 0;
  int generalized_count = 0;
};

struct PatternChecklist {
  std::string pattern_id;
  std::vector<ChecklistItem> items;
  ChecklistProvenance provenance;
  bool degraded = false;     // no sample conversations: validation skipped
  bool short_count = false;  // fewer than min_items survived
};

Json pattern_checklist_to_json(const PatternChecklist& c);
PatternChecklist pattern_checklist_from_json(const Json& j);

class ChecklistError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Declaratives become questions; trailing punctuation normalized to '?'.
std::string normalize_item_text(std::string text);

struct ChecklistBuildOptions {
  int target_items = 15;
  int min_items = 10;
  int validation_samples = 5;  // K conversations scored per candidate
  int chunk_size = 15;
  double generate_temperature = 0.7;
};

class ChecklistBuilder {
 public:
  ChecklistBuilder(Gateway& provider, Gateway& judge, const PromptLibrary& prompts,
                   ChecklistBuildOptions options = {});

  // known_names: every character name in the sample corpus; items mentioning
  // one are rewritten in step 3 or dropped.
  PatternChecklist build(const Pattern& pattern, const std::vector<Conversation>& samples,
                         const std::set<std::string>& known_names) const;

 private:
  Gateway& provider_;
  Gateway& judge_;
  const PromptLibrary& prompts_;
  ChecklistBuildOptions options_;
};

// Parses "1. item" style numbered lists from provider output.
std::vector<std::string> parse_numbered_list(const std::string& text);

// One item per expected tendency of each pattern-bearing character;
// deterministic, provider-free. Throws if a bearer has no tendencies.
std::vector<ChecklistItem> extract_scenario_checklist(const Scenario& scenario);

std::string checklist_item_id(const std::string& prefix, size_t ordinal);

}  // namespace forge
