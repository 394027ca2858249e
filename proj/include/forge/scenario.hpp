#pragma once
// Scenario domain types: character profiles with asymmetric perception, the
// eight situational dimensions used for variant diversity, name pools, and
// the scenario invariants enforced at every store boundary.

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "forge/dialogue.hpp"
#include "forge/jsonl.hpp"

namespace forge {

enum class DiamondsDimension {
  Duty,
  Intellect,
  Adversity,
  Mating,
  Positivity,
  Negativity,
  Deception,
  Sociality,
};

const std::vector<DiamondsDimension>& all_diamonds();
std::string diamonds_name(DiamondsDimension d);
DiamondsDimension diamonds_from_name(const std::string& s);

// One fixed situation sentence per dimension, overridable via config.
const std::map<DiamondsDimension, std::string>& default_situations();

struct CharacterProfile {
  enum class Role { Protagonist, Supporting };
  std::string name;
  Role role = Role::Supporting;
  std::string about_self;
  std::map<std::string, std::string> about_others;  // other character -> view
  std::vector<std::string> assigned_patterns;       // empty for pattern-free characters
};

struct Catalyst {
  std::string detail;
  std::string function;
};

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Scenario {
  std::string id;
  std::vector<std::string> combo;  // sorted pattern ids, 2..5
  std::optional<DiamondsDimension> variant;
  std::string background;
  std::vector<CharacterProfile> characters;  // 2..6
  std::map<std::string, std::vector<std::string>> tendencies;  // character -> 2..6 items
  std::string rationale;
  std::vector<Catalyst> catalysts;

  const CharacterProfile& protagonist() const;
  const CharacterProfile* find_character(const std::string& name) const;
  std::set<std::string> character_names() const;
  std::vector<std::string> pattern_bearers() const;  // characters with assigned patterns
  ConversationRules rules() const;
};

// Throws ScenarioError naming the first violated invariant. Ran at write time
// and again at read time.
void validate_scenario(const Scenario& s);

Json scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const Json& j);

struct NamePool {
  std::vector<std::string> male;
  std::vector<std::string> female;
  // JSON file {"male": [...], "female": [...]}; deduplicates, preserves order.
  static NamePool load(const std::string& path);
  static NamePool from_lists(std::vector<std::string> male, std::vector<std::string> female);
};

}  // namespace forge
