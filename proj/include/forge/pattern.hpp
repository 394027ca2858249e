#pragma once
// Psychological pattern registry: the two-branch taxonomy (Big Five trait
// markers and social-cognitive mechanisms), structured pattern records,
// provider-backed synthesis of those records, and combination compatibility
// checks.

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "forge/gateway.hpp"
#include "forge/jsonl.hpp"
#include "forge/prompts.hpp"

namespace forge {

enum class TraitDimension {
  Extraversion,
  Agreeableness,
  Conscientiousness,
  EmotionalStability,
  Intellect,
};
enum class TraitPole { Positive, Negative };
enum class SocialCategory {
  CognitiveBiasesHeuristics,
  SocialInfluence,
  EvolutionaryAdaptations,
  MotivationalProcesses,
};

const std::vector<TraitDimension>& all_trait_dimensions();
const std::vector<SocialCategory>& all_social_categories();

std::string trait_dimension_name(TraitDimension d);
TraitDimension trait_dimension_from_name(const std::string& s);
std::string trait_pole_name(TraitPole p);
TraitPole trait_pole_from_name(const std::string& s);
std::string social_category_name(SocialCategory c);
SocialCategory social_category_from_name(const std::string& s);

struct PatternKind {
  enum class Group { PersonalityTrait, SocialCognitive };
  Group group = Group::SocialCognitive;
  TraitDimension dimension = TraitDimension::Extraversion;  // trait only
  TraitPole pole = TraitPole::Positive;                     // trait only
  SocialCategory category = SocialCategory::CognitiveBiasesHeuristics;  // social only

  static PatternKind trait(TraitDimension d, TraitPole p);
  static PatternKind social(SocialCategory c);
  bool is_trait() const { return group == Group::PersonalityTrait; }
  bool operator==(const PatternKind&) const = default;
};

struct Pattern {
  std::string id;    // stable slug, unique in a registry
  std::string name;  // display string
  PatternKind kind;
  std::string definition;
  std::string core_mechanisms;
  std::string manifestations;
  std::vector<std::string> sources;

  bool complete() const {
    return !definition.empty() && !core_mechanisms.empty() && !manifestations.empty();
  }
};

Json pattern_to_json(const Pattern& p);
Pattern pattern_from_json(const Json& j);

// Name + kind skeleton used to drive synthesis; ids derive from names.
struct TaxonomyEntry {
  std::string id;
  std::string name;
  PatternKind kind;
};

// The full built-in taxonomy: 100 trait markers (10 per dimension-pole cell)
// plus 144 social-cognitive patterns.
const std::vector<TaxonomyEntry>& builtin_taxonomy();

class RegistryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Registry {
 public:
  Registry() = default;

  // path may be a directory of *.json records, a .json array file, or a
  // .jsonl store. require_complete rejects records with an empty definition,
  // core_mechanisms, or manifestations field.
  static Registry load(const std::string& path, bool require_complete = true);
  static Registry from_patterns(std::vector<Pattern> patterns, bool require_complete = true);

  size_t size() const { return patterns_.size(); }
  size_t trait_count() const;
  size_t social_count() const;
  bool contains(const std::string& id) const { return patterns_.count(id) > 0; }
  const Pattern& at(const std::string& id) const;
  const Pattern* find(const std::string& id) const;

  std::vector<const Pattern*> traits() const;
  std::vector<const Pattern*> socials() const;
  std::vector<const Pattern*> by_dimension(TraitDimension d) const;
  std::vector<const Pattern*> by_dimension_pole(TraitDimension d, TraitPole p) const;
  std::vector<const Pattern*> by_category(SocialCategory c) const;
  std::vector<std::string> ids() const;  // sorted

  // 100 traits with every dimension-pole cell holding exactly 10, plus 144
  // social-cognitive patterns.
  bool full() const;
  std::string counts_summary() const;

  void serialize(const std::string& path) const;  // .json array or .jsonl by extension

 private:
  void insert(Pattern p, bool require_complete);
  std::map<std::string, Pattern> patterns_;  // keyed by id; sorted iteration
};

// --- provider-backed synthesis ----------------------------------------------

struct CorpusDoc {
  std::string source;  // citation or filename
  std::string text;
};

struct PatternSections {
  std::string definition;
  std::string core_mechanisms;
  std::string manifestations;
  bool any_heading = false;
};

// Splits a structured report on its markdown headings; sections are stored
// verbatim and never invented. Accepts Definition/Description for the first
// section and singular/plural Real-World Manifestation(s).
PatternSections parse_pattern_sections(std::string_view response);

class SynthError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SynthesizedPattern {
  Pattern pattern;
  bool incomplete = false;  // some section came back empty
};

SynthesizedPattern synthesize_pattern(const std::string& name, const PatternKind& kind,
                                      const std::vector<CorpusDoc>& corpus, Gateway& provider,
                                      const PromptLibrary& prompts, double temperature = 0.7);

// Corpus documents concatenated with a per-document separator line.
std::string render_corpus(const std::vector<CorpusDoc>& corpus);

// --- combination compatibility ----------------------------------------------

struct CompatibilityVerdict {
  bool compatible = false;
  std::string reason;
};

// Verdicts cache by sorted id tuple: one provider call per unique combination.
class ComboValidator {
 public:
  ComboValidator(const Registry& registry, Gateway& provider, const PromptLibrary& prompts);
  CompatibilityVerdict validate(std::vector<std::string> pattern_ids);
  size_t cache_size() const { return cache_.size(); }

 private:
  const Registry& registry_;
  Gateway& provider_;
  const PromptLibrary& prompts_;
  std::map<std::string, CompatibilityVerdict> cache_;
};

}  // namespace forge
