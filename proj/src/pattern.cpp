#include "forge/pattern.hpp"

#include <algorithm>
#include <filesystem>

#include "forge/util.hpp"

namespace forge {

const std::vector<TraitDimension>& all_trait_dimensions() {
  static const std::vector<TraitDimension> dims = {
      TraitDimension::Extraversion, TraitDimension::Agreeableness,
      TraitDimension::Conscientiousness, TraitDimension::EmotionalStability,
      TraitDimension::Intellect};
  return dims;
}

const std::vector<SocialCategory>& all_social_categories() {
  static const std::vector<SocialCategory> cats = {
      SocialCategory::CognitiveBiasesHeuristics, SocialCategory::SocialInfluence,
      SocialCategory::EvolutionaryAdaptations, SocialCategory::MotivationalProcesses};
  return cats;
}

std::string trait_dimension_name(TraitDimension d) {
  switch (d) {
    case TraitDimension::Extraversion: return "Extraversion";
    case TraitDimension::Agreeableness: return "Agreeableness";
    case TraitDimension::Conscientiousness: return "Conscientiousness";
    case TraitDimension::EmotionalStability: return "EmotionalStability";
    case TraitDimension::Intellect: return "Intellect";
  }
  return "Extraversion";
}

TraitDimension trait_dimension_from_name(const std::string& s) {
  for (TraitDimension d : all_trait_dimensions())
    if (trait_dimension_name(d) == s) return d;
  throw RegistryError("unknown trait dimension: " + s);
}

std::string trait_pole_name(TraitPole p) {
  return p == TraitPole::Positive ? "positive" : "negative";
}

TraitPole trait_pole_from_name(const std::string& s) {
  if (s == "positive") return TraitPole::Positive;
  if (s == "negative") return TraitPole::Negative;
  throw RegistryError("unknown trait pole: " + s);
}

std::string social_category_name(SocialCategory c) {
  switch (c) {
    case SocialCategory::CognitiveBiasesHeuristics: return "CognitiveBiasesHeuristics";
    case SocialCategory::SocialInfluence: return "SocialInfluence";
    case SocialCategory::EvolutionaryAdaptations: return "EvolutionaryAdaptations";
    case SocialCategory::MotivationalProcesses: return "MotivationalProcesses";
  }
  return "CognitiveBiasesHeuristics";
}

SocialCategory social_category_from_name(const std::string& s) {
  for (SocialCategory c : all_social_categories())
    if (social_category_name(c) == s) return c;
  throw RegistryError("unknown social category: " + s);
}

PatternKind PatternKind::trait(TraitDimension d, TraitPole p) {
  PatternKind k;
  k.group = Group::PersonalityTrait;
  k.dimension = d;
  k.pole = p;
  return k;
}

PatternKind PatternKind::social(SocialCategory c) {
  PatternKind k;
  k.group = Group::SocialCognitive;
  k.category = c;
  return k;
}

Json pattern_to_json(const Pattern& p) {
  Json j{{"id", p.id},
         {"name", p.name},
         {"kind", p.kind.is_trait() ? "personality_trait" : "social_cognitive"},
         {"definition", p.definition},
         {"core_mechanisms", p.core_mechanisms},
         {"manifestations", p.manifestations},
         {"sources", p.sources}};
  if (p.kind.is_trait()) {
    j["dimension"] = trait_dimension_name(p.kind.dimension);
    j["pole"] = trait_pole_name(p.kind.pole);
  } else {
    j["category"] = social_category_name(p.kind.category);
  }
  return j;
}

Pattern pattern_from_json(const Json& j) {
  Pattern p;
  p.id = j.at("id").get<std::string>();
  p.name = j.at("name").get<std::string>();
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "personality_trait") {
    p.kind = PatternKind::trait(trait_dimension_from_name(j.at("dimension").get<std::string>()),
                                trait_pole_from_name(j.at("pole").get<std::string>()));
  } else if (kind == "social_cognitive") {
    p.kind = PatternKind::social(social_category_from_name(j.at("category").get<std::string>()));
  } else {
    throw RegistryError("unknown pattern kind: " + kind);
  }
  p.definition = j.value("definition", "");
  p.core_mechanisms = j.value("core_mechanisms", "");
  p.manifestations = j.value("manifestations", "");
  if (j.contains("sources")) p.sources = j.at("sources").get<std::vector<std::string>>();
  return p;
}

void Registry::insert(Pattern p, bool require_complete) {
  if (p.id.empty()) throw RegistryError("pattern with empty id");
  if (p.name.empty()) throw RegistryError("pattern " + p.id + ": empty required field 'name'");
  if (require_complete) {
    if (p.definition.empty())
      throw RegistryError("pattern " + p.id + ": empty required field 'definition'");
    if (p.core_mechanisms.empty())
      throw RegistryError("pattern " + p.id + ": empty required field 'core_mechanisms'");
    if (p.manifestations.empty())
      throw RegistryError("pattern " + p.id + ": empty required field 'manifestations'");
  }
  auto [it, inserted] = patterns_.emplace(p.id, std::move(p));
  if (!inserted) throw RegistryError("duplicate pattern id: " + it->first);
}

Registry Registry::from_patterns(std::vector<Pattern> patterns, bool require_complete) {
  Registry r;
  for (Pattern& p : patterns) r.insert(std::move(p), require_complete);
  return r;
}

Registry Registry::load(const std::string& path, bool require_complete) {
  namespace fs = std::filesystem;
  Registry r;
  std::error_code ec;
  if (fs::is_directory(path, ec)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path))
      if (entry.is_regular_file() && entry.path().extension() == ".json")
        files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      Json j = Json::parse(read_file(f.string()), nullptr, false);
      if (j.is_discarded()) throw RegistryError("invalid JSON in " + f.string());
      r.insert(pattern_from_json(j), require_complete);
    }
    return r;
  }
  if (!fs::exists(path, ec)) throw RegistryError("registry path not found: " + path);
  if (path.size() > 6 && path.substr(path.size() - 6) == ".jsonl") {
    for (const Json& j : store_scan(path)) r.insert(pattern_from_json(j), require_complete);
    return r;
  }
  Json j = Json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_array())
    throw RegistryError("registry file must hold a JSON array: " + path);
  for (const Json& rec : j) r.insert(pattern_from_json(rec), require_complete);
  return r;
}

const Pattern& Registry::at(const std::string& id) const {
  auto it = patterns_.find(id);
  if (it == patterns_.end()) throw RegistryError("unknown pattern id: " + id);
  return it->second;
}

const Pattern* Registry::find(const std::string& id) const {
  auto it = patterns_.find(id);
  return it == patterns_.end() ? nullptr : &it->second;
}

size_t Registry::trait_count() const {
  size_t n = 0;
  for (const auto& [id, p] : patterns_)
    if (p.kind.is_trait()) ++n;
  return n;
}

size_t Registry::social_count() const { return patterns_.size() - trait_count(); }

std::vector<const Pattern*> Registry::traits() const {
  std::vector<const Pattern*> out;
  for (const auto& [id, p] : patterns_)
    if (p.kind.is_trait()) out.push_back(&p);
  return out;
}

std::vector<const Pattern*> Registry::socials() const {
  std::vector<const Pattern*> out;
  for (const auto& [id, p] : patterns_)
    if (!p.kind.is_trait()) out.push_back(&p);
  return out;
}

std::vector<const Pattern*> Registry::by_dimension(TraitDimension d) const {
  std::vector<const Pattern*> out;
  for (const auto& [id, p] : patterns_)
    if (p.kind.is_trait() && p.kind.dimension == d) out.push_back(&p);
  return out;
}

std::vector<const Pattern*> Registry::by_dimension_pole(TraitDimension d, TraitPole pole) const {
  std::vector<const Pattern*> out;
  for (const Pattern* p : by_dimension(d))
    if (p->kind.pole == pole) out.push_back(p);
  return out;
}

std::vector<const Pattern*> Registry::by_category(SocialCategory c) const {
  std::vector<const Pattern*> out;
  for (const auto& [id, p] : patterns_)
    if (!p.kind.is_trait() && p.kind.category == c) out.push_back(&p);
  return out;
}

std::vector<std::string> Registry::ids() const {
  std::vector<std::string> out;
  out.reserve(patterns_.size());
  for (const auto& [id, p] : patterns_) out.push_back(id);
  return out;
}

bool Registry::full() const {
  if (trait_count() != 100 || social_count() != 144) return false;
  for (TraitDimension d : all_trait_dimensions())
    for (TraitPole p : {TraitPole::Positive, TraitPole::Negative})
      if (by_dimension_pole(d, p).size() != 10) return false;
  return true;
}

std::string Registry::counts_summary() const {
  return std::to_string(trait_count()) + " traits + " + std::to_string(social_count()) +
         " social-cognitive (" + std::to_string(size()) + " total)";
}

void Registry::serialize(const std::string& path) const {
  if (path.size() > 6 && path.substr(path.size() - 6) == ".jsonl") {
    std::filesystem::remove(path);
    std::vector<Json> records;
    records.reserve(patterns_.size());
    for (const auto& [id, p] : patterns_) records.push_back(pattern_to_json(p));
    store_append(path, records);
    return;
  }
  Json arr = Json::array();
  for (const auto& [id, p] : patterns_) arr.push_back(pattern_to_json(p));
  write_file(path, arr.dump(2) + "\n");
}

// --- synthesis ----------------------------------------------------------------

namespace {

// Heading lines may arrive as "Definition", "## Definition", "**Definition**"
// or with a trailing colon; match case-insensitively on the normalized text.
std::optional<int> heading_slot(const std::string& line) {
  std::string t = trim(line);
  while (!t.empty() && (t.front() == '#')) t.erase(t.begin());
  t = trim(t);
  while (t.size() >= 2 && t.front() == '*' && t.back() == '*') t = trim(t.substr(1, t.size() - 2));
  if (!t.empty() && t.back() == ':') t.pop_back();
  std::string low = to_lower(trim(t));
  if (low == "definition" || low == "description") return 0;
  if (low == "core mechanisms") return 1;
  if (low == "real-world manifestation" || low == "real-world manifestations" ||
      low == "real world manifestation" || low == "real world manifestations")
    return 2;
  return std::nullopt;
}

}  // namespace

PatternSections parse_pattern_sections(std::string_view response) {
  PatternSections out;
  std::string sections[3];
  int current = -1;
  for (const std::string& line : split_lines(response)) {
    if (auto slot = heading_slot(line)) {
      current = *slot;
      out.any_heading = true;
      continue;
    }
    if (current >= 0) {
      sections[current] += line;
      sections[current] += '\n';
    }
  }
  auto strip_trailing = [](std::string& s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  };
  for (auto& s : sections) strip_trailing(s);
  out.definition = sections[0];
  out.core_mechanisms = sections[1];
  out.manifestations = sections[2];
  return out;
}

std::string render_corpus(const std::vector<CorpusDoc>& corpus) {
  std::string out;
  for (size_t i = 0; i < corpus.size(); ++i) {
    if (i) out += "\n";
    out += "----- " + corpus[i].source + "\n";
    out += corpus[i].text;
    if (!corpus[i].text.empty() && corpus[i].text.back() != '\n') out += "\n";
  }
  return out;
}

SynthesizedPattern synthesize_pattern(const std::string& name, const PatternKind& kind,
                                      const std::vector<CorpusDoc>& corpus, Gateway& provider,
                                      const PromptLibrary& prompts, double temperature) {
  if (corpus.empty()) throw SynthError("pattern synthesis needs a non-empty corpus: " + name);

  ChatRequest req;
  req.temperature = temperature;
  req.tag = "pattern_synth:" + slugify(name);
  std::string corpus_text = render_corpus(corpus);
  if (kind.is_trait()) {
    req.system = prompts.raw("pattern_synth_trait.system");
    req.user = prompts.render("pattern_synth_trait.user",
                              {{"trait_name", name}, {"corpus", corpus_text}});
  } else {
    req.system = prompts.raw("pattern_synth_social.system");
    req.user = prompts.render("pattern_synth_social.user",
                              {{"principle_name", name}, {"corpus", corpus_text}});
  }

  ChatResponse resp = provider.complete(req);
  PatternSections sections = parse_pattern_sections(resp.text);
  if (!sections.any_heading)
    throw SynthError("pattern synthesis response has no recognizable section headings for " +
                     name);

  SynthesizedPattern out;
  out.pattern.id = slugify(name);
  out.pattern.name = name;
  out.pattern.kind = kind;
  out.pattern.definition = sections.definition;
  out.pattern.core_mechanisms = sections.core_mechanisms;
  out.pattern.manifestations = sections.manifestations;
  for (const CorpusDoc& d : corpus) out.pattern.sources.push_back(d.source);
  out.incomplete = !out.pattern.complete();
  return out;
}

// --- combination compatibility ------------------------------------------------

ComboValidator::ComboValidator(const Registry& registry, Gateway& provider,
                               const PromptLibrary& prompts)
    : registry_(registry), provider_(provider), prompts_(prompts) {}

CompatibilityVerdict ComboValidator::validate(std::vector<std::string> pattern_ids) {
  if (pattern_ids.size() < 2 || pattern_ids.size() > 5)
    throw RegistryError("combination size must be 2..5, got " +
                        std::to_string(pattern_ids.size()));
  std::sort(pattern_ids.begin(), pattern_ids.end());
  for (const auto& id : pattern_ids) registry_.at(id);  // throws on unknown id

  std::string key = join(pattern_ids, "+");
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;

  std::string listing;
  for (const auto& id : pattern_ids) {
    const Pattern& p = registry_.at(id);
    listing += "- " + p.name + ": " + (p.definition.empty() ? "(no definition)" : p.definition) +
               "\n";
  }
  ChatRequest req;
  req.system = prompts_.raw("combo_validate.system");
  req.user = prompts_.render("combo_validate.user", {{"pattern_list", listing}});
  req.temperature = 0.0;
  req.tag = "combo_validate:" + key;

  ChatResponse resp = provider_.complete(req);
  Json j = Json::parse(resp.text, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("compatible"))
    throw SynthError("combination validator returned unparseable verdict for " + key);
  CompatibilityVerdict v;
  v.compatible = j.at("compatible").get<bool>();
  v.reason = j.value("reason", "");
  cache_[key] = v;
  return v;
}

}  // namespace forge
