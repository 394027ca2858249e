#include "forge/scenario.hpp"

#include <algorithm>

#include "forge/util.hpp"

namespace forge {

const std::vector<DiamondsDimension>& all_diamonds() {
  static const std::vector<DiamondsDimension> dims = {
      DiamondsDimension::Duty,       DiamondsDimension::Intellect,
      DiamondsDimension::Adversity,  DiamondsDimension::Mating,
      DiamondsDimension::Positivity, DiamondsDimension::Negativity,
      DiamondsDimension::Deception,  DiamondsDimension::Sociality};
  return dims;
}

std::string diamonds_name(DiamondsDimension d) {
  switch (d) {
    case DiamondsDimension::Duty: return "Duty";
    case DiamondsDimension::Intellect: return "Intellect";
    case DiamondsDimension::Adversity: return "Adversity";
    case DiamondsDimension::Mating: return "Mating";
    case DiamondsDimension::Positivity: return "Positivity";
    case DiamondsDimension::Negativity: return "Negativity";
    case DiamondsDimension::Deception: return "Deception";
    case DiamondsDimension::Sociality: return "Sociality";
  }
  return "Duty";
}

DiamondsDimension diamonds_from_name(const std::string& s) {
  for (DiamondsDimension d : all_diamonds())
    if (diamonds_name(d) == s) return d;
  throw ScenarioError("unknown situational dimension: " + s);
}

const std::map<DiamondsDimension, std::string>& default_situations() {
  static const std::map<DiamondsDimension, std::string> situations = {
      {DiamondsDimension::Duty,
       "A situation where work has to be done and obligations or responsibilities weigh on the "
       "characters."},
      {DiamondsDimension::Intellect,
       "A situation affording deep thought, analysis, or the display of intellectual competence."},
      {DiamondsDimension::Adversity,
       "A situation involving threat, criticism, blame, or competing interests among the "
       "characters."},
      {DiamondsDimension::Mating,
       "A situation carrying romantic or courtship potential between characters."},
      {DiamondsDimension::Positivity,
       "A pleasant, enjoyable situation that invites celebration or shared good news."},
      {DiamondsDimension::Negativity,
       "A situation saturated with potential frustration, anxiety, or other negative emotions."},
      {DiamondsDimension::Deception,
       "A situation where mistrust is plausible and someone may be deceiving or withholding."},
      {DiamondsDimension::Sociality,
       "A situation centered on socializing, relationship building, and mutual disclosure."}};
  return situations;
}

const CharacterProfile& Scenario::protagonist() const {
  for (const CharacterProfile& c : characters)
    if (c.role == CharacterProfile::Role::Protagonist) return c;
  throw ScenarioError("scenario " + id + " has no protagonist");
}

const CharacterProfile* Scenario::find_character(const std::string& name) const {
  for (const CharacterProfile& c : characters)
    if (c.name == name) return &c;
  return nullptr;
}

std::set<std::string> Scenario::character_names() const {
  std::set<std::string> out;
  for (const CharacterProfile& c : characters) out.insert(c.name);
  return out;
}

std::vector<std::string> Scenario::pattern_bearers() const {
  std::vector<std::string> out;
  for (const CharacterProfile& c : characters)
    if (!c.assigned_patterns.empty()) out.push_back(c.name);
  return out;
}

ConversationRules Scenario::rules() const {
  ConversationRules r;
  r.protagonist = protagonist().name;
  r.characters = character_names();
  return r;
}

void validate_scenario(const Scenario& s) {
  if (s.id.empty()) throw ScenarioError("scenario id empty");
  if (s.combo.size() < 2 || s.combo.size() > 5)
    throw ScenarioError("scenario " + s.id + ": combo size " + std::to_string(s.combo.size()) +
                        " outside 2..5");
  if (!std::is_sorted(s.combo.begin(), s.combo.end()))
    throw ScenarioError("scenario " + s.id + ": combo not sorted");
  if (s.characters.size() < 2 || s.characters.size() > 6)
    throw ScenarioError("scenario " + s.id + ": character count " +
                        std::to_string(s.characters.size()) + " outside 2..6");
  if (s.background.empty()) throw ScenarioError("scenario " + s.id + ": empty background");

  size_t protagonists = 0;
  std::set<std::string> names;
  for (const CharacterProfile& c : s.characters) {
    if (c.name.empty()) throw ScenarioError("scenario " + s.id + ": character with empty name");
    if (!names.insert(c.name).second)
      throw ScenarioError("scenario " + s.id + ": duplicate character " + c.name);
    if (c.role == CharacterProfile::Role::Protagonist) ++protagonists;
  }
  if (protagonists != 1)
    throw ScenarioError("scenario " + s.id + ": needs exactly one protagonist, found " +
                        std::to_string(protagonists));

  // about_others covers every other character exactly once
  for (const CharacterProfile& c : s.characters) {
    for (const std::string& other : names) {
      if (other == c.name) continue;
      if (!c.about_others.count(other))
        throw ScenarioError("scenario " + s.id + ": " + c.name + " has no view of " + other);
    }
    if (c.about_others.size() != names.size() - 1)
      throw ScenarioError("scenario " + s.id + ": " + c.name + " has views of non-characters");
    if (c.about_others.count(c.name))
      throw ScenarioError("scenario " + s.id + ": " + c.name + " has a view of themselves");
  }

  // every combo pattern appears on at least one character
  std::set<std::string> assigned;
  for (const CharacterProfile& c : s.characters)
    for (const std::string& p : c.assigned_patterns) assigned.insert(p);
  for (const std::string& p : s.combo)
    if (!assigned.count(p))
      throw ScenarioError("scenario " + s.id + ": pattern " + p + " assigned to no character");

  // tendencies: 2..6 items for pattern bearers, absent otherwise
  for (const CharacterProfile& c : s.characters) {
    auto it = s.tendencies.find(c.name);
    if (c.assigned_patterns.empty()) {
      if (it != s.tendencies.end() && !it->second.empty())
        throw ScenarioError("scenario " + s.id + ": pattern-free character " + c.name +
                            " has tendencies");
    } else {
      if (it == s.tendencies.end() || it->second.empty())
        throw ScenarioError("scenario " + s.id + ": pattern bearer " + c.name +
                            " has no tendencies");
      if (it->second.size() < 2 || it->second.size() > 6)
        throw ScenarioError("scenario " + s.id + ": " + c.name + " has " +
                            std::to_string(it->second.size()) + " tendencies, outside 2..6");
    }
  }
  for (const auto& [name, items] : s.tendencies) {
    (void)items;
    if (!names.count(name))
      throw ScenarioError("scenario " + s.id + ": tendencies for unknown character " + name);
  }
}

Json scenario_to_json(const Scenario& s) {
  Json chars = Json::array();
  for (const CharacterProfile& c : s.characters) {
    chars.push_back(Json{
        {"name", c.name},
        {"role", c.role == CharacterProfile::Role::Protagonist ? "protagonist" : "supporting"},
        {"about_self", c.about_self},
        {"about_others", c.about_others},
        {"assigned_patterns", c.assigned_patterns}});
  }
  Json catalysts = Json::array();
  for (const Catalyst& c : s.catalysts)
    catalysts.push_back(Json{{"detail", c.detail}, {"function", c.function}});
  return Json{{"id", s.id},
              {"combo", s.combo},
              {"variant", s.variant ? Json(diamonds_name(*s.variant)) : Json(nullptr)},
              {"background", s.background},
              {"characters", chars},
              {"tendencies", s.tendencies},
              {"rationale", s.rationale},
              {"catalysts", catalysts}};
}

Scenario scenario_from_json(const Json& j) {
  Scenario s;
  s.id = j.at("id").get<std::string>();
  s.combo = j.at("combo").get<std::vector<std::string>>();
  if (!j.at("variant").is_null())
    s.variant = diamonds_from_name(j.at("variant").get<std::string>());
  s.background = j.at("background").get<std::string>();
  for (const Json& c : j.at("characters")) {
    CharacterProfile p;
    p.name = c.at("name").get<std::string>();
    p.role = c.at("role").get<std::string>() == "protagonist"
                 ? CharacterProfile::Role::Protagonist
                 : CharacterProfile::Role::Supporting;
    p.about_self = c.value("about_self", "");
    if (c.contains("about_others"))
      p.about_others = c.at("about_others").get<std::map<std::string, std::string>>();
    if (c.contains("assigned_patterns"))
      p.assigned_patterns = c.at("assigned_patterns").get<std::vector<std::string>>();
    s.characters.push_back(std::move(p));
  }
  if (j.contains("tendencies"))
    s.tendencies = j.at("tendencies").get<std::map<std::string, std::vector<std::string>>>();
  s.rationale = j.value("rationale", "");
  if (j.contains("catalysts"))
    for (const Json& c : j.at("catalysts"))
      s.catalysts.push_back(Catalyst{c.value("detail", ""), c.value("function", "")});
  return s;
}

NamePool NamePool::from_lists(std::vector<std::string> male, std::vector<std::string> female) {
  NamePool pool;
  auto dedup = [](std::vector<std::string>& in, std::vector<std::string>& out) {
    std::set<std::string> seen;
    for (std::string& n : in) {
      std::string t = trim(n);
      if (!t.empty() && seen.insert(t).second) out.push_back(std::move(t));
    }
  };
  dedup(male, pool.male);
  dedup(female, pool.female);
  return pool;
}

NamePool NamePool::load(const std::string& path) {
  Json j = Json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw ScenarioError("name pool file must be a JSON object: " + path);
  return from_lists(j.value("male", std::vector<std::string>{}),
                    j.value("female", std::vector<std::string>{}));
}

}  // namespace forge
