#include "forge/synthesis.hpp"

#include <algorithm>

#include "forge/util.hpp"

namespace forge {

std::vector<VariantSpec> plan_variants(std::vector<std::string> combo, Rng& rng) {
  std::sort(combo.begin(), combo.end());
  std::vector<VariantSpec> out;
  for (int i = 0; i < 3; ++i) {
    VariantSpec spec;
    spec.combo = combo;
    if (i < 2) {
      const auto& dims = all_diamonds();
      spec.dimension = dims[rng.below(dims.size())];
    }
    spec.name_seed = rng.next();
    std::string variant_str = spec.dimension ? diamonds_name(*spec.dimension) : "none";
    spec.id = short_hash(join(spec.combo, "+") + "|" + variant_str + "|" +
                         std::to_string(spec.name_seed));
    out.push_back(std::move(spec));
  }
  return out;
}

std::vector<std::string> NameSample::all() const {
  std::vector<std::string> out = male;
  out.insert(out.end(), female.begin(), female.end());
  return out;
}

NameSample sample_names(const NamePool& pool, uint64_t seed) {
  if (pool.male.size() < 5 || pool.female.size() < 5)
    throw ScenarioError("name pool too small: need 5 male and 5 female, have " +
                        std::to_string(pool.male.size()) + "+" +
                        std::to_string(pool.female.size()));
  Rng rng(seed);
  NameSample s;
  s.male = rng.sample(pool.male, 5);
  s.female = rng.sample(pool.female, 5);
  return s;
}

// --- structured scenario output ----------------------------------------------

namespace {

std::string strip_brackets(std::string s) {
  s = trim(s);
  if (s.size() >= 2 && s.front() == '[' && s.back() == ']') s = trim(s.substr(1, s.size() - 2));
  return s;
}

// Matches a label line like "Design Rationale:" (optionally bulleted or
// bolded) and returns any content following the colon.
std::optional<std::string> match_label(const std::string& line, const std::string& label) {
  std::string t = trim(line);
  while (!t.empty() && (t.front() == '#' || t.front() == '*' || t.front() == '-')) t.erase(t.begin());
  t = trim(t);
  if (t.size() >= 2 && t.substr(0, 2) == "**") t = trim(t.substr(2));
  std::string low = to_lower(t);
  std::string want = to_lower(label);
  if (low.rfind(want, 0) != 0) return std::nullopt;
  std::string rest = trim(t.substr(label.size()));
  while (!rest.empty() && (rest.front() == ':' || rest.front() == '*')) rest.erase(rest.begin());
  return trim(rest);
}

bool is_part_heading(const std::string& line, int which) {
  std::string t = to_lower(trim(line));
  while (!t.empty() && (t.front() == '#' || t.front() == '*')) t.erase(t.begin());
  t = trim(t);
  std::string want = "part " + std::to_string(which);
  return t.rfind(want, 0) == 0;
}

}  // namespace

std::pair<std::string, std::vector<std::string>> parse_tendency_line(const std::string& line) {
  std::string t = trim(line);
  if (t.empty() || t.front() != '@')
    throw ScenarioParseError("tendency line must start with '@': " + line);
  t = trim(t.substr(1));

  std::string name;
  std::string rest;
  if (!t.empty() && t.front() == '[') {
    size_t close = t.find(']');
    if (close == std::string::npos)
      throw ScenarioParseError("tendency line has unclosed name bracket: " + line);
    name = trim(t.substr(1, close - 1));
    rest = trim(t.substr(close + 1));
    if (rest.empty() || rest.front() != ':')
      throw ScenarioParseError("tendency line missing ':' after name: " + line);
    rest = trim(rest.substr(1));
  } else {
    size_t colon = t.find(':');
    if (colon == std::string::npos)
      throw ScenarioParseError("tendency line missing ':' after name: " + line);
    name = trim(t.substr(0, colon));
    rest = trim(t.substr(colon + 1));
  }
  if (name.empty()) throw ScenarioParseError("tendency line has empty name: " + line);

  std::vector<std::string> items;
  for (std::string piece : split(rest, ';')) {
    std::string p = trim(piece);
    // strip "1." style numbering
    size_t i = 0;
    while (i < p.size() && std::isdigit(static_cast<unsigned char>(p[i]))) ++i;
    if (i > 0 && i < p.size() && p[i] == '.') p = trim(p.substr(i + 1));
    p = strip_brackets(p);
    if (!p.empty()) items.push_back(std::move(p));
  }
  if (items.empty())
    throw ScenarioParseError("tendency line has no items: " + line);
  return {name, items};
}

ParsedScenario parse_scenario_response(const std::string& text) {
  std::vector<std::string> lines = split_lines(text);

  size_t part1 = lines.size(), part2 = lines.size();
  for (size_t i = 0; i < lines.size(); ++i) {
    if (part1 == lines.size() && is_part_heading(lines[i], 1)) part1 = i;
    if (part2 == lines.size() && is_part_heading(lines[i], 2)) part2 = i;
  }
  if (part1 >= lines.size() || part2 >= lines.size() || part2 <= part1)
    throw ScenarioParseError("missing or misordered Part 1 / Part 2 boundary");

  ParsedScenario out;

  // --- Part 1 ---
  enum class P1 { None, Rationale, Catalysts, Tendencies } state = P1::None;
  for (size_t i = part1 + 1; i < part2; ++i) {
    const std::string& line = lines[i];
    if (auto rest = match_label(line, "Design Rationale")) {
      state = P1::Rationale;
      if (!rest->empty()) out.rationale += *rest + "\n";
      continue;
    }
    if (auto rest = match_label(line, "Catalyst Details")) {
      state = P1::Catalysts;
      continue;
    }
    if (auto rest = match_label(line, "Expected Character Tendencies")) {
      state = P1::Tendencies;
      continue;
    }
    std::string t = trim(line);
    if (t.empty()) continue;
    switch (state) {
      case P1::Rationale:
        out.rationale += t + "\n";
        break;
      case P1::Catalysts: {
        if (t.front() == '*' || t.front() == '-') t = trim(t.substr(1));
        if (t.empty() || t.front() == '(') break;  // "(Continue...)" filler
        size_t colon = t.find(':');
        Catalyst c;
        if (colon == std::string::npos) {
          c.detail = strip_brackets(t);
        } else {
          c.detail = strip_brackets(t.substr(0, colon));
          c.function = strip_brackets(trim(t.substr(colon + 1)));
        }
        if (!c.detail.empty()) out.catalysts.push_back(std::move(c));
        break;
      }
      case P1::Tendencies:
        if (t.front() == '@') out.tendencies.push_back(parse_tendency_line(t));
        break;
      case P1::None:
        break;
    }
  }
  out.rationale = trim(out.rationale);

  // --- Part 2 ---
  enum class P2 { None, Background, Profiles } p2state = P2::None;
  ParsedProfile* current = nullptr;
  bool in_about_others = false;
  for (size_t i = part2 + 1; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (auto rest = match_label(line, "Story Background")) {
      p2state = P2::Background;
      if (!rest->empty()) out.background += *rest + "\n";
      continue;
    }
    if (match_label(line, "Characters' Profiles") || match_label(line, "Characters Profiles") ||
        match_label(line, "Character Profiles")) {
      p2state = P2::Profiles;
      continue;
    }
    // Profile headings count only inside the profiles block or when marked
    // with '#', so narrative text mentioning "Protagonist" stays narrative.
    bool heading_ctx = p2state == P2::Profiles || trim(line).rfind("#", 0) == 0;
    if (heading_ctx) {
      if (auto rest = match_label(line, "Protagonist")) {
        p2state = P2::Profiles;
        out.profiles.push_back(ParsedProfile{strip_brackets(*rest), true, "", {}});
        current = &out.profiles.back();
        in_about_others = false;
        continue;
      }
      if (auto rest = match_label(line, "Supporting Character")) {
        // "Supporting Character 2: Name" — drop the ordinal
        std::string name = *rest;
        size_t colon = name.find(':');
        if (colon != std::string::npos) name = name.substr(colon + 1);
        p2state = P2::Profiles;
        out.profiles.push_back(ParsedProfile{strip_brackets(trim(name)), false, "", {}});
        current = &out.profiles.back();
        in_about_others = false;
        continue;
      }
    }
    if (current && match_label(line, "About Self")) {
      in_about_others = false;
      continue;
    }
    if (current && match_label(line, "About Others")) {
      in_about_others = true;
      continue;
    }

    std::string t = trim(line);
    if (t.empty()) continue;
    if (p2state == P2::Background) {
      out.background += t + "\n";
    } else if (current) {
      if (in_about_others) {
        while (!t.empty() && (t.front() == '*' || t.front() == '-')) t = trim(t.substr(1));
        size_t colon = t.find(':');
        if (colon == std::string::npos) continue;
        std::string other = strip_brackets(trim(t.substr(0, colon)));
        std::string view = trim(t.substr(colon + 1));
        if (!other.empty()) current->about_others[other] = view;
      } else {
        while (!t.empty() && (t.front() == '*' || t.front() == '-')) t = trim(t.substr(1));
        if (!t.empty()) {
          if (!current->about_self.empty()) current->about_self += ' ';
          current->about_self += t;
        }
      }
    }
  }
  out.background = trim(out.background);

  if (out.background.empty()) throw ScenarioParseError("missing story background");
  if (out.profiles.empty()) throw ScenarioParseError("no character profiles parsed");
  return out;
}

bool detect_dialogue_in_background(const std::string& background,
                                   const std::set<std::string>& names) {
  for (const std::string& raw : split_lines(background)) {
    std::string line = trim(raw);
    size_t colon = line.find(':');
    if (colon != std::string::npos && names.count(trim(line.substr(0, colon)))) return true;
  }
  static const std::vector<std::string> speech_verbs = {
      "says",    "said",    "asks",     "asked",    "replies", "replied",
      "shouts",  "shouted", "whispers", "whispered", "exclaims", "exclaimed"};
  size_t quote = background.find('"');
  while (quote != std::string::npos) {
    size_t close = background.find('"', quote + 1);
    if (close == std::string::npos) break;
    size_t from = quote > 40 ? quote - 40 : 0;
    std::string before = to_lower(background.substr(from, quote - from));
    std::string after = to_lower(background.substr(close + 1, 40));
    for (const std::string& v : speech_verbs)
      if (contains_word(before, v) || contains_word(after, v)) return true;
    quote = background.find('"', close + 1);
  }
  return false;
}

// --- prompt assembly ----------------------------------------------------------

std::string render_pattern_information(const Registry& registry,
                                       const std::vector<std::string>& combo) {
  std::string out;
  for (const std::string& id : combo) {
    const Pattern& p = registry.at(id);
    out += "### " + p.name + "\n";
    out += "Definition:\n" + p.definition + "\n";
    out += "Core Mechanisms:\n" + p.core_mechanisms + "\n";
    out += "Real-World Manifestations:\n" + p.manifestations + "\n\n";
  }
  return trim(out);
}

std::string render_about_others_text(const CharacterProfile& c) {
  std::string out;
  for (const auto& [other, view] : c.about_others) out += "- " + other + ": " + view + "\n";
  return trim(out);
}

std::string render_scenario_text(const Scenario& s) {
  std::string out = "Story Background:\n" + s.background + "\n\nCharacters' Profiles:\n";
  for (const CharacterProfile& c : s.characters) {
    bool prot = c.role == CharacterProfile::Role::Protagonist;
    out += "\n### " + std::string(prot ? "Protagonist: " : "Supporting Character: ") + c.name +
           "\n";
    out += "* About Self:\n" + c.about_self + "\n";
    out += "* About Others:\n" + render_about_others_text(c) + "\n";
  }
  return out;
}

std::string render_analysis_text(const Scenario& s) {
  std::string out = "Design Rationale:\n" + s.rationale + "\n\nCatalyst Details:\n";
  for (const Catalyst& c : s.catalysts) out += "* " + c.detail + ": " + c.function + "\n";
  out += "\nExpected Character Tendencies:\n";
  for (const CharacterProfile& c : s.characters) {
    auto it = s.tendencies.find(c.name);
    if (it == s.tendencies.end()) continue;
    std::vector<std::string> numbered;
    for (size_t i = 0; i < it->second.size(); ++i)
      numbered.push_back(std::to_string(i + 1) + ". " + it->second[i]);
    out += "@ [" + c.name + "]: " + join(numbered, "; ") + "\n";
  }
  return out;
}

// --- ScenarioSynthesizer --------------------------------------------------------

ScenarioSynthesizer::ScenarioSynthesizer(const Registry& registry, Gateway& provider,
                                         const PromptLibrary& prompts, SynthesisOptions options)
    : registry_(registry), provider_(provider), prompts_(prompts), options_(std::move(options)) {}

Scenario ScenarioSynthesizer::assemble(const VariantSpec& spec, const NameSample& names,
                                       const ParsedScenario& parsed) const {
  std::set<std::string> candidates(names.male.begin(), names.male.end());
  candidates.insert(names.female.begin(), names.female.end());

  for (const ParsedProfile& p : parsed.profiles)
    if (!candidates.count(p.name))
      throw ScenarioParseError("invented_name: " + p.name);
  for (const auto& [name, items] : parsed.tendencies) {
    (void)items;
    if (!candidates.count(name)) throw ScenarioParseError("invented_name: " + name);
  }

  std::set<std::string> profile_names;
  for (const ParsedProfile& p : parsed.profiles) profile_names.insert(p.name);
  std::set<std::string> bearers;
  for (const auto& [name, items] : parsed.tendencies) {
    (void)items;
    if (!profile_names.count(name))
      throw ScenarioParseError("tendency character has no profile: " + name);
    bearers.insert(name);
  }

  Scenario s;
  s.id = spec.id;
  s.combo = spec.combo;
  s.variant = spec.dimension;
  s.background = parsed.background;
  s.rationale = parsed.rationale;
  s.catalysts = parsed.catalysts;
  for (const ParsedProfile& p : parsed.profiles) {
    CharacterProfile c;
    c.name = p.name;
    c.role = p.is_protagonist ? CharacterProfile::Role::Protagonist
                              : CharacterProfile::Role::Supporting;
    c.about_self = p.about_self;
    c.about_others = p.about_others;
    // The tendency block names the pattern bearers; the prompt does not
    // attribute individual patterns, so bearers carry the scenario combo.
    if (bearers.count(p.name)) c.assigned_patterns = s.combo;
    s.characters.push_back(std::move(c));
  }
  for (const auto& [name, items] : parsed.tendencies) s.tendencies[name] = items;

  if (!bearers.count(s.protagonist().name))
    throw ScenarioParseError("protagonist carries no pattern: " + s.protagonist().name);
  if (detect_dialogue_in_background(s.background, s.character_names()))
    throw ScenarioParseError("dialogue detected in background");

  validate_scenario(s);
  return s;
}

Scenario ScenarioSynthesizer::generate(const VariantSpec& spec, const NameSample& names) const {
  std::string situation;
  if (spec.dimension) {
    auto it = options_.situations.find(*spec.dimension);
    situation = it != options_.situations.end() ? it->second : diamonds_name(*spec.dimension);
  }

  ChatRequest req;
  req.system = prompts_.raw("scenario.system");
  req.user = prompts_.render("scenario.user",
                             {{"pattern_information", render_pattern_information(registry_, spec.combo)},
                              {"situation", situation},
                              {"candidate_names", join(names.all(), ", ")}});
  req.temperature = options_.temperature;
  req.tag = "scenario:" + spec.id;

  std::string last_reason, last_raw;
  for (int attempt = 0; attempt <= options_.max_regenerations; ++attempt) {
    ChatResponse resp = provider_.complete(req);
    try {
      return assemble(spec, names, parse_scenario_response(resp.text));
    } catch (const ScenarioParseError& e) {
      last_reason = e.what();
      last_raw = resp.text;
    } catch (const ScenarioError& e) {
      last_reason = e.what();
      last_raw = resp.text;
    }
  }
  throw SynthesisRejection("scenario", last_reason, last_raw);
}

// --- ConversationSynthesizer -----------------------------------------------------

ConversationSynthesizer::ConversationSynthesizer(const Registry& registry, Gateway& provider,
                                                 const PromptLibrary& prompts,
                                                 SynthesisOptions options)
    : registry_(registry), provider_(provider), prompts_(prompts), options_(std::move(options)) {}

Conversation ConversationSynthesizer::generate(const Scenario& scenario) const {
  std::vector<std::string> supporting;
  for (const CharacterProfile& c : scenario.characters)
    if (c.role != CharacterProfile::Role::Protagonist) supporting.push_back(c.name);

  ChatRequest req;
  req.system = prompts_.raw("conversation.system");
  req.user = prompts_.render(
      "conversation.user",
      {{"pattern_information", render_pattern_information(registry_, scenario.combo)},
       {"scenario", render_scenario_text(scenario)},
       {"protagonist", scenario.protagonist().name},
       {"supporting_characters", join(supporting, ", ")},
       {"analysis", render_analysis_text(scenario)}});
  req.temperature = options_.temperature;
  req.tag = "conversation:" + scenario.id;

  std::string last_reason, last_raw;
  for (int attempt = 0; attempt <= options_.max_regenerations; ++attempt) {
    ChatResponse resp = provider_.complete(req);
    try {
      Conversation conv =
          parse_conversation(resp.text, scenario.character_names(), scenario.id);
      ValidationReport report = validate_conversation(conv, scenario.rules());
      if (report.clean()) return conv;
      last_reason = report.summary();
      last_raw = resp.text;
    } catch (const ParseError& e) {
      last_reason = e.what();
      last_raw = resp.text;
    }
  }
  throw SynthesisRejection("conversation", last_reason, last_raw);
}

}  // namespace forge
