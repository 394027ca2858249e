#include <cmath>

#include "doctest.h"
#include "forge/synthesis.hpp"
#include "test_helpers.hpp"

using namespace forge;

namespace {

Registry stub_registry() {
  std::vector<Pattern> ps;
  for (const auto& e : builtin_taxonomy()) {
    Pattern p;
    p.id = e.id;
    p.name = e.name;
    p.kind = e.kind;
    p.definition = "definition of " + e.name;
    p.core_mechanisms = "mechanisms of " + e.name;
    p.manifestations = "manifestations of " + e.name;
    ps.push_back(std::move(p));
  }
  return Registry::from_patterns(std::move(ps));
}

PromptLibrary prompts() { return PromptLibrary::load(FORGE_PROMPTS_DIR); }

Gateway scripted_gateway(std::shared_ptr<MockTransport> mock) {
  LLMProviderHandle h;
  h.provider_name = "mock";
  h.model_name = "scripted";
  h.rate_limit_rpm = 600000;
  h.backoff_base_ms = 1;
  return Gateway(std::move(h), std::move(mock));
}

NameSample meridian_names() {
  NameSample s;
  s.male = {"Nouman", "Eulises", "Marcus", "Theo", "Idris"};
  s.female = {"Raksha", "Wendy", "Priya", "Alma", "Sofia"};
  return s;
}

const char* kMeridianResponse = R"(## Part 1
Design Rationale:
Ultimate attribution error drives the protagonist's deflection; unartistic shapes his utilitarian framing; nervous colors Raksha's presentation anxiety.

Catalyst Details:
* [Customer complaint reports]: [Trigger for blame attribution]
* [April memo]: [Evidence the protagonist dismissed warnings]

Expected Character Tendencies:
@ [Nouman]: 1. [Attributes engineering failures to situational factors]; 2. [Uses dispositional language for out-group failures]; 3. [Deflects responsibility with situational metrics]; 4. [Dismisses UX feedback as subjective]
@ [Raksha]: 1. [Shows visible anxiety under scrutiny]; 2. [Seeks validation through documented evidence]

## Part 2
Story Background:
The eighth-floor conference room of Meridian Technologies is flooded with afternoon sun. At the head of the table, Eulises sorts through a stack of customer complaint reports. Nouman sits rigid three seats down, fingers drumming against his leather portfolio. Across from him, Raksha straightens the corners of her presentation folder. The meeting was called with forty-eight hours' notice.

Characters' Profiles:

### Protagonist: Nouman
* About Self:
  A 34-year-old Senior Engineering Manager whose identity is rooted in measurable outcomes. Views emotions as noise in decision-making systems. Motivation: deflect blame from his engineering team and protect his professional reputation.
* About Others:
  * Raksha: Marketing director he regards as driven by subjective complaints.
  * Eulises: The COO whose judgment he respects but fears.

### Supporting Character 1: Raksha
* About Self:
  A 31-year-old Marketing Director navigating between engineering and customers. High-stakes meetings bypass her coping mechanisms. Motivation: have her documented warnings acknowledged.
* About Others:
  * Nouman: The engineering manager who dismissed her memo.
  * Eulises: A demanding but fair senior leader.

### Supporting Character 2: Eulises
* About Self:
  The 52-year-old Chief Operations Officer, twenty-eight years of turning struggling product lines around. Motivation: force both parties to confront the dysfunction.
* About Others:
  * Nouman: A capable manager with a blind spot for user concerns.
  * Raksha: A conscientious director whose warnings went unheeded.
)";

VariantSpec meridian_spec() {
  VariantSpec spec;
  spec.combo = {"nervous", "ultimate-attribution-error", "unartistic"};
  spec.dimension = DiamondsDimension::Adversity;
  spec.name_seed = 11;
  spec.id = "meridian-fixture";
  return spec;
}

std::string scripted_conversation_text(const std::string& protagonist,
                                       const std::vector<std::string>& supporting, int turns) {
  std::vector<std::string> lines;
  for (int i = 0; i < turns; ++i) {
    std::string who = (i == turns - 1)
                          ? protagonist
                          : (i % 2 == 0 ? supporting[static_cast<size_t>(i / 2) % supporting.size()]
                                        : protagonist);
    lines.push_back(who + ": [thought " + std::to_string(i) + "] (gesture " + std::to_string(i) +
                    ") Line " + std::to_string(i) + " of the exchange.");
  }
  return join(lines, "\n");
}

}  // namespace

TEST_CASE("plan_variants yields two dimensioned specs and one free") {
  Rng rng(42);
  auto specs = plan_variants({"shy", "anchoring"}, rng);
  REQUIRE(specs.size() == 3);
  CHECK(specs[0].dimension.has_value());
  CHECK(specs[1].dimension.has_value());
  CHECK_FALSE(specs[2].dimension.has_value());
  CHECK(specs[0].combo == std::vector<std::string>{"anchoring", "shy"});
  // ids distinct
  CHECK(specs[0].id != specs[1].id);
  CHECK(specs[1].id != specs[2].id);
}

TEST_CASE("plan_variants deterministic under a fixed seed") {
  Rng a(42), b(42);
  auto sa = plan_variants({"shy", "anchoring"}, a);
  auto sb = plan_variants({"anchoring", "shy"}, b);
  for (int i = 0; i < 3; ++i) {
    CHECK(sa[i].id == sb[i].id);
    CHECK(sa[i].dimension == sb[i].dimension);
    CHECK(sa[i].name_seed == sb[i].name_seed);
  }
}

TEST_CASE("sample_names basics") {
  SUBCASE("pool of exactly 5+5 returns everything") {
    NamePool pool = NamePool::from_lists({"a", "b", "c", "d", "e"}, {"f", "g", "h", "i", "j"});
    NameSample s = sample_names(pool, 3);
    CHECK(s.male.size() == 5);
    CHECK(s.female.size() == 5);
    std::set<std::string> uniq;
    for (const auto& n : s.all()) uniq.insert(n);
    CHECK(uniq.size() == 10);
  }
  SUBCASE("reproducible under a fixed seed") {
    std::vector<std::string> m, f;
    for (int i = 0; i < 60; ++i) {
      m.push_back("m" + std::to_string(i));
      f.push_back("f" + std::to_string(i));
    }
    NamePool pool = NamePool::from_lists(m, f);
    NameSample s1 = sample_names(pool, 99);
    NameSample s2 = sample_names(pool, 99);
    CHECK(s1.male == s2.male);
    CHECK(s1.female == s2.female);
  }
  SUBCASE("pool too small") {
    NamePool pool = NamePool::from_lists({"a"}, {"b", "c", "d", "e", "f"});
    CHECK_THROWS_AS(sample_names(pool, 1), ScenarioError);
  }
}

TEST_CASE("name sampling is close to uniform over many draws") {
  // chi-square style oracle: inclusion counts stay within 3 sigma of the
  // binomial expectation for every name in a 100-name pool.
  std::vector<std::string> m, f;
  for (int i = 0; i < 100; ++i) {
    m.push_back("m" + std::to_string(i));
    f.push_back("f" + std::to_string(i));
  }
  NamePool pool = NamePool::from_lists(m, f);
  std::map<std::string, int> counts;
  const int draws = 10000;
  for (int d = 0; d < draws; ++d) {
    NameSample s = sample_names(pool, 777000 + static_cast<uint64_t>(d));
    for (const auto& n : s.male) counts[n]++;
  }
  double p = 5.0 / 100.0;
  double mean = draws * p;
  double sigma = std::sqrt(draws * p * (1 - p));
  for (int i = 0; i < 100; ++i) {
    double c = counts["m" + std::to_string(i)];
    CHECK(std::abs(c - mean) <= 3.0 * sigma);
  }
}

TEST_CASE("tendency line grammar") {
  SUBCASE("minimal") {
    auto [name, items] = parse_tendency_line("@ [X]: 1. a; 2. b");
    CHECK(name == "X");
    CHECK(items == std::vector<std::string>{"a", "b"});
  }
  SUBCASE("bracketed items and spacing") {
    auto [name, items] =
        parse_tendency_line("@ [Nouman]:  1. [Deflects blame];  2. [Cites metrics]; 3. [Flat tone]");
    CHECK(name == "Nouman");
    REQUIRE(items.size() == 3);
    CHECK(items[0] == "Deflects blame");
  }
  SUBCASE("unbracketed name") {
    auto [name, items] = parse_tendency_line("@ Raksha: 1. worries; 2. checks notes");
    CHECK(name == "Raksha");
    CHECK(items.size() == 2);
  }
  SUBCASE("malformed lines throw") {
    CHECK_THROWS_AS(parse_tendency_line("Nouman: 1. a"), ScenarioParseError);
    CHECK_THROWS_AS(parse_tendency_line("@ [Nouman] 1. a"), ScenarioParseError);
    CHECK_THROWS_AS(parse_tendency_line("@ [Nouman]: "), ScenarioParseError);
  }
}

TEST_CASE("scenario response parses into the expected structure") {
  ParsedScenario p = parse_scenario_response(kMeridianResponse);
  CHECK(p.rationale.find("Ultimate attribution error") == 0);
  REQUIRE(p.catalysts.size() == 2);
  CHECK(p.catalysts[0].detail == "Customer complaint reports");
  CHECK(p.catalysts[0].function == "Trigger for blame attribution");
  REQUIRE(p.tendencies.size() == 2);
  CHECK(p.tendencies[0].first == "Nouman");
  CHECK(p.tendencies[0].second.size() == 4);
  CHECK(p.tendencies[0].second[0] == "Attributes engineering failures to situational factors");
  REQUIRE(p.profiles.size() == 3);
  CHECK(p.profiles[0].name == "Nouman");
  CHECK(p.profiles[0].is_protagonist);
  CHECK(p.profiles[1].about_others.count("Nouman") == 1);
  CHECK(p.background.find("Meridian Technologies") != std::string::npos);
}

TEST_CASE("missing part boundary is a parse error") {
  CHECK_THROWS_AS(parse_scenario_response("Design Rationale: things happen"),
                  ScenarioParseError);
}

TEST_CASE("scenario generation from scripted response") {
  Registry reg = stub_registry();
  PromptLibrary lib = prompts();
  auto mock = std::make_shared<MockTransport>();
  mock->set_fallback(kMeridianResponse);
  Gateway gw = scripted_gateway(mock);
  ScenarioSynthesizer synth(reg, gw, lib);

  Scenario s = synth.generate(meridian_spec(), meridian_names());
  CHECK(s.id == "meridian-fixture");
  CHECK(s.protagonist().name == "Nouman");
  CHECK(s.characters.size() == 3);
  REQUIRE(s.tendencies.count("Nouman"));
  CHECK(s.tendencies.at("Nouman").size() == 4);
  CHECK(s.tendencies.at("Raksha").size() == 2);
  CHECK(s.tendencies.count("Eulises") == 0);
  CHECK(s.find_character("Eulises")->assigned_patterns.empty());
  CHECK(s.find_character("Nouman")->assigned_patterns == s.combo);
  validate_scenario(s);
}

TEST_CASE("invented name is rejected with the expected reason") {
  Registry reg = stub_registry();
  PromptLibrary lib = prompts();
  auto mock = std::make_shared<MockTransport>();
  std::string bad = kMeridianResponse;
  // oracle: set membership against the candidate list
  size_t pos;
  while ((pos = bad.find("Eulises")) != std::string::npos) bad.replace(pos, 7, "Zanzibar");
  mock->set_fallback(bad);
  Gateway gw = scripted_gateway(mock);
  ScenarioSynthesizer synth(reg, gw, lib);
  try {
    synth.generate(meridian_spec(), meridian_names());
    FAIL("expected rejection");
  } catch (const SynthesisRejection& r) {
    CHECK(r.stage() == "scenario");
    CHECK(r.reason().find("invented_name") != std::string::npos);
    CHECK_FALSE(r.raw_text().empty());
  }
}

TEST_CASE("one regeneration attempt is made before rejection") {
  Registry reg = stub_registry();
  PromptLibrary lib = prompts();
  auto mock = std::make_shared<MockTransport>();
  int calls = 0;
  mock->set_handler([&](const ChatRequest&) -> std::optional<std::string> {
    ++calls;
    return calls == 1 ? "garbage with no parts" : kMeridianResponse;
  });
  Gateway gw = scripted_gateway(mock);
  ScenarioSynthesizer synth(reg, gw, lib);
  Scenario s = synth.generate(meridian_spec(), meridian_names());
  CHECK(calls == 2);
  CHECK(s.protagonist().name == "Nouman");
}

TEST_CASE("dialogue detection in background") {
  std::set<std::string> names = {"Nouman", "Raksha"};
  SUBCASE("plain narrative passes, even with quoted mottoes") {
    CHECK_FALSE(detect_dialogue_in_background(
        "Every purchase was judged by one question: \"Will it last?\" The meeting notice read "
        "\"Post-Mortem: Quantum Series Launch Failure\".",
        names));
  }
  SUBCASE("turn-shaped line is dialogue") {
    CHECK(detect_dialogue_in_background("The room hushes.\nNouman: we need to talk.", names));
  }
  SUBCASE("speech verb next to quotation is dialogue") {
    CHECK(detect_dialogue_in_background("Raksha said \"the metrics are wrong\" during setup.",
                                        names));
  }
}

TEST_CASE("scenario json round-trips through validation") {
  Registry reg = stub_registry();
  PromptLibrary lib = prompts();
  auto mock = std::make_shared<MockTransport>();
  mock->set_fallback(kMeridianResponse);
  Gateway gw = scripted_gateway(mock);
  ScenarioSynthesizer synth(reg, gw, lib);
  Scenario s = synth.generate(meridian_spec(), meridian_names());

  Scenario back = scenario_from_json(scenario_to_json(s));
  validate_scenario(back);
  CHECK(scenario_to_json(back) == scenario_to_json(s));
}

TEST_CASE("conversation generation accepts a valid scripted dialogue") {
  Registry reg = stub_registry();
  PromptLibrary lib = prompts();
  auto scen_mock = std::make_shared<MockTransport>();
  scen_mock->set_fallback(kMeridianResponse);
  Gateway scen_gw = scripted_gateway(scen_mock);
  Scenario s = ScenarioSynthesizer(reg, scen_gw, lib).generate(meridian_spec(), meridian_names());

  auto conv_mock = std::make_shared<MockTransport>();
  conv_mock->set_fallback(scripted_conversation_text("Nouman", {"Raksha", "Eulises"}, 16));
  Gateway conv_gw = scripted_gateway(conv_mock);
  Conversation conv = ConversationSynthesizer(reg, conv_gw, lib).generate(s);
  CHECK(conv.turns.size() == 16);
  CHECK(conv.scenario_id == s.id);
  CHECK(validate_conversation(conv, s.rules()).clean());
}

TEST_CASE("conversation boundary and unknown-speaker rejections") {
  Registry reg = stub_registry();
  PromptLibrary lib = prompts();
  auto scen_mock = std::make_shared<MockTransport>();
  scen_mock->set_fallback(kMeridianResponse);
  Gateway scen_gw = scripted_gateway(scen_mock);
  Scenario s = ScenarioSynthesizer(reg, scen_gw, lib).generate(meridian_spec(), meridian_names());

  SUBCASE("11 turns rejected with turn_count violation") {
    auto mock = std::make_shared<MockTransport>();
    mock->set_fallback(scripted_conversation_text("Nouman", {"Raksha", "Eulises"}, 11));
    Gateway gw = scripted_gateway(mock);
    try {
      ConversationSynthesizer(reg, gw, lib).generate(s);
      FAIL("expected rejection");
    } catch (const SynthesisRejection& r) {
      CHECK(r.reason() == "turn_count_below_min(11)");
    }
  }
  SUBCASE("new character rejected as unknown speaker") {
    auto mock = std::make_shared<MockTransport>();
    std::string text = scripted_conversation_text("Nouman", {"Raksha", "Eulises"}, 16);
    text += "\nDave: did someone call me?";
    mock->set_fallback(text);
    Gateway gw = scripted_gateway(mock);
    try {
      ConversationSynthesizer(reg, gw, lib).generate(s);
      FAIL("expected rejection");
    } catch (const SynthesisRejection& r) {
      CHECK(r.reason().find("unknown speaker: Dave") != std::string::npos);
    }
  }
}
