#include <cmath>

#include "doctest.h"
#include "forge/dataset.hpp"
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
    p.definition = "definition";
    p.core_mechanisms = "mechanisms";
    p.manifestations = "manifestations";
    ps.push_back(std::move(p));
  }
  return Registry::from_patterns(std::move(ps));
}

PromptLibrary prompts() { return PromptLibrary::load(FORGE_PROMPTS_DIR); }

Scenario tiny_scenario(const std::string& id, std::vector<std::string> combo,
                       const std::vector<std::string>& bearers = {"P"}) {
  Scenario s;
  s.id = id;
  std::sort(combo.begin(), combo.end());
  s.combo = std::move(combo);
  s.background = "A quiet office at dusk.";
  CharacterProfile p;
  p.name = "P";
  p.role = CharacterProfile::Role::Protagonist;
  p.about_self = "Leads the team.";
  p.about_others = {{"S", "a colleague"}, {"T", "an intern"}};
  CharacterProfile sup;
  sup.name = "S";
  sup.about_self = "Keeps the books.";
  sup.about_others = {{"P", "the boss"}, {"T", "an intern"}};
  CharacterProfile t;
  t.name = "T";
  t.about_self = "Watches and learns.";
  t.about_others = {{"P", "the boss"}, {"S", "a colleague"}};
  s.characters = {p, sup, t};
  for (const std::string& b : bearers) {
    for (auto& c : s.characters)
      if (c.name == b) c.assigned_patterns = s.combo;
    s.tendencies[b] = {"tendency one for " + b, "tendency two for " + b};
  }
  validate_scenario(s);
  return s;
}

Conversation gold_conversation(const std::string& scenario_id, int turns = 16) {
  Conversation c;
  c.scenario_id = scenario_id;
  for (int i = 0; i < turns; ++i) {
    std::string who = (i == turns - 1) ? "P" : (i % 2 == 0 ? "S" : (i % 4 == 1 ? "P" : "T"));
    c.turns.push_back(Turn{who,
                           {make_thought("thought " + std::to_string(i)),
                            make_speech("line " + std::to_string(i) + " spoken plainly")}});
  }
  return c;
}

}  // namespace

TEST_CASE("published OOD set reproduced from consistent frequencies") {
  Registry reg = stub_registry();
  std::map<std::string, int64_t> freq;
  for (const std::string& id : reg.ids()) freq[id] = 25;
  // the four held-out social-cognitive patterns: two absent, two rare
  freq["just-world-hypothesis"] = 0;
  freq["egocentric-bias"] = 0;
  freq["effort-justification"] = 1;
  freq["social-desirability-bias"] = 1;
  // least frequent trait per dimension; Agreeableness's floor stays highest
  freq["rash"] = 2;          // Conscientiousness
  freq["dull"] = 2;          // Intellect
  freq["nervous"] = 3;       // EmotionalStability
  freq["introverted"] = 3;   // Extraversion
  freq["callous"] = 9;       // Agreeableness floor, dropped as the 5th lowest

  OodSet ood = select_ood_patterns(reg, freq);
  CHECK(ood.social == std::vector<std::string>{"effort-justification", "egocentric-bias",
                                               "just-world-hypothesis",
                                               "social-desirability-bias"});
  CHECK(ood.traits == std::vector<std::string>{"dull", "introverted", "nervous", "rash"});
}

TEST_CASE("all-zero frequencies fall back to lexicographic order") {
  Registry reg = stub_registry();
  OodSet ood = select_ood_patterns(reg, {});
  // oracle: first four social ids lexicographically
  auto socials = reg.socials();
  std::vector<std::string> ids;
  for (auto* p : socials) ids.push_back(p->id);
  std::sort(ids.begin(), ids.end());
  std::vector<std::string> expect(ids.begin(), ids.begin() + 4);
  CHECK(ood.social == expect);
  CHECK(ood.traits.size() == 4);
}

TEST_CASE("crafted counts match a brute-force sort oracle") {
  Registry reg = stub_registry();
  Rng rng(5150);
  std::map<std::string, int64_t> freq;
  for (const std::string& id : reg.ids()) freq[id] = static_cast<int64_t>(rng.below(40));

  OodSet ood = select_ood_patterns(reg, freq);

  // independent sort-and-filter oracle
  auto freq_of = [&](const std::string& id) { return freq.count(id) ? freq[id] : 0; };
  std::vector<std::pair<int64_t, std::string>> socials;
  for (auto* p : reg.socials()) socials.emplace_back(freq_of(p->id), p->id);
  std::sort(socials.begin(), socials.end());
  std::set<std::string> expect_social;
  for (int i = 0; i < 4; ++i) expect_social.insert(socials[i].second);
  CHECK(std::set<std::string>(ood.social.begin(), ood.social.end()) == expect_social);

  std::vector<std::pair<int64_t, std::string>> mins;
  for (TraitDimension d : all_trait_dimensions()) {
    std::vector<std::pair<int64_t, std::string>> cell;
    for (auto* p : reg.by_dimension(d)) cell.emplace_back(freq_of(p->id), p->id);
    std::sort(cell.begin(), cell.end());
    mins.push_back(cell.front());
  }
  std::sort(mins.begin(), mins.end());
  std::set<std::string> expect_traits;
  for (int i = 0; i < 4; ++i) expect_traits.insert(mins[i].second);
  CHECK(std::set<std::string>(ood.traits.begin(), ood.traits.end()) == expect_traits);
}

TEST_CASE("split classification matches a brute-force classifier") {
  Registry reg = stub_registry();
  std::set<std::string> ood = {"rash", "dull", "nervous", "introverted"};
  std::vector<std::string> in_domain = {"anchoring", "conformity", "jealousy", "awe", "shy"};

  Rng rng(31337);
  std::vector<Scenario> scenarios;
  for (int i = 0; i < 200; ++i) {
    std::vector<std::string> combo;
    int k = 2 + static_cast<int>(rng.below(3));
    std::vector<std::string> pool(in_domain);
    pool.insert(pool.end(), ood.begin(), ood.end());
    combo = rng.sample(pool, static_cast<size_t>(k));
    scenarios.push_back(tiny_scenario("s" + std::to_string(1000 + i), combo));
  }

  auto assignments = split_scenarios(scenarios, ood, 20, 99);
  REQUIRE(assignments.size() == scenarios.size());
  std::map<std::string, Split> got;
  for (const auto& a : assignments) got[a.scenario_id] = a.split;

  // brute-force per-scenario reclassification
  int id_eval_count = 0;
  for (const Scenario& s : scenarios) {
    size_t hits = 0;
    for (const auto& p : s.combo) hits += ood.count(p);
    Split actual = got.at(s.id);
    if (hits == s.combo.size()) {
      CHECK(actual == Split::OodEval);
    } else if (hits > 0) {
      CHECK(actual == Split::MixedEval);
    } else {
      CHECK((actual == Split::Train || actual == Split::IdEval));
      if (actual == Split::IdEval) ++id_eval_count;
    }
  }
  CHECK(id_eval_count == 20);

  // partition: every scenario in exactly one split, deterministic re-run
  auto again = split_scenarios(scenarios, ood, 20, 99);
  std::map<std::string, Split> got2;
  for (const auto& a : again) got2[a.scenario_id] = a.split;
  CHECK(got == got2);
}

TEST_CASE("empty ood set sends everything to train plus id_eval") {
  std::vector<Scenario> scenarios;
  for (int i = 0; i < 30; ++i)
    scenarios.push_back(tiny_scenario("s" + std::to_string(i), {"anchoring", "shy"}));
  auto assignments = split_scenarios(scenarios, {}, 5, 1);
  int train = 0, id_eval = 0;
  for (const auto& a : assignments) {
    if (a.split == Split::Train) ++train;
    if (a.split == Split::IdEval) ++id_eval;
  }
  CHECK(train == 25);
  CHECK(id_eval == 5);
}

TEST_CASE("id_eval larger than the pool is an error") {
  std::vector<Scenario> scenarios = {tiny_scenario("s1", {"anchoring", "shy"})};
  CHECK_THROWS_AS(split_scenarios(scenarios, {}, 5, 1), DatasetError);
}

TEST_CASE("split manifest csv round-trip") {
  std::vector<SplitAssignment> rows = {{"a", Split::Train},
                                       {"b", Split::IdEval},
                                       {"c", Split::OodEval},
                                       {"d", Split::MixedEval}};
  auto back = parse_split_manifest_csv(split_manifest_csv(rows));
  REQUIRE(back.size() == 4);
  for (size_t i = 0; i < 4; ++i) {
    CHECK(back[i].scenario_id == rows[i].scenario_id);
    CHECK(back[i].split == rows[i].split);
  }
}

TEST_CASE("sft export merges context and extracts the target's turns") {
  PromptLibrary lib = prompts();
  Scenario s = tiny_scenario("scn", {"anchoring", "shy"}, {"P", "S"});
  Conversation gold = gold_conversation("scn");

  SftSample sample = export_sft_sample(s, gold, "P", lib);
  CHECK(sample.source == "humanllm");
  CHECK(sample.system.find("You are P.") == 0);
  CHECK(sample.system.find("==Current Scenario==") != std::string::npos);
  CHECK(sample.system.find(s.background) != std::string::npos);

  // hand-rolled oracle: rebuild the expected alternation
  std::vector<SftMessage> expect;
  std::vector<std::string> user_buf, asst_buf;
  for (const Turn& t : gold.turns) {
    if (t.speaker == "P") {
      if (!user_buf.empty()) {
        expect.push_back({"user", join(user_buf, "\n")});
        user_buf.clear();
      }
      asst_buf.push_back(serialize_segments(t.segments));
    } else {
      if (!asst_buf.empty()) {
        expect.push_back({"assistant", join(asst_buf, "\n")});
        asst_buf.clear();
      }
      user_buf.push_back(serialize_turn(t));
    }
  }
  if (!asst_buf.empty()) expect.push_back({"assistant", join(asst_buf, "\n")});
  CHECK(sample.messages == expect);

  // assistant messages re-parse to exactly the target's turns
  std::vector<Segment> reparsed;
  for (const SftMessage& m : sample.messages) {
    if (m.role != "assistant") continue;
    for (const std::string& line : split_lines(m.content)) {
      auto segs = parse_segments(line);
      reparsed.insert(reparsed.end(), segs.begin(), segs.end());
    }
  }
  std::vector<Segment> expected_segments;
  for (const Turn& t : gold.turns)
    if (t.speaker == "P")
      expected_segments.insert(expected_segments.end(), t.segments.begin(), t.segments.end());
  CHECK(reparsed == expected_segments);
}

TEST_CASE("one sample per pattern-bearing character") {
  PromptLibrary lib = prompts();
  std::vector<Scenario> scenarios;
  std::map<std::string, Conversation> convs;
  for (int i = 0; i < 4; ++i) {
    std::string id = "scn" + std::to_string(i);
    scenarios.push_back(tiny_scenario(id, {"anchoring", "shy"}, {"P", "S", "T"}));
    convs[id] = gold_conversation(id);
  }
  auto samples = export_sft(scenarios, convs, lib);
  CHECK(samples.size() == 12);  // 3 bearers x 4 scenarios

  // protagonist-only bearer yields exactly one sample
  std::vector<Scenario> solo = {tiny_scenario("solo", {"anchoring", "shy"}, {"P"})};
  std::map<std::string, Conversation> solo_conv = {{"solo", gold_conversation("solo")}};
  CHECK(export_sft(solo, solo_conv, lib).size() == 1);
}

TEST_CASE("scenario without conversation is skipped and logged") {
  PromptLibrary lib = prompts();
  std::vector<Scenario> scenarios = {tiny_scenario("lonely", {"anchoring", "shy"})};
  std::vector<ExportSkip> skips;
  auto samples = export_sft(scenarios, {}, lib, &skips);
  CHECK(samples.empty());
  REQUIRE(skips.size() == 1);
  CHECK(skips[0].scenario_id == "lonely");
}

TEST_CASE("character with zero turns is skipped and logged") {
  PromptLibrary lib = prompts();
  Scenario s = tiny_scenario("zt", {"anchoring", "shy"}, {"P", "T"});
  Conversation gold;
  gold.scenario_id = "zt";
  for (int i = 0; i < 12; ++i) {
    std::string who = (i == 11) ? "P" : (i % 2 == 0 ? "S" : "P");
    gold.turns.push_back(Turn{who, {make_speech("line " + std::to_string(i))}});
  }
  std::vector<ExportSkip> skips;
  auto samples = export_sft({s}, {{"zt", gold}}, lib, &skips);
  CHECK(samples.size() == 1);  // P exported, T skipped
  REQUIRE(skips.size() == 1);
  CHECK(skips[0].character == "T");
}

TEST_CASE("sharegpt serialization round-trip and external adapters") {
  PromptLibrary lib = prompts();
  Scenario s = tiny_scenario("rt", {"anchoring", "shy"});
  SftSample sample = export_sft_sample(s, gold_conversation("rt"), "P", lib);
  SftSample back = sft_from_sharegpt(sft_to_sharegpt(sample));
  CHECK(back.system == sample.system);
  CHECK(back.messages == sample.messages);
  CHECK(back.scenario_id == "rt");

  Json external_sharegpt{{"conversations",
                          Json::array({Json{{"from", "system"}, {"value", "sys"}},
                                       Json{{"from", "human"}, {"value", "q"}},
                                       Json{{"from", "gpt"}, {"value", "a"}}})}};
  SftSample ext = sft_from_external(external_sharegpt, "general", 7);
  CHECK(ext.system == "sys");
  REQUIRE(ext.messages.size() == 2);
  CHECK(ext.messages[1].role == "assistant");

  Json external_chat{{"messages", Json::array({Json{{"role", "user"}, {"content", "q"}},
                                               Json{{"role", "assistant"}, {"content", "a"}}})}};
  SftSample ext2 = sft_from_external(external_chat, "roleplay", 8);
  CHECK(ext2.source == "roleplay");
  REQUIRE(ext2.messages.size() == 2);
}

TEST_CASE("mixture resolves the published counts exactly") {
  MixtureSpec spec = resolve_mixture({30543, 114000, 15272}, {4, 4, 2});
  CHECK(spec.resolved[0] == 30543);
  CHECK(spec.resolved[1] == 30543);
  CHECK(spec.resolved[2] == 15272);
  CHECK(spec.total() == 76358);
}

TEST_CASE("mixture edge cases") {
  SUBCASE("ratio 1:0:0 keeps only the anchor pool") {
    MixtureSpec spec = resolve_mixture({100, 50, 50}, {1, 0, 0});
    CHECK(spec.resolved == std::array<size_t, 3>{100, 0, 0});
  }
  SUBCASE("exact synthetic pools") {
    MixtureSpec spec = resolve_mixture({40, 40, 20}, {4, 4, 2});
    CHECK(spec.resolved == std::array<size_t, 3>{40, 40, 20});
  }
  SUBCASE("pool underflow") {
    CHECK_THROWS_AS(resolve_mixture({100, 10, 50}, {4, 4, 2}), DatasetError);
  }
  SUBCASE("zero anchor ratio") {
    CHECK_THROWS_AS(resolve_mixture({100, 10, 50}, {0, 4, 2}), DatasetError);
  }
}

TEST_CASE("mixture ratio deviation stays within 1/total") {
  Rng rng(777);
  for (int round = 0; round < 200; ++round) {
    std::array<int64_t, 3> ratio = {1 + static_cast<int64_t>(rng.below(9)),
                                    static_cast<int64_t>(rng.below(10)),
                                    static_cast<int64_t>(rng.below(10))};
    size_t anchor = 10 + rng.below(5000);
    std::array<size_t, 3> pools = {anchor, 0, 0};
    for (size_t i = 1; i < 3; ++i) {
      double want = static_cast<double>(anchor) * static_cast<double>(ratio[i]) /
                    static_cast<double>(ratio[0]);
      pools[i] = static_cast<size_t>(std::llround(want)) + rng.below(50);
    }
    MixtureSpec spec = resolve_mixture(pools, ratio);
    double total = static_cast<double>(spec.total());
    double ratio_sum = static_cast<double>(ratio[0] + ratio[1] + ratio[2]);
    for (size_t i = 0; i < 3; ++i) {
      double share = static_cast<double>(spec.resolved[i]) / total;
      double target = static_cast<double>(ratio[i]) / ratio_sum;
      CHECK(std::abs(share - target) <= 1.0 / total + 1e-12);
    }
  }
}

TEST_CASE("build_mixture samples without replacement, deterministically") {
  std::array<std::vector<std::string>, 3> pools;
  for (int i = 0; i < 40; ++i) pools[0].push_back("h" + std::to_string(i));
  for (int i = 0; i < 90; ++i) pools[1].push_back("g" + std::to_string(i));
  for (int i = 0; i < 30; ++i) pools[2].push_back("r" + std::to_string(i));
  MixtureSpec spec;
  auto manifest = build_mixture(pools, {4, 4, 2}, 13, &spec);
  CHECK(spec.resolved == std::array<size_t, 3>{40, 40, 20});
  CHECK(manifest.size() == 100);
  std::set<std::string> ids;
  for (const auto& e : manifest) ids.insert(e.source + ":" + e.sample_id);
  CHECK(ids.size() == manifest.size());
  auto manifest2 = build_mixture(pools, {4, 4, 2}, 13, nullptr);
  REQUIRE(manifest2.size() == manifest.size());
  for (size_t i = 0; i < manifest.size(); ++i)
    CHECK(manifest[i].sample_id == manifest2[i].sample_id);
}

TEST_CASE("corpus stats match a hand-computed oracle") {
  std::vector<Scenario> scenarios = {tiny_scenario("a", {"anchoring", "shy"}, {"P"}),
                                     tiny_scenario("b", {"anchoring", "awe", "shy"}, {"P", "S"})};
  std::vector<Conversation> convs = {gold_conversation("a", 12), gold_conversation("b", 20)};
  StatReport r = corpus_stats(scenarios, convs);
  CHECK(r.scenario_count == 2);
  CHECK(r.conversation_count == 2);
  CHECK(r.patterns_per_scenario.mean == doctest::Approx(2.5));
  CHECK(r.patterns_per_scenario.min == 2);
  CHECK(r.patterns_per_scenario.max == 3);
  CHECK(r.characters_per_scenario.mean == doctest::Approx(3.0));
  CHECK(r.turns_per_conversation.mean == doctest::Approx(16.0));
  CHECK(r.pattern_bearing_characters == 3);
  CHECK(r.tendencies_per_bearer.mean == doctest::Approx(2.0));

  StatReport empty = corpus_stats({}, {});
  CHECK(empty.scenario_count == 0);
  CHECK(empty.turns_per_conversation.mean == 0.0);
  CHECK(histogram_csv(r).find("turns_per_conversation,12,1") != std::string::npos);
}
