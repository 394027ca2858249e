#include <filesystem>

#include "doctest.h"
#include "forge/pipeline.hpp"
#include "mock_pipeline.hpp"
#include "test_helpers.hpp"

using namespace forge;

namespace {

PipelineConfig fixture_config(const std::string& dir, uint64_t seed) {
  PipelineConfig config = PipelineConfig::defaults();
  config.seed = seed;
  config.parallelism = 2;
  config.id_eval_size = 2;
  config.paths.prompts = FORGE_PROMPTS_DIR;
  config.paths.out = dir + "/out";
  config.paths.combos = dir + "/combos.jsonl";
  config.paths.names = dir + "/names.json";
  config.paths.corpus = dir + "/corpus";
  config.paths.general_sft = dir + "/general.jsonl";
  config.paths.roleplay_sft = dir + "/roleplay.jsonl";
  return config;
}

Pipeline make_pipeline(const PipelineConfig& config) {
  Pipeline pipeline(config);
  auto mock = forge::testing::make_pipeline_mock();
  for (const char* role : {"synthesis", "validation", "judge", "model", "simulator"})
    pipeline.set_transport(role, mock);
  return pipeline;
}

void run_all_stages(Pipeline& pipeline) {
  pipeline.synth_patterns();
  pipeline.synth_scenarios();
  pipeline.synth_conversations();
  pipeline.build_checklists();
  pipeline.extract_checklists();
  pipeline.split_stage();
  pipeline.export_stage();
  pipeline.mixture_stage();
  pipeline.stats_stage();
  pipeline.eval_stage("id_eval", EvalMode::Replay);
}

}  // namespace

TEST_CASE("config validation fails before any provider call") {
  std::string dir = forge::testing::temp_dir("cfg");
  PipelineConfig config = fixture_config(dir, 1);
  SUBCASE("missing prompts dir") {
    config.paths.prompts = dir + "/nope";
    CHECK_THROWS_AS(Pipeline{config}, std::exception);
  }
  SUBCASE("missing input path") {
    forge::testing::write_pipeline_fixture(dir);
    config.paths.combos = dir + "/missing.jsonl";
    CHECK_THROWS_AS(Pipeline{config}, ConfigError);
  }
  SUBCASE("unknown role provider") {
    forge::testing::write_pipeline_fixture(dir);
    config.roles.judge = "gpt-unconfigured";
    CHECK_THROWS_AS(Pipeline{config}, ConfigError);
  }
}

TEST_CASE("config file round-trip with env overrides") {
  std::string dir = forge::testing::temp_dir("cfgfile");
  forge::testing::write_pipeline_fixture(dir);
  PipelineConfig config = fixture_config(dir, 5);
  write_file(dir + "/config.json", config.to_json().dump(2));
  PipelineConfig back = PipelineConfig::load(dir + "/config.json");
  CHECK(back.seed == 5);
  CHECK(back.paths.combos == config.paths.combos);
  CHECK(back.mixture_ratio == config.mixture_ratio);

  setenv("FORGE_SEED", "99", 1);
  PipelineConfig overridden = PipelineConfig::load(dir + "/config.json");
  unsetenv("FORGE_SEED");
  CHECK(overridden.seed == 99);
}

TEST_CASE("full mock pipeline: counts, resume, determinism") {
  std::string dir = forge::testing::temp_dir("pipeline");
  forge::testing::write_pipeline_fixture(dir);
  PipelineConfig config = fixture_config(dir, 7);
  Pipeline pipeline = make_pipeline(config);

  RunManifest patterns = pipeline.synth_patterns();
  CHECK(patterns.output_counts.at("patterns_new") == 15);
  CHECK(patterns.quarantine_count == 0);

  RunManifest scenarios = pipeline.synth_scenarios();
  CHECK(scenarios.output_counts.at("scenarios_new") == 15);  // 5 combos x 3 variants

  RunManifest conversations = pipeline.synth_conversations();
  CHECK(conversations.output_counts.at("conversations_new") == 15);

  RunManifest checklists = pipeline.build_checklists();
  CHECK(checklists.output_counts.at("pattern_checklists_new") == 15);

  RunManifest extract = pipeline.extract_checklists();
  CHECK(extract.output_counts.at("scenario_checklists_new") == 30);  // 2 bearers x 15

  RunManifest split = pipeline.split_stage();
  CHECK(split.output_counts.at("ood_eval") == 6);
  CHECK(split.output_counts.at("id_eval") == 2);
  CHECK(split.output_counts.at("train") == 7);
  Json ood = Json::parse(read_file(pipeline.store_path("ood_patterns.json")));
  CHECK(ood.at("social") == Json::array({"awe", "groupthink", "just-world-hypothesis",
                                         "spotlight-effect"}));
  CHECK(ood.at("traits") == Json::array({"cruel", "dull", "nervous", "timid"}));

  RunManifest exported = pipeline.export_stage();
  CHECK(exported.output_counts.at("sft_samples") == 14);  // 7 train x 2 bearers

  RunManifest mixture = pipeline.mixture_stage();
  CHECK(mixture.output_counts.at("humanllm") == 14);
  CHECK(mixture.output_counts.at("general") == 14);
  CHECK(mixture.output_counts.at("roleplay") == 7);
  CHECK(mixture.output_counts.at("total") == 35);

  pipeline.stats_stage();
  Json stats = Json::parse(read_file(pipeline.store_path("stats.json")));
  CHECK(stats.at("scenario_count") == 15);
  CHECK(stats.at("turns_per_conversation").at("min").get<int>() >= 12);
  CHECK(stats.at("turns_per_conversation").at("max").get<int>() <= 20);

  RunManifest eval = pipeline.eval_stage("id_eval", EvalMode::Replay);
  CHECK(eval.output_counts.at("eval_new") == 2);
  Json report = Json::parse(read_file(pipeline.store_path("eval_report.json")));
  CHECK(report.at("splits").contains("id_eval"));

  // resume: rerunning every stage generates nothing new
  Pipeline again = make_pipeline(config);
  CHECK(again.synth_patterns().output_counts.at("patterns_new") == 0);
  CHECK(again.synth_scenarios().output_counts.at("scenarios_new") == 0);
  CHECK(again.synth_conversations().output_counts.at("conversations_new") == 0);
  CHECK(again.build_checklists().output_counts.at("pattern_checklists_new") == 0);
  CHECK(again.extract_checklists().output_counts.at("scenario_checklists_new") == 0);
  CHECK(again.eval_stage("id_eval", EvalMode::Replay).output_counts.at("eval_new") == 0);

  // determinism: an independent run in a fresh directory produces identical stores
  std::string dir2 = forge::testing::temp_dir("pipeline2");
  forge::testing::write_pipeline_fixture(dir2);
  PipelineConfig config2 = fixture_config(dir2, 7);
  Pipeline pipeline2 = make_pipeline(config2);
  run_all_stages(pipeline2);
  for (const char* store : {"patterns.jsonl", "scenarios.jsonl", "conversations.jsonl",
                            "checklists.jsonl", "splits.csv", "sft_humanllm.jsonl",
                            "mixture.csv", "mixture.jsonl", "stats.json", "eval_results.jsonl"}) {
    CAPTURE(store);
    CHECK(read_file(pipeline.store_path(store)) == read_file(pipeline2.store_path(store)));
  }
}

TEST_CASE("selfplay eval runs clean on the fixture") {
  std::string dir = forge::testing::temp_dir("selfplay");
  forge::testing::write_pipeline_fixture(dir);
  PipelineConfig config = fixture_config(dir, 11);
  Pipeline pipeline = make_pipeline(config);
  pipeline.synth_patterns();
  pipeline.synth_scenarios();
  pipeline.synth_conversations();
  pipeline.build_checklists();
  pipeline.extract_checklists();
  pipeline.split_stage();
  RunManifest eval = pipeline.eval_stage("ood_eval", EvalMode::Selfplay);
  CHECK(eval.output_counts.at("eval_new") == 6);
}

TEST_CASE("secrets never reach any persisted artifact") {
  std::string dir = forge::testing::temp_dir("secrets");
  forge::testing::write_pipeline_fixture(dir);
  const char* secret = "sk-fixture-3f9a1c-secret-value";
  setenv("FORGE_MOCK_KEY", secret, 1);
  PipelineConfig config = fixture_config(dir, 3);
  config.providers["mock"].auth_env = "FORGE_MOCK_KEY";
  Pipeline pipeline = make_pipeline(config);
  run_all_stages(pipeline);
  unsetenv("FORGE_MOCK_KEY");

  for (const auto& entry : std::filesystem::recursive_directory_iterator(config.paths.out)) {
    if (!entry.is_regular_file()) continue;
    std::string content = read_file(entry.path().string());
    CAPTURE(entry.path().string());
    CHECK(content.find(secret) == std::string::npos);
    // the env var *name* is fine; the value is not
  }
}

TEST_CASE("read_combos accepts arrays and objects") {
  std::string dir = forge::testing::temp_dir("combos");
  write_file(dir + "/c.jsonl",
             "[\"b\",\"a\"]\n{\"patterns\": [\"z\", \"y\"]}\n\n");
  auto combos = read_combos(dir + "/c.jsonl");
  REQUIRE(combos.size() == 2);
  CHECK(combos[0] == std::vector<std::string>{"a", "b"});  // sorted
  CHECK(combos[1] == std::vector<std::string>{"y", "z"});
}

TEST_CASE("manifests bind runs to config hash and inputs") {
  std::string dir = forge::testing::temp_dir("manifest");
  forge::testing::write_pipeline_fixture(dir);
  PipelineConfig config = fixture_config(dir, 21);
  Pipeline pipeline = make_pipeline(config);
  pipeline.synth_patterns();
  auto manifests = store_scan(pipeline.store_path("manifests.jsonl"));
  REQUIRE(manifests.size() == 1);
  CHECK(manifests[0].at("stage") == "patterns");
  CHECK(manifests[0].at("config_hash") == pipeline.hash());
  CHECK(manifests[0].at("seed") == 21);
  CHECK(manifests[0].at("inputs").size() >= 2);

  // editing a prompt template changes the config hash
  std::string prompts2 = dir + "/prompts2";
  std::filesystem::create_directories(prompts2);
  for (const auto& f : std::filesystem::directory_iterator(FORGE_PROMPTS_DIR))
    std::filesystem::copy_file(f.path(), prompts2 + "/" + f.path().filename().string());
  write_file(prompts2 + "/judge.system.txt",
             read_file(std::string(FORGE_PROMPTS_DIR) + "/judge.system.txt") + "\nBe terse.");
  PipelineConfig edited = config;
  edited.paths.prompts = prompts2;
  Pipeline pipeline2(edited);
  CHECK(pipeline2.hash() != pipeline.hash());
}
