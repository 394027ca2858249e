#pragma once
// Evaluation: transcript production for a model under test (replay against a
// gold conversation, or selfplay with a simulator), dual-level checklist
// judging with repeat aggregation, the two checklist metrics, and
// human-agreement statistics.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "forge/checklist.hpp"
#include "forge/dialogue.hpp"
#include "forge/gateway.hpp"
#include "forge/judging.hpp"
#include "forge/prompts.hpp"
#include "forge/scenario.hpp"

namespace forge {

enum class EvalMode { Replay, Selfplay };
std::string eval_mode_name(EvalMode m);
EvalMode eval_mode_from_name(const std::string& s);

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EvalTask {
  std::string scenario_id;
  std::string target_character;  // must bear at least one pattern
  EvalMode mode = EvalMode::Replay;
};

struct TranscriptOptions {
  int selfplay_turns = 16;  // within 12..20
  double temperature = 0.7;
};

struct TranscriptResult {
  Conversation conversation;
  int model_calls = 0;
  int unparsed_turns = 0;  // model output kept raw after the retry
};

class TranscriptGenerator {
 public:
  // simulator may be null for replay-only use.
  TranscriptGenerator(Gateway& model, Gateway* simulator, const PromptLibrary& prompts,
                      TranscriptOptions options = {});

  // Replay: the target's turns are regenerated from the gold context; all
  // other turns copy verbatim. Each target turn is one model call.
  TranscriptResult replay(const Scenario& scenario, const Conversation& gold,
                          const std::string& target) const;

  // Selfplay: a simulator voices every non-target character; opener is a
  // supporting character and the closer is the protagonist.
  TranscriptResult selfplay(const Scenario& scenario, const std::string& target) const;

 private:
  Turn model_turn(const Scenario& scenario, const std::string& speaker,
                  const std::vector<Turn>& context, Gateway& gw, int* unparsed,
                  const std::string& tag) const;

  Gateway& model_;
  Gateway* simulator_;
  const PromptLibrary& prompts_;
  TranscriptOptions options_;
};

// --- judging -----------------------------------------------------------------

struct JudgedItem {
  std::string item_id;
  int score = 0;  // -1 | 0 | +1
  std::string reason;
  std::vector<int> repeat_scores;  // present when repeats > 1
  bool failed = false;
};

Json judged_item_to_json(const JudgedItem& item);
JudgedItem judged_item_from_json(const Json& j);

// Majority across repeats; ties resolve to 0. Malformed judgments surface as
// failed items scoring 0.
std::vector<JudgedItem> judge_checklist(const Conversation& transcript,
                                        const std::string& protagonist,
                                        const std::vector<ChecklistItem>& items, Gateway& judge,
                                        const PromptLibrary& prompts, int chunk_size = 15,
                                        int repeats = 1, const std::string& tag = "judge");

int majority_score(const std::vector<int>& scores);

// --- metrics -----------------------------------------------------------------

struct SampleScores {
  std::optional<double> ipe;  // mean over pattern-level items
  std::optional<double> mpd;  // mean over scenario-level items
  int failed_item_count = 0;
  size_t pattern_item_count = 0;
  size_t scenario_item_count = 0;
};

SampleScores compute_scores(const std::vector<JudgedItem>& pattern_items,
                            const std::vector<JudgedItem>& scenario_items);

// [-1,1] -> [0,1]
double normalize_unit(double score);

// --- agreement -----------------------------------------------------------------

struct RaterScore {
  std::string sample_id;
  std::string rater_id;
  std::string metric;
  double score = 0.0;
};

std::string rater_scores_csv(const std::vector<RaterScore>& rows);
std::vector<RaterScore> parse_rater_scores_csv(const std::string& csv);

// One-pass product-moment Pearson; the acceptance oracle recomputes it with a
// two-pass covariance. Zero variance in either vector yields nullopt.
std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y,
                              std::string* note = nullptr);

struct MetricAgreement {
  std::string metric;
  size_t n = 0;
  double human_mean = 0.0;  // percent
  double judge_mean = 0.0;  // percent
  double delta = 0.0;       // judge - human, percentage points
  std::optional<double> pearson_r;
  std::string r_note;       // set when r is undefined
  bool normalized = false;  // true when scores were mapped from [-1,1] to [0,1]
};

struct AgreementReport {
  std::vector<MetricAgreement> metrics;
};

// Human score per sample = mean over that sample's raters. Scores already in
// [-1,1] are normalized to the unit interval before means and deltas;
// external 0-100 columns pass through unchanged (r is scale-invariant).
AgreementReport agreement(const std::vector<RaterScore>& human_rows,
                          const std::vector<RaterScore>& judge_rows);

Json agreement_report_to_json(const AgreementReport& r);

// --- run aggregation --------------------------------------------------------------

struct EvalRecord {
  std::string sample_id;
  std::string split;
  std::vector<JudgedItem> pattern_items;
  std::vector<JudgedItem> scenario_items;
  SampleScores scores;
};

Json eval_record_to_json(const EvalRecord& r);
EvalRecord eval_record_from_json(const Json& j);

struct SplitAggregate {
  size_t n = 0;
  std::optional<double> ipe_mean;
  std::optional<double> mpd_mean;
  double flagged_item_rate = 0.0;
};

struct RunReport {
  std::map<std::string, SplitAggregate> per_split;
  // Unweighted mean of split means (the headline), plus the sample-weighted
  // alternative for comparison.
  std::optional<double> headline_ipe;
  std::optional<double> headline_mpd;
  std::optional<double> weighted_ipe;
  std::optional<double> weighted_mpd;
  size_t flagged_items = 0;
  size_t total_items = 0;
};

RunReport aggregate_run(const std::vector<EvalRecord>& records);
Json run_report_to_json(const RunReport& r);
std::string run_report_table(const RunReport& r);

}  // namespace forge
