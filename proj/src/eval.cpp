#include "forge/eval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "forge/synthesis.hpp"
#include "forge/util.hpp"

namespace forge {

std::string eval_mode_name(EvalMode m) { return m == EvalMode::Replay ? "replay" : "selfplay"; }

EvalMode eval_mode_from_name(const std::string& s) {
  if (s == "replay") return EvalMode::Replay;
  if (s == "selfplay") return EvalMode::Selfplay;
  throw EvalError("unknown eval mode: " + s);
}

// --- TranscriptGenerator -------------------------------------------------------

TranscriptGenerator::TranscriptGenerator(Gateway& model, Gateway* simulator,
                                         const PromptLibrary& prompts, TranscriptOptions options)
    : model_(model), simulator_(simulator), prompts_(prompts), options_(options) {}

Turn TranscriptGenerator::model_turn(const Scenario& scenario, const std::string& speaker,
                                     const std::vector<Turn>& context, Gateway& gw, int* unparsed,
                                     const std::string& tag) const {
  const CharacterProfile* profile = scenario.find_character(speaker);
  if (!profile) throw EvalError("scenario " + scenario.id + " has no character " + speaker);

  ChatRequest req;
  req.system = prompts_.render("roleplay.system",
                               {{"protagonist_name", speaker},
                                {"about_self", profile->about_self},
                                {"about_others", render_about_others_text(*profile)},
                                {"story_background", scenario.background}});
  std::vector<std::string> lines;
  lines.reserve(context.size());
  for (const Turn& t : context) lines.push_back(serialize_turn(t));
  req.user = join(lines, "\n");
  req.temperature = options_.temperature;
  req.tag = tag;

  for (int attempt = 0; attempt < 2; ++attempt) {
    ChatResponse resp = gw.complete(req);
    std::string body = trim(resp.text);
    // tolerate a "Name:" prefix the model may echo
    if (body.rfind(speaker + ":", 0) == 0) body = trim(body.substr(speaker.size() + 1));
    std::string flat;
    for (char c : body) flat += (c == '\n' || c == '\r') ? ' ' : c;
    try {
      std::vector<Segment> segs = parse_segments(flat);
      if (segs.empty()) throw ParseError("empty model turn");
      return Turn{speaker, std::move(segs)};
    } catch (const ParseError&) {
      if (attempt == 0) continue;
      // keep the raw text, flagged
      if (unparsed) ++*unparsed;
      std::string raw = trim(flat);
      if (raw.empty()) raw = "...";
      std::string safe;
      for (char c : raw) safe += (c == '[' || c == '(') ? ' ' : c;
      return Turn{speaker, {Segment{SegmentKind::Speech, trim(safe)}}};
    }
  }
  throw EvalError("unreachable");
}

TranscriptResult TranscriptGenerator::replay(const Scenario& scenario, const Conversation& gold,
                                             const std::string& target) const {
  const CharacterProfile* profile = scenario.find_character(target);
  if (!profile || profile->assigned_patterns.empty())
    throw EvalError("replay target must be a pattern-bearing character: " + target);

  TranscriptResult out;
  out.conversation.scenario_id = scenario.id;
  for (size_t i = 0; i < gold.turns.size(); ++i) {
    const Turn& t = gold.turns[i];
    if (t.speaker != target) {
      out.conversation.turns.push_back(t);
      continue;
    }
    std::vector<Turn> context(gold.turns.begin(), gold.turns.begin() + static_cast<long>(i));
    out.conversation.turns.push_back(model_turn(scenario, target, context, model_,
                                                &out.unparsed_turns,
                                                "eval_model:" + scenario.id));
    ++out.model_calls;
  }
  return out;
}

TranscriptResult TranscriptGenerator::selfplay(const Scenario& scenario,
                                               const std::string& target) const {
  if (!simulator_) throw EvalError("selfplay requires a simulator provider");
  const CharacterProfile* profile = scenario.find_character(target);
  if (!profile || profile->assigned_patterns.empty())
    throw EvalError("selfplay target must be a pattern-bearing character: " + target);
  int n = options_.selfplay_turns;
  if (n < 12 || n > 20) throw EvalError("selfplay_turns must lie in 12..20");

  std::string protagonist = scenario.protagonist().name;
  std::vector<std::string> supporting;
  for (const CharacterProfile& c : scenario.characters)
    if (c.name != protagonist) supporting.push_back(c.name);
  if (supporting.empty()) throw EvalError("scenario has no supporting characters");

  TranscriptResult out;
  out.conversation.scenario_id = scenario.id;
  for (int i = 0; i < n; ++i) {
    std::string speaker;
    if (i == n - 1) {
      speaker = protagonist;
    } else if (i % 2 == 0) {
      speaker = supporting[static_cast<size_t>(i / 2) % supporting.size()];
    } else {
      speaker = protagonist;
    }
    Gateway& gw = (speaker == target) ? model_ : *simulator_;
    Turn t = model_turn(scenario, speaker, out.conversation.turns, gw, &out.unparsed_turns,
                        (speaker == target ? "eval_model:" : "eval_sim:") + scenario.id);
    if (speaker == target) ++out.model_calls;
    out.conversation.turns.push_back(std::move(t));
  }
  return out;
}

// --- judging -----------------------------------------------------------------

Json judged_item_to_json(const JudgedItem& item) {
  Json j{{"id", item.item_id}, {"score", item.score}, {"reason", item.reason}};
  if (!item.repeat_scores.empty() && item.repeat_scores.size() > 1)
    j["repeat_scores"] = item.repeat_scores;
  if (item.failed) j["failed"] = true;
  return j;
}

JudgedItem judged_item_from_json(const Json& j) {
  JudgedItem item;
  item.item_id = j.at("id").get<std::string>();
  item.score = j.at("score").get<int>();
  item.reason = j.value("reason", "");
  if (j.contains("repeat_scores"))
    item.repeat_scores = j.at("repeat_scores").get<std::vector<int>>();
  item.failed = j.value("failed", false);
  return item;
}

int majority_score(const std::vector<int>& scores) {
  if (scores.empty()) return 0;
  std::map<int, int> counts;
  for (int s : scores) counts[s] += 1;
  int best_score = 0, best_count = 0;
  bool tie = false;
  for (const auto& [score, count] : counts) {
    if (count > best_count) {
      best_count = count;
      best_score = score;
      tie = false;
    } else if (count == best_count) {
      tie = true;
    }
  }
  return tie ? 0 : best_score;
}

std::vector<JudgedItem> judge_checklist(const Conversation& transcript,
                                        const std::string& protagonist,
                                        const std::vector<ChecklistItem>& items, Gateway& judge,
                                        const PromptLibrary& prompts, int chunk_size, int repeats,
                                        const std::string& tag) {
  if (items.empty()) throw EvalError("judge_checklist needs at least one item");
  if (repeats < 1) throw EvalError("repeats must be >= 1");

  std::string conversation_text = serialize_conversation(transcript);
  std::vector<std::string> texts;
  texts.reserve(items.size());
  for (const ChecklistItem& item : items) texts.push_back(item.text);

  std::vector<std::vector<RawJudgment>> rounds;
  for (int r = 0; r < repeats; ++r) {
    JudgeCallOptions opts;
    opts.chunk_size = chunk_size;
    opts.tag = tag;
    if (repeats > 1) opts.seed = r;  // distinct cache keys per repeat
    rounds.push_back(judge_item_texts(conversation_text, protagonist, texts, judge, prompts, opts));
  }

  std::vector<JudgedItem> out;
  out.reserve(items.size());
  for (size_t i = 0; i < items.size(); ++i) {
    JudgedItem item;
    item.item_id = items[i].id;
    int failed_rounds = 0;
    std::string reason;
    for (int r = 0; r < repeats; ++r) {
      const RawJudgment& rj = rounds[static_cast<size_t>(r)][i];
      item.repeat_scores.push_back(rj.score);
      if (rj.failed) ++failed_rounds;
      if (reason.empty() && !rj.failed) reason = rj.reason;
    }
    item.score = majority_score(item.repeat_scores);
    item.failed = failed_rounds * 2 > repeats ||
                  (repeats == 1 && rounds[0][i].failed);
    if (item.failed) {
      item.score = 0;
      reason = rounds[0][i].reason;
    }
    item.reason = reason.empty() ? rounds[0][i].reason : reason;
    out.push_back(std::move(item));
  }
  return out;
}

// --- metrics -----------------------------------------------------------------

SampleScores compute_scores(const std::vector<JudgedItem>& pattern_items,
                            const std::vector<JudgedItem>& scenario_items) {
  SampleScores s;
  s.pattern_item_count = pattern_items.size();
  s.scenario_item_count = scenario_items.size();
  auto mean_of = [](const std::vector<JudgedItem>& items) -> std::optional<double> {
    if (items.empty()) return std::nullopt;
    double sum = 0;
    for (const JudgedItem& i : items) sum += i.score;
    return sum / static_cast<double>(items.size());
  };
  s.ipe = mean_of(pattern_items);
  s.mpd = mean_of(scenario_items);
  for (const JudgedItem& i : pattern_items) s.failed_item_count += i.failed ? 1 : 0;
  for (const JudgedItem& i : scenario_items) s.failed_item_count += i.failed ? 1 : 0;
  return s;
}

double normalize_unit(double score) { return (score + 1.0) / 2.0; }

// --- agreement -----------------------------------------------------------------

std::string rater_scores_csv(const std::vector<RaterScore>& rows) {
  std::ostringstream out;
  out << "sample_id,rater_id,metric,score\n";
  for (const RaterScore& r : rows)
    out << r.sample_id << "," << r.rater_id << "," << r.metric << "," << r.score << "\n";
  return out.str();
}

std::vector<RaterScore> parse_rater_scores_csv(const std::string& csv) {
  std::vector<RaterScore> out;
  auto lines = split_lines(csv);
  for (size_t i = 1; i < lines.size(); ++i) {
    std::string line = trim(lines[i]);
    if (line.empty()) continue;
    auto parts = split(line, ',');
    if (parts.size() != 4) throw EvalError("bad rater CSV line: " + line);
    out.push_back(RaterScore{trim(parts[0]), trim(parts[1]), trim(parts[2]),
                             std::stod(trim(parts[3]))});
  }
  return out;
}

std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y,
                              std::string* note) {
  if (x.size() != y.size()) throw EvalError("pearson: vector length mismatch");
  size_t n = x.size();
  if (n < 2) {
    if (note) *note = "needs at least 2 pairs";
    return std::nullopt;
  }
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  double nd = static_cast<double>(n);
  double var_x = nd * sxx - sx * sx;
  double var_y = nd * syy - sy * sy;
  if (var_x <= 0 || var_y <= 0) {
    if (note) *note = "zero variance in at least one vector";
    return std::nullopt;
  }
  return (nd * sxy - sx * sy) / std::sqrt(var_x * var_y);
}

namespace {

// metric -> sample -> mean over raters
std::map<std::string, std::map<std::string, double>> per_sample_means(
    const std::vector<RaterScore>& rows) {
  std::map<std::string, std::map<std::string, std::pair<double, int>>> acc;
  for (const RaterScore& r : rows) {
    auto& cell = acc[r.metric][r.sample_id];
    cell.first += r.score;
    cell.second += 1;
  }
  std::map<std::string, std::map<std::string, double>> out;
  for (const auto& [metric, samples] : acc)
    for (const auto& [sample, cell] : samples)
      out[metric][sample] = cell.first / static_cast<double>(cell.second);
  return out;
}

}  // namespace

AgreementReport agreement(const std::vector<RaterScore>& human_rows,
                          const std::vector<RaterScore>& judge_rows) {
  auto human = per_sample_means(human_rows);
  auto judge = per_sample_means(judge_rows);

  AgreementReport report;
  for (const auto& [metric, human_samples] : human) {
    auto jt = judge.find(metric);
    if (jt == judge.end()) continue;
    std::vector<double> h, j;
    for (const auto& [sample, score] : human_samples) {
      auto js = jt->second.find(sample);
      if (js == jt->second.end()) continue;
      h.push_back(score);
      j.push_back(js->second);
    }
    if (h.size() < 2)
      throw EvalError("agreement for metric '" + metric + "' needs >= 2 paired samples, have " +
                      std::to_string(h.size()));

    MetricAgreement m;
    m.metric = metric;
    m.n = h.size();
    // ternary-scale scores are normalized to the unit interval; external
    // 0-100 columns pass through
    bool in_unit = true;
    for (double v : h) in_unit &= v >= -1.0 && v <= 1.0;
    for (double v : j) in_unit &= v >= -1.0 && v <= 1.0;
    m.normalized = in_unit;
    auto to_percent = [&](double v) { return in_unit ? normalize_unit(v) * 100.0 : v; };
    double hs = 0, js2 = 0;
    for (double v : h) hs += to_percent(v);
    for (double v : j) js2 += to_percent(v);
    m.human_mean = hs / static_cast<double>(h.size());
    m.judge_mean = js2 / static_cast<double>(j.size());
    m.delta = m.judge_mean - m.human_mean;
    m.pearson_r = pearson(h, j, &m.r_note);
    report.metrics.push_back(std::move(m));
  }
  return report;
}

Json agreement_report_to_json(const AgreementReport& r) {
  Json metrics = Json::array();
  for (const MetricAgreement& m : r.metrics) {
    Json j{{"metric", m.metric},       {"n", m.n},
           {"human_mean", m.human_mean}, {"judge_mean", m.judge_mean},
           {"delta", m.delta},         {"normalized", m.normalized}};
    if (m.pearson_r)
      j["pearson_r"] = *m.pearson_r;
    else {
      j["pearson_r"] = nullptr;
      j["r_note"] = m.r_note;
    }
    metrics.push_back(std::move(j));
  }
  return Json{{"metrics", metrics}};
}

// --- run aggregation --------------------------------------------------------------

Json eval_record_to_json(const EvalRecord& r) {
  Json items = Json::array();
  for (const JudgedItem& i : r.pattern_items) {
    Json j = judged_item_to_json(i);
    j["level"] = "pattern";
    items.push_back(std::move(j));
  }
  for (const JudgedItem& i : r.scenario_items) {
    Json j = judged_item_to_json(i);
    j["level"] = "scenario";
    items.push_back(std::move(j));
  }
  return Json{{"sample_id", r.sample_id},
              {"split", r.split},
              {"items", items},
              {"ipe", r.scores.ipe ? Json(*r.scores.ipe) : Json(nullptr)},
              {"mpd", r.scores.mpd ? Json(*r.scores.mpd) : Json(nullptr)},
              {"failed_item_count", r.scores.failed_item_count}};
}

EvalRecord eval_record_from_json(const Json& j) {
  EvalRecord r;
  r.sample_id = j.at("sample_id").get<std::string>();
  r.split = j.value("split", "");
  for (const Json& item : j.at("items")) {
    JudgedItem ji = judged_item_from_json(item);
    if (item.value("level", "pattern") == "pattern")
      r.pattern_items.push_back(std::move(ji));
    else
      r.scenario_items.push_back(std::move(ji));
  }
  r.scores = compute_scores(r.pattern_items, r.scenario_items);
  return r;
}

RunReport aggregate_run(const std::vector<EvalRecord>& records) {
  RunReport report;
  struct Acc {
    size_t n = 0;
    double ipe_sum = 0;
    size_t ipe_n = 0;
    double mpd_sum = 0;
    size_t mpd_n = 0;
    size_t flagged = 0;
    size_t items = 0;
  };
  std::map<std::string, Acc> acc;
  for (const EvalRecord& r : records) {
    Acc& a = acc[r.split];
    a.n += 1;
    if (r.scores.ipe) {
      a.ipe_sum += *r.scores.ipe;
      a.ipe_n += 1;
    }
    if (r.scores.mpd) {
      a.mpd_sum += *r.scores.mpd;
      a.mpd_n += 1;
    }
    a.flagged += static_cast<size_t>(r.scores.failed_item_count);
    a.items += r.pattern_items.size() + r.scenario_items.size();
  }

  double ipe_split_sum = 0, mpd_split_sum = 0, w_ipe_sum = 0, w_mpd_sum = 0;
  size_t ipe_splits = 0, mpd_splits = 0, w_ipe_n = 0, w_mpd_n = 0;
  for (const auto& [split, a] : acc) {
    SplitAggregate agg;
    agg.n = a.n;
    if (a.ipe_n) {
      agg.ipe_mean = a.ipe_sum / static_cast<double>(a.ipe_n);
      ipe_split_sum += *agg.ipe_mean;
      ++ipe_splits;
      w_ipe_sum += a.ipe_sum;
      w_ipe_n += a.ipe_n;
    }
    if (a.mpd_n) {
      agg.mpd_mean = a.mpd_sum / static_cast<double>(a.mpd_n);
      mpd_split_sum += *agg.mpd_mean;
      ++mpd_splits;
      w_mpd_sum += a.mpd_sum;
      w_mpd_n += a.mpd_n;
    }
    agg.flagged_item_rate =
        a.items ? static_cast<double>(a.flagged) / static_cast<double>(a.items) : 0.0;
    report.flagged_items += a.flagged;
    report.total_items += a.items;
    report.per_split[split] = agg;
  }
  if (ipe_splits) report.headline_ipe = ipe_split_sum / static_cast<double>(ipe_splits);
  if (mpd_splits) report.headline_mpd = mpd_split_sum / static_cast<double>(mpd_splits);
  if (w_ipe_n) report.weighted_ipe = w_ipe_sum / static_cast<double>(w_ipe_n);
  if (w_mpd_n) report.weighted_mpd = w_mpd_sum / static_cast<double>(w_mpd_n);
  return report;
}

namespace {

std::string pct(const std::optional<double>& v) {
  if (!v) return "--";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", *v * 100.0);
  return buf;
}

}  // namespace

Json run_report_to_json(const RunReport& r) {
  Json splits = Json::object();
  for (const auto& [name, agg] : r.per_split) {
    splits[name] = Json{{"n", agg.n},
                        {"ipe", agg.ipe_mean ? Json(*agg.ipe_mean) : Json(nullptr)},
                        {"mpd", agg.mpd_mean ? Json(*agg.mpd_mean) : Json(nullptr)},
                        {"flagged_item_rate", agg.flagged_item_rate}};
  }
  return Json{{"splits", splits},
              {"headline_ipe", r.headline_ipe ? Json(*r.headline_ipe) : Json(nullptr)},
              {"headline_mpd", r.headline_mpd ? Json(*r.headline_mpd) : Json(nullptr)},
              {"weighted_ipe", r.weighted_ipe ? Json(*r.weighted_ipe) : Json(nullptr)},
              {"weighted_mpd", r.weighted_mpd ? Json(*r.weighted_mpd) : Json(nullptr)},
              {"flagged_items", r.flagged_items},
              {"total_items", r.total_items}};
}

std::string run_report_table(const RunReport& r) {
  std::ostringstream out;
  out << "split         n     IPE%   MPD%   flagged\n";
  for (const auto& [name, agg] : r.per_split) {
    char line[128];
    std::snprintf(line, sizeof(line), "%-12s %5zu  %6s %6s  %5.2f%%\n", name.c_str(), agg.n,
                  pct(agg.ipe_mean).c_str(), pct(agg.mpd_mean).c_str(),
                  agg.flagged_item_rate * 100.0);
    out << line;
  }
  out << "headline (mean of split means): IPE " << pct(r.headline_ipe) << "  MPD "
      << pct(r.headline_mpd) << "\n";
  out << "sample-weighted:                IPE " << pct(r.weighted_ipe) << "  MPD "
      << pct(r.weighted_mpd) << "\n";
  return out.str();
}

}  // namespace forge
