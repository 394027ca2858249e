#pragma once
// Chunked ternary judging shared by checklist refinement and evaluation.
// Items go to the judge in chunks; responses must be a bare JSON object with
// one result per item. A malformed chunk is retried up to max_attempts; items
// that never come back valid are flagged and scored 0 rather than dropped,
// so failures cannot inflate a mean.

#include <optional>
#include <string>
#include <vector>

#include "forge/gateway.hpp"
#include "forge/prompts.hpp"

namespace forge {

struct RawJudgment {
  int score = 0;
  std::string reason;
  bool failed = false;
};

struct JudgeCallOptions {
  int chunk_size = 15;
  int max_attempts = 3;
  double temperature = 0.0;
  std::optional<int64_t> seed;
  std::string tag = "judge";
};

// One judgment per item text, in input order.
std::vector<RawJudgment> judge_item_texts(const std::string& conversation_text,
                                          const std::string& protagonist,
                                          const std::vector<std::string>& item_texts,
                                          Gateway& judge, const PromptLibrary& prompts,
                                          const JudgeCallOptions& options = {});

// Exposed for tests: parse of one judge response against a chunk of items.
struct ChunkParse {
  bool structurally_valid = false;  // JSON object, results array, count match
  std::vector<RawJudgment> judgments;
  std::string error;
};
ChunkParse parse_judge_response(const std::string& response_text,
                                const std::vector<std::string>& chunk_items);

}  // namespace forge
