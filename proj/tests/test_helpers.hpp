#pragma once
// Shared fixtures: random turn generator, scripted scenario/conversation
// texts, temp directories.

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "forge/dialogue.hpp"
#include "forge/util.hpp"

namespace forge::testing {

inline std::string temp_dir(const std::string& label) {
  auto p = std::filesystem::temp_directory_path() /
           ("forge-test-" + label + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p.string();
}

// Words kept free of bracket characters so generated segments satisfy the
// segment invariants by construction.
inline const std::vector<std::string>& lexicon() {
  static const std::vector<std::string> words = {
      "the",  "plan",   "quietly", "maybe",  "storm",   "ledger", "apology", "window",
      "she",  "nods",   "keeps",   "talking", "through", "doubt",  "numbers", "hold",
      "wait", "listen", "again",   "enough", "truth",   "half",   "spoken",  "still"};
  return words;
}

inline std::string random_words(Rng& rng, size_t min_words, size_t max_words) {
  size_t n = min_words + static_cast<size_t>(rng.below(max_words - min_words + 1));
  std::vector<std::string> out;
  for (size_t i = 0; i < n; ++i) out.push_back(lexicon()[rng.below(lexicon().size())]);
  return join(out, " ");
}

// A structurally valid random turn: speech never adjacent to speech (the
// parser folds adjacent speech into one segment).
inline Turn random_turn(Rng& rng, const std::vector<std::string>& speakers) {
  Turn t;
  t.speaker = speakers[rng.below(speakers.size())];
  size_t n = 1 + rng.below(5);
  bool last_was_speech = false;
  for (size_t i = 0; i < n; ++i) {
    int kind = static_cast<int>(rng.below(3));
    if (kind == 2 && last_was_speech) kind = static_cast<int>(rng.below(2));
    std::string text = random_words(rng, 1, 6);
    switch (kind) {
      case 0:
        t.segments.push_back(make_thought(text));
        last_was_speech = false;
        break;
      case 1:
        t.segments.push_back(make_action(text));
        last_was_speech = false;
        break;
      default:
        if (rng.below(4) == 0) text += rng.below(2) ? "?" : "!";
        t.segments.push_back(make_speech(text));
        last_was_speech = true;
        break;
    }
  }
  return t;
}

}  // namespace forge::testing
