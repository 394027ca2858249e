#pragma once
// Turn grammar for the three expression channels: inner thoughts in
// [brackets], physical actions in (parentheses), bare text as speech.
//
// A turn line is "Speaker: body". Balanced [...] and (...) in the body become
// Thought/Action segments; everything else is Speech. Stray closers are
// literal speech characters; an unclosed opener or a bracket nested inside
// another bracket is a parse error (synthesis retries are cheaper than a
// polluted corpus).

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "forge/jsonl.hpp"

namespace forge {

enum class SegmentKind { Thought, Action, Speech };

std::string segment_kind_name(SegmentKind k);
SegmentKind segment_kind_from_name(const std::string& s);

struct Segment {
  SegmentKind kind;
  std::string text;
  bool operator==(const Segment&) const = default;
};

// Factories validate the round-trip invariants: text trimmed and non-empty,
// no bracket characters inside thought/action, no opener characters in speech.
Segment make_thought(std::string text);
Segment make_action(std::string text);
Segment make_speech(std::string text);

struct Turn {
  std::string speaker;
  std::vector<Segment> segments;
  bool operator==(const Turn&) const = default;
};

struct Conversation {
  std::string scenario_id;
  std::vector<Turn> turns;
  bool operator==(const Conversation&) const = default;
};

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg, size_t column = 0)
      : std::runtime_error(column ? msg + " (column " + std::to_string(column) + ")" : msg),
        column_(column) {}
  size_t column() const { return column_; }

 private:
  size_t column_;
};

// Body-only parse (no speaker prefix). col_offset shifts reported columns
// when the body sits inside a larger line.
std::vector<Segment> parse_segments(std::string_view body, size_t col_offset = 0);
std::string serialize_segments(const std::vector<Segment>& segments);

Turn parse_turn(std::string_view line, const std::set<std::string>& known_speakers);
std::string serialize_turn(const Turn& turn);

// Multi-line transcripts: a line starting "Name:" with a known name opens a
// turn; a name-shaped token that is unknown is an error; anything else is a
// continuation of the current turn.
Conversation parse_conversation(std::string_view text, const std::set<std::string>& known_speakers,
                                std::string scenario_id = "");
std::string serialize_conversation(const Conversation& conv);

Json turn_to_json(const Turn& t);
Turn turn_from_json(const Json& j);
Json conversation_to_json(const Conversation& c);
Conversation conversation_from_json(const Json& j);

// --- structural validation -------------------------------------------------

enum class ViolationKind {
  TurnCountBelowMin,
  TurnCountAboveMax,
  OpenerNotSupporting,
  CloserNotProtagonist,
  UnknownSpeaker,
  EmptySegment,
};

struct Violation {
  ViolationKind kind;
  std::string detail;  // e.g. the offending count or speaker
  std::string to_string() const;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool clean() const { return violations.empty(); }
  std::string summary() const;
};

struct ConversationRules {
  std::string protagonist;
  std::set<std::string> characters;  // all scenario characters, protagonist included
  int min_turns = 12;
  int max_turns = 20;
};

// Pure and total: violations are data, never exceptions.
ValidationReport validate_conversation(const Conversation& conv, const ConversationRules& rules);

}  // namespace forge
