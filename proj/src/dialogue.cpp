#include "forge/dialogue.hpp"

#include <cctype>

#include "forge/util.hpp"

namespace forge {

namespace {

bool has_any(std::string_view text, std::string_view chars) {
  return text.find_first_of(chars) != std::string_view::npos;
}

Segment checked_segment(SegmentKind kind, std::string text, const char* label,
                        std::string_view banned) {
  std::string t = trim(text);
  if (t.empty()) throw ParseError(std::string("empty ") + label + " segment");
  if (has_any(t, banned))
    throw ParseError(std::string(label) + " segment contains bracket character: " + t);
  if (t.find('\n') != std::string::npos)
    throw ParseError(std::string(label) + " segment contains newline");
  return Segment{kind, std::move(t)};
}

// Strips markdown bold some providers wrap around speaker names.
std::string strip_emphasis(std::string token) {
  std::string t = trim(token);
  while (t.size() >= 2 && (t.front() == '*' || t.front() == '_') && t.back() == t.front()) {
    t = trim(t.substr(1, t.size() - 2));
  }
  return t;
}

// A short run of capitalized words reads as a speaker name; prose does not.
bool looks_like_speaker_token(std::string_view token) {
  if (token.empty() || token.size() > 40) return false;
  auto words = split(std::string(token), ' ');
  if (words.empty() || words.size() > 3) return false;
  for (const auto& w : words) {
    if (w.empty()) return false;
    if (!std::isupper(static_cast<unsigned char>(w.front()))) return false;
    for (char c : w) {
      if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '-' || c == '\'' || c == '.'))
        return false;
    }
  }
  return true;
}

}  // namespace

std::string segment_kind_name(SegmentKind k) {
  switch (k) {
    case SegmentKind::Thought: return "thought";
    case SegmentKind::Action: return "action";
    case SegmentKind::Speech: return "speech";
  }
  return "speech";
}

SegmentKind segment_kind_from_name(const std::string& s) {
  if (s == "thought") return SegmentKind::Thought;
  if (s == "action") return SegmentKind::Action;
  if (s == "speech") return SegmentKind::Speech;
  throw ParseError("unknown segment kind: " + s);
}

Segment make_thought(std::string text) {
  return checked_segment(SegmentKind::Thought, std::move(text), "thought", "[]()");
}
Segment make_action(std::string text) {
  return checked_segment(SegmentKind::Action, std::move(text), "action", "[]()");
}
Segment make_speech(std::string text) {
  // Stray closers stay literal in speech; openers would start a new segment.
  return checked_segment(SegmentKind::Speech, std::move(text), "speech", "[(");
}

std::vector<Segment> parse_segments(std::string_view body, size_t col_offset) {
  std::vector<Segment> out;
  std::string speech;
  auto flush_speech = [&] {
    std::string t = trim(speech);
    speech.clear();
    if (!t.empty()) out.push_back(Segment{SegmentKind::Speech, std::move(t)});
  };

  size_t i = 0;
  while (i < body.size()) {
    char c = body[i];
    if (c == '[' || c == '(') {
      flush_speech();
      char closer = (c == '[') ? ']' : ')';
      size_t open_col = col_offset + i + 1;
      size_t j = i + 1;
      std::string content;
      while (j < body.size() && body[j] != closer) {
        if (body[j] == '[' || body[j] == '(')
          throw ParseError("nested bracket inside segment", col_offset + j + 1);
        content += body[j];
        ++j;
      }
      if (j == body.size())
        throw ParseError(std::string("unbalanced '") + c + "'", open_col);
      std::string t = trim(content);
      if (t.empty())
        throw ParseError(c == '[' ? "empty thought segment" : "empty action segment", open_col);
      out.push_back(Segment{c == '[' ? SegmentKind::Thought : SegmentKind::Action, std::move(t)});
      i = j + 1;
    } else {
      speech += c;
      ++i;
    }
  }
  flush_speech();
  return out;
}

std::string serialize_segments(const std::vector<Segment>& segments) {
  std::vector<std::string> parts;
  parts.reserve(segments.size());
  for (const Segment& s : segments) {
    switch (s.kind) {
      case SegmentKind::Thought: parts.push_back("[" + s.text + "]"); break;
      case SegmentKind::Action: parts.push_back("(" + s.text + ")"); break;
      case SegmentKind::Speech: parts.push_back(s.text); break;
    }
  }
  return join(parts, " ");
}

Turn parse_turn(std::string_view line, const std::set<std::string>& known_speakers) {
  size_t colon = line.find(':');
  if (colon == std::string_view::npos) throw ParseError("turn line has no 'Name:' prefix");
  std::string name = strip_emphasis(std::string(line.substr(0, colon)));
  if (!known_speakers.count(name)) throw ParseError("unknown speaker: " + name);
  std::string_view body = line.substr(colon + 1);
  std::vector<Segment> segs = parse_segments(body, colon + 1);
  if (segs.empty()) throw ParseError("empty turn body for speaker " + name);
  return Turn{std::move(name), std::move(segs)};
}

std::string serialize_turn(const Turn& turn) {
  return turn.speaker + ": " + serialize_segments(turn.segments);
}

Conversation parse_conversation(std::string_view text, const std::set<std::string>& known_speakers,
                                std::string scenario_id) {
  struct Group {
    std::string speaker;
    std::string body;
  };
  std::vector<Group> groups;

  for (const std::string& raw : split_lines(text)) {
    std::string line = trim(raw);
    if (line.empty()) continue;
    size_t colon = line.find(':');
    std::string token =
        colon == std::string::npos ? std::string() : strip_emphasis(line.substr(0, colon));
    if (!token.empty() && known_speakers.count(token)) {
      groups.push_back({token, trim(line.substr(colon + 1))});
      continue;
    }
    if (!token.empty() && looks_like_speaker_token(token))
      throw ParseError("unknown speaker: " + token);
    if (groups.empty()) throw ParseError("content before first speaker turn");
    Group& g = groups.back();
    if (!g.body.empty()) g.body += ' ';
    g.body += line;
  }

  Conversation conv;
  conv.scenario_id = std::move(scenario_id);
  for (const Group& g : groups) {
    std::vector<Segment> segs = parse_segments(g.body);
    if (segs.empty()) throw ParseError("empty turn body for speaker " + g.speaker);
    conv.turns.push_back(Turn{g.speaker, std::move(segs)});
  }
  return conv;
}

std::string serialize_conversation(const Conversation& conv) {
  std::vector<std::string> lines;
  lines.reserve(conv.turns.size());
  for (const Turn& t : conv.turns) lines.push_back(serialize_turn(t));
  return join(lines, "\n");
}

Json turn_to_json(const Turn& t) {
  Json segs = Json::array();
  for (const Segment& s : t.segments)
    segs.push_back({{"kind", segment_kind_name(s.kind)}, {"text", s.text}});
  return Json{{"speaker", t.speaker}, {"segments", segs}};
}

Turn turn_from_json(const Json& j) {
  Turn t;
  t.speaker = j.at("speaker").get<std::string>();
  for (const Json& s : j.at("segments")) {
    t.segments.push_back(Segment{segment_kind_from_name(s.at("kind").get<std::string>()),
                                 s.at("text").get<std::string>()});
  }
  return t;
}

Json conversation_to_json(const Conversation& c) {
  Json turns = Json::array();
  for (const Turn& t : c.turns) turns.push_back(turn_to_json(t));
  return Json{{"scenario_id", c.scenario_id}, {"turns", turns}};
}

Conversation conversation_from_json(const Json& j) {
  Conversation c;
  c.scenario_id = j.at("scenario_id").get<std::string>();
  for (const Json& t : j.at("turns")) c.turns.push_back(turn_from_json(t));
  return c;
}

std::string Violation::to_string() const {
  switch (kind) {
    case ViolationKind::TurnCountBelowMin: return "turn_count_below_min(" + detail + ")";
    case ViolationKind::TurnCountAboveMax: return "turn_count_above_max(" + detail + ")";
    case ViolationKind::OpenerNotSupporting: return "opener_not_supporting";
    case ViolationKind::CloserNotProtagonist: return "closer_not_protagonist";
    case ViolationKind::UnknownSpeaker: return "unknown_speaker(" + detail + ")";
    case ViolationKind::EmptySegment: return "empty_segment(" + detail + ")";
  }
  return "unknown_violation";
}

std::string ValidationReport::summary() const {
  std::vector<std::string> parts;
  parts.reserve(violations.size());
  for (const Violation& v : violations) parts.push_back(v.to_string());
  return join(parts, "; ");
}

ValidationReport validate_conversation(const Conversation& conv, const ConversationRules& rules) {
  ValidationReport report;
  auto add = [&](ViolationKind k, std::string detail = "") {
    report.violations.push_back(Violation{k, std::move(detail)});
  };

  int n = static_cast<int>(conv.turns.size());
  if (n < rules.min_turns) add(ViolationKind::TurnCountBelowMin, std::to_string(n));
  if (n > rules.max_turns) add(ViolationKind::TurnCountAboveMax, std::to_string(n));

  if (!conv.turns.empty()) {
    const std::string& opener = conv.turns.front().speaker;
    if (opener == rules.protagonist) add(ViolationKind::OpenerNotSupporting);
    const std::string& closer = conv.turns.back().speaker;
    if (closer != rules.protagonist) add(ViolationKind::CloserNotProtagonist);
  }

  std::set<std::string> flagged;
  for (size_t i = 0; i < conv.turns.size(); ++i) {
    const Turn& t = conv.turns[i];
    if (!rules.characters.count(t.speaker) && !flagged.count(t.speaker)) {
      add(ViolationKind::UnknownSpeaker, t.speaker);
      flagged.insert(t.speaker);
    }
    if (t.segments.empty()) {
      add(ViolationKind::EmptySegment, "turn " + std::to_string(i + 1));
      continue;
    }
    for (const Segment& s : t.segments) {
      if (trim(s.text).empty()) {
        add(ViolationKind::EmptySegment, "turn " + std::to_string(i + 1));
        break;
      }
    }
  }
  return report;
}

}  // namespace forge
