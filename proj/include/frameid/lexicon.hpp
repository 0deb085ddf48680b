#ifndef FRAMEID_LEXICON_HPP
#define FRAMEID_LEXICON_HPP

#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "frameid/common.hpp"
#include "frameid/inflect.hpp"

namespace frameid {

// Frame ids are dense, assigned in file order, and double as the output
// label indices of the prediction heads.
struct Frame {
  int id = -1;
  std::string name;
};

struct LexicalUnit {
  std::string lemma;  // normalized (lowercase, collapsed whitespace)
  Pos pos = Pos::v;
  std::set<int> frames;  // non-empty

  std::string key() const { return lemma + "." + pos_name(pos); }
};

class Lexicon {
 public:
  int add_frame(std::string_view name) {
    std::string n(name);
    if (frame_ids_.count(n)) throw ValidationError("duplicate frame name '" + n + "'");
    int id = static_cast<int>(frames_.size());
    frames_.push_back(Frame{id, n});
    frame_ids_.emplace(std::move(n), id);
    return id;
  }

  void add_lu(std::string_view lemma, Pos pos, std::set<int> frames) {
    LexicalUnit lu;
    lu.lemma = normalize_surface(lemma);
    lu.pos = pos;
    lu.frames = std::move(frames);
    if (lu.lemma.empty()) throw ValidationError("lexical unit with empty lemma");
    if (lu.frames.empty()) throw ValidationError("lexical unit '" + lu.key() + "' has no frames");
    for (int f : lu.frames)
      if (f < 0 || f >= k()) throw ValidationError("lexical unit '" + lu.key() + "' references unknown frame");
    if (lu_ids_.count(lu.key()))
      throw ValidationError("duplicate lexical unit '" + lu.key() + "'");
    lu_ids_.emplace(lu.key(), lus_.size());
    lus_.push_back(std::move(lu));
  }

  int k() const { return static_cast<int>(frames_.size()); }
  const std::vector<Frame>& frames() const { return frames_; }
  const std::vector<LexicalUnit>& lus() const { return lus_; }

  const Frame& frame(int id) const {
    if (id < 0 || id >= k()) throw ContractError("frame id out of range");
    return frames_[id];
  }

  std::optional<int> frame_id(std::string_view name) const {
    auto it = frame_ids_.find(std::string(name));
    if (it == frame_ids_.end()) return std::nullopt;
    return it->second;
  }

  const LexicalUnit* find_lu(std::string_view lemma, Pos pos) const {
    LexicalUnit probe;
    probe.lemma = normalize_surface(lemma);
    probe.pos = pos;
    auto it = lu_ids_.find(probe.key());
    if (it == lu_ids_.end()) return nullptr;
    return &lus_[it->second];
  }

 private:
  std::vector<Frame> frames_;
  std::vector<LexicalUnit> lus_;
  std::unordered_map<std::string, int> frame_ids_;
  std::unordered_map<std::string, std::size_t> lu_ids_;
};

// ---------------------------------------------------------------------------
// Lexicon file format (UTF-8, line oriented):
//   # comment
//   frame<TAB>Name
//   lu<TAB>lemma<TAB>pos<TAB>Frame1,Frame2,...
// Frame lines come first; dense ids follow file order.
// ---------------------------------------------------------------------------

inline Lexicon parse_lexicon(std::istream& is, const std::string& origin = "<stream>") {
  Lexicon lex;
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& msg) -> ParseError {
    return ParseError(origin + ":" + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto fields = split(line, '\t');
    if (fields[0] == "frame") {
      if (fields.size() != 2 || trim(fields[1]).empty()) throw fail("expected 'frame<TAB>Name'");
      if (lex.frame_id(fields[1])) throw fail("duplicate frame name '" + fields[1] + "'");
      lex.add_frame(fields[1]);
    } else if (fields[0] == "lu") {
      if (fields.size() != 4) throw fail("expected 'lu<TAB>lemma<TAB>pos<TAB>frames'");
      Pos pos;
      try {
        pos = parse_pos(trim(fields[2]));
      } catch (const ParseError& e) {
        throw fail(e.what());
      }
      std::set<int> frames;
      for (const std::string& name : split(fields[3], ',')) {
        std::string fname = trim(name);
        if (fname.empty()) throw fail("empty frame reference");
        auto id = lex.frame_id(fname);
        if (!id) throw fail("lexical unit references unknown frame '" + fname + "'");
        frames.insert(*id);
      }
      try {
        lex.add_lu(fields[1], pos, std::move(frames));
      } catch (const ValidationError& e) {
        throw fail(e.what());
      }
    } else {
      throw fail("unknown record type '" + fields[0] + "'");
    }
  }
  if (lex.k() == 0) throw ParseError(origin + ": no frames defined");
  return lex;
}

inline Lexicon load_lexicon(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("lexicon not found: " + path);
  return parse_lexicon(is, path);
}

inline void save_lexicon(std::ostream& os, const Lexicon& lex) {
  for (const Frame& f : lex.frames()) os << "frame\t" << f.name << "\n";
  for (const LexicalUnit& lu : lex.lus()) {
    os << "lu\t" << lu.lemma << "\t" << pos_name(lu.pos) << "\t";
    bool first = true;
    for (int f : lu.frames) {
      os << (first ? "" : ",") << lex.frame(f).name;
      first = false;
    }
    os << "\n";
  }
}

inline void save_lexicon(const std::string& path, const Lexicon& lex) {
  std::ofstream os(path);
  if (!os) throw ParseError("cannot write lexicon: " + path);
  save_lexicon(os, lex);
}

// ---------------------------------------------------------------------------
// Annotated instances. Target spans are half-open character offsets into the
// raw sentence; a target may be non-contiguous (several spans) and the same
// sentence may carry several instances at different positions.
// ---------------------------------------------------------------------------

struct Span {
  int begin = 0;
  int end = 0;  // exclusive
};

struct AnnotationInstance {
  std::string sentence;
  std::vector<Span> target_spans;  // sorted, disjoint, non-empty
  int gold_frame = -1;
  std::optional<std::string> gold_lu_lemma;
  std::optional<Pos> gold_lu_pos;

  // Concatenated span texts joined by one space; this is the lookup key.
  std::string target_text() const {
    std::string out;
    for (const Span& s : target_spans) {
      if (!out.empty()) out.push_back(' ');
      out.append(sentence.substr(s.begin, s.end - s.begin));
    }
    return out;
  }
};

inline void validate_spans(const std::vector<Span>& spans, std::size_t sentence_len,
                           const std::string& context) {
  if (spans.empty()) throw ValidationError(context + ": no target spans");
  int prev_end = -1;
  for (const Span& s : spans) {
    if (s.begin < 0 || s.end > static_cast<int>(sentence_len))
      throw ValidationError(context + ": span out of sentence bounds");
    if (s.begin >= s.end) throw ValidationError(context + ": empty span");
    if (s.begin < prev_end) throw ValidationError(context + ": spans overlap or are unsorted");
    prev_end = s.end;
  }
}

inline std::vector<Span> parse_spans(std::string_view text, const std::string& context) {
  std::vector<Span> spans;
  for (const std::string& part : split(text, ',')) {
    auto colon = part.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 >= part.size())
      throw ValidationError(context + ": malformed span '" + part + "' (want a:b)");
    try {
      std::size_t used_a = 0, used_b = 0;
      int a = std::stoi(part.substr(0, colon), &used_a);
      int b = std::stoi(part.substr(colon + 1), &used_b);
      if (used_a != colon || used_b != part.size() - colon - 1)
        throw ValidationError(context + ": malformed span '" + part + "'");
      spans.push_back(Span{a, b});
    } catch (const std::logic_error&) {
      throw ValidationError(context + ": malformed span '" + part + "'");
    }
  }
  return spans;
}

// Annotation file: one instance per line,
//   sentence<TAB>a1:b1[,a2:b2...]<TAB>GoldFrameName[<TAB>lemma.pos]
inline std::vector<AnnotationInstance> parse_annotations(std::istream& is, const Lexicon& lex,
                                                         const std::string& origin = "<stream>") {
  std::vector<AnnotationInstance> out;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string context = origin + ":" + std::to_string(line_no);
    auto fields = split(line, '\t');
    if (fields.size() != 3 && fields.size() != 4)
      throw ParseError(context + ": expected 3 or 4 tab-separated fields");

    AnnotationInstance inst;
    inst.sentence = fields[0];
    inst.target_spans = parse_spans(fields[1], context);
    validate_spans(inst.target_spans, inst.sentence.size(), context);

    auto frame = lex.frame_id(trim(fields[2]));
    if (!frame) throw ParseError(context + ": unknown gold frame '" + trim(fields[2]) + "'");
    inst.gold_frame = *frame;

    if (fields.size() == 4) {
      std::string lu = trim(fields[3]);
      auto dot = lu.rfind('.');
      if (dot == std::string::npos || dot == 0 || dot + 1 >= lu.size())
        throw ParseError(context + ": malformed lexical unit '" + lu + "' (want lemma.pos)");
      inst.gold_lu_lemma = normalize_surface(lu.substr(0, dot));
      try {
        inst.gold_lu_pos = parse_pos(lu.substr(dot + 1));
      } catch (const ParseError& e) {
        throw ParseError(context + ": " + e.what());
      }
    }
    out.push_back(std::move(inst));
  }
  return out;
}

inline std::vector<AnnotationInstance> load_annotations(const std::string& path,
                                                        const Lexicon& lex) {
  std::ifstream is(path);
  if (!is) throw ParseError("annotation file not found: " + path);
  return parse_annotations(is, lex, path);
}

}  // namespace frameid

#endif  // FRAMEID_LEXICON_HPP
