#ifndef FRAMEID_TARGET_INDEX_HPP
#define FRAMEID_TARGET_INDEX_HPP

#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "frameid/common.hpp"
#include "frameid/inflect.hpp"
#include "frameid/lexicon.hpp"

namespace frameid {

enum class CandidateMode { by_target, by_lu };

inline CandidateMode parse_candidate_mode(std::string_view s) {
  if (s == "by_target") return CandidateMode::by_target;
  if (s == "by_lu") return CandidateMode::by_lu;
  throw ValidationError("unknown candidate mode '" + std::string(s) + "'");
}

inline const char* candidate_mode_name(CandidateMode m) {
  return m == CandidateMode::by_target ? "by_target" : "by_lu";
}

// Inflection-expanded lookup table: normalized surface form -> union of the
// frames of every lexical unit that can surface as that form. Immutable after
// construction and safe to share across readers.
class TargetIndex {
 public:
  TargetIndex() = default;

  int k() const { return k_; }

  const std::map<std::string, std::set<int>>& table() const { return table_; }

  const std::set<int>* lookup(std::string_view surface) const {
    auto it = table_.find(normalize_surface(surface));
    if (it == table_.end()) return nullptr;
    return &it->second;
  }

  friend TargetIndex build_target_index(const Lexicon& lex);

 private:
  int k_ = 0;
  std::map<std::string, std::set<int>> table_;
};

inline TargetIndex build_target_index(const Lexicon& lex) {
  TargetIndex index;
  index.k_ = lex.k();
  for (const LexicalUnit& lu : lex.lus()) {
    for (const std::string& form : inflect(lu.lemma, lu.pos)) {
      auto& frames = index.table_[form];
      frames.insert(lu.frames.begin(), lu.frames.end());
    }
  }
  return index;
}

// Candidate mask for a target. by_lu marks exactly the gold LU's frames;
// by_target looks up the normalized surface form and, for unseen surfaces,
// falls back to every frame being a candidate.
inline std::vector<std::uint8_t> candidate_frames(const TargetIndex& index, const Lexicon& lex,
                                                  std::string_view target_text, CandidateMode mode,
                                                  const LexicalUnit* gold_lu = nullptr) {
  std::vector<std::uint8_t> v(static_cast<std::size_t>(lex.k()), 0);
  if (mode == CandidateMode::by_lu) {
    if (gold_lu == nullptr) throw ContractError("candidate_frames: by_lu mode requires a gold LU");
    const LexicalUnit* lu = lex.find_lu(gold_lu->lemma, gold_lu->pos);
    if (lu == nullptr)
      throw ValidationError("unknown lexical unit '" + gold_lu->key() + "'");
    for (int f : lu->frames) v[static_cast<std::size_t>(f)] = 1;
    return v;
  }
  const std::set<int>* frames = index.lookup(target_text);
  if (frames == nullptr) {
    std::fill(v.begin(), v.end(), 1);  // unseen target: all frames are candidates
    return v;
  }
  for (int f : *frames) v[static_cast<std::size_t>(f)] = 1;
  return v;
}

// Index dump: surface<TAB>Frame1,Frame2,... sorted by surface form.
inline void dump_target_index(std::ostream& os, const TargetIndex& index, const Lexicon& lex) {
  for (const auto& [surface, frames] : index.table()) {
    os << surface << "\t";
    bool first = true;
    for (int f : frames) {
      os << (first ? "" : ",") << lex.frame(f).name;
      first = false;
    }
    os << "\n";
  }
}

}  // namespace frameid

#endif  // FRAMEID_TARGET_INDEX_HPP
