#ifndef FRAMEID_TOKENIZER_HPP
#define FRAMEID_TOKENIZER_HPP

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include "frameid/common.hpp"
#include "frameid/lexicon.hpp"
#include "frameid/vocab.hpp"

namespace frameid {

// Token positions are 1-based throughout the window contract: CLS sits at
// position 1 and the clamp of the left window bound is to 1, so the window
// may legitimately cover CLS and SEP.

struct TokenPiece {
  std::string text;
  int begin = -1;  // char span into the raw sentence; -1,-1 for specials/PAD
  int end = -1;
};

// Greedy longest-match wordpiece segmentation over whitespace-split words.
// Continuations carry the "##" prefix; an unmatchable residue becomes one
// UNK piece covering the rest of the word, so segmentation is total.
inline std::vector<TokenPiece> tokenize(const Vocab& vocab, std::string_view sentence) {
  if (trim(sentence).empty()) throw ContractError("tokenize: empty sentence");
  std::vector<TokenPiece> out;
  std::size_t i = 0;
  while (i < sentence.size()) {
    while (i < sentence.size() && std::isspace(static_cast<unsigned char>(sentence[i]))) ++i;
    if (i >= sentence.size()) break;
    std::size_t word_begin = i;
    while (i < sentence.size() && !std::isspace(static_cast<unsigned char>(sentence[i]))) ++i;
    std::size_t word_end = i;

    std::size_t start = word_begin;
    while (start < word_end) {
      std::size_t end = word_end;
      bool matched = false;
      while (end > start) {
        std::string piece(sentence.substr(start, end - start));
        if (start > word_begin) piece = "##" + piece;
        if (vocab.contains(piece)) {
          out.push_back(TokenPiece{std::move(piece), static_cast<int>(start), static_cast<int>(end)});
          start = end;
          matched = true;
          break;
        }
        --end;
      }
      if (!matched) {
        out.push_back(TokenPiece{Vocab::kUnkToken, static_cast<int>(start), static_cast<int>(word_end)});
        break;
      }
    }
  }
  return out;
}

inline std::string detokenize_word(const std::vector<TokenPiece>& pieces) {
  std::string out;
  for (const TokenPiece& p : pieces) {
    std::string_view t = p.text;
    if (t.size() > 2 && t.substr(0, 2) == "##") t.remove_prefix(2);
    out.append(t);
  }
  return out;
}

// beta1 = max(p_start - w, 1), beta2 = min(p_end + w, n); all 1-based.
inline std::pair<int, int> window_bounds(int p_start, int p_end, int w, int n) {
  if (w < 0) throw ContractError("window_bounds: negative window size");
  if (!(1 <= p_start && p_start <= p_end && p_end <= n))
    throw ContractError("window_bounds: target positions out of range");
  int beta1 = (p_start - w) > 1 ? p_start - w : 1;
  int beta2 = (p_end + w) < n ? p_end + w : n;
  return {beta1, beta2};
}

// Binary vector over token positions: 1 where the token's char span overlaps
// any target span. Overlap (not containment) keeps off-by-one annotations
// attached to the intended pieces. Specials and PAD never overlap.
inline std::vector<std::uint8_t> make_position_vector(const std::vector<TokenPiece>& tokens,
                                                      const std::vector<Span>& target_spans,
                                                      std::size_t n) {
  std::vector<std::uint8_t> p(n, 0);
  for (const Span& s : target_spans) {
    bool hit = false;
    for (std::size_t i = 0; i < tokens.size() && i < n; ++i) {
      const TokenPiece& t = tokens[i];
      if (t.begin < 0) continue;
      if (t.begin < s.end && s.begin < t.end) {
        p[i] = 1;
        hit = true;
      }
    }
    if (!hit)
      throw AlignmentError("target span " + std::to_string(s.begin) + ":" + std::to_string(s.end) +
                           " overlaps no token");
  }
  return p;
}

// A sentence prepared for the encoder: CLS + pieces + SEP, right-padded to n.
struct TokenizedInstance {
  std::vector<int> token_ids;          // length n
  std::vector<TokenPiece> tokens;      // length n, specials/PAD have -1 spans
  std::vector<std::uint8_t> position;  // p, length n
  int p_start = 0;                     // 1-based
  int p_end = 0;
  int beta1 = 0;  // attention window, 1-based inclusive
  int beta2 = 0;
};

// Tokenizes, truncates overlong sentences before SEP, aligns the target
// spans, and computes the attention window. A target that overlaps no token
// at all raises AlignmentError; one whose every piece was truncated away
// raises TruncationError.
inline TokenizedInstance prepare_instance(const Vocab& vocab, std::string_view sentence,
                                          const std::vector<Span>& target_spans, int n, int w) {
  if (n < 3) throw ContractError("prepare_instance: n must be at least 3");
  validate_spans(target_spans, sentence.size(), "target");

  std::vector<TokenPiece> pieces = tokenize(vocab, sentence);

  // Alignment must be checked before truncation so that the two failure
  // modes stay distinguishable.
  auto overlaps_any = [&](const Span& s, std::size_t piece_count) {
    for (std::size_t i = 0; i < piece_count; ++i)
      if (pieces[i].begin >= 0 && pieces[i].begin < s.end && s.begin < pieces[i].end) return true;
    return false;
  };
  for (const Span& s : target_spans)
    if (!overlaps_any(s, pieces.size()))
      throw AlignmentError("target span " + std::to_string(s.begin) + ":" + std::to_string(s.end) +
                           " overlaps no token");

  // Spans that lost every piece to truncation are dropped; if none survive
  // the whole target is gone and the instance is rejected.
  std::size_t keep = std::min(pieces.size(), static_cast<std::size_t>(n - 2));
  std::vector<Span> survivors;
  for (const Span& s : target_spans)
    if (overlaps_any(s, keep)) survivors.push_back(s);
  if (survivors.empty())
    throw TruncationError("target lies entirely beyond the first " + std::to_string(n - 2) +
                          " pieces and was truncated away");

  TokenizedInstance inst;
  inst.tokens.reserve(static_cast<std::size_t>(n));
  inst.tokens.push_back(TokenPiece{Vocab::kClsToken, -1, -1});
  for (std::size_t i = 0; i < keep; ++i) inst.tokens.push_back(pieces[i]);
  inst.tokens.push_back(TokenPiece{Vocab::kSepToken, -1, -1});
  while (inst.tokens.size() < static_cast<std::size_t>(n))
    inst.tokens.push_back(TokenPiece{Vocab::kPadToken, -1, -1});

  inst.token_ids.reserve(inst.tokens.size());
  for (const TokenPiece& t : inst.tokens) {
    int id = vocab.id(t.text);
    inst.token_ids.push_back(id >= 0 ? id : Vocab::kUnk);
  }

  inst.position = make_position_vector(inst.tokens, survivors, static_cast<std::size_t>(n));

  int first = -1, last = -1;
  for (int i = 0; i < n; ++i) {
    if (inst.position[static_cast<std::size_t>(i)]) {
      if (first < 0) first = i;
      last = i;
    }
  }
  inst.p_start = first + 1;  // to 1-based
  inst.p_end = last + 1;
  auto [b1, b2] = window_bounds(inst.p_start, inst.p_end, w, n);
  inst.beta1 = b1;
  inst.beta2 = b2;
  return inst;
}

}  // namespace frameid

#endif  // FRAMEID_TOKENIZER_HPP
