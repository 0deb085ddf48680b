#ifndef FRAMEID_EVAL_HPP
#define FRAMEID_EVAL_HPP

#include <algorithm>
#include <map>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "frameid/common.hpp"
#include "frameid/lexicon.hpp"
#include "frameid/model.hpp"
#include "frameid/target_index.hpp"
#include "frameid/tokenizer.hpp"

namespace frameid {

// A target is ambiguous when its candidate set has two or more frames.
// Ambiguity is judged by surface-form lookup (the deployment view, where
// gold LUs are unknown); an unseen surface falls back to all k frames and
// therefore counts as ambiguous whenever k >= 2.
inline bool is_ambiguous(const TargetIndex& index, std::string_view target_text) {
  const std::set<int>* frames = index.lookup(target_text);
  if (frames == nullptr) return index.k() >= 2;
  return frames->size() >= 2;
}

struct EvalReport {
  int total = 0;
  int correct = 0;
  int ambiguous_total = 0;
  int ambiguous_correct = 0;
  int skipped = 0;  // unalignable or truncation-lost instances, scored as errors
  std::map<std::pair<int, int>, int> confusion;  // (gold, predicted) -> count, gold != predicted
  std::map<std::pair<int, int>, std::vector<std::string>> confusion_surfaces;
  FilterMode filter_mode = FilterMode::none;
  CandidateMode candidate_mode = CandidateMode::by_target;

  real_t accuracy_all() const { return total == 0 ? real_t(0) : real_t(correct) / real_t(total); }
  real_t accuracy_ambiguous() const {
    return ambiguous_total == 0 ? real_t(0) : real_t(ambiguous_correct) / real_t(ambiguous_total);
  }
  int misclassified() const {
    int sum = 0;
    for (const auto& [pair, count] : confusion) sum += count;
    return sum;
  }
};

inline EvalReport evaluate(ModelParams& params, const EncoderConfig& cfg, int w,
                           const std::vector<AnnotationInstance>& dataset, const Lexicon& lex,
                           const TargetIndex& index, const Vocab& vocab, FilterMode filter_mode,
                           CandidateMode candidate_mode) {
  if (dataset.empty()) throw ContractError("evaluate: empty dataset");
  EvalReport report;
  report.filter_mode = filter_mode;
  report.candidate_mode = candidate_mode;

  for (const AnnotationInstance& inst : dataset) {
    ++report.total;
    std::string surface = inst.target_text();
    bool ambiguous = is_ambiguous(index, surface);
    if (ambiguous) ++report.ambiguous_total;

    int predicted = -1;
    try {
      TokenizedInstance tok = prepare_instance(vocab, inst.sentence, inst.target_spans, cfg.n, w);
      std::vector<std::uint8_t> v;
      if (candidate_mode == CandidateMode::by_lu) {
        if (!inst.gold_lu_lemma) throw ValidationError("instance has no gold LU");
        LexicalUnit probe;
        probe.lemma = *inst.gold_lu_lemma;
        probe.pos = *inst.gold_lu_pos;
        v = candidate_frames(index, lex, surface, CandidateMode::by_lu, &probe);
      } else {
        v = candidate_frames(index, lex, surface, CandidateMode::by_target);
      }
      predicted = forward(params, cfg, tok, std::move(v), filter_mode).predicted;
    } catch (const Error&) {
      ++report.skipped;  // conservative: a skipped instance scores as an error
      continue;
    }

    if (predicted == inst.gold_frame) {
      ++report.correct;
      if (ambiguous) ++report.ambiguous_correct;
    } else {
      auto key = std::make_pair(inst.gold_frame, predicted);
      ++report.confusion[key];
      auto& surfaces = report.confusion_surfaces[key];
      std::string norm = normalize_surface(surface);
      if (std::find(surfaces.begin(), surfaces.end(), norm) == surfaces.end())
        surfaces.push_back(norm);
    }
  }
  return report;
}

// Most frequent confusions, descending by count, ties by (gold, predicted) id.
inline std::vector<std::tuple<int, int, int>> top_confused(const EvalReport& report, int top_k) {
  if (top_k < 1) throw ContractError("top_confused: top_k must be >= 1");
  std::vector<std::tuple<int, int, int>> all;
  for (const auto& [pair, count] : report.confusion)
    all.emplace_back(pair.first, pair.second, count);
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    if (std::get<2>(a) != std::get<2>(b)) return std::get<2>(a) > std::get<2>(b);
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
    return std::get<1>(a) < std::get<1>(b);
  });
  if (static_cast<int>(all.size()) > top_k) all.resize(static_cast<std::size_t>(top_k));
  return all;
}

inline void print_report_human(std::ostream& os, const EvalReport& r, const Lexicon& lex,
                               int top_k = 5) {
  os << "instances:            " << r.total << "\n";
  os << "correct:              " << r.correct << "\n";
  os << "skipped (as errors):  " << r.skipped << "\n";
  os << "accuracy (all):       " << r.accuracy_all() << "\n";
  os << "ambiguous instances:  " << r.ambiguous_total << "\n";
  os << "accuracy (ambiguous): " << r.accuracy_ambiguous() << "\n";
  os << "filter mode:          " << filter_mode_name(r.filter_mode) << "\n";
  os << "candidate mode:       " << candidate_mode_name(r.candidate_mode) << "\n";
  os << "ambiguity defined by surface-form lookup (>= 2 candidate frames)\n";
  auto top = top_confused(r, top_k);
  if (!top.empty()) {
    os << "most confused (gold -> predicted: count):\n";
    for (auto& [gold, pred, count] : top)
      os << "  " << lex.frame(gold).name << " -> " << lex.frame(pred).name << ": " << count << "\n";
  }
}

inline void print_report_kv(std::ostream& os, const EvalReport& r) {
  os << "total=" << r.total << "\n";
  os << "correct=" << r.correct << "\n";
  os << "skipped=" << r.skipped << "\n";
  os << "accuracy_all=" << r.accuracy_all() << "\n";
  os << "ambiguous_total=" << r.ambiguous_total << "\n";
  os << "ambiguous_correct=" << r.ambiguous_correct << "\n";
  os << "accuracy_ambiguous=" << r.accuracy_ambiguous() << "\n";
  os << "filter_mode=" << filter_mode_name(r.filter_mode) << "\n";
  os << "candidate_mode=" << candidate_mode_name(r.candidate_mode) << "\n";
  os << "ambiguity_definition=target_lookup\n";
}

// TSV: gold frame, predicted frame, count, example target surfaces.
inline void print_confusion_tsv(std::ostream& os, const EvalReport& r, const Lexicon& lex,
                                std::size_t max_surfaces = 4) {
  os << "gold\tpredicted\tcount\texample_targets\n";
  for (auto& [gold, pred, count] : top_confused(r, std::max<int>(1, static_cast<int>(r.confusion.size())))) {
    os << lex.frame(gold).name << "\t" << lex.frame(pred).name << "\t" << count << "\t";
    auto it = r.confusion_surfaces.find({gold, pred});
    if (it != r.confusion_surfaces.end()) {
      std::size_t limit = std::min(max_surfaces, it->second.size());
      for (std::size_t i = 0; i < limit; ++i) os << (i ? ", " : "") << it->second[i];
    }
    os << "\n";
  }
}

}  // namespace frameid

#endif  // FRAMEID_EVAL_HPP
