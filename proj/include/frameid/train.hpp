#ifndef FRAMEID_TRAIN_HPP
#define FRAMEID_TRAIN_HPP

#include <chrono>
#include <fstream>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "frameid/common.hpp"
#include "frameid/eval.hpp"
#include "frameid/graph.hpp"
#include "frameid/model.hpp"
#include "frameid/target_index.hpp"
#include "frameid/tokenizer.hpp"

namespace frameid {

// Probability floor keeping -log finite when the literal filter head zeroes
// the gold frame's logit path.
inline constexpr real_t kLossFloor = real_t(1e-12);

struct TrainConfig {
  int batch_size = 8;
  real_t learning_rate = real_t(0.05);
  int epochs = 50;
  int w = kDefaultWindow;
  FilterMode filter_mode = FilterMode::none;
  CandidateMode candidate_mode = CandidateMode::by_target;
  std::uint64_t seed = 42;
  int n = 64;
  real_t momentum = real_t(0);

  void validate() const {
    std::vector<std::string> bad;
    if (batch_size < 1) bad.push_back("batch_size");
    if (!(learning_rate > 0)) bad.push_back("learning_rate");
    if (epochs < 1) bad.push_back("epochs");
    if (w < 0) bad.push_back("w");
    if (n < 3) bad.push_back("n");
    if (momentum < 0 || momentum >= 1) bad.push_back("momentum");
    if (!bad.empty()) {
      std::string msg = "invalid training config keys:";
      for (const std::string& b : bad) msg += " " + b;
      throw ValidationError(msg);
    }
  }
};

// Flat key=value config file; keys match the TrainConfig field names.
inline TrainConfig parse_train_config(std::istream& is, const std::string& origin = "<stream>") {
  TrainConfig cfg;
  std::string line;
  int line_no = 0;
  std::vector<std::string> unknown;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError(origin + ":" + std::to_string(line_no) + ": expected key=value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    try {
      if (key == "batch_size") cfg.batch_size = std::stoi(value);
      else if (key == "learning_rate") cfg.learning_rate = static_cast<real_t>(std::stod(value));
      else if (key == "epochs") cfg.epochs = std::stoi(value);
      else if (key == "w") cfg.w = std::stoi(value);
      else if (key == "filter_mode") cfg.filter_mode = parse_filter_mode(value);
      else if (key == "candidate_mode") cfg.candidate_mode = parse_candidate_mode(value);
      else if (key == "seed") cfg.seed = std::stoull(value);
      else if (key == "n") cfg.n = std::stoi(value);
      else if (key == "momentum") cfg.momentum = static_cast<real_t>(std::stod(value));
      else unknown.push_back(key);
    } catch (const std::logic_error&) {
      throw ParseError(origin + ":" + std::to_string(line_no) + ": bad value for " + key);
    }
  }
  if (!unknown.empty()) {
    std::string msg = "unknown training config keys:";
    for (const std::string& k : unknown) msg += " " + k;
    throw ValidationError(msg);
  }
  cfg.validate();
  return cfg;
}

inline TrainConfig load_train_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("config file not found: " + path);
  return parse_train_config(is, path);
}

// Cross-entropy against the gold frame: -log(max(y[gold], floor)).
inline real_t loss_value(const Tensor& y, int gold) {
  if (gold < 0 || static_cast<std::size_t>(gold) >= y.size())
    throw ContractError("loss: gold frame out of range");
  return -std::log(std::max(y[static_cast<std::size_t>(gold)], kLossFloor));
}

inline Graph::NodeId loss_node(Graph& g, Graph::NodeId y, int gold) {
  if (gold < 0 || static_cast<std::size_t>(gold) >= g.value(y).size())
    throw ContractError("loss: gold frame out of range");
  return g.neg_log(g.pick(y, static_cast<std::size_t>(gold)), kLossFloor);
}

// Removes training instances whose exact sentence string also occurs in the
// held-out set; sentence-level, so one shared sentence drops all of its
// training instances.
inline std::vector<AnnotationInstance> dedupe(const std::vector<AnnotationInstance>& corpus,
                                              const std::vector<AnnotationInstance>& held_out,
                                              int* removed = nullptr) {
  std::set<std::string> held;
  for (const AnnotationInstance& inst : held_out) held.insert(inst.sentence);
  std::vector<AnnotationInstance> out;
  out.reserve(corpus.size());
  int dropped = 0;
  for (const AnnotationInstance& inst : corpus) {
    if (held.count(inst.sentence)) {
      ++dropped;
    } else {
      out.push_back(inst);
    }
  }
  if (removed) *removed = dropped;
  return out;
}

struct TrainReport {
  struct Epoch {
    real_t loss = 0;       // mean loss over instances that produced a gradient
    real_t train_acc = 0;  // over all corpus instances, skipped ones count as wrong
    real_t dev_acc = 0;
    double seconds = 0;
  };
  std::vector<Epoch> epochs;
  bool has_dev = false;
  real_t final_dev_acc = 0;
  int dedup_removed = 0;
  int prep_skipped = 0;     // unalignable/truncated instances dropped before training
  int filtered_skipped = 0; // gold frame outside the candidate mask, cumulative
};

namespace detail {

struct PreparedInstance {
  TokenizedInstance tokens;
  std::vector<std::uint8_t> mask;
  int gold = -1;
};

}  // namespace detail

// Deterministic epoch ordering: a Fisher-Yates permutation from the seeded
// stream; never drops or duplicates an index.
inline std::vector<std::size_t> epoch_order(std::size_t count, Rng& rng) {
  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i;
  rng.shuffle(order);
  return order;
}

// Mini-batch gradient descent (optional momentum) over the full forward
// pass. Returns the trained parameters and the per-epoch report. The log
// stream, when given, receives one tab-separated line per epoch:
// epoch, loss, train_acc, dev_acc, seconds.
inline std::pair<ModelParams, TrainReport> train(const TrainConfig& tc, const EncoderConfig& ec,
                                                 const std::vector<AnnotationInstance>& corpus_in,
                                                 const std::vector<AnnotationInstance>& dev,
                                                 const Lexicon& lex, const TargetIndex& index,
                                                 const Vocab& vocab, std::ostream* log = nullptr) {
  tc.validate();
  EncoderConfig cfg = ec;
  cfg.n = tc.n;
  cfg.validate();
  if (corpus_in.empty()) throw ContractError("train: empty corpus");

  TrainReport report;
  std::vector<AnnotationInstance> corpus = dedupe(corpus_in, dev, &report.dedup_removed);
  if (corpus.empty()) throw ValidationError("train: every training sentence also occurs in dev");
  report.has_dev = !dev.empty();

  // Tokenization, alignment and candidate masks are position-independent of
  // the optimizer state, so they are prepared once.
  std::vector<detail::PreparedInstance> prepared;
  prepared.reserve(corpus.size());
  for (const AnnotationInstance& inst : corpus) {
    try {
      detail::PreparedInstance p;
      p.tokens = prepare_instance(vocab, inst.sentence, inst.target_spans, cfg.n, tc.w);
      if (tc.candidate_mode == CandidateMode::by_lu) {
        if (!inst.gold_lu_lemma) throw ValidationError("instance has no gold LU");
        LexicalUnit probe;
        probe.lemma = *inst.gold_lu_lemma;
        probe.pos = *inst.gold_lu_pos;
        p.mask = candidate_frames(index, lex, inst.target_text(), CandidateMode::by_lu, &probe);
      } else {
        p.mask = candidate_frames(index, lex, inst.target_text(), CandidateMode::by_target);
      }
      p.gold = inst.gold_frame;
      prepared.push_back(std::move(p));
    } catch (const Error&) {
      ++report.prep_skipped;
    }
  }
  if (prepared.empty()) throw ValidationError("train: no trainable instances after preparation");

  ModelParams params = init_model(cfg, lex.k(), tc.seed);
  params.zero_grads();

  std::vector<Tensor> velocity;
  if (tc.momentum > 0)
    for (Parameter* p : params.all()) velocity.emplace_back(p->value.rows(), p->value.cols());

  Rng shuffle_rng(tc.seed ^ 0x5DEECE66DULL);
  Rng dropout_rng(tc.seed ^ 0xD1B54A32D192ED03ULL);
  const std::size_t total_for_acc = corpus.size();  // prep-skipped instances count as wrong

  for (int epoch = 1; epoch <= tc.epochs; ++epoch) {
    auto start = std::chrono::steady_clock::now();
    std::vector<std::size_t> order = epoch_order(prepared.size(), shuffle_rng);

    real_t loss_sum = 0;
    std::size_t loss_count = 0;
    std::size_t correct = 0;

    for (std::size_t batch_start = 0; batch_start < order.size();
         batch_start += static_cast<std::size_t>(tc.batch_size)) {
      std::size_t batch_end =
          std::min(order.size(), batch_start + static_cast<std::size_t>(tc.batch_size));
      std::size_t used = 0;

      for (std::size_t bi = batch_start; bi < batch_end; ++bi) {
        detail::PreparedInstance& inst = prepared[order[bi]];

        // Unlearnable under this mask: the gradient would push toward a
        // frame the filter forbids, so the instance is skipped and counted.
        if (tc.filter_mode != FilterMode::none && !inst.mask[static_cast<std::size_t>(inst.gold)]) {
          ++report.filtered_skipped;
          continue;
        }

        Graph g;
        ForwardNodes nodes =
            build_forward(g, params, cfg, inst.tokens, inst.mask, tc.filter_mode, true, &dropout_rng);
        auto loss = loss_node(g, nodes.y, inst.gold);
        real_t value = g.value(loss)[0];
        if (!std::isfinite(value))
          throw Error("train: non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                      std::to_string(batch_start / static_cast<std::size_t>(tc.batch_size) + 1) +
                      ", instance " + std::to_string(order[bi]));
        g.backward(loss);

        loss_sum += value;
        ++loss_count;
        ++used;
        if (argmax_frame(g.value(nodes.y), inst.mask, tc.filter_mode) == inst.gold) ++correct;
      }

      if (used == 0) continue;
      // Batch gradient = mean of per-instance gradients.
      real_t inv = real_t(1) / static_cast<real_t>(used);
      auto all = params.all();
      for (std::size_t pi = 0; pi < all.size(); ++pi) {
        Parameter* p = all[pi];
        if (tc.momentum > 0) {
          Tensor& vel = velocity[pi];
          for (std::size_t i = 0; i < p->value.size(); ++i) {
            vel[i] = tc.momentum * vel[i] + p->grad[i] * inv;
            p->value[i] -= tc.learning_rate * vel[i];
          }
        } else {
          for (std::size_t i = 0; i < p->value.size(); ++i)
            p->value[i] -= tc.learning_rate * p->grad[i] * inv;
        }
        p->zero_grad();
      }
    }

    TrainReport::Epoch e;
    e.loss = loss_count ? loss_sum / static_cast<real_t>(loss_count) : real_t(0);
    e.train_acc = static_cast<real_t>(correct) / static_cast<real_t>(total_for_acc);
    if (report.has_dev) {
      EvalReport dev_report = evaluate(params, cfg, tc.w, dev, lex, index, vocab, tc.filter_mode,
                                       tc.candidate_mode);
      e.dev_acc = dev_report.accuracy_all();
    }
    e.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.epochs.push_back(e);
    if (log) {
      (*log) << epoch << "\t" << e.loss << "\t" << e.train_acc << "\t";
      if (report.has_dev) (*log) << e.dev_acc;
      else (*log) << "-";
      (*log) << "\t" << e.seconds << "\n";
    }
  }

  if (report.has_dev && !report.epochs.empty()) report.final_dev_acc = report.epochs.back().dev_acc;
  return {std::move(params), std::move(report)};
}

}  // namespace frameid

#endif  // FRAMEID_TRAIN_HPP
