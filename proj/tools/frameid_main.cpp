// frameid: command-line front end: index building, vocab building, training,
// prediction, evaluation and checkpoint inspection.
//
// Exit codes: 0 success, 2 usage/validation, 3 data (alignment/truncation),
// 4 model/checkpoint. Diagnostics go to stderr, results to stdout.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "frameid/checkpoint.hpp"
#include "frameid/common.hpp"
#include "frameid/eval.hpp"
#include "frameid/lexicon.hpp"
#include "frameid/model.hpp"
#include "frameid/target_index.hpp"
#include "frameid/tokenizer.hpp"
#include "frameid/train.hpp"
#include "frameid/vocab.hpp"

namespace {

using namespace frameid;

struct BuildIndexArgs {
  std::string lexicon_path;
  std::string out_path;
};

int cmd_build_index(const BuildIndexArgs& a) {
  Lexicon lex = load_lexicon(a.lexicon_path);
  TargetIndex index = build_target_index(lex);
  std::ofstream os(a.out_path);
  if (!os) throw ParseError("cannot write index: " + a.out_path);
  dump_target_index(os, index, lex);
  std::cout << "surfaces=" << index.table().size() << "\n";
  std::cout << "k=" << index.k() << "\n";
  return 0;
}

struct BuildVocabArgs {
  std::string train_path;
  std::string out_path;
  std::size_t cap = 8192;
};

int cmd_build_vocab(const BuildVocabArgs& a) {
  std::ifstream is(a.train_path);
  if (!is) throw ParseError("annotation file not found: " + a.train_path);
  std::vector<std::string> sentences;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    sentences.push_back(split(line, '\t')[0]);
  }
  if (sentences.empty()) throw ValidationError("no sentences in " + a.train_path);
  Vocab vocab = Vocab::build(sentences, a.cap);
  vocab.save(a.out_path);
  std::cout << "tokens=" << vocab.size() << "\n";
  char hash[32];
  std::snprintf(hash, sizeof(hash), "0x%016llx", static_cast<unsigned long long>(vocab.hash()));
  std::cout << "vocab_hash=" << hash << "\n";
  return 0;
}

struct TrainArgs {
  std::string config_path;
  std::string train_path;
  std::string dev_path;
  std::string lexicon_path;
  std::string vocab_path;
  std::string out_path;
  std::string log_path;
  std::size_t vocab_cap = 8192;
  EncoderConfig enc;  // layers/d/heads/ffn_dim/dropout from flags
};

int cmd_train(const TrainArgs& a) {
  TrainConfig tc = load_train_config(a.config_path);
  Lexicon lex = load_lexicon(a.lexicon_path);
  TargetIndex index = build_target_index(lex);
  std::vector<AnnotationInstance> corpus = load_annotations(a.train_path, lex);
  std::vector<AnnotationInstance> dev;
  if (!a.dev_path.empty()) dev = load_annotations(a.dev_path, lex);

  Vocab vocab;
  if (!a.vocab_path.empty()) {
    vocab = Vocab::load(a.vocab_path);
  } else {
    std::vector<std::string> sentences;
    for (const AnnotationInstance& inst : corpus) sentences.push_back(inst.sentence);
    vocab = Vocab::build(sentences, a.vocab_cap);
    vocab.save(a.out_path + ".vocab");
    std::cout << "vocab_file=" << a.out_path << ".vocab\n";
  }

  EncoderConfig cfg = a.enc;
  cfg.vocab_size = vocab.size();
  cfg.n = tc.n;
  cfg.validate();

  std::ofstream log_file;
  std::ostringstream log_buf;
  auto [params, report] = train(tc, cfg, corpus, dev, lex, index, vocab, &log_buf);

  if (!a.log_path.empty()) {
    log_file.open(a.log_path);
    if (!log_file) throw ParseError("cannot write log: " + a.log_path);
    log_file << log_buf.str();
  }
  std::cout << log_buf.str();

  save_checkpoint(a.out_path, params, cfg, tc.w, tc.seed, vocab.hash());
  std::cout << "checkpoint=" << a.out_path << "\n";
  std::cout << "dedup_removed=" << report.dedup_removed << "\n";
  std::cout << "prep_skipped=" << report.prep_skipped << "\n";
  std::cout << "filtered_skipped=" << report.filtered_skipped << "\n";
  if (!report.epochs.empty()) {
    std::cout << "final_train_acc=" << report.epochs.back().train_acc << "\n";
    if (report.has_dev) std::cout << "final_dev_acc=" << report.final_dev_acc << "\n";
  }
  return 0;
}

struct ModelBundle {
  CheckpointMeta meta;
  ModelParams params;
  Lexicon lex;
  TargetIndex index;
  Vocab vocab;
};

ModelBundle load_bundle(const std::string& model_path, const std::string& vocab_path,
                        const std::string& lexicon_path) {
  ModelBundle b;
  LoadedModel loaded = load_checkpoint(model_path);
  b.meta = loaded.meta;
  b.params = std::move(loaded.params);
  b.vocab = Vocab::load(vocab_path);
  if (b.vocab.hash() != b.meta.vocab_hash)
    throw CheckpointError("vocab hash mismatch: checkpoint was trained with a different vocab");
  if (b.vocab.size() != b.meta.config.vocab_size)
    throw CheckpointError("vocab size mismatch against checkpoint config");
  b.lex = load_lexicon(lexicon_path);
  if (b.lex.k() != b.meta.k)
    throw CheckpointError("lexicon frame count mismatch: checkpoint expects k=" +
                          std::to_string(b.meta.k));
  b.index = build_target_index(b.lex);
  return b;
}

struct PredictArgs {
  std::string model_path, vocab_path, lexicon_path;
  std::string sentence;
  std::string target;
  std::string filter = "masked";
  std::string mode = "by_target";
  std::string lu;
  int top = 1;
  int window = -1;  // -1: use checkpoint value
};

int cmd_predict(const PredictArgs& a) {
  if (a.top < 1) throw ValidationError("--top must be >= 1");
  ModelBundle b = load_bundle(a.model_path, a.vocab_path, a.lexicon_path);
  FilterMode filter = parse_filter_mode(a.filter);
  CandidateMode mode = parse_candidate_mode(a.mode);
  int w = a.window >= 0 ? a.window : b.meta.w;

  std::vector<Span> spans = parse_spans(a.target, "--target");
  validate_spans(spans, a.sentence.size(), "--target");

  AnnotationInstance inst;
  inst.sentence = a.sentence;
  inst.target_spans = spans;
  std::string surface = inst.target_text();

  std::vector<std::uint8_t> v;
  if (mode == CandidateMode::by_lu) {
    if (a.lu.empty()) throw ValidationError("--mode by_lu requires --lu lemma.pos");
    auto dot = a.lu.rfind('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 >= a.lu.size())
      throw ValidationError("malformed --lu '" + a.lu + "' (want lemma.pos)");
    LexicalUnit probe;
    probe.lemma = normalize_surface(a.lu.substr(0, dot));
    probe.pos = parse_pos(a.lu.substr(dot + 1));
    v = candidate_frames(b.index, b.lex, surface, CandidateMode::by_lu, &probe);
  } else {
    v = candidate_frames(b.index, b.lex, surface, CandidateMode::by_target);
  }

  TokenizedInstance tok =
      prepare_instance(b.vocab, a.sentence, spans, b.meta.config.n, w);
  FramePrediction pred = forward(b.params, b.meta.config, tok, std::move(v), filter);

  std::cout << "target=" << surface << "\n";
  std::cout << "window=[" << tok.beta1 << ", " << tok.beta2 << "]\n";

  std::vector<int> order(pred.y.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    if (pred.y[static_cast<std::size_t>(x)] != pred.y[static_cast<std::size_t>(y)])
      return pred.y[static_cast<std::size_t>(x)] > pred.y[static_cast<std::size_t>(y)];
    return x < y;
  });
  int shown = std::min<int>(a.top, static_cast<int>(order.size()));
  for (int r = 0; r < shown; ++r) {
    int f = order[static_cast<std::size_t>(r)];
    char prob[32];
    std::snprintf(prob, sizeof(prob), "%.6f", static_cast<double>(pred.y[static_cast<std::size_t>(f)]));
    std::cout << (r + 1) << ". " << b.lex.frame(f).name << "  " << prob;
    if (filter != FilterMode::none && !pred.v[static_cast<std::size_t>(f)])
      std::cout << "  (non-candidate)";
    std::cout << "\n";
  }
  return 0;
}

struct EvaluateArgs {
  std::string model_path, vocab_path, lexicon_path, data_path;
  std::string filter = "masked";
  std::string mode = "by_target";
  int window = -1;
};

int cmd_evaluate(const EvaluateArgs& a) {
  ModelBundle b = load_bundle(a.model_path, a.vocab_path, a.lexicon_path);
  FilterMode filter = parse_filter_mode(a.filter);
  CandidateMode mode = parse_candidate_mode(a.mode);
  int w = a.window >= 0 ? a.window : b.meta.w;
  std::vector<AnnotationInstance> data = load_annotations(a.data_path, b.lex);
  if (data.empty()) throw ValidationError("no instances in " + a.data_path);

  EvalReport report =
      evaluate(b.params, b.meta.config, w, data, b.lex, b.index, b.vocab, filter, mode);
  print_report_human(std::cout, report, b.lex);
  std::cout << "---\n";
  print_report_kv(std::cout, report);
  std::cout << "---\n";
  print_confusion_tsv(std::cout, report, b.lex);
  return 0;
}

int cmd_inspect(const std::string& model_path) {
  LoadedModel m = load_checkpoint(model_path);
  const CheckpointMeta& meta = m.meta;
  std::cout << "version=" << meta.version << "\n";
  std::cout << "layers=" << meta.config.layers << "\n";
  std::cout << "d=" << meta.config.d << "\n";
  std::cout << "heads=" << meta.config.heads << "\n";
  std::cout << "ffn_dim=" << meta.config.ffn_dim << "\n";
  std::cout << "vocab_size=" << meta.config.vocab_size << "\n";
  std::cout << "n=" << meta.config.n << "\n";
  std::cout << "dropout=" << meta.config.dropout << "\n";
  std::cout << "k=" << meta.k << "\n";
  std::cout << "w=" << meta.w << "\n";
  std::cout << "seed=" << meta.seed << "\n";
  char hash[32];
  std::snprintf(hash, sizeof(hash), "0x%016llx", static_cast<unsigned long long>(meta.vocab_hash));
  std::cout << "vocab_hash=" << hash << "\n";
  std::cout << "tensors=" << meta.tensor_count << "\n";
  std::cout << "parameters=" << meta.parameter_count << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"frame identification over a windowed-attention encoder"};
  app.require_subcommand(1);

  BuildIndexArgs bi;
  auto* build_index = app.add_subcommand("build-index", "build the surface-form candidate table");
  build_index->add_option("--lexicon", bi.lexicon_path, "lexicon file")->required();
  build_index->add_option("--out", bi.out_path, "output index dump")->required();

  BuildVocabArgs bv;
  auto* build_vocab = app.add_subcommand("build-vocab", "build a wordpiece vocab from a corpus");
  build_vocab->add_option("--train", bv.train_path, "annotation file")->required();
  build_vocab->add_option("--out", bv.out_path, "output vocab file")->required();
  build_vocab->add_option("--cap", bv.cap, "max vocab size");

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "train a model");
  train_cmd->add_option("--config", tr.config_path, "key=value training config")->required();
  train_cmd->add_option("--train", tr.train_path, "training annotations")->required();
  train_cmd->add_option("--dev", tr.dev_path, "dev annotations");
  train_cmd->add_option("--lexicon", tr.lexicon_path, "lexicon file")->required();
  train_cmd->add_option("--vocab", tr.vocab_path, "vocab file (built from corpus when omitted)");
  train_cmd->add_option("--out", tr.out_path, "output checkpoint")->required();
  train_cmd->add_option("--log", tr.log_path, "epoch log file");
  train_cmd->add_option("--vocab-cap", tr.vocab_cap, "vocab size cap when building");
  train_cmd->add_option("--layers", tr.enc.layers, "encoder layers");
  train_cmd->add_option("--dim", tr.enc.d, "hidden dimension");
  train_cmd->add_option("--heads", tr.enc.heads, "attention heads");
  train_cmd->add_option("--ffn", tr.enc.ffn_dim, "feed-forward width");
  train_cmd->add_option("--dropout", tr.enc.dropout, "dropout probability");

  PredictArgs pr;
  auto* predict_cmd = app.add_subcommand("predict", "predict the frame for a marked target");
  predict_cmd->add_option("--model", pr.model_path, "checkpoint")->required();
  predict_cmd->add_option("--vocab", pr.vocab_path, "vocab file")->required();
  predict_cmd->add_option("--lexicon", pr.lexicon_path, "lexicon file")->required();
  predict_cmd->add_option("--sentence", pr.sentence, "input sentence")->required();
  predict_cmd->add_option("--target", pr.target, "target spans a:b[,a:b...]")->required();
  predict_cmd->add_option("--filter", pr.filter, "none|masked|literal");
  predict_cmd->add_option("--mode", pr.mode, "by_target|by_lu");
  predict_cmd->add_option("--lu", pr.lu, "gold lexical unit lemma.pos (by_lu mode)");
  predict_cmd->add_option("--top", pr.top, "print top N frames");
  predict_cmd->add_option("--window", pr.window, "attention window override");

  EvaluateArgs ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "evaluate a model on annotations");
  evaluate_cmd->add_option("--model", ev.model_path, "checkpoint")->required();
  evaluate_cmd->add_option("--vocab", ev.vocab_path, "vocab file")->required();
  evaluate_cmd->add_option("--lexicon", ev.lexicon_path, "lexicon file")->required();
  evaluate_cmd->add_option("--data", ev.data_path, "annotations to score")->required();
  evaluate_cmd->add_option("--filter", ev.filter, "none|masked|literal");
  evaluate_cmd->add_option("--mode", ev.mode, "by_target|by_lu");
  evaluate_cmd->add_option("--window", ev.window, "attention window override");

  std::string inspect_path;
  auto* inspect_cmd = app.add_subcommand("inspect", "print checkpoint header");
  inspect_cmd->add_option("--model", inspect_path, "checkpoint")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (build_index->parsed()) return cmd_build_index(bi);
    if (build_vocab->parsed()) return cmd_build_vocab(bv);
    if (train_cmd->parsed()) return cmd_train(tr);
    if (predict_cmd->parsed()) return cmd_predict(pr);
    if (evaluate_cmd->parsed()) return cmd_evaluate(ev);
    if (inspect_cmd->parsed()) return cmd_inspect(inspect_path);
  } catch (const AlignmentError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const TruncationError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const CheckpointError& e) {
    std::cerr << "checkpoint error: " << e.what() << "\n";
    return 4;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
