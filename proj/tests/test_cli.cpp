// Integration tests driving the installed CLI binary end to end over the
// committed data/ fixtures.
#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args, const fs::path& dir) {
  static int counter = 0;
  fs::path out = dir / ("stdout_" + std::to_string(counter) + ".txt");
  fs::path err = dir / ("stderr_" + std::to_string(counter) + ".txt");
  ++counter;
  std::string cmd = std::string(FRAMEID_CLI_PATH) + " " + args + " > " + out.string() + " 2> " +
                    err.string();
  int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = fixtures::read_file(out);
  r.err = fixtures::read_file(err);
  return r;
}

std::string data_file(const char* name) { return std::string(FRAMEID_DATA_DIR) + "/" + name; }

// One shared trained pipeline; built on first use.
struct Pipeline {
  fs::path dir;
  std::string vocab, index, ckpt, log;
};

const Pipeline& pipeline() {
  static Pipeline p = [] {
    Pipeline pl;
    pl.dir = fixtures::temp_dir("cli");
    pl.vocab = (pl.dir / "vocab.txt").string();
    pl.index = (pl.dir / "index.tsv").string();
    pl.ckpt = (pl.dir / "model.ckpt").string();
    pl.log = (pl.dir / "train.log").string();

    RunResult bv = run_cli("build-vocab --train " + data_file("toy_train.txt") + " --out " + pl.vocab,
                           pl.dir);
    if (bv.exit_code != 0) throw std::runtime_error("pipeline: build-vocab failed: " + bv.err);
    RunResult bi = run_cli(
        "build-index --lexicon " + data_file("toy_lexicon.txt") + " --out " + pl.index, pl.dir);
    if (bi.exit_code != 0) throw std::runtime_error("pipeline: build-index failed: " + bi.err);
    RunResult tr = run_cli("train --config " + data_file("toy_config.txt") + " --train " +
                               data_file("toy_train.txt") + " --dev " + data_file("toy_dev.txt") +
                               " --lexicon " + data_file("toy_lexicon.txt") + " --vocab " + pl.vocab +
                               " --out " + pl.ckpt + " --log " + pl.log +
                               " --layers 1 --dim 16 --heads 2 --ffn 32",
                           pl.dir);
    if (tr.exit_code != 0) throw std::runtime_error("pipeline: train failed: " + tr.err);
    return pl;
  }();
  return p;
}

std::string common_flags() {
  const Pipeline& p = pipeline();
  return "--model " + p.ckpt + " --vocab " + p.vocab + " --lexicon " + data_file("toy_lexicon.txt");
}

}  // namespace

TEST_CASE("build-index writes a deterministic dump and reports counts") {
  auto dir = fixtures::temp_dir("cli_index");
  auto out1 = (dir / "i1.tsv").string();
  auto out2 = (dir / "i2.tsv").string();
  RunResult r1 = run_cli("build-index --lexicon " + data_file("toy_lexicon.txt") + " --out " + out1, dir);
  CHECK(r1.exit_code == 0);
  CHECK(r1.err.empty());
  CHECK(r1.out.find("k=12") != std::string::npos);
  CHECK(r1.out.find("surfaces=") != std::string::npos);
  RunResult r2 = run_cli("build-index --lexicon " + data_file("toy_lexicon.txt") + " --out " + out2, dir);
  CHECK(r2.exit_code == 0);
  CHECK(fixtures::read_file(out1) == fixtures::read_file(out2));
  CHECK(!fixtures::read_file(out1).empty());
}

TEST_CASE("build-index on a missing lexicon exits 2 with a diagnostic") {
  auto dir = fixtures::temp_dir("cli_missing");
  RunResult r = run_cli("build-index --lexicon /nonexistent/lex.txt --out " + (dir / "x").string(), dir);
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("not found") != std::string::npos);
}

TEST_CASE("unknown flags are rejected") {
  auto dir = fixtures::temp_dir("cli_flags");
  RunResult r = run_cli("build-index --lexicon a --out b --mystery-flag 3", dir);
  CHECK(r.exit_code == 2);
  CHECK(!r.err.empty());
}

TEST_CASE("full pipeline converges on the training fixture") {
  const Pipeline& p = pipeline();
  CHECK(fs::exists(p.ckpt));
  CHECK(fs::exists(p.log));

  RunResult ev = run_cli("evaluate " + common_flags() + " --data " + data_file("toy_train.txt") +
                             " --filter masked --mode by_target",
                         p.dir);
  REQUIRE(ev.exit_code == 0);
  CHECK(ev.err.empty());
  CHECK(ev.out.find("accuracy_all=1") != std::string::npos);
  CHECK(ev.out.find("filter_mode=masked") != std::string::npos);
  CHECK(ev.out.find("skipped=0") != std::string::npos);
}

TEST_CASE("evaluate runs in every filter mode and labels its report") {
  const Pipeline& p = pipeline();
  for (const char* mode : {"none", "masked", "literal"}) {
    RunResult r = run_cli("evaluate " + common_flags() + " --data " + data_file("toy_dev.txt") +
                              " --filter " + mode + " --mode by_target",
                          p.dir);
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
    CHECK(r.out.find(std::string("filter_mode=") + mode) != std::string::npos);
  }
  RunResult by_lu = run_cli("evaluate " + common_flags() + " --data " + data_file("toy_dev.txt") +
                                " --filter masked --mode by_lu",
                            p.dir);
  REQUIRE(by_lu.exit_code == 0);
  CHECK(by_lu.out.find("candidate_mode=by_lu") != std::string::npos);
}

TEST_CASE("predict: trained sentence recovers its gold frame with high confidence") {
  const Pipeline& p = pipeline();
  RunResult r = run_cli("predict " + common_flags() +
                            " --sentence 'we knew the answer for sure' --target 3:7 --filter masked"
                            " --mode by_target --top 4",
                        p.dir);
  REQUIRE_MESSAGE(r.exit_code == 0, r.err);
  CHECK(r.err.empty());
  CHECK(r.out.find("window=") != std::string::npos);
  // top line is rank 1: gold frame with probability above 0.9
  auto pos = r.out.find("1. ");
  REQUIRE(pos != std::string::npos);
  std::string first_line = r.out.substr(pos, r.out.find('\n', pos) - pos);
  CHECK(first_line.find("Certainty") != std::string::npos);
  double prob = std::stod(first_line.substr(first_line.rfind("  ")));
  CHECK(prob > 0.9);
}

TEST_CASE("predict: empty span exits 2, truncated target exits 3") {
  const Pipeline& p = pipeline();
  RunResult empty = run_cli("predict " + common_flags() + " --sentence 'the box sat' --target 0:0", p.dir);
  CHECK(empty.exit_code == 2);
  CHECK(!empty.err.empty());

  std::string long_sentence = "box";
  for (int i = 0; i < 20; ++i) long_sentence += " w" + std::to_string(i);
  long_sentence += " visit";
  auto target_begin = long_sentence.rfind("visit");
  RunResult trunc = run_cli("predict " + common_flags() + " --sentence '" + long_sentence +
                                "' --target " + std::to_string(target_begin) + ":" +
                                std::to_string(target_begin + 5),
                            p.dir);
  CHECK(trunc.exit_code == 3);
  CHECK(trunc.err.find("truncat") != std::string::npos);
}

TEST_CASE("predict: by_lu without --lu is a usage error") {
  const Pipeline& p = pipeline();
  RunResult r = run_cli("predict " + common_flags() + " --sentence 'the box sat' --target 4:7 --mode by_lu",
                        p.dir);
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("--lu") != std::string::npos);
}

TEST_CASE("predict disambiguates the two occurrences of a repeated word") {
  const Pipeline& p = pipeline();
  // "it was so dry here that so it cracked": so at 7:9 (Degree) and 24:26 (Causation)
  RunResult first = run_cli("predict " + common_flags() +
                                " --sentence 'it was so dry here that so it cracked'"
                                " --target 7:9 --filter masked --mode by_target",
                            p.dir);
  RunResult second = run_cli("predict " + common_flags() +
                                 " --sentence 'it was so dry here that so it cracked'"
                                 " --target 24:26 --filter masked --mode by_target",
                             p.dir);
  REQUIRE(first.exit_code == 0);
  REQUIRE(second.exit_code == 0);
  CHECK(first.out.find("1. Degree") != std::string::npos);
  CHECK(second.out.find("1. Causation") != std::string::npos);
}

TEST_CASE("predict on an unseen target falls back to all frames as candidates") {
  const Pipeline& p = pipeline();
  // "walmart" is absent from the lexicon's inflection table; every frame is
  // then a candidate, so no entry is marked non-candidate even at --top 12
  RunResult r = run_cli("predict " + common_flags() +
                            " --sentence 'the box was walmart' --target 12:19 --filter masked --top 12",
                        p.dir);
  REQUIRE_MESSAGE(r.exit_code == 0, r.err);
  CHECK(r.out.find("target=walmart") != std::string::npos);
  CHECK(r.out.find("(non-candidate)") == std::string::npos);
  CHECK(r.out.find("12. ") != std::string::npos);  // all 12 frames printed
}

TEST_CASE("predict --top beyond the candidate count marks non-candidates") {
  const Pipeline& p = pipeline();
  // "box" has a single candidate; ask for three
  RunResult r = run_cli("predict " + common_flags() +
                            " --sentence 'the box was full' --target 4:7 --filter masked --top 3",
                        p.dir);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("1. Containers  1.000000") != std::string::npos);
  CHECK(r.out.find("(non-candidate)") != std::string::npos);
}

TEST_CASE("inspect reports the analytic parameter count and hashes") {
  const Pipeline& p = pipeline();
  RunResult r = run_cli("inspect --model " + p.ckpt, p.dir);
  REQUIRE(r.exit_code == 0);
  CHECK(r.err.empty());
  CHECK(r.out.find("version=1") != std::string::npos);
  CHECK(r.out.find("vocab_hash=0x") != std::string::npos);
  CHECK(r.out.find("k=12") != std::string::npos);

  auto grab = [&](const std::string& key) {
    // line-anchored so that "n=" does not match inside "version="
    std::string needle = "\n" + key + "=";
    std::string hay = "\n" + r.out;
    auto pos = hay.find(needle);
    REQUIRE(pos != std::string::npos);
    return std::stoll(hay.substr(pos + needle.size()));
  };
  long long layers = grab("layers"), d = grab("d"), ffn = grab("ffn_dim"),
            vocab = grab("vocab_size"), n = grab("n"), k = grab("k");
  long long expected = static_cast<long long>(oracles::parameter_count_formula(
      static_cast<int>(layers), static_cast<int>(d), static_cast<int>(ffn), static_cast<int>(vocab),
      static_cast<int>(n), static_cast<int>(k)));
  CHECK(grab("parameters") == expected);
}

TEST_CASE("a corrupt checkpoint exits 4 with a checkpoint diagnostic") {
  const Pipeline& p = pipeline();
  std::string bytes = fixtures::read_file(p.ckpt);
  bytes[bytes.size() / 2] ^= 0x40;
  auto bad = (p.dir / "corrupt.ckpt").string();
  std::ofstream(bad, std::ios::binary).write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  RunResult r = run_cli("inspect --model " + bad, p.dir);
  CHECK(r.exit_code == 4);
  CHECK(r.err.find("checkpoint") != std::string::npos);
}

TEST_CASE("train rejects a config with bad keys, exit 2 naming them") {
  auto dir = fixtures::temp_dir("cli_badcfg");
  auto cfg = fixtures::write_file(dir / "bad.txt", "epochs=0\nbatch_size=4\n");
  RunResult r = run_cli("train --config " + cfg + " --train " + data_file("toy_train.txt") +
                            " --lexicon " + data_file("toy_lexicon.txt") + " --out " +
                            (dir / "m.ckpt").string(),
                        dir);
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("epochs") != std::string::npos);
}
