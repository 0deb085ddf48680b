#include <map>
#include <set>
#include <sstream>
#include <string>

#include "doctest.h"
#include "fixtures.hpp"
#include "frameid/target_index.hpp"

using namespace frameid;

TEST_CASE("index maps inflections of know.v to its frames") {
  Lexicon lex = fixtures::lexicon();
  TargetIndex index = build_target_index(lex);
  std::set<int> expected = lex.find_lu("know", Pos::v)->frames;
  for (const char* form : {"know", "knows", "knowing", "knew", "known"}) {
    const std::set<int>* frames = index.lookup(form);
    REQUIRE_MESSAGE(frames != nullptr, form);
    CHECK(*frames == expected);
  }
}

TEST_CASE("shared surface forms union their frames") {
  // can.v {Possibility, Capability} and can.n {Containers} share "can".
  Lexicon lex = fixtures::lexicon();
  TargetIndex index = build_target_index(lex);
  const std::set<int>* frames = index.lookup("can");
  REQUIRE(frames != nullptr);
  std::set<int> expected = lex.find_lu("can", Pos::v)->frames;
  for (int f : lex.find_lu("can", Pos::n)->frames) expected.insert(f);
  CHECK(*frames == expected);
  CHECK(frames->size() == 3);
}

TEST_CASE("index values equal a brute-force scan over all LU inflection sets") {
  Lexicon lex = fixtures::lexicon();
  TargetIndex index = build_target_index(lex);

  // Quadratic reference: for every LU and every form, collect unions.
  std::map<std::string, std::set<int>> reference;
  for (const LexicalUnit& lu : lex.lus())
    for (const std::string& form : inflect(lu.lemma, lu.pos))
      for (int f : lu.frames) reference[form].insert(f);

  CHECK(index.table().size() == reference.size());
  for (const auto& [surface, frames] : reference) {
    const std::set<int>* got = index.lookup(surface);
    REQUIRE_MESSAGE(got != nullptr, surface);
    CHECK(*got == frames);
  }
}

TEST_CASE("build_target_index is deterministic and idempotent") {
  Lexicon lex = fixtures::lexicon();
  TargetIndex a = build_target_index(lex);
  TargetIndex b = build_target_index(lex);
  CHECK(a.table() == b.table());
  CHECK(a.k() == b.k());
}

TEST_CASE("candidate_frames by_target: seen, unseen, normalization") {
  Lexicon lex = fixtures::lexicon();
  TargetIndex index = build_target_index(lex);

  auto v = candidate_frames(index, lex, "knew", CandidateMode::by_target);
  REQUIRE(v.size() == 12);
  for (int f = 0; f < 12; ++f)
    CHECK(static_cast<bool>(v[f]) == (lex.find_lu("know", Pos::v)->frames.count(f) == 1));

  auto unseen = candidate_frames(index, lex, "walmart", CandidateMode::by_target);
  int ones = 0;
  for (auto b : unseen) ones += b;
  CHECK(ones == 12);  // unseen target: every frame is a candidate

  auto upper = candidate_frames(index, lex, "  KNEW ", CandidateMode::by_target);
  CHECK(upper == v);
}

TEST_CASE("candidate_frames by_lu uses the LU, not the surface form") {
  Lexicon lex = fixtures::lexicon();
  TargetIndex index = build_target_index(lex);
  LexicalUnit probe;
  probe.lemma = "know";
  probe.pos = Pos::v;
  auto v1 = candidate_frames(index, lex, "whatever surface", CandidateMode::by_lu, &probe);
  auto v2 = candidate_frames(index, lex, "knew", CandidateMode::by_lu, &probe);
  CHECK(v1 == v2);
  for (int f = 0; f < 12; ++f)
    CHECK(static_cast<bool>(v1[f]) == (lex.find_lu("know", Pos::v)->frames.count(f) == 1));

  LexicalUnit missing;
  missing.lemma = "nonexistent";
  missing.pos = Pos::v;
  CHECK_THROWS_AS(candidate_frames(index, lex, "x", CandidateMode::by_lu, &missing),
                  ValidationError);
  CHECK_THROWS_AS(candidate_frames(index, lex, "x", CandidateMode::by_lu, nullptr), ContractError);
}

TEST_CASE("by_lu masks are subsets of by_target masks for the lemma surface") {
  Lexicon lex = fixtures::lexicon();
  TargetIndex index = build_target_index(lex);
  for (const LexicalUnit& lu : lex.lus()) {
    auto by_lu = candidate_frames(index, lex, lu.lemma, CandidateMode::by_lu, &lu);
    auto by_target = candidate_frames(index, lex, lu.lemma, CandidateMode::by_target);
    for (std::size_t f = 0; f < by_lu.size(); ++f) {
      INFO("lu ", lu.key(), " frame ", f);
      CHECK((!by_lu[f] || by_target[f]));
    }
  }
}

TEST_CASE("every LU's candidate set covers its own frames via lemma lookup") {
  Lexicon lex = fixtures::lexicon();
  TargetIndex index = build_target_index(lex);
  for (const LexicalUnit& lu : lex.lus()) {
    auto v = candidate_frames(index, lex, lu.lemma, CandidateMode::by_target);
    for (int f : lu.frames) CHECK(v[static_cast<std::size_t>(f)] == 1);
  }
}

TEST_CASE("multi-word LU indexing covers phrase inflections") {
  Lexicon lex = fixtures::lexicon();
  TargetIndex index = build_target_index(lex);
  for (const char* form : {"give up", "gives up", "gave up", "giving up", "given up"}) {
    const std::set<int>* frames = index.lookup(form);
    REQUIRE_MESSAGE(frames != nullptr, form);
    CHECK(frames->count(*lex.frame_id("Surrendering_possession")) == 1);
  }
}

TEST_CASE("index dump is sorted by surface and formats frames") {
  Lexicon lex = fixtures::lexicon();
  TargetIndex index = build_target_index(lex);
  std::ostringstream os;
  dump_target_index(os, index, lex);
  std::istringstream is(os.str());
  std::string line, prev;
  int lines = 0;
  while (std::getline(is, line)) {
    ++lines;
    std::string surface = line.substr(0, line.find('\t'));
    CHECK(prev < surface);
    prev = surface;
  }
  CHECK(lines == static_cast<int>(index.table().size()));
}
