// Shared fixtures for the test suites. The fixture lexicon has 12 frames and
// 20 lexical units; know.v carries the four-frame candidate set exercised by
// the index tests, can.v the Possibility/Capability pair, so.adv the
// Degree/Causation pair used by the multi-occurrence corpora.
#ifndef FRAMEID_TESTS_FIXTURES_HPP
#define FRAMEID_TESTS_FIXTURES_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "frameid/lexicon.hpp"

namespace fixtures {

inline const char* lexicon_text() {
  return
      "# fixture lexicon: 12 frames, 20 lexical units\n"
      "frame\tCertainty\n"
      "frame\tDifferentiation\n"
      "frame\tAwareness\n"
      "frame\tFamiliarity\n"
      "frame\tPossibility\n"
      "frame\tCapability\n"
      "frame\tDegree\n"
      "frame\tCausation\n"
      "frame\tContainers\n"
      "frame\tSurrendering_possession\n"
      "frame\tDesirability\n"
      "frame\tVisiting\n"
      "lu\tknow\tv\tCertainty,Differentiation,Awareness,Familiarity\n"
      "lu\tcan\tv\tPossibility,Capability\n"
      "lu\tcan\tn\tContainers\n"
      "lu\tso\tadv\tDegree,Causation\n"
      "lu\tgive up\tv\tSurrendering_possession\n"
      "lu\texcellent\ta\tDesirability\n"
      "lu\tvisit\tv\tVisiting\n"
      "lu\tvisit\tn\tVisiting\n"
      "lu\taware\ta\tAwareness\n"
      "lu\tcertain\ta\tCertainty\n"
      "lu\tpossible\ta\tPossibility\n"
      "lu\table\ta\tCapability\n"
      "lu\tcause\tv\tCausation\n"
      "lu\tcause\tn\tCausation\n"
      "lu\tdegree\tn\tDegree\n"
      "lu\tbox\tn\tContainers\n"
      "lu\tjar\tn\tContainers\n"
      "lu\tsurrender\tv\tSurrendering_possession\n"
      "lu\tfine\ta\tDesirability\n"
      "lu\tfamiliar\ta\tFamiliarity\n";
}

inline frameid::Lexicon lexicon() {
  std::istringstream is(lexicon_text());
  return frameid::parse_lexicon(is, "fixture");
}

// Character span of the i-th occurrence (0-based) of `word` in `sentence`,
// located independently of the tokenizer.
inline frameid::Span occurrence(const std::string& sentence, const std::string& word,
                                int occurrence_index = 0) {
  std::size_t pos = 0;
  for (int i = 0;; ++i) {
    pos = sentence.find(word, pos);
    if (pos == std::string::npos) throw std::runtime_error("fixture: word not found: " + word);
    if (i == occurrence_index)
      return frameid::Span{static_cast<int>(pos), static_cast<int>(pos + word.size())};
    pos += word.size();
  }
}

// Scratch directory unique to the test process.
inline std::filesystem::path temp_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() /
             ("frameid_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path);
  os << content;
  os.close();
  return path.string();
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace fixtures

#endif  // FRAMEID_TESTS_FIXTURES_HPP
