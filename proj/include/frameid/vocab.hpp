#ifndef FRAMEID_VOCAB_HPP
#define FRAMEID_VOCAB_HPP

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "frameid/common.hpp"

namespace frameid {

// Wordpiece vocabulary. Ids are dense; the first four are reserved for the
// specials in the fixed file order PAD, UNK, CLS, SEP. Continuation pieces
// carry the "##" prefix. Immutable after construction.
class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kCls = 2;
  static constexpr int kSep = 3;
  static constexpr const char* kPadToken = "[PAD]";
  static constexpr const char* kUnkToken = "[UNK]";
  static constexpr const char* kClsToken = "[CLS]";
  static constexpr const char* kSepToken = "[SEP]";

  Vocab() {
    for (const char* t : {kPadToken, kUnkToken, kClsToken, kSepToken}) append(t);
  }

  int size() const { return static_cast<int>(tokens_.size()); }

  int id(std::string_view token) const {
    auto it = ids_.find(std::string(token));
    return it == ids_.end() ? -1 : it->second;
  }

  bool contains(std::string_view token) const { return id(token) >= 0; }

  const std::string& token(int id) const {
    if (id < 0 || id >= size()) throw ContractError("vocab: token id out of range");
    return tokens_[static_cast<std::size_t>(id)];
  }

  std::uint64_t hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const std::string& t : tokens_) {
      h = fnv1a64(t, h);
      h = fnv1a64("\n", h);
    }
    return h;
  }

  // Frequency-built vocabulary. Single characters and their "##"
  // continuations come first so segmentation of any seen character sequence
  // stays total even when the cap bites; whole words follow by descending
  // count, ties broken lexicographically. `cap` bounds the total size.
  static Vocab build(const std::vector<std::string>& sentences, std::size_t cap = 8192) {
    std::map<std::string, std::size_t> counts;
    std::set<char> chars;
    for (const std::string& s : sentences) {
      for (const std::string& w : whitespace_words(s)) {
        ++counts[w];
        for (char c : w) chars.insert(c);
      }
    }
    std::vector<std::pair<std::string, std::size_t>> by_freq(counts.begin(), counts.end());
    std::sort(by_freq.begin(), by_freq.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });

    Vocab v;
    auto room = [&] { return static_cast<std::size_t>(v.size()) < cap; };
    for (char c : chars) {
      if (!room()) break;
      std::string piece(1, c);
      if (!v.contains(piece)) v.append(piece);
    }
    for (char c : chars) {
      if (!room()) break;
      std::string piece = std::string("##") + c;
      if (!v.contains(piece)) v.append(piece);
    }
    for (const auto& [word, count] : by_freq) {
      if (!room()) break;
      if (!v.contains(word)) v.append(word);
    }
    return v;
  }

  // Vocab file: one token per line, line number = id; the first four lines
  // must be the specials in order.
  static Vocab load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ParseError("vocab file not found: " + path);
    Vocab v;
    std::string line;
    int line_no = 0;
    const char* expected[4] = {kPadToken, kUnkToken, kClsToken, kSepToken};
    while (std::getline(is, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line_no <= 4) {
        if (line != expected[line_no - 1])
          throw ParseError(path + ":" + std::to_string(line_no) + ": expected special token " +
                           expected[line_no - 1]);
        continue;
      }
      if (line.empty() || line.find(' ') != std::string::npos || line.find('\t') != std::string::npos)
        throw ParseError(path + ":" + std::to_string(line_no) + ": malformed token");
      if (line == "##")
        throw ParseError(path + ":" + std::to_string(line_no) + ": bare continuation prefix");
      if (v.contains(line))
        throw ParseError(path + ":" + std::to_string(line_no) + ": duplicate token '" + line + "'");
      v.append(line);
    }
    if (line_no < 4) throw ParseError(path + ": missing special tokens");
    return v;
  }

  void save(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw ParseError("cannot write vocab: " + path);
    for (const std::string& t : tokens_) os << t << "\n";
  }

  static std::vector<std::string> whitespace_words(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      std::size_t start = i;
      while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      if (i > start) out.emplace_back(s.substr(start, i - start));
    }
    return out;
  }

 private:
  void append(std::string token) {
    ids_.emplace(token, static_cast<int>(tokens_.size()));
    tokens_.push_back(std::move(token));
  }

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

}  // namespace frameid

#endif  // FRAMEID_VOCAB_HPP
