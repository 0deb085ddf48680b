#ifndef FRAMEID_INFLECT_HPP
#define FRAMEID_INFLECT_HPP

#include <array>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>

#include "frameid/common.hpp"

namespace frameid {

// Part-of-speech tags accepted by the lexicon format. Only v/n/a carry
// inflection rules; everything else yields the bare lemma.
enum class Pos { v, n, a, adv, prep, num, art, c, intj, pron };

inline Pos parse_pos(std::string_view s) {
  if (s == "v") return Pos::v;
  if (s == "n") return Pos::n;
  if (s == "a") return Pos::a;
  if (s == "adv") return Pos::adv;
  if (s == "prep") return Pos::prep;
  if (s == "num") return Pos::num;
  if (s == "art") return Pos::art;
  if (s == "c") return Pos::c;
  if (s == "intj") return Pos::intj;
  if (s == "pron") return Pos::pron;
  throw ParseError("unknown part-of-speech tag '" + std::string(s) + "'");
}

inline const char* pos_name(Pos p) {
  switch (p) {
    case Pos::v: return "v";
    case Pos::n: return "n";
    case Pos::a: return "a";
    case Pos::adv: return "adv";
    case Pos::prep: return "prep";
    case Pos::num: return "num";
    case Pos::art: return "art";
    case Pos::c: return "c";
    case Pos::intj: return "intj";
    case Pos::pron: return "pron";
  }
  return "?";
}

namespace detail {

inline bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

// Consonant-vowel-consonant ending with a short-word heuristic; final
// consonant doubles before -ed/-ing/-er ("stop" -> "stopped"). Without
// stress information this stays a heuristic; common polysyllabic doublers
// are covered by the irregular table instead.
inline bool doubles_final(const std::string& w) {
  if (w.size() < 3 || w.size() > 4) return false;
  char c1 = w[w.size() - 3], c2 = w[w.size() - 2], c3 = w[w.size() - 1];
  if (!(!is_vowel(c1) && is_vowel(c2) && !is_vowel(c3))) return false;
  return c3 != 'w' && c3 != 'x' && c3 != 'y';
}

struct IrregularVerb {
  const char* lemma;
  const char* past;
  const char* past_participle;
  const char* gerund;  // nullptr -> regular rule
  const char* third;   // nullptr -> regular rule
};

// Bundled irregular-verb table. past == past_participle entries are listed
// once in each column for clarity.
inline const std::array<IrregularVerb, 72>& irregular_verbs() {
  static const std::array<IrregularVerb, 72> table = {{
      {"be", "was", "been", "being", "is"},
      {"have", "had", "had", nullptr, "has"},
      {"do", "did", "done", nullptr, "does"},
      {"go", "went", "gone", nullptr, "goes"},
      {"say", "said", "said", nullptr, nullptr},
      {"make", "made", "made", nullptr, nullptr},
      {"know", "knew", "known", nullptr, nullptr},
      {"take", "took", "taken", nullptr, nullptr},
      {"come", "came", "come", nullptr, nullptr},
      {"see", "saw", "seen", nullptr, nullptr},
      {"get", "got", "gotten", "getting", nullptr},
      {"give", "gave", "given", nullptr, nullptr},
      {"find", "found", "found", nullptr, nullptr},
      {"think", "thought", "thought", nullptr, nullptr},
      {"tell", "told", "told", nullptr, nullptr},
      {"become", "became", "become", nullptr, nullptr},
      {"show", "showed", "shown", nullptr, nullptr},
      {"leave", "left", "left", nullptr, nullptr},
      {"feel", "felt", "felt", nullptr, nullptr},
      {"put", "put", "put", "putting", nullptr},
      {"bring", "brought", "brought", nullptr, nullptr},
      {"begin", "began", "begun", "beginning", nullptr},
      {"keep", "kept", "kept", nullptr, nullptr},
      {"hold", "held", "held", nullptr, nullptr},
      {"write", "wrote", "written", nullptr, nullptr},
      {"stand", "stood", "stood", nullptr, nullptr},
      {"hear", "heard", "heard", nullptr, nullptr},
      {"let", "let", "let", "letting", nullptr},
      {"mean", "meant", "meant", nullptr, nullptr},
      {"set", "set", "set", "setting", nullptr},
      {"meet", "met", "met", nullptr, nullptr},
      {"run", "ran", "run", nullptr, nullptr},
      {"pay", "paid", "paid", nullptr, nullptr},
      {"sit", "sat", "sat", nullptr, nullptr},
      {"speak", "spoke", "spoken", nullptr, nullptr},
      {"lie", "lay", "lain", "lying", nullptr},
      {"lead", "led", "led", nullptr, nullptr},
      {"read", "read", "read", nullptr, nullptr},
      {"grow", "grew", "grown", nullptr, nullptr},
      {"lose", "lost", "lost", nullptr, nullptr},
      {"fall", "fell", "fallen", nullptr, nullptr},
      {"send", "sent", "sent", nullptr, nullptr},
      {"build", "built", "built", nullptr, nullptr},
      {"understand", "understood", "understood", nullptr, nullptr},
      {"draw", "drew", "drawn", nullptr, nullptr},
      {"break", "broke", "broken", nullptr, nullptr},
      {"spend", "spent", "spent", nullptr, nullptr},
      {"cut", "cut", "cut", "cutting", nullptr},
      {"rise", "rose", "risen", nullptr, nullptr},
      {"drive", "drove", "driven", nullptr, nullptr},
      {"buy", "bought", "bought", nullptr, nullptr},
      {"wear", "wore", "worn", nullptr, nullptr},
      {"choose", "chose", "chosen", nullptr, nullptr},
      {"eat", "ate", "eaten", nullptr, nullptr},
      {"fly", "flew", "flown", nullptr, nullptr},
      {"forget", "forgot", "forgotten", "forgetting", nullptr},
      {"sing", "sang", "sung", nullptr, nullptr},
      {"sleep", "slept", "slept", nullptr, nullptr},
      {"swim", "swam", "swum", "swimming", nullptr},
      {"throw", "threw", "thrown", nullptr, nullptr},
      {"win", "won", "won", "winning", nullptr},
      {"teach", "taught", "taught", nullptr, nullptr},
      {"catch", "caught", "caught", nullptr, nullptr},
      {"fight", "fought", "fought", nullptr, nullptr},
      {"sell", "sold", "sold", nullptr, nullptr},
      {"shake", "shook", "shaken", nullptr, nullptr},
      {"steal", "stole", "stolen", nullptr, nullptr},
      {"seek", "sought", "sought", nullptr, nullptr},
      {"feed", "fed", "fed", nullptr, nullptr},
      {"blow", "blew", "blown", nullptr, nullptr},
      {"ride", "rode", "ridden", nullptr, nullptr},
      {"wake", "woke", "woken", nullptr, nullptr},
  }};
  return table;
}

inline const std::unordered_map<std::string, std::string>& irregular_plurals() {
  static const std::unordered_map<std::string, std::string> table = {
      {"man", "men"},       {"woman", "women"},     {"child", "children"},
      {"person", "people"}, {"foot", "feet"},       {"tooth", "teeth"},
      {"mouse", "mice"},    {"goose", "geese"},     {"ox", "oxen"},
      {"sheep", "sheep"},   {"fish", "fish"},       {"deer", "deer"},
      {"series", "series"}, {"species", "species"}, {"datum", "data"},
      {"life", "lives"},    {"knife", "knives"},    {"wife", "wives"},
      {"leaf", "leaves"},   {"wolf", "wolves"},     {"half", "halves"},
      {"potato", "potatoes"}, {"tomato", "tomatoes"}, {"hero", "heroes"},
      {"echo", "echoes"},
  };
  return table;
}

struct IrregularAdj {
  const char* lemma;
  const char* comparative;
  const char* superlative;
};

inline const std::array<IrregularAdj, 5>& irregular_adjectives() {
  static const std::array<IrregularAdj, 5> table = {{
      {"good", "better", "best"},
      {"bad", "worse", "worst"},
      {"far", "farther", "farthest"},
      {"little", "less", "least"},
      {"much", "more", "most"},
  }};
  return table;
}

inline std::string third_singular(const std::string& w) {
  std::size_t n = w.size();
  char last = w[n - 1];
  if (last == 's' || last == 'x' || last == 'z' ||
      (n >= 2 && (w.compare(n - 2, 2, "ch") == 0 || w.compare(n - 2, 2, "sh") == 0)) ||
      last == 'o')
    return w + "es";
  if (last == 'y' && n >= 2 && !is_vowel(w[n - 2])) return w.substr(0, n - 1) + "ies";
  return w + "s";
}

inline std::string gerund(const std::string& w) {
  std::size_t n = w.size();
  if (n >= 2 && w.compare(n - 2, 2, "ie") == 0) return w.substr(0, n - 2) + "ying";
  if (n > 2 && w[n - 1] == 'e' && w[n - 2] != 'e') return w.substr(0, n - 1) + "ing";
  if (doubles_final(w)) return w + w[n - 1] + "ing";
  return w + "ing";
}

inline std::string regular_past(const std::string& w) {
  std::size_t n = w.size();
  if (w[n - 1] == 'e') return w + "d";
  if (w[n - 1] == 'y' && n >= 2 && !is_vowel(w[n - 2])) return w.substr(0, n - 1) + "ied";
  if (doubles_final(w)) return w + w[n - 1] + "ed";
  return w + "ed";
}

inline std::string plural(const std::string& w) {
  auto it = irregular_plurals().find(w);
  if (it != irregular_plurals().end()) return it->second;
  std::size_t n = w.size();
  char last = w[n - 1];
  if (last == 's' || last == 'x' || last == 'z' ||
      (n >= 2 && (w.compare(n - 2, 2, "ch") == 0 || w.compare(n - 2, 2, "sh") == 0)))
    return w + "es";
  if (last == 'y' && n >= 2 && !is_vowel(w[n - 2])) return w.substr(0, n - 1) + "ies";
  return w + "s";
}

// Inflections of a single word for the given POS, lemma included.
inline std::set<std::string> word_forms(const std::string& lemma, Pos pos) {
  std::set<std::string> out{lemma};
  switch (pos) {
    case Pos::v: {
      for (const auto& v : irregular_verbs()) {
        if (lemma == v.lemma) {
          out.insert(v.past);
          out.insert(v.past_participle);
          out.insert(v.gerund ? v.gerund : gerund(lemma));
          out.insert(v.third ? v.third : third_singular(lemma));
          if (lemma == "be") {  // suppletive present forms
            out.insert("am");
            out.insert("are");
            out.insert("was");
            out.insert("were");
          }
          return out;
        }
      }
      out.insert(third_singular(lemma));
      out.insert(gerund(lemma));
      out.insert(regular_past(lemma));  // regular past doubles as participle
      break;
    }
    case Pos::n:
      out.insert(plural(lemma));
      break;
    case Pos::a: {
      for (const auto& a : irregular_adjectives()) {
        if (lemma == a.lemma) {
          out.insert(a.comparative);
          out.insert(a.superlative);
          return out;
        }
      }
      std::size_t n = lemma.size();
      if (n >= 2 && lemma[n - 1] == 'e') {
        out.insert(lemma + "r");
        out.insert(lemma + "st");
      } else if (n >= 2 && lemma[n - 1] == 'y' && !is_vowel(lemma[n - 2])) {
        out.insert(lemma.substr(0, n - 1) + "ier");
        out.insert(lemma.substr(0, n - 1) + "iest");
      } else if (doubles_final(lemma)) {
        out.insert(lemma + lemma[n - 1] + "er");
        out.insert(lemma + lemma[n - 1] + "est");
      } else {
        out.insert(lemma + "er");
        out.insert(lemma + "est");
      }
      break;
    }
    default:
      break;  // uninflected POS: lemma only
  }
  return out;
}

}  // namespace detail

// Rule-generated surface forms for a lemma: the lowercased lemma itself plus
// POS-appropriate inflections (verbs: 3sg/gerund/past/past participle, nouns:
// plural, adjectives: comparative/superlative). Multi-word lemmas inflect the
// head (first) word and keep the remainder attached, and always include the
// full phrase. Uninflectable POS tags fall back to the lemma alone.
inline std::set<std::string> inflect(std::string_view lemma_in, Pos pos) {
  std::string lemma = normalize_surface(lemma_in);
  if (lemma.empty()) throw ContractError("inflect: empty lemma");

  std::size_t space = lemma.find(' ');
  if (space == std::string::npos) return detail::word_forms(lemma, pos);

  std::string head = lemma.substr(0, space);
  std::string rest = lemma.substr(space);  // keeps the leading space
  std::set<std::string> out{lemma};
  for (const std::string& form : detail::word_forms(head, pos)) out.insert(form + rest);
  return out;
}

}  // namespace frameid

#endif  // FRAMEID_INFLECT_HPP
