#ifndef FRAMEID_COMMON_HPP
#define FRAMEID_COMMON_HPP

#include <cctype>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Scalar precision is a build-time choice; tests rely on the double default.
#ifndef FRAMEID_REAL
#define FRAMEID_REAL double
#endif

namespace frameid {

using real_t = FRAMEID_REAL;

// ---------------------------------------------------------------------------
// Error taxonomy. The CLI maps these onto exit codes: parse/validation/usage
// failures -> 2, data failures (alignment, truncation) -> 3, checkpoint -> 4.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input file (message carries the line number where possible).
struct ParseError : Error {
  using Error::Error;
};

// Violated invariant in user-supplied data or configuration.
struct ValidationError : Error {
  using Error::Error;
};

// Caller broke a documented precondition (shape mismatch, bad index...).
struct ContractError : Error {
  using Error::Error;
};

// A target span that overlaps no token: the offsets do not line up.
struct AlignmentError : Error {
  using Error::Error;
};

// The target fell entirely into the truncated tail of a long sentence.
struct TruncationError : Error {
  using Error::Error;
};

// Unreadable, corrupt or mismatched model checkpoint.
struct CheckpointError : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Deterministic RNG. std::shuffle and std::uniform_real_distribution are
// implementation-defined, so everything that must reproduce bit-for-bit
// (init, shuffling, dropout) goes through this wrapper instead.
// ---------------------------------------------------------------------------

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  std::uint64_t next_u64() {
    // xorshift64*: small, portable, plenty for toy-scale experiments.
    std::uint64_t x = state_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state_ = x;
    return x * 0x2545f4914f6cdd1dULL;
  }

  // Uniform in [0, 1).
  real_t uniform() { return static_cast<real_t>((next_u64() >> 11) * 0x1.0p-53); }

  // Uniform in [lo, hi).
  real_t uniform(real_t lo, real_t hi) { return lo + (hi - lo) * uniform(); }

  // Uniform index in [0, n).
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[index(i)]);
    }
  }

 private:
  std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Small string helpers shared by the file-format parsers.
// ---------------------------------------------------------------------------

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

// Lowercase and collapse every internal whitespace run to one space.
inline std::string normalize_surface(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_space = true;  // leading whitespace dropped
  for (char ch : s) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) out.push_back(' ');
    in_space = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  return out;
}

inline std::uint64_t fnv1a64_bytes(const void* data, std::size_t len,
                                   std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  return fnv1a64_bytes(s.data(), s.size(), h);
}

}  // namespace frameid

#endif  // FRAMEID_COMMON_HPP
