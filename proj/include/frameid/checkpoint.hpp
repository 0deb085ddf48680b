#ifndef FRAMEID_CHECKPOINT_HPP
#define FRAMEID_CHECKPOINT_HPP

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "frameid/common.hpp"
#include "frameid/model.hpp"

namespace frameid {

// Binary checkpoint, versioned header then named tensors in declaration
// order, FNV-1a checksum at the end. Values are raw IEEE-754 doubles
// (little-endian host assumed), so a save/load round trip is bit-exact.

inline constexpr char kCheckpointMagic[8] = {'F', 'R', 'I', 'D', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointMeta {
  std::uint32_t version = kCheckpointVersion;
  EncoderConfig config;
  int k = 0;
  int w = kDefaultWindow;
  std::uint64_t seed = 0;
  std::uint64_t vocab_hash = 0;
  std::uint32_t tensor_count = 0;
  std::uint64_t parameter_count = 0;
};

namespace detail {

template <typename T>
void put(std::string& buf, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  buf.append(bytes, sizeof(T));
}

template <typename T>
T take(const std::string& buf, std::size_t& off) {
  if (off + sizeof(T) > buf.size()) throw CheckpointError("checkpoint truncated");
  T value;
  std::memcpy(&value, buf.data() + off, sizeof(T));
  off += sizeof(T);
  return value;
}

}  // namespace detail

inline void save_checkpoint(const std::string& path, ModelParams& params,
                            const EncoderConfig& cfg, int w, std::uint64_t seed,
                            std::uint64_t vocab_hash) {
  std::string buf;
  buf.append(kCheckpointMagic, sizeof(kCheckpointMagic));
  detail::put<std::uint32_t>(buf, kCheckpointVersion);
  detail::put<std::uint32_t>(buf, static_cast<std::uint32_t>(cfg.layers));
  detail::put<std::uint32_t>(buf, static_cast<std::uint32_t>(cfg.d));
  detail::put<std::uint32_t>(buf, static_cast<std::uint32_t>(cfg.heads));
  detail::put<std::uint32_t>(buf, static_cast<std::uint32_t>(cfg.ffn_dim));
  detail::put<std::uint32_t>(buf, static_cast<std::uint32_t>(cfg.vocab_size));
  detail::put<std::uint32_t>(buf, static_cast<std::uint32_t>(cfg.n));
  detail::put<double>(buf, static_cast<double>(cfg.dropout));
  detail::put<std::uint32_t>(buf, static_cast<std::uint32_t>(params.k));
  detail::put<std::uint32_t>(buf, static_cast<std::uint32_t>(w));
  detail::put<std::uint64_t>(buf, seed);
  detail::put<std::uint64_t>(buf, vocab_hash);

  auto tensors = params.all();
  detail::put<std::uint32_t>(buf, static_cast<std::uint32_t>(tensors.size()));
  for (Parameter* p : tensors) {
    detail::put<std::uint16_t>(buf, static_cast<std::uint16_t>(p->name.size()));
    buf.append(p->name);
    detail::put<std::uint64_t>(buf, p->value.rows());
    detail::put<std::uint64_t>(buf, p->value.cols());
    for (std::size_t i = 0; i < p->value.size(); ++i)
      detail::put<double>(buf, static_cast<double>(p->value[i]));
  }

  std::uint64_t checksum = fnv1a64_bytes(buf.data() + sizeof(kCheckpointMagic),
                                   buf.size() - sizeof(kCheckpointMagic));
  detail::put<std::uint64_t>(buf, checksum);

  std::ofstream os(path, std::ios::binary);
  if (!os) throw CheckpointError("cannot write checkpoint: " + path);
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!os) throw CheckpointError("short write on checkpoint: " + path);
}

struct LoadedModel {
  CheckpointMeta meta;
  ModelParams params;
};

namespace detail {

inline std::string read_file_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError("checkpoint not found: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return std::move(ss).str();
}

inline CheckpointMeta parse_header(const std::string& buf, std::size_t& off) {
  if (buf.size() < sizeof(kCheckpointMagic) + sizeof(std::uint64_t) ||
      std::memcmp(buf.data(), kCheckpointMagic, sizeof(kCheckpointMagic)) != 0)
    throw CheckpointError("not a model checkpoint (bad magic)");

  std::uint64_t stored = 0;
  std::memcpy(&stored, buf.data() + buf.size() - sizeof(std::uint64_t), sizeof(std::uint64_t));
  std::uint64_t actual = fnv1a64_bytes(buf.data() + sizeof(kCheckpointMagic),
                                 buf.size() - sizeof(kCheckpointMagic) - sizeof(std::uint64_t));
  if (stored != actual) throw CheckpointError("checkpoint corrupt (checksum mismatch)");

  off = sizeof(kCheckpointMagic);
  CheckpointMeta meta;
  meta.version = take<std::uint32_t>(buf, off);
  if (meta.version != kCheckpointVersion)
    throw CheckpointError("unsupported checkpoint version " + std::to_string(meta.version));
  meta.config.layers = static_cast<int>(take<std::uint32_t>(buf, off));
  meta.config.d = static_cast<int>(take<std::uint32_t>(buf, off));
  meta.config.heads = static_cast<int>(take<std::uint32_t>(buf, off));
  meta.config.ffn_dim = static_cast<int>(take<std::uint32_t>(buf, off));
  meta.config.vocab_size = static_cast<int>(take<std::uint32_t>(buf, off));
  meta.config.n = static_cast<int>(take<std::uint32_t>(buf, off));
  meta.config.dropout = static_cast<real_t>(take<double>(buf, off));
  meta.k = static_cast<int>(take<std::uint32_t>(buf, off));
  meta.w = static_cast<int>(take<std::uint32_t>(buf, off));
  meta.seed = take<std::uint64_t>(buf, off);
  meta.vocab_hash = take<std::uint64_t>(buf, off);
  meta.tensor_count = take<std::uint32_t>(buf, off);
  return meta;
}

}  // namespace detail

inline LoadedModel load_checkpoint(const std::string& path) {
  std::string buf = detail::read_file_binary(path);
  std::size_t off = 0;
  CheckpointMeta meta = detail::parse_header(buf, off);

  LoadedModel out;
  out.params = init_model(meta.config, meta.k, meta.seed);
  auto tensors = out.params.all();
  if (tensors.size() != meta.tensor_count)
    throw CheckpointError("checkpoint tensor count mismatch");

  for (Parameter* p : tensors) {
    auto name_len = detail::take<std::uint16_t>(buf, off);
    if (off + name_len > buf.size()) throw CheckpointError("checkpoint truncated");
    std::string name = buf.substr(off, name_len);
    off += name_len;
    if (name != p->name)
      throw CheckpointError("checkpoint tensor order mismatch: expected " + p->name + ", found " + name);
    auto rows = detail::take<std::uint64_t>(buf, off);
    auto cols = detail::take<std::uint64_t>(buf, off);
    if (rows != p->value.rows() || cols != p->value.cols())
      throw CheckpointError("checkpoint tensor shape mismatch for " + p->name);
    for (std::size_t i = 0; i < p->value.size(); ++i)
      p->value[i] = static_cast<real_t>(detail::take<double>(buf, off));
  }
  meta.parameter_count = out.params.parameter_count();
  out.meta = meta;
  return out;
}

// Full-validation read for `inspect`: checksum, order and shapes all checked.
inline CheckpointMeta inspect_checkpoint(const std::string& path) {
  LoadedModel m = load_checkpoint(path);
  return m.meta;
}

}  // namespace frameid

#endif  // FRAMEID_CHECKPOINT_HPP
