#ifndef FRAMEID_TENSOR_HPP
#define FRAMEID_TENSOR_HPP

#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "frameid/common.hpp"

namespace frameid {

// Dense row-major tensor. Everything in this project is 1-D or 2-D; vectors
// are carried as 1xN or Nx1 matrices so the matmul family covers them.
class Tensor {
 public:
  Tensor() = default;

  Tensor(std::size_t rows, std::size_t cols)
      : shape_{rows, cols}, data_(rows * cols, real_t(0)) {}

  Tensor(std::vector<std::size_t> shape, std::vector<real_t> values)
      : shape_(std::move(shape)), data_(std::move(values)) {
    if (size() != data_.size()) throw ContractError("tensor: value count does not match shape");
  }

  static Tensor row(std::vector<real_t> values) {
    std::size_t n = values.size();
    return Tensor({1, n}, std::move(values));
  }

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t size() const {
    std::size_t s = 1;
    for (std::size_t d : shape_) s *= d;
    return shape_.empty() ? 0 : s;
  }
  std::size_t rows() const { return shape_.empty() ? 0 : shape_[0]; }
  std::size_t cols() const { return shape_.size() < 2 ? (shape_.empty() ? 0 : 1) : shape_[1]; }

  real_t* data() { return data_.data(); }
  const real_t* data() const { return data_.data(); }
  std::vector<real_t>& values() { return data_; }
  const std::vector<real_t>& values() const { return data_; }

  real_t& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  real_t at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }
  real_t& operator[](std::size_t i) { return data_[i]; }
  real_t operator[](std::size_t i) const { return data_[i]; }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  void fill(real_t v) { std::fill(data_.begin(), data_.end(), v); }
  void zero() { fill(real_t(0)); }

  bool all_finite() const {
    for (real_t v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  // Rejects NaN/Inf; used by the checked construction paths.
  void require_finite(const char* what) const {
    if (!all_finite()) throw ContractError(std::string("non-finite values in ") + what);
  }

 private:
  std::vector<std::size_t> shape_;
  std::vector<real_t> data_;
};

// Trainable tensor with its accumulated gradient. The gradient is zeroed
// between optimizer steps by the training loop.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string n, Tensor v) : name(std::move(n)), value(std::move(v)) {
    grad = Tensor(value.rows(), value.cols());
  }

  void zero_grad() { grad.zero(); }
};

// Debug dump format: one shape header line, then whitespace-separated values
// at full decimal precision. parse_tensor round-trips dump_tensor exactly.
inline void dump_tensor(std::ostream& os, const Tensor& t) {
  const auto& sh = t.shape();
  for (std::size_t i = 0; i < sh.size(); ++i) os << (i ? " " : "") << sh[i];
  os << "\n";
  os.precision(std::numeric_limits<real_t>::max_digits10);
  for (std::size_t i = 0; i < t.size(); ++i) os << (i ? " " : "") << t[i];
  os << "\n";
}

inline Tensor parse_tensor(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw ParseError("tensor dump: missing shape header");
  std::istringstream hs(header);
  std::vector<std::size_t> shape;
  std::size_t d;
  while (hs >> d) shape.push_back(d);
  if (shape.empty()) throw ParseError("tensor dump: empty shape header");
  std::size_t count = 1;
  for (std::size_t x : shape) count *= x;
  std::vector<real_t> vals(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (!(is >> vals[i])) throw ParseError("tensor dump: expected " + std::to_string(count) + " values");
  }
  return Tensor(std::move(shape), std::move(vals));
}

}  // namespace frameid

#endif  // FRAMEID_TENSOR_HPP
