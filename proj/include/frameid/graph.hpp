#ifndef FRAMEID_GRAPH_HPP
#define FRAMEID_GRAPH_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "frameid/common.hpp"
#include "frameid/tensor.hpp"

namespace frameid {

// Define-by-run reverse-mode graph. A graph instance is built fresh for each
// forward pass, confined to one thread, and discarded afterwards. Backward
// closures accumulate (+=) into parent gradients because a node may fan out.
class Graph {
 public:
  using NodeId = std::size_t;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  // --- leaves -------------------------------------------------------------

  NodeId input(Tensor t) { return push(std::move(t), {}); }

  NodeId param(Parameter& p) {
    NodeId id = push(p.value, {});
    bound_.emplace_back(id, &p);
    return id;
  }

  // --- linear algebra -------------------------------------------------------

  // C = A.B, (m x k).(k x n)
  NodeId matmul(NodeId a, NodeId b) {
    const Tensor& A = value(a);
    const Tensor& B = value(b);
    if (A.cols() != B.rows()) throw ContractError("matmul: inner dimensions disagree");
    Tensor C(A.rows(), B.cols());
    mm_nn(A, B, C);
    return push(std::move(C), [this, a, b](NodeId self) {
      const Tensor& dC = nodes_[self].grad;
      const Tensor& A = nodes_[a].value;
      const Tensor& B = nodes_[b].value;
      // dA += dC.B^T ; dB += A^T.dC
      mm_nt_acc(dC, B, nodes_[a].grad);
      mm_tn_acc(A, dC, nodes_[b].grad);
    });
  }

  // C = A.B^T, (m x k).(n x k)^T. Affine layers are x.W^T with W stored (out x in).
  NodeId matmul_nt(NodeId a, NodeId b) {
    const Tensor& A = value(a);
    const Tensor& B = value(b);
    if (A.cols() != B.cols()) throw ContractError("matmul_nt: inner dimensions disagree");
    Tensor C(A.rows(), B.rows());
    mm_nt(A, B, C);
    return push(std::move(C), [this, a, b](NodeId self) {
      const Tensor& dC = nodes_[self].grad;
      // dA += dC.B ; dB += dC^T.A
      mm_nn_acc(dC, nodes_[b].value, nodes_[a].grad);
      mm_tn_acc(dC, nodes_[a].value, nodes_[b].grad);
    });
  }

  // x.W^T (+ broadcast bias row). W rows are output units, matching the
  // (k x d) weight shapes of the prediction heads.
  NodeId affine(NodeId x, Parameter& w) { return matmul_nt(x, param(w)); }
  NodeId affine(NodeId x, Parameter& w, Parameter& b) {
    return add_row(matmul_nt(x, param(w)), param(b));
  }

  NodeId add(NodeId a, NodeId b) {
    const Tensor& A = value(a);
    const Tensor& B = value(b);
    if (!A.same_shape(B)) throw ContractError("add: shape mismatch");
    Tensor C = A;
    for (std::size_t i = 0; i < C.size(); ++i) C[i] += B[i];
    return push(std::move(C), [this, a, b](NodeId self) {
      const Tensor& dC = nodes_[self].grad;
      acc(nodes_[a].grad, dC);
      acc(nodes_[b].grad, dC);
    });
  }

  // (r x c) + (1 x c) broadcast over rows.
  NodeId add_row(NodeId a, NodeId row) {
    const Tensor& A = value(a);
    const Tensor& R = value(row);
    if (R.rows() != 1 || R.cols() != A.cols()) throw ContractError("add_row: bias shape mismatch");
    Tensor C = A;
    for (std::size_t r = 0; r < C.rows(); ++r)
      for (std::size_t c = 0; c < C.cols(); ++c) C.at(r, c) += R[c];
    return push(std::move(C), [this, a, row](NodeId self) {
      const Tensor& dC = nodes_[self].grad;
      acc(nodes_[a].grad, dC);
      Tensor& dR = nodes_[row].grad;
      for (std::size_t r = 0; r < dC.rows(); ++r)
        for (std::size_t c = 0; c < dC.cols(); ++c) dR[c] += dC.at(r, c);
    });
  }

  NodeId scale(NodeId a, real_t s) {
    Tensor C = value(a);
    for (std::size_t i = 0; i < C.size(); ++i) C[i] *= s;
    return push(std::move(C), [this, a, s](NodeId self) {
      const Tensor& dC = nodes_[self].grad;
      Tensor& dA = nodes_[a].grad;
      for (std::size_t i = 0; i < dC.size(); ++i) dA[i] += s * dC[i];
    });
  }

  // --- nonlinearities -------------------------------------------------------

  NodeId tanh_act(NodeId a) {
    Tensor C = value(a);
    for (std::size_t i = 0; i < C.size(); ++i) C[i] = std::tanh(C[i]);
    return push(std::move(C), [this, a](NodeId self) {
      const Tensor& Y = nodes_[self].value;
      const Tensor& dY = nodes_[self].grad;
      Tensor& dA = nodes_[a].grad;
      for (std::size_t i = 0; i < dY.size(); ++i) dA[i] += dY[i] * (real_t(1) - Y[i] * Y[i]);
    });
  }

  NodeId gelu(NodeId a) {
    const Tensor& A = value(a);
    Tensor C = A;
    for (std::size_t i = 0; i < C.size(); ++i) C[i] = C[i] * phi_cdf(C[i]);
    return push(std::move(C), [this, a](NodeId self) {
      const Tensor& X = nodes_[a].value;
      const Tensor& dY = nodes_[self].grad;
      Tensor& dA = nodes_[a].grad;
      for (std::size_t i = 0; i < dY.size(); ++i) {
        real_t x = X[i];
        dA[i] += dY[i] * (phi_cdf(x) + x * phi_pdf(x));
      }
    });
  }

  // --- softmax & masking ----------------------------------------------------

  // Row-wise softmax over the active columns; inactive outputs are exactly 0.
  // Max-subtraction keeps exp() in range and leaves the math unchanged.
  NodeId masked_softmax(NodeId a, std::vector<std::uint8_t> active) {
    const Tensor& A = value(a);
    if (active.size() != A.cols()) throw ContractError("masked_softmax: mask length mismatch");
    std::size_t n_active = 0;
    for (auto m : active) n_active += m ? 1 : 0;
    if (n_active == 0) throw ContractError("masked_softmax: empty active set");
    Tensor C(A.rows(), A.cols());
    for (std::size_t r = 0; r < A.rows(); ++r) {
      real_t mx = -std::numeric_limits<real_t>::infinity();
      for (std::size_t c = 0; c < A.cols(); ++c)
        if (active[c] && A.at(r, c) > mx) mx = A.at(r, c);
      real_t sum = 0;
      for (std::size_t c = 0; c < A.cols(); ++c) {
        if (active[c]) {
          real_t e = std::exp(A.at(r, c) - mx);
          C.at(r, c) = e;
          sum += e;
        }
      }
      for (std::size_t c = 0; c < A.cols(); ++c)
        if (active[c]) C.at(r, c) /= sum;
    }
    return push(std::move(C), [this, a, active = std::move(active)](NodeId self) {
      const Tensor& Y = nodes_[self].value;
      const Tensor& dY = nodes_[self].grad;
      Tensor& dA = nodes_[a].grad;
      for (std::size_t r = 0; r < Y.rows(); ++r) {
        real_t dot = 0;
        for (std::size_t c = 0; c < Y.cols(); ++c)
          if (active[c]) dot += dY.at(r, c) * Y.at(r, c);
        for (std::size_t c = 0; c < Y.cols(); ++c)
          if (active[c]) dA.at(r, c) += Y.at(r, c) * (dY.at(r, c) - dot);
      }
    });
  }

  NodeId softmax(NodeId a) {
    return masked_softmax(a, std::vector<std::uint8_t>(value(a).cols(), 1));
  }

  // Broadcast column mask: zeroes masked-out columns of every row. Used by
  // the literal filter head, where the mask multiplies raw logits.
  NodeId mask_columns(NodeId a, std::vector<std::uint8_t> keep) {
    const Tensor& A = value(a);
    if (keep.size() != A.cols()) throw ContractError("mask_columns: mask length mismatch");
    Tensor C = A;
    for (std::size_t r = 0; r < C.rows(); ++r)
      for (std::size_t c = 0; c < C.cols(); ++c)
        if (!keep[c]) C.at(r, c) = 0;
    return push(std::move(C), [this, a, keep = std::move(keep)](NodeId self) {
      const Tensor& dC = nodes_[self].grad;
      Tensor& dA = nodes_[a].grad;
      for (std::size_t r = 0; r < dC.rows(); ++r)
        for (std::size_t c = 0; c < dC.cols(); ++c)
          if (keep[c]) dA.at(r, c) += dC.at(r, c);
    });
  }

  // --- shape plumbing -------------------------------------------------------

  NodeId slice_cols(NodeId a, std::size_t begin, std::size_t count) {
    const Tensor& A = value(a);
    if (begin + count > A.cols()) throw ContractError("slice_cols: out of range");
    Tensor C(A.rows(), count);
    for (std::size_t r = 0; r < A.rows(); ++r)
      for (std::size_t c = 0; c < count; ++c) C.at(r, c) = A.at(r, begin + c);
    return push(std::move(C), [this, a, begin, count](NodeId self) {
      const Tensor& dC = nodes_[self].grad;
      Tensor& dA = nodes_[a].grad;
      for (std::size_t r = 0; r < dC.rows(); ++r)
        for (std::size_t c = 0; c < count; ++c) dA.at(r, begin + c) += dC.at(r, c);
    });
  }

  NodeId concat_cols(NodeId a, NodeId b) {
    const Tensor& A = value(a);
    const Tensor& B = value(b);
    if (A.rows() != B.rows()) throw ContractError("concat_cols: row mismatch");
    Tensor C(A.rows(), A.cols() + B.cols());
    for (std::size_t r = 0; r < A.rows(); ++r) {
      for (std::size_t c = 0; c < A.cols(); ++c) C.at(r, c) = A.at(r, c);
      for (std::size_t c = 0; c < B.cols(); ++c) C.at(r, A.cols() + c) = B.at(r, c);
    }
    std::size_t ac = A.cols();
    return push(std::move(C), [this, a, b, ac](NodeId self) {
      const Tensor& dC = nodes_[self].grad;
      Tensor& dA = nodes_[a].grad;
      Tensor& dB = nodes_[b].grad;
      for (std::size_t r = 0; r < dC.rows(); ++r) {
        for (std::size_t c = 0; c < dA.cols(); ++c) dA.at(r, c) += dC.at(r, c);
        for (std::size_t c = 0; c < dB.cols(); ++c) dB.at(r, c) += dC.at(r, ac + c);
      }
    });
  }

  // Gather rows of an embedding table; backward scatter-adds into the table.
  NodeId gather_rows(NodeId table, std::vector<int> ids) {
    const Tensor& T = value(table);
    Tensor C(ids.size(), T.cols());
    for (std::size_t r = 0; r < ids.size(); ++r) {
      if (ids[r] < 0 || static_cast<std::size_t>(ids[r]) >= T.rows())
        throw ContractError("gather_rows: id out of range");
      for (std::size_t c = 0; c < T.cols(); ++c) C.at(r, c) = T.at(ids[r], c);
    }
    return push(std::move(C), [this, table, ids = std::move(ids)](NodeId self) {
      const Tensor& dC = nodes_[self].grad;
      Tensor& dT = nodes_[table].grad;
      for (std::size_t r = 0; r < ids.size(); ++r)
        for (std::size_t c = 0; c < dC.cols(); ++c) dT.at(ids[r], c) += dC.at(r, c);
    });
  }

  // --- normalization / regularization ----------------------------------------

  NodeId layer_norm(NodeId a, NodeId gamma, NodeId beta, real_t eps = real_t(1e-6)) {
    const Tensor& A = value(a);
    const Tensor& G = value(gamma);
    const Tensor& B = value(beta);
    if (G.cols() != A.cols() || B.cols() != A.cols())
      throw ContractError("layer_norm: gamma/beta shape mismatch");
    Tensor C(A.rows(), A.cols());
    std::vector<real_t> inv_std(A.rows());
    Tensor xhat(A.rows(), A.cols());
    const std::size_t d = A.cols();
    for (std::size_t r = 0; r < A.rows(); ++r) {
      real_t mean = 0;
      for (std::size_t c = 0; c < d; ++c) mean += A.at(r, c);
      mean /= real_t(d);
      real_t var = 0;
      for (std::size_t c = 0; c < d; ++c) {
        real_t dv = A.at(r, c) - mean;
        var += dv * dv;
      }
      var /= real_t(d);
      real_t istd = real_t(1) / std::sqrt(var + eps);
      inv_std[r] = istd;
      for (std::size_t c = 0; c < d; ++c) {
        xhat.at(r, c) = (A.at(r, c) - mean) * istd;
        C.at(r, c) = G[c] * xhat.at(r, c) + B[c];
      }
    }
    return push(std::move(C), [this, a, gamma, beta, inv_std = std::move(inv_std),
                               xhat = std::move(xhat)](NodeId self) {
      const Tensor& dY = nodes_[self].grad;
      const Tensor& G = nodes_[gamma].value;
      Tensor& dA = nodes_[a].grad;
      Tensor& dG = nodes_[gamma].grad;
      Tensor& dB = nodes_[beta].grad;
      const std::size_t d = dY.cols();
      for (std::size_t r = 0; r < dY.rows(); ++r) {
        real_t mean_dxhat = 0, mean_dxhat_xhat = 0;
        for (std::size_t c = 0; c < d; ++c) {
          real_t dyv = dY.at(r, c);
          dG[c] += dyv * xhat.at(r, c);
          dB[c] += dyv;
          real_t dxhat = dyv * G[c];
          mean_dxhat += dxhat;
          mean_dxhat_xhat += dxhat * xhat.at(r, c);
        }
        mean_dxhat /= real_t(d);
        mean_dxhat_xhat /= real_t(d);
        for (std::size_t c = 0; c < d; ++c) {
          real_t dxhat = dY.at(r, c) * G[c];
          dA.at(r, c) += inv_std[r] * (dxhat - mean_dxhat - xhat.at(r, c) * mean_dxhat_xhat);
        }
      }
    });
  }

  // Inverted dropout; mask sampled once at build time from the given stream.
  NodeId dropout(NodeId a, real_t p, Rng& rng) {
    if (p <= real_t(0)) return a;
    const Tensor& A = value(a);
    std::vector<real_t> keep(A.size());
    real_t scale = real_t(1) / (real_t(1) - p);
    Tensor C = A;
    for (std::size_t i = 0; i < A.size(); ++i) {
      keep[i] = rng.uniform() >= p ? scale : real_t(0);
      C[i] *= keep[i];
    }
    return push(std::move(C), [this, a, keep = std::move(keep)](NodeId self) {
      const Tensor& dC = nodes_[self].grad;
      Tensor& dA = nodes_[a].grad;
      for (std::size_t i = 0; i < dC.size(); ++i) dA[i] += dC[i] * keep[i];
    });
  }

  // --- loss plumbing ----------------------------------------------------------

  // Select one element as a 1x1 tensor.
  NodeId pick(NodeId a, std::size_t index) {
    const Tensor& A = value(a);
    if (index >= A.size()) throw ContractError("pick: index out of range");
    Tensor C(1, 1);
    C[0] = A[index];
    return push(std::move(C), [this, a, index](NodeId self) {
      nodes_[a].grad[index] += nodes_[self].grad[0];
    });
  }

  // -log(max(x, floor)); flat (zero gradient) below the floor.
  NodeId neg_log(NodeId a, real_t floor) {
    const Tensor& A = value(a);
    Tensor C = A;
    for (std::size_t i = 0; i < C.size(); ++i) C[i] = -std::log(std::max(C[i], floor));
    return push(std::move(C), [this, a, floor](NodeId self) {
      const Tensor& X = nodes_[a].value;
      const Tensor& dY = nodes_[self].grad;
      Tensor& dA = nodes_[a].grad;
      for (std::size_t i = 0; i < dY.size(); ++i)
        if (X[i] > floor) dA[i] += dY[i] * (-real_t(1) / X[i]);
    });
  }

  // --- access & backward -------------------------------------------------------

  const Tensor& value(NodeId id) const { return nodes_[id].value; }
  const Tensor& grad(NodeId id) const { return nodes_[id].grad; }

  // Seeds d(root)/d(root) = 1 and walks the tape in reverse. Bound parameter
  // gradients are accumulated into Parameter::grad at the end.
  void backward(NodeId root) {
    if (nodes_[root].value.size() != 1) throw ContractError("backward: root must be scalar");
    nodes_[root].grad[0] = real_t(1);
    for (std::size_t i = root + 1; i-- > 0;) {
      if (nodes_[i].back) nodes_[i].back(i);
    }
    for (auto& [id, p] : bound_) {
      acc(p->grad, nodes_[id].grad);
    }
  }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::function<void(NodeId)> back;
  };

  NodeId push(Tensor value, std::function<void(NodeId)> back) {
    Node n;
    n.grad = Tensor(value.rows(), value.cols());
    n.value = std::move(value);
    n.back = std::move(back);
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
  }

  static void acc(Tensor& dst, const Tensor& src) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }

  // Loop orders chosen for row-major locality.
  static void mm_nn(const Tensor& A, const Tensor& B, Tensor& C) {
    const std::size_t m = A.rows(), k = A.cols(), n = B.cols();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t p = 0; p < k; ++p) {
        real_t av = A.at(i, p);
        for (std::size_t j = 0; j < n; ++j) C.at(i, j) += av * B.at(p, j);
      }
  }
  static void mm_nn_acc(const Tensor& A, const Tensor& B, Tensor& C) { mm_nn(A, B, C); }

  static void mm_nt(const Tensor& A, const Tensor& B, Tensor& C) {
    const std::size_t m = A.rows(), k = A.cols(), n = B.rows();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        real_t s = 0;
        for (std::size_t p = 0; p < k; ++p) s += A.at(i, p) * B.at(j, p);
        C.at(i, j) += s;
      }
  }
  static void mm_nt_acc(const Tensor& A, const Tensor& B, Tensor& C) { mm_nt(A, B, C); }

  // C += A^T.B, A (k x m), B (k x n), C (m x n)
  static void mm_tn_acc(const Tensor& A, const Tensor& B, Tensor& C) {
    const std::size_t k = A.rows(), m = A.cols(), n = B.cols();
    for (std::size_t p = 0; p < k; ++p)
      for (std::size_t i = 0; i < m; ++i) {
        real_t av = A.at(p, i);
        for (std::size_t j = 0; j < n; ++j) C.at(i, j) += av * B.at(p, j);
      }
  }

  static real_t phi_cdf(real_t x) {
    return real_t(0.5) * (real_t(1) + std::erf(x / std::sqrt(real_t(2))));
  }
  static real_t phi_pdf(real_t x) {
    return std::exp(-real_t(0.5) * x * x) / std::sqrt(real_t(2) * real_t(M_PI));
  }

  std::vector<Node> nodes_;
  std::vector<std::pair<NodeId, Parameter*>> bound_;
};

// ---------------------------------------------------------------------------
// Finite-difference checking harness. `loss_fn(with_grad)` must rebuild the
// computation from the current parameter values, return the scalar loss, and
// when with_grad is set also run backward so analytic gradients land in the
// parameters. Central differences are compared coordinate by coordinate.
// ---------------------------------------------------------------------------

struct GradCheckResult {
  real_t max_rel_err = 0;
  std::string worst_param;
  std::size_t worst_index = 0;
};

inline GradCheckResult grad_check(const std::function<real_t(bool)>& loss_fn,
                                  const std::vector<Parameter*>& params, real_t epsilon) {
  if (epsilon <= 0) throw ContractError("grad_check: epsilon must be positive");
  for (Parameter* p : params) p->zero_grad();
  real_t base = loss_fn(true);
  if (!std::isfinite(base)) throw ContractError("grad_check: non-finite base loss");

  std::vector<Tensor> analytic;
  analytic.reserve(params.size());
  for (Parameter* p : params) analytic.push_back(p->grad);

  GradCheckResult result;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Parameter* p = params[pi];
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      real_t saved = p->value[i];
      p->value[i] = saved + epsilon;
      real_t up = loss_fn(false);
      p->value[i] = saved - epsilon;
      real_t down = loss_fn(false);
      p->value[i] = saved;
      if (!std::isfinite(up) || !std::isfinite(down))
        throw ContractError("grad_check: non-finite loss while perturbing " + p->name);
      real_t fd = (up - down) / (2 * epsilon);
      real_t an = analytic[pi][i];
      real_t denom = std::max(std::abs(an), std::abs(fd));
      real_t err = denom < real_t(1e-8) ? std::abs(an - fd) : std::abs(an - fd) / denom;
      if (err > result.max_rel_err) {
        result.max_rel_err = err;
        result.worst_param = p->name;
        result.worst_index = i;
      }
    }
  }
  for (Parameter* p : params) p->zero_grad();
  return result;
}

}  // namespace frameid

#endif  // FRAMEID_GRAPH_HPP
