#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <memory>
#include <unordered_set>
#include <vector>

#include "siaftp/errors.hpp"

namespace siaftp::nn {

template <typename S>
using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename S>
using Array = Eigen::Array<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// One node of the dynamically built computation graph. Values are eager;
// backward closures accumulate into the parents' grad buffers.
template <typename S>
struct Node {
  int rows = 0, cols = 0;
  std::vector<S> value;
  std::vector<S> grad;  // empty until touched by backward
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node<S>>> parents;
  std::function<void(Node<S>&)> backward_fn;

  Node(int r, int c) : rows(r), cols(c), value(static_cast<std::size_t>(r) * c) {}

  Eigen::Map<Matrix<S>> mat() {
    return Eigen::Map<Matrix<S>>(value.data(), rows, cols);
  }
  Eigen::Map<const Matrix<S>> mat() const {
    return Eigen::Map<const Matrix<S>>(value.data(), rows, cols);
  }
  Eigen::Map<Array<S>> arr() {
    return Eigen::Map<Array<S>>(value.data(), rows, cols);
  }
  Eigen::Map<const Array<S>> arr() const {
    return Eigen::Map<const Array<S>>(value.data(), rows, cols);
  }
  void ensure_grad() {
    if (grad.empty()) grad.assign(value.size(), S(0));
  }
  // mutable accumulation views
  Eigen::Map<Matrix<S>> gmat() {
    ensure_grad();
    return Eigen::Map<Matrix<S>>(grad.data(), rows, cols);
  }
  Eigen::Map<Array<S>> garr() {
    ensure_grad();
    return Eigen::Map<Array<S>>(grad.data(), rows, cols);
  }
  // read-only views of an already-populated grad
  Eigen::Map<const Matrix<S>> gview() const {
    return Eigen::Map<const Matrix<S>>(grad.data(), rows, cols);
  }
  Eigen::Map<const Array<S>> gaview() const {
    return Eigen::Map<const Array<S>>(grad.data(), rows, cols);
  }
  bool has_grad() const { return !grad.empty(); }
};

template <typename S>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<Node<S>> n) : n_(std::move(n)) {}

  static Tensor zeros(int rows, int cols, bool requires_grad = false) {
    auto n = std::make_shared<Node<S>>(rows, cols);
    n->requires_grad = requires_grad;
    return Tensor(n);
  }

  static Tensor from(const Matrix<S>& m, bool requires_grad = false) {
    Tensor t = zeros(static_cast<int>(m.rows()), static_cast<int>(m.cols()),
                     requires_grad);
    t.n_->mat() = m;
    return t;
  }

  static Tensor row(const std::vector<S>& v, bool requires_grad = false) {
    Tensor t = zeros(1, static_cast<int>(v.size()), requires_grad);
    t.n_->value = v;
    return t;
  }

  bool valid() const { return n_ != nullptr; }
  int rows() const { return n_->rows; }
  int cols() const { return n_->cols; }
  std::size_t size() const { return n_->value.size(); }
  bool requires_grad() const { return n_->requires_grad; }

  Eigen::Map<const Matrix<S>> mat() const {
    return static_cast<const Node<S>&>(*n_).mat();
  }
  Eigen::Map<Matrix<S>> mutable_mat() { return n_->mat(); }
  std::vector<S>& raw() { return n_->value; }
  const std::vector<S>& raw() const { return n_->value; }

  S item() const {
    if (size() != 1) throw Error("item() on a non-scalar tensor");
    return n_->value[0];
  }

  bool has_grad() const { return n_->has_grad(); }
  Eigen::Map<Matrix<S>> grad_mat() const { return n_->gmat(); }
  void zero_grad() { n_->grad.clear(); }

  std::shared_ptr<Node<S>> node() const { return n_; }

 private:
  std::shared_ptr<Node<S>> n_;
};

// Reverse-mode sweep from a scalar root.
template <typename S>
void backward(const Tensor<S>& root) {
  if (root.size() != 1) throw Error("backward() root must be scalar");
  Node<S>* r = root.node().get();
  if (!r->requires_grad) return;
  std::vector<Node<S>*> order;
  std::unordered_set<Node<S>*> seen;
  std::vector<std::pair<Node<S>*, std::size_t>> stack;
  stack.emplace_back(r, 0);
  seen.insert(r);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node<S>* p = node->parents[next++].get();
      if (p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  r->ensure_grad();
  r->grad[0] = S(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node<S>* n = *it;
    if (n->backward_fn && n->has_grad()) n->backward_fn(*n);
  }
}

namespace detail {

template <typename S>
std::shared_ptr<Node<S>> make_out(int rows, int cols,
                                  std::initializer_list<Tensor<S>> parents) {
  auto n = std::make_shared<Node<S>>(rows, cols);
  for (const auto& p : parents) {
    if (p.node()->requires_grad) n->requires_grad = true;
    n->parents.push_back(p.node());
  }
  return n;
}

template <typename S>
void check_same_shape(const Tensor<S>& a, const Tensor<S>& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(std::string(op) + ": shape mismatch");
}

}  // namespace detail

// ---------- arithmetic ----------

template <typename S>
Tensor<S> add(const Tensor<S>& a, const Tensor<S>& b) {
  detail::check_same_shape(a, b, "add");
  auto out = detail::make_out<S>(a.rows(), a.cols(), {a, b});
  out->mat() = a.mat() + b.mat();
  if (out->requires_grad) {
    auto an = a.node(), bn = b.node();
    out->backward_fn = [an, bn](Node<S>& o) {
      if (an->requires_grad) an->gmat() += o.gview();
      if (bn->requires_grad) bn->gmat() += o.gview();
    };
  }
  return Tensor<S>(out);
}

template <typename S>
Tensor<S> sub(const Tensor<S>& a, const Tensor<S>& b) {
  detail::check_same_shape(a, b, "sub");
  auto out = detail::make_out<S>(a.rows(), a.cols(), {a, b});
  out->mat() = a.mat() - b.mat();
  if (out->requires_grad) {
    auto an = a.node(), bn = b.node();
    out->backward_fn = [an, bn](Node<S>& o) {
      if (an->requires_grad) an->gmat() += o.gview();
      if (bn->requires_grad) bn->gmat() -= o.gview();
    };
  }
  return Tensor<S>(out);
}

template <typename S>
Tensor<S> mul(const Tensor<S>& a, const Tensor<S>& b) {
  detail::check_same_shape(a, b, "mul");
  auto out = detail::make_out<S>(a.rows(), a.cols(), {a, b});
  out->arr() = a.node()->arr() * b.node()->arr();
  if (out->requires_grad) {
    auto an = a.node(), bn = b.node();
    out->backward_fn = [an, bn](Node<S>& o) {
      if (an->requires_grad) an->garr() += o.gaview() * bn->arr();
      if (bn->requires_grad) bn->garr() += o.gaview() * an->arr();
    };
  }
  return Tensor<S>(out);
}

template <typename S>
Tensor<S> scale(const Tensor<S>& a, S c) {
  auto out = detail::make_out<S>(a.rows(), a.cols(), {a});
  out->mat() = a.mat() * c;
  if (out->requires_grad) {
    auto an = a.node();
    out->backward_fn = [an, c](Node<S>& o) {
      if (an->requires_grad) an->gmat() += o.gview() * c;
    };
  }
  return Tensor<S>(out);
}

// b is a [1, C] row broadcast over the rows of a.
template <typename S>
Tensor<S> add_rowvec(const Tensor<S>& a, const Tensor<S>& b) {
  if (b.rows() != 1 || b.cols() != a.cols())
    throw Error("add_rowvec: b must be [1, cols(a)]");
  auto out = detail::make_out<S>(a.rows(), a.cols(), {a, b});
  out->mat() = a.mat().rowwise() + b.mat().row(0);
  if (out->requires_grad) {
    auto an = a.node(), bn = b.node();
    out->backward_fn = [an, bn](Node<S>& o) {
      if (an->requires_grad) an->gmat() += o.gview();
      if (bn->requires_grad)
        bn->gmat().row(0) += o.gview().colwise().sum();
    };
  }
  return Tensor<S>(out);
}

template <typename S>
Tensor<S> matmul(const Tensor<S>& a, const Tensor<S>& b) {
  if (a.cols() != b.rows()) throw Error("matmul: inner dimension mismatch");
  auto out = detail::make_out<S>(a.rows(), b.cols(), {a, b});
  out->mat().noalias() = a.mat() * b.mat();
  if (out->requires_grad) {
    auto an = a.node(), bn = b.node();
    out->backward_fn = [an, bn](Node<S>& o) {
      if (an->requires_grad) an->gmat().noalias() += o.gview() * bn->mat().transpose();
      if (bn->requires_grad) bn->gmat().noalias() += an->mat().transpose() * o.gview();
    };
  }
  return Tensor<S>(out);
}

template <typename S>
Tensor<S> transpose(const Tensor<S>& a) {
  auto out = detail::make_out<S>(a.cols(), a.rows(), {a});
  out->mat() = a.mat().transpose();
  if (out->requires_grad) {
    auto an = a.node();
    out->backward_fn = [an](Node<S>& o) {
      if (an->requires_grad) an->gmat() += o.gview().transpose();
    };
  }
  return Tensor<S>(out);
}

// ---------- shape ----------

template <typename S>
Tensor<S> concat_cols(const Tensor<S>& a, const Tensor<S>& b) {
  if (a.rows() != b.rows()) throw Error("concat_cols: row mismatch");
  auto out = detail::make_out<S>(a.rows(), a.cols() + b.cols(), {a, b});
  out->mat().leftCols(a.cols()) = a.mat();
  out->mat().rightCols(b.cols()) = b.mat();
  if (out->requires_grad) {
    auto an = a.node(), bn = b.node();
    int ac = a.cols(), bc = b.cols();
    out->backward_fn = [an, bn, ac, bc](Node<S>& o) {
      if (an->requires_grad) an->gmat() += o.gview().leftCols(ac);
      if (bn->requires_grad) bn->gmat() += o.gview().rightCols(bc);
    };
  }
  return Tensor<S>(out);
}

template <typename S>
Tensor<S> slice_cols(const Tensor<S>& a, int c0, int len) {
  if (c0 < 0 || c0 + len > a.cols()) throw Error("slice_cols: out of range");
  auto out = detail::make_out<S>(a.rows(), len, {a});
  out->mat() = a.mat().middleCols(c0, len);
  if (out->requires_grad) {
    auto an = a.node();
    out->backward_fn = [an, c0, len](Node<S>& o) {
      if (an->requires_grad) an->gmat().middleCols(c0, len) += o.gview();
    };
  }
  return Tensor<S>(out);
}

template <typename S>
Tensor<S> concat_rows(const std::vector<Tensor<S>>& parts) {
  if (parts.empty()) throw Error("concat_rows: empty input");
  int cols = parts[0].cols();
  int rows = 0;
  for (const auto& p : parts) {
    if (p.cols() != cols) throw Error("concat_rows: column mismatch");
    rows += p.rows();
  }
  auto out = std::make_shared<Node<S>>(rows, cols);
  int at = 0;
  for (const auto& p : parts) {
    out->mat().middleRows(at, p.rows()) = p.mat();
    at += p.rows();
    if (p.node()->requires_grad) out->requires_grad = true;
    out->parents.push_back(p.node());
  }
  if (out->requires_grad) {
    std::vector<std::shared_ptr<Node<S>>> nodes;
    for (const auto& p : parts) nodes.push_back(p.node());
    out->backward_fn = [nodes](Node<S>& o) {
      int r = 0;
      for (auto& n : nodes) {
        if (n->requires_grad) n->gmat() += o.gview().middleRows(r, n->rows);
        r += n->rows;
      }
    };
  }
  return Tensor<S>(out);
}

// Rows of `a` selected by index; duplicates allowed (backward scatter-adds).
// Doubles as the embedding lookup with `a` as the table.
template <typename S>
Tensor<S> gather_rows(const Tensor<S>& a, std::vector<int> indices) {
  for (int i : indices)
    if (i < 0 || i >= a.rows()) throw std::invalid_argument("gather_rows: index out of range");
  auto out = detail::make_out<S>(static_cast<int>(indices.size()), a.cols(), {a});
  for (std::size_t r = 0; r < indices.size(); ++r)
    out->mat().row(static_cast<int>(r)) = a.mat().row(indices[r]);
  if (out->requires_grad) {
    auto an = a.node();
    out->backward_fn = [an, idx = std::move(indices)](Node<S>& o) {
      if (!an->requires_grad) return;
      auto g = an->gmat();
      for (std::size_t r = 0; r < idx.size(); ++r)
        g.row(idx[r]) += o.gview().row(static_cast<int>(r));
    };
  }
  return Tensor<S>(out);
}

// x: [B*L, D]; table: [L, D] added to every sample's L rows.
template <typename S>
Tensor<S> add_tiled_rows(const Tensor<S>& x, const Tensor<S>& table, int batch) {
  int L = table.rows();
  if (x.rows() != batch * L || x.cols() != table.cols())
    throw Error("add_tiled_rows: shape mismatch");
  auto out = detail::make_out<S>(x.rows(), x.cols(), {x, table});
  for (int b = 0; b < batch; ++b)
    out->mat().middleRows(b * L, L) = x.mat().middleRows(b * L, L) + table.mat();
  if (out->requires_grad) {
    auto xn = x.node(), tn = table.node();
    out->backward_fn = [xn, tn, batch, L](Node<S>& o) {
      if (xn->requires_grad) xn->gmat() += o.gview();
      if (tn->requires_grad) {
        auto g = tn->gmat();
        for (int b = 0; b < batch; ++b) g += o.gview().middleRows(b * L, L);
      }
    };
  }
  return Tensor<S>(out);
}

// x: [B, D] -> [B*times, D], row b*times+j = x[b].
template <typename S>
Tensor<S> repeat_rows(const Tensor<S>& x, int times) {
  auto out = detail::make_out<S>(x.rows() * times, x.cols(), {x});
  for (int b = 0; b < x.rows(); ++b)
    for (int j = 0; j < times; ++j)
      out->mat().row(b * times + j) = x.mat().row(b);
  if (out->requires_grad) {
    auto xn = x.node();
    out->backward_fn = [xn, times](Node<S>& o) {
      if (!xn->requires_grad) return;
      auto g = xn->gmat();
      for (int b = 0; b < xn->rows; ++b)
        for (int j = 0; j < times; ++j)
          g.row(b) += o.gview().row(b * times + j);
    };
  }
  return Tensor<S>(out);
}

// ---------- pointwise nonlinearities ----------

template <typename S>
Tensor<S> gelu(const Tensor<S>& a) {
  auto out = detail::make_out<S>(a.rows(), a.cols(), {a});
  const S inv_sqrt2 = S(0.7071067811865475244);
  out->arr() = a.node()->arr() * S(0.5) *
               (S(1) + (a.node()->arr() * inv_sqrt2).erf());
  if (out->requires_grad) {
    auto an = a.node();
    out->backward_fn = [an, inv_sqrt2](Node<S>& o) {
      if (!an->requires_grad) return;
      const S inv_sqrt2pi = S(0.3989422804014326779);
      auto x = an->arr();
      auto phi = S(0.5) * (S(1) + (x * inv_sqrt2).erf());
      auto dens = (-(x * x) * S(0.5)).exp() * inv_sqrt2pi;
      an->garr() += o.gaview() * (phi + x * dens);
    };
  }
  return Tensor<S>(out);
}

template <typename S>
Tensor<S> sigmoid(const Tensor<S>& a) {
  auto out = detail::make_out<S>(a.rows(), a.cols(), {a});
  out->arr() = S(1) / (S(1) + (-a.node()->arr()).exp());
  if (out->requires_grad) {
    auto an = a.node();
    out->backward_fn = [an](Node<S>& o) {
      if (!an->requires_grad) return;
      auto y = o.arr();
      an->garr() += o.gaview() * y * (S(1) - y);
    };
  }
  return Tensor<S>(out);
}

template <typename S>
Tensor<S> tanh_t(const Tensor<S>& a) {
  auto out = detail::make_out<S>(a.rows(), a.cols(), {a});
  out->arr() = a.node()->arr().tanh();
  if (out->requires_grad) {
    auto an = a.node();
    out->backward_fn = [an](Node<S>& o) {
      if (!an->requires_grad) return;
      auto y = o.arr();
      an->garr() += o.gaview() * (S(1) - y * y);
    };
  }
  return Tensor<S>(out);
}

}  // namespace siaftp::nn
