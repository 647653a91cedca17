#pragma once

#include <cstdint>

#include "siaftp/nn/tensor.hpp"

namespace siaftp::nn {

// Row-wise layer normalization with learned gain/bias [1, C].
template <typename S>
Tensor<S> layer_norm(const Tensor<S>& x, const Tensor<S>& gain,
                     const Tensor<S>& bias, S eps = S(1e-5)) {
  if (gain.rows() != 1 || gain.cols() != x.cols() || bias.rows() != 1 ||
      bias.cols() != x.cols())
    throw Error("layer_norm: gain/bias must be [1, cols(x)]");
  auto out = detail::make_out<S>(x.rows(), x.cols(), {x, gain, bias});
  int R = x.rows(), C = x.cols();
  auto xhat = std::make_shared<Matrix<S>>(R, C);
  auto inv_sd = std::make_shared<Eigen::Matrix<S, Eigen::Dynamic, 1>>(R);
  for (int r = 0; r < R; ++r) {
    auto row = x.mat().row(r);
    S mean = row.mean();
    S var = (row.array() - mean).square().sum() / S(C);
    S isd = S(1) / std::sqrt(var + eps);
    (*inv_sd)(r) = isd;
    xhat->row(r) = (row.array() - mean) * isd;
  }
  out->mat() = (xhat->array().rowwise() * gain.mat().row(0).array()).rowwise() +
               bias.mat().row(0).array();
  if (out->requires_grad) {
    auto xn = x.node(), gn = gain.node(), bn = bias.node();
    out->backward_fn = [xn, gn, bn, xhat, inv_sd](Node<S>& o) {
      int R = o.rows, C = o.cols;
      auto g = o.gview();
      if (bn->requires_grad) bn->gmat().row(0) += g.colwise().sum();
      if (gn->requires_grad)
        gn->gmat().row(0) += (g.array() * xhat->array()).colwise().sum().matrix();
      if (xn->requires_grad) {
        auto gx = xn->gmat();
        for (int r = 0; r < R; ++r) {
          // dL/dy scaled by gain
          Eigen::Array<S, 1, Eigen::Dynamic> gy =
              g.row(r).array() * gn->mat().row(0).array();
          S m1 = gy.mean();
          S m2 = (gy * xhat->row(r).array()).mean();
          gx.row(r) += ((gy - m1 - xhat->row(r).array() * m2) * (*inv_sd)(r))
                           .matrix();
        }
      }
    };
  }
  return Tensor<S>(out);
}

template <typename S>
Tensor<S> softmax_rows(const Tensor<S>& x) {
  auto out = detail::make_out<S>(x.rows(), x.cols(), {x});
  for (int r = 0; r < x.rows(); ++r) {
    auto row = x.mat().row(r);
    S mx = row.maxCoeff();
    Eigen::Array<S, 1, Eigen::Dynamic> e = (row.array() - mx).exp();
    out->mat().row(r) = (e / e.sum()).matrix();
  }
  if (out->requires_grad) {
    auto xn = x.node();
    out->backward_fn = [xn](Node<S>& o) {
      if (!xn->requires_grad) return;
      auto p = o.arr();
      auto g = o.gaview();
      auto gx = xn->garr();
      for (int r = 0; r < o.rows; ++r) {
        S dot = (g.row(r) * p.row(r)).sum();
        gx.row(r) += p.row(r) * (g.row(r) - dot);
      }
    };
  }
  return Tensor<S>(out);
}

// Multi-head scaled dot-product attention over already-projected q/k/v laid
// out as [B*Lq, D] and [B*Lk, D]. key_valid (optional, size B*Lk) masks
// padding keys out of the softmax.
template <typename S>
Tensor<S> multihead_attention(const Tensor<S>& q, const Tensor<S>& k,
                              const Tensor<S>& v, int heads, int batch,
                              int len_q, int len_k,
                              const std::vector<std::uint8_t>* key_valid = nullptr) {
  int D = q.cols();
  if (D % heads != 0) throw Error("multihead_attention: D % heads != 0");
  if (q.rows() != batch * len_q || k.rows() != batch * len_k ||
      v.rows() != batch * len_k || k.cols() != D || v.cols() != D)
    throw Error("multihead_attention: shape mismatch");
  if (key_valid && static_cast<int>(key_valid->size()) != batch * len_k)
    throw Error("multihead_attention: mask size mismatch");
  int dh = D / heads;
  S scale = S(1) / std::sqrt(static_cast<S>(dh));

  auto out = detail::make_out<S>(batch * len_q, D, {q, k, v});
  // keep the attention probabilities for backward
  auto probs = std::make_shared<std::vector<Matrix<S>>>();
  probs->reserve(static_cast<std::size_t>(batch) * heads);
  const S neg_inf = -std::numeric_limits<S>::infinity();

  for (int b = 0; b < batch; ++b) {
    for (int h = 0; h < heads; ++h) {
      auto Q = q.mat().block(b * len_q, h * dh, len_q, dh);
      auto K = k.mat().block(b * len_k, h * dh, len_k, dh);
      auto V = v.mat().block(b * len_k, h * dh, len_k, dh);
      Matrix<S> scores = (Q * K.transpose()) * scale;
      if (key_valid) {
        for (int j = 0; j < len_k; ++j)
          if (!(*key_valid)[static_cast<std::size_t>(b * len_k + j)])
            scores.col(j).setConstant(neg_inf);
      }
      Matrix<S> P(len_q, len_k);
      for (int r = 0; r < len_q; ++r) {
        S mx = scores.row(r).maxCoeff();
        if (mx == neg_inf) {  // fully masked row: emit zeros
          P.row(r).setZero();
          continue;
        }
        Eigen::Array<S, 1, Eigen::Dynamic> e =
            (scores.row(r).array() - mx).exp();
        P.row(r) = (e / e.sum()).matrix();
      }
      out->mat().block(b * len_q, h * dh, len_q, dh).noalias() = P * V;
      probs->push_back(std::move(P));
    }
  }

  if (out->requires_grad) {
    auto qn = q.node(), kn = k.node(), vn = v.node();
    out->backward_fn = [qn, kn, vn, probs, heads, batch, len_q, len_k, dh,
                        scale](Node<S>& o) {
      auto g = o.gview();
      for (int b = 0; b < batch; ++b) {
        for (int h = 0; h < heads; ++h) {
          const Matrix<S>& P = (*probs)[static_cast<std::size_t>(b * heads + h)];
          auto Q = qn->mat().block(b * len_q, h * dh, len_q, dh);
          auto K = kn->mat().block(b * len_k, h * dh, len_k, dh);
          auto V = vn->mat().block(b * len_k, h * dh, len_k, dh);
          auto gctx = g.block(b * len_q, h * dh, len_q, dh);
          if (vn->requires_grad)
            vn->gmat().block(b * len_k, h * dh, len_k, dh).noalias() +=
                P.transpose() * gctx;
          if (qn->requires_grad || kn->requires_grad) {
            Matrix<S> dP = gctx * V.transpose();  // [Lq, Lk]
            Matrix<S> dS(len_q, len_k);
            for (int r = 0; r < len_q; ++r) {
              S dot = (dP.row(r).array() * P.row(r).array()).sum();
              dS.row(r) = (P.row(r).array() * (dP.row(r).array() - dot))
                              .matrix() * scale;
            }
            if (qn->requires_grad)
              qn->gmat().block(b * len_q, h * dh, len_q, dh).noalias() +=
                  dS * K;
            if (kn->requires_grad)
              kn->gmat().block(b * len_k, h * dh, len_k, dh).noalias() +=
                  dS.transpose() * Q;
          }
        }
      }
    };
  }
  return Tensor<S>(out);
}

// Same-padded width-3 convolution along the length axis of each sample.
// x: [B*L, Cin]; w: [3*Cin, Cout] ordered (prev, self, next); bias: [1, Cout].
template <typename S>
Tensor<S> conv1d_k3(const Tensor<S>& x, const Tensor<S>& w,
                    const Tensor<S>& bias, int batch, int length) {
  int cin = x.cols();
  if (x.rows() != batch * length || w.rows() != 3 * cin ||
      bias.rows() != 1 || bias.cols() != w.cols())
    throw Error("conv1d_k3: shape mismatch");
  int cout = w.cols();
  auto patches = std::make_shared<Matrix<S>>(batch * length, 3 * cin);
  patches->setZero();
  for (int b = 0; b < batch; ++b) {
    for (int t = 0; t < length; ++t) {
      int r = b * length + t;
      if (t > 0) patches->row(r).segment(0, cin) = x.mat().row(r - 1);
      patches->row(r).segment(cin, cin) = x.mat().row(r);
      if (t + 1 < length)
        patches->row(r).segment(2 * cin, cin) = x.mat().row(r + 1);
    }
  }
  auto out = detail::make_out<S>(batch * length, cout, {x, w, bias});
  out->mat().noalias() = (*patches) * w.mat();
  out->mat().rowwise() += bias.mat().row(0);
  if (out->requires_grad) {
    auto xn = x.node(), wn = w.node(), bn = bias.node();
    out->backward_fn = [xn, wn, bn, patches, batch, length, cin](Node<S>& o) {
      auto g = o.gview();
      if (bn->requires_grad) bn->gmat().row(0) += g.colwise().sum();
      if (wn->requires_grad) wn->gmat().noalias() += patches->transpose() * g;
      if (xn->requires_grad) {
        Matrix<S> gp = g * wn->mat().transpose();  // [B*L, 3*Cin]
        auto gx = xn->gmat();
        for (int b = 0; b < batch; ++b) {
          for (int t = 0; t < length; ++t) {
            int r = b * length + t;
            if (t > 0) gx.row(r - 1) += gp.row(r).segment(0, cin);
            gx.row(r) += gp.row(r).segment(cin, cin);
            if (t + 1 < length) gx.row(r + 1) += gp.row(r).segment(2 * cin, cin);
          }
        }
      }
    };
  }
  return Tensor<S>(out);
}

// ---------- segment (per-sample) reductions ----------

// Sum of each sample's rows weighted by a constant 0/1 mask: [B*L, D] -> [B, D].
template <typename S>
Tensor<S> segment_masked_sum(const Tensor<S>& x,
                             const std::vector<S>& mask, int batch,
                             int length) {
  if (x.rows() != batch * length ||
      static_cast<int>(mask.size()) != batch * length)
    throw Error("segment_masked_sum: shape mismatch");
  auto out = detail::make_out<S>(batch, x.cols(), {x});
  out->mat().setZero();
  for (int b = 0; b < batch; ++b)
    for (int t = 0; t < length; ++t) {
      S m = mask[static_cast<std::size_t>(b * length + t)];
      if (m != S(0)) out->mat().row(b) += x.mat().row(b * length + t) * m;
    }
  if (out->requires_grad) {
    auto xn = x.node();
    out->backward_fn = [xn, mask, batch, length](Node<S>& o) {
      if (!xn->requires_grad) return;
      auto gx = xn->gmat();
      for (int b = 0; b < batch; ++b)
        for (int t = 0; t < length; ++t) {
          S m = mask[static_cast<std::size_t>(b * length + t)];
          if (m != S(0)) gx.row(b * length + t) += o.gview().row(b) * m;
        }
    };
  }
  return Tensor<S>(out);
}

template <typename S>
Tensor<S> segment_mean(const Tensor<S>& x, int batch, int length) {
  std::vector<S> ones(static_cast<std::size_t>(batch) * length,
                      S(1) / static_cast<S>(length));
  return segment_masked_sum(x, ones, batch, length);
}

// Softmax over each sample's L scores: x is [B*L, 1].
template <typename S>
Tensor<S> segment_softmax(const Tensor<S>& x, int batch, int length) {
  if (x.rows() != batch * length || x.cols() != 1)
    throw Error("segment_softmax: expects [B*L, 1]");
  auto out = detail::make_out<S>(x.rows(), 1, {x});
  for (int b = 0; b < batch; ++b) {
    auto seg = x.mat().block(b * length, 0, length, 1);
    S mx = seg.maxCoeff();
    Eigen::Array<S, Eigen::Dynamic, 1> e = (seg.array() - mx).exp();
    out->mat().block(b * length, 0, length, 1) = (e / e.sum()).matrix();
  }
  if (out->requires_grad) {
    auto xn = x.node();
    out->backward_fn = [xn, batch, length](Node<S>& o) {
      if (!xn->requires_grad) return;
      for (int b = 0; b < batch; ++b) {
        auto p = o.mat().block(b * length, 0, length, 1);
        auto g = o.gview().block(b * length, 0, length, 1);
        S dot = (p.array() * g.array()).sum();
        xn->gmat().block(b * length, 0, length, 1) +=
            (p.array() * (g.array() - dot)).matrix();
      }
    };
  }
  return Tensor<S>(out);
}

// Per-sample weighted sum: values [B*L, D], weights [B*L, 1] -> [B, D].
template <typename S>
Tensor<S> segment_weighted_sum(const Tensor<S>& values,
                               const Tensor<S>& weights, int batch,
                               int length) {
  if (values.rows() != batch * length || weights.rows() != batch * length ||
      weights.cols() != 1)
    throw Error("segment_weighted_sum: shape mismatch");
  auto out = detail::make_out<S>(batch, values.cols(), {values, weights});
  for (int b = 0; b < batch; ++b) {
    auto V = values.mat().middleRows(b * length, length);
    auto w = weights.mat().block(b * length, 0, length, 1);
    out->mat().row(b).noalias() = (V.transpose() * w).transpose();
  }
  if (out->requires_grad) {
    auto vn = values.node(), wn = weights.node();
    out->backward_fn = [vn, wn, batch, length](Node<S>& o) {
      auto g = o.gview();
      for (int b = 0; b < batch; ++b) {
        auto V = vn->mat().middleRows(b * length, length);
        auto w = wn->mat().block(b * length, 0, length, 1);
        if (vn->requires_grad)
          vn->gmat().middleRows(b * length, length).noalias() +=
              w * g.row(b);
        if (wn->requires_grad)
          wn->gmat().block(b * length, 0, length, 1).noalias() +=
              V * g.row(b).transpose();
      }
    };
  }
  return Tensor<S>(out);
}

// ---------- losses ----------

// Mean binary cross-entropy with logits against constant 0/1 targets.
template <typename S>
Tensor<S> bce_with_logits_mean(const Tensor<S>& logits,
                               const Matrix<S>& targets) {
  if (logits.rows() != targets.rows() || logits.cols() != targets.cols())
    throw Error("bce_with_logits_mean: shape mismatch");
  auto out = detail::make_out<S>(1, 1, {logits});
  auto z = logits.node()->arr();
  auto t = targets.array();
  S n = static_cast<S>(logits.size());
  // max(z,0) - z t + log1p(exp(-|z|))
  out->value[0] =
      ((z.max(S(0)) - z * t) + (S(1) + (-z.abs()).exp()).log()).sum() / n;
  if (out->requires_grad) {
    auto ln = logits.node();
    auto tgt = std::make_shared<Matrix<S>>(targets);
    out->backward_fn = [ln, tgt, n](Node<S>& o) {
      if (!ln->requires_grad) return;
      S g = o.grad[0] / n;
      auto z = ln->arr();
      ln->garr() += ((S(1) / (S(1) + (-z).exp())) - tgt->array()) * g;
    };
  }
  return Tensor<S>(out);
}

// Mean softmax cross-entropy over rows of logits against integer targets.
template <typename S>
Tensor<S> softmax_xent_mean(const Tensor<S>& logits,
                            const std::vector<int>& targets) {
  if (static_cast<int>(targets.size()) != logits.rows())
    throw Error("softmax_xent_mean: target count mismatch");
  if (targets.empty()) throw Error("softmax_xent_mean: empty batch");
  auto out = detail::make_out<S>(1, 1, {logits});
  int R = logits.rows();
  auto probs = std::make_shared<Matrix<S>>(R, logits.cols());
  S loss = S(0);
  for (int r = 0; r < R; ++r) {
    auto row = logits.mat().row(r);
    S mx = row.maxCoeff();
    Eigen::Array<S, 1, Eigen::Dynamic> e = (row.array() - mx).exp();
    S sum = e.sum();
    probs->row(r) = (e / sum).matrix();
    loss += std::log(sum) + mx - row(targets[static_cast<std::size_t>(r)]);
  }
  out->value[0] = loss / static_cast<S>(R);
  if (out->requires_grad) {
    auto ln = logits.node();
    out->backward_fn = [ln, probs, targets](Node<S>& o) {
      if (!ln->requires_grad) return;
      int R = ln->rows;
      S g = o.grad[0] / static_cast<S>(R);
      auto gl = ln->gmat();
      gl += probs->matrix() * g;
      for (int r = 0; r < R; ++r)
        gl(r, targets[static_cast<std::size_t>(r)]) -= g;
    };
  }
  return Tensor<S>(out);
}

// Mean squared error against a constant target.
template <typename S>
Tensor<S> mse_mean(const Tensor<S>& pred, const Matrix<S>& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols())
    throw Error("mse_mean: shape mismatch");
  auto out = detail::make_out<S>(1, 1, {pred});
  S n = static_cast<S>(pred.size());
  out->value[0] = (pred.mat() - target).array().square().sum() / n;
  if (out->requires_grad) {
    auto pn = pred.node();
    auto tgt = std::make_shared<Matrix<S>>(target);
    out->backward_fn = [pn, tgt, n](Node<S>& o) {
      if (!pn->requires_grad) return;
      S g = o.grad[0] * S(2) / n;
      pn->gmat() += (pn->mat() - *tgt) * g;
    };
  }
  return Tensor<S>(out);
}

}  // namespace siaftp::nn
