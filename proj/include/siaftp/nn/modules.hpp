#pragma once

#include <map>
#include <string>
#include <vector>

#include "siaftp/nn/ops.hpp"
#include "siaftp/rng.hpp"

namespace siaftp::nn {

enum class Init { kZero, kOne, kGlorot, kNormal002 };

// Named parameter registry. Initialization draws its stream from
// (seed, parameter name) so values do not depend on registration order.
template <typename S>
class ParamStore {
 public:
  explicit ParamStore(std::uint64_t seed = 0) : seed_(seed) {}

  Tensor<S> add(const std::string& name, int rows, int cols, Init init) {
    if (by_name_.count(name)) throw Error("duplicate parameter: " + name);
    Tensor<S> t = Tensor<S>::zeros(rows, cols, /*requires_grad=*/true);
    Rng rng = Rng::stream(seed_, name);
    auto m = t.mutable_mat();
    switch (init) {
      case Init::kZero:
        break;
      case Init::kOne:
        m.setOnes();
        break;
      case Init::kGlorot: {
        double limit = std::sqrt(6.0 / (rows + cols));
        for (int r = 0; r < rows; ++r)
          for (int c = 0; c < cols; ++c)
            m(r, c) = static_cast<S>(rng.uniform(-limit, limit));
        break;
      }
      case Init::kNormal002:
        for (int r = 0; r < rows; ++r)
          for (int c = 0; c < cols; ++c)
            m(r, c) = static_cast<S>(rng.normal(0.0, 0.02));
        break;
    }
    by_name_[name] = params_.size();
    params_.push_back({name, t});
    return t;
  }

  bool has(const std::string& name) const { return by_name_.count(name) > 0; }

  Tensor<S> get(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) throw Error("unknown parameter: " + name);
    return params_[it->second].second;
  }

  const std::vector<std::pair<std::string, Tensor<S>>>& entries() const {
    return params_;
  }

  std::size_t scalar_count(const std::string& prefix = "") const {
    std::size_t n = 0;
    for (const auto& [name, t] : params_)
      if (prefix.empty() || name.rfind(prefix, 0) == 0) n += t.size();
    return n;
  }

  std::vector<Tensor<S>> tensors(const std::string& prefix = "") const {
    std::vector<Tensor<S>> out;
    for (const auto& [name, t] : params_)
      if (prefix.empty() || name.rfind(prefix, 0) == 0) out.push_back(t);
    return out;
  }

  void zero_grads() {
    for (auto& [name, t] : params_) t.zero_grad();
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::vector<std::pair<std::string, Tensor<S>>> params_;
  std::map<std::string, std::size_t> by_name_;
};

template <typename S>
struct Linear {
  Tensor<S> w, b;

  Linear() = default;
  Linear(ParamStore<S>& store, const std::string& name, int in, int out) {
    w = store.add(name + ".w", in, out, Init::kGlorot);
    b = store.add(name + ".b", 1, out, Init::kZero);
  }
  Tensor<S> operator()(const Tensor<S>& x) const {
    return add_rowvec(matmul(x, w), b);
  }
};

template <typename S>
struct LayerNormLayer {
  Tensor<S> g, b;

  LayerNormLayer() = default;
  LayerNormLayer(ParamStore<S>& store, const std::string& name, int dim) {
    g = store.add(name + ".g", 1, dim, Init::kOne);
    b = store.add(name + ".b", 1, dim, Init::kZero);
  }
  Tensor<S> operator()(const Tensor<S>& x) const { return layer_norm(x, g, b); }
};

// Pre-norm transformer encoder block (self-attention + feed-forward).
template <typename S>
struct EncoderBlock {
  int heads = 4;
  LayerNormLayer<S> ln1, ln2;
  Linear<S> wq, wk, wv, wo, ff1, ff2;

  EncoderBlock() = default;
  EncoderBlock(ParamStore<S>& store, const std::string& name, int dim,
               int n_heads, int ff_dim)
      : heads(n_heads),
        ln1(store, name + ".ln1", dim),
        ln2(store, name + ".ln2", dim),
        wq(store, name + ".wq", dim, dim),
        wk(store, name + ".wk", dim, dim),
        wv(store, name + ".wv", dim, dim),
        wo(store, name + ".wo", dim, dim),
        ff1(store, name + ".ff1", dim, ff_dim),
        ff2(store, name + ".ff2", ff_dim, dim) {}

  Tensor<S> operator()(const Tensor<S>& x, int batch, int length,
                       const std::vector<std::uint8_t>* valid = nullptr) const {
    Tensor<S> h = ln1(x);
    Tensor<S> att = multihead_attention(wq(h), wk(h), wv(h), heads, batch,
                                        length, length, valid);
    Tensor<S> y = add(x, wo(att));
    Tensor<S> f = ff2(gelu(ff1(ln2(y))));
    return add(y, f);
  }
};

// Pre-norm cross-attention block: queries attend over a separate memory.
template <typename S>
struct CrossBlock {
  int heads = 4;
  LayerNormLayer<S> ln_q, ln_kv, ln2;
  Linear<S> wq, wk, wv, wo, ff1, ff2;

  CrossBlock() = default;
  CrossBlock(ParamStore<S>& store, const std::string& name, int dim,
             int n_heads, int ff_dim)
      : heads(n_heads),
        ln_q(store, name + ".lnq", dim),
        ln_kv(store, name + ".lnkv", dim),
        ln2(store, name + ".ln2", dim),
        wq(store, name + ".wq", dim, dim),
        wk(store, name + ".wk", dim, dim),
        wv(store, name + ".wv", dim, dim),
        wo(store, name + ".wo", dim, dim),
        ff1(store, name + ".ff1", dim, ff_dim),
        ff2(store, name + ".ff2", ff_dim, dim) {}

  Tensor<S> operator()(const Tensor<S>& q, const Tensor<S>& kv, int batch,
                       int len_q, int len_k) const {
    Tensor<S> hq = ln_q(q);
    Tensor<S> hkv = ln_kv(kv);
    Tensor<S> att = multihead_attention(wq(hq), wk(hkv), wv(hkv), heads,
                                        batch, len_q, len_k);
    Tensor<S> y = add(q, wo(att));
    Tensor<S> f = ff2(gelu(ff1(ln2(y))));
    return add(y, f);
  }
};

template <typename S>
struct Conv1dK3 {
  Tensor<S> w, b;

  Conv1dK3() = default;
  Conv1dK3(ParamStore<S>& store, const std::string& name, int cin, int cout) {
    w = store.add(name + ".w", 3 * cin, cout, Init::kGlorot);
    b = store.add(name + ".b", 1, cout, Init::kZero);
  }
  Tensor<S> operator()(const Tensor<S>& x, int batch, int length) const {
    return conv1d_k3(x, w, b, batch, length);
  }
};

template <typename S>
struct LstmCell {
  int hidden = 0;
  Tensor<S> wx, wh, b;

  LstmCell() = default;
  LstmCell(ParamStore<S>& store, const std::string& name, int in, int h)
      : hidden(h) {
    wx = store.add(name + ".wx", in, 4 * h, Init::kGlorot);
    wh = store.add(name + ".wh", h, 4 * h, Init::kGlorot);
    b = store.add(name + ".b", 1, 4 * h, Init::kZero);
  }

  // gates order: input, forget, cell, output
  std::pair<Tensor<S>, Tensor<S>> operator()(const Tensor<S>& x,
                                             const Tensor<S>& h,
                                             const Tensor<S>& c) const {
    Tensor<S> z = add_rowvec(add(matmul(x, wx), matmul(h, wh)), b);
    Tensor<S> i = sigmoid(slice_cols(z, 0, hidden));
    Tensor<S> f = sigmoid(slice_cols(z, hidden, hidden));
    Tensor<S> g = tanh_t(slice_cols(z, 2 * hidden, hidden));
    Tensor<S> o = sigmoid(slice_cols(z, 3 * hidden, hidden));
    Tensor<S> c_next = add(mul(f, c), mul(i, g));
    Tensor<S> h_next = mul(o, tanh_t(c_next));
    return {h_next, c_next};
  }
};

}  // namespace siaftp::nn
