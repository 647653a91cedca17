#pragma once

#include <vector>

#include "siaftp/nn/tensor.hpp"

namespace siaftp::nn {

// Adam with bias correction. Parameters keep their gradient between
// zero_grads() calls, so callers control accumulation granularity.
template <typename S>
class Adam {
 public:
  explicit Adam(std::vector<Tensor<S>> params, double lr = 1e-4,
                double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : params_(std::move(params)), lr_(lr), b1_(beta1), b2_(beta2), eps_(eps) {
    m_.resize(params_.size());
    v_.resize(params_.size());
    for (std::size_t i = 0; i < params_.size(); ++i) {
      m_[i].assign(params_[i].size(), S(0));
      v_[i].assign(params_[i].size(), S(0));
    }
  }

  void zero_grads() {
    for (auto& p : params_) p.zero_grad();
  }

  // One update from the currently accumulated gradients, scaled by 1/scale
  // (use scale = batch size when losses were summed per sample).
  void step(double scale = 1.0) {
    ++t_;
    double bc1 = 1.0 - std::pow(b1_, t_);
    double bc2 = 1.0 - std::pow(b2_, t_);
    for (std::size_t i = 0; i < params_.size(); ++i) {
      auto& p = params_[i];
      if (!p.has_grad()) continue;
      auto& value = p.raw();
      const auto& grad = p.node()->grad;
      for (std::size_t k = 0; k < value.size(); ++k) {
        double g = static_cast<double>(grad[k]) / scale;
        double m = b1_ * m_[i][k] + (1.0 - b1_) * g;
        double v = b2_ * v_[i][k] + (1.0 - b2_) * g * g;
        m_[i][k] = static_cast<S>(m);
        v_[i][k] = static_cast<S>(v);
        double mhat = m / bc1;
        double vhat = v / bc2;
        value[k] -= static_cast<S>(lr_ * mhat / (std::sqrt(vhat) + eps_));
      }
    }
  }

  double learning_rate() const { return lr_; }
  void set_learning_rate(double lr) { lr_ = lr; }

 private:
  std::vector<Tensor<S>> params_;
  double lr_, b1_, b2_, eps_;
  long t_ = 0;
  std::vector<std::vector<S>> m_, v_;
};

}  // namespace siaftp::nn
