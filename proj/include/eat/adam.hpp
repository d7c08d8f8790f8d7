#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "eat/tensor.hpp"

namespace eat::diff {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam update applied to one parameter's flat storage.
// t is the 1-based step count after which this update happens.
template <class T>
void adam_step(std::vector<T>& value, const std::vector<T>& grad, std::vector<T>& m,
               std::vector<T>& v, int64_t t, const AdamConfig& cfg) {
  if (value.size() != grad.size() || value.size() != m.size() ||
      value.size() != v.size()) {
    throw ShapeMismatch("adam_step: parameter/gradient/moment sizes differ");
  }
  const T b1 = static_cast<T>(cfg.beta1);
  const T b2 = static_cast<T>(cfg.beta2);
  const T correction1 = static_cast<T>(1.0 - std::pow(cfg.beta1, static_cast<double>(t)));
  const T correction2 = static_cast<T>(1.0 - std::pow(cfg.beta2, static_cast<double>(t)));
  const T lr = static_cast<T>(cfg.lr);
  const T eps = static_cast<T>(cfg.eps);
  for (size_t i = 0; i < value.size(); ++i) {
    m[i] = b1 * m[i] + (T(1) - b1) * grad[i];
    v[i] = b2 * v[i] + (T(1) - b2) * grad[i] * grad[i];
    const T mhat = m[i] / correction1;
    const T vhat = v[i] / correction2;
    value[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

template <class T>
class Adam {
 public:
  Adam(std::vector<Tensor<T>> params, AdamConfig cfg)
      : params_(std::move(params)), cfg_(cfg) {
    m_.resize(params_.size());
    v_.resize(params_.size());
    for (size_t i = 0; i < params_.size(); ++i) {
      m_[i].assign(params_[i].values().size(), T(0));
      v_[i].assign(params_[i].values().size(), T(0));
    }
  }

  void step() {
    ++t_;
    for (size_t i = 0; i < params_.size(); ++i) {
      adam_step(params_[i].values(), params_[i].grad(), m_[i], v_[i], t_, cfg_);
    }
  }

  void zero_grad() {
    for (auto& p : params_) p.zero_grad();
  }

  int64_t t() const { return t_; }
  const AdamConfig& config() const { return cfg_; }
  const std::vector<std::vector<T>>& moment1() const { return m_; }
  const std::vector<std::vector<T>>& moment2() const { return v_; }

 private:
  std::vector<Tensor<T>> params_;
  AdamConfig cfg_;
  std::vector<std::vector<T>> m_, v_;
  int64_t t_ = 0;
};

}  // namespace eat::diff
