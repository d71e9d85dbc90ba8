#pragma once

#include <cstdint>
#include <vector>

#include "move/errors.hpp"
#include "move/tensor.hpp"

namespace move::ad {

// Adam over a fixed set of registered parameters. The learning rate is a
// plain field so a schedule can be applied from outside between steps.
template <typename S>
class BasicAdam {
 public:
  struct Options {
    S learning_rate = S(1e-3);
    S beta1 = S(0.9);
    S beta2 = S(0.999);
    S epsilon = S(1e-8);
  };

  explicit BasicAdam(Options options = {}) : options_(options) {
    if (!(options_.learning_rate > 0)) throw ArgumentError("adam: learning rate must be positive");
  }

  void register_param(BasicParam<S>& param) {
    params_.push_back(&param);
    first_.push_back(MatrixX<S>::Zero(param.value.rows(), param.value.cols()));
    second_.push_back(MatrixX<S>::Zero(param.value.rows(), param.value.cols()));
  }

  void set_learning_rate(S lr) { options_.learning_rate = lr; }
  S learning_rate() const { return options_.learning_rate; }
  std::int64_t step_count() const { return step_; }

  // One Adam update from the gradients currently stored on the params.
  void step() {
    for (const BasicParam<S>* p : params_) {
      if (!p->has_grad()) {
        throw StateError("adam: parameter '" + p->name + "' has no gradient");
      }
    }
    ++step_;
    const S bc1 = S(1) - std::pow(options_.beta1, static_cast<S>(step_));
    const S bc2 = S(1) - std::pow(options_.beta2, static_cast<S>(step_));
    for (std::size_t i = 0; i < params_.size(); ++i) {
      BasicParam<S>& p = *params_[i];
      MatrixX<S>& m = first_[i];
      MatrixX<S>& v = second_[i];
      m = options_.beta1 * m + (S(1) - options_.beta1) * p.grad;
      v = options_.beta2 * v + (S(1) - options_.beta2) * p.grad.cwiseProduct(p.grad);
      const auto m_hat = m / bc1;
      const auto v_hat = v / bc2;
      p.value -= options_.learning_rate *
                 (m_hat.array() / (v_hat.array().sqrt() + options_.epsilon)).matrix();
    }
  }

  void zero_grads() {
    for (BasicParam<S>* p : params_) p->zero_grad();
  }

 private:
  Options options_;
  std::int64_t step_ = 0;
  std::vector<BasicParam<S>*> params_;
  std::vector<MatrixX<S>> first_;
  std::vector<MatrixX<S>> second_;
};

using Adam = BasicAdam<double>;

}  // namespace move::ad
