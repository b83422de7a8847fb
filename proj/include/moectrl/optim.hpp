// Copyright 2026 The moectrl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "moectrl/tensor.hpp"

namespace moectrl::ad {

// Adam with bias correction. One instance owns the moment state for a fixed
// ordered set of parameter tensors; step() must be called with grads in the
// same order every time.
class Adam {
 public:
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  // params[i] is updated in place using grads[i].
  void step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads);

  std::uint64_t step_count() const { return t_; }
  double lr() const { return lr_; }
  void set_lr(double lr);

 private:
  double lr_, beta1_, beta2_, eps_;
  std::uint64_t t_ = 0;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
};

}  // namespace moectrl::ad
