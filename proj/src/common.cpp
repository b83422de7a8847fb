// Copyright 2026 The moectrl Authors
// SPDX-License-Identifier: Apache-2.0

#include "moectrl/common.hpp"

#include <cmath>

namespace moectrl {

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller. uniform() can return 0; shift into (0, 1].
  double u1 = 1.0 - uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * 3.14159265358979323846 * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

}  // namespace moectrl
