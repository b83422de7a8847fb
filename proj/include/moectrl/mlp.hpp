// Copyright 2026 The moectrl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "moectrl/common.hpp"
#include "moectrl/tape.hpp"
#include "moectrl/tensor.hpp"

namespace moectrl::ad {

enum class Activation { Tanh, Relu, Identity };

// Fully-connected network parameters. Used for the (non-interpretable) SAC
// critics and their target copies; the interpretable actor never goes through
// this type.
struct MlpParams {
  struct Layer {
    Tensor w;  // [out, in]
    Tensor b;  // [out]
  };
  std::vector<Layer> layers;
  std::vector<std::size_t> widths;  // in, hidden..., out
  Activation hidden_activation = Activation::Tanh;

  static MlpParams make(const std::vector<std::size_t>& widths, Activation act, Rng& rng);

  std::size_t param_count() const;  // sum over layers of in*out + out
  void polyak_from(const MlpParams& online, double tau);  // this = (1-tau)*this + tau*online

  std::vector<Tensor*> tensors();
  std::vector<const Tensor*> tensors() const;
};

// Per-graph binding of MlpParams onto a tape.
struct MlpVars {
  std::vector<std::pair<Var, Var>> layers;  // (w, b)
  Activation hidden_activation = Activation::Tanh;
};

MlpVars bind_mlp(Tape& tape, const MlpParams& p, bool track);

// x: [B, in] -> [B, out_width]; hidden activations applied between layers.
Var mlp_forward(Tape& tape, const MlpVars& vars, Var x);

// Convenience: forward to a [B] vector for scalar-output networks.
Var mlp_forward_scalar(Tape& tape, const MlpVars& vars, Var x);

}  // namespace moectrl::ad
