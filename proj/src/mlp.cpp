// Copyright 2026 The moectrl Authors
// SPDX-License-Identifier: Apache-2.0

#include "moectrl/mlp.hpp"

#include <cmath>

namespace moectrl::ad {

MlpParams MlpParams::make(const std::vector<std::size_t>& widths, Activation act, Rng& rng) {
  if (widths.size() < 2) throw UsageError("mlp: need at least input and output widths");
  MlpParams p;
  p.widths = widths;
  p.hidden_activation = act;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const std::size_t in = widths[l], out = widths[l + 1];
    Tensor w({out, in});
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    for (std::size_t i = 0; i < w.numel(); ++i) w[i] = rng.uniform(-bound, bound);
    p.layers.push_back({std::move(w), Tensor({out})});
  }
  return p;
}

std::size_t MlpParams::param_count() const {
  std::size_t n = 0;
  for (const Layer& l : layers) n += l.w.numel() + l.b.numel();
  return n;
}

void MlpParams::polyak_from(const MlpParams& online, double tau) {
  if (layers.size() != online.layers.size()) throw ShapeError("polyak: layer count mismatch");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto blend = [tau](Tensor& dst, const Tensor& src) {
      if (!dst.same_shape(src)) throw ShapeError("polyak: shape mismatch");
      for (std::size_t i = 0; i < dst.numel(); ++i) {
        dst[i] = (1.0 - tau) * dst[i] + tau * src[i];
      }
    };
    blend(layers[l].w, online.layers[l].w);
    blend(layers[l].b, online.layers[l].b);
  }
}

std::vector<Tensor*> MlpParams::tensors() {
  std::vector<Tensor*> out;
  for (Layer& l : layers) {
    out.push_back(&l.w);
    out.push_back(&l.b);
  }
  return out;
}

std::vector<const Tensor*> MlpParams::tensors() const {
  std::vector<const Tensor*> out;
  for (const Layer& l : layers) {
    out.push_back(&l.w);
    out.push_back(&l.b);
  }
  return out;
}

MlpVars bind_mlp(Tape& tape, const MlpParams& p, bool track) {
  MlpVars v;
  v.hidden_activation = p.hidden_activation;
  for (const auto& l : p.layers) {
    v.layers.emplace_back(tape.leaf(l.w, track), tape.leaf(l.b, track));
  }
  return v;
}

namespace {
Var apply_activation(Tape& t, Var x, Activation act) {
  switch (act) {
    case Activation::Tanh:
      return t.tanh_of(x);
    case Activation::Relu: {
      // relu via 0.5*(x + |x|) would need abs; min trick is cheaper to reuse:
      // relu(x) = x - min(x, 0)
      Var zero = t.scale(x, 0.0);
      return t.sub(x, t.min_elem(x, zero));
    }
    case Activation::Identity:
      return x;
  }
  throw UsageError("mlp: unknown activation");
}
}  // namespace

Var mlp_forward(Tape& tape, const MlpVars& vars, Var x) {
  Var h = x;
  for (std::size_t l = 0; l < vars.layers.size(); ++l) {
    h = tape.affine(h, vars.layers[l].first, vars.layers[l].second);
    if (l + 1 < vars.layers.size()) h = apply_activation(tape, h, vars.hidden_activation);
  }
  return h;
}

Var mlp_forward_scalar(Tape& tape, const MlpVars& vars, Var x) {
  Var out = mlp_forward(tape, vars, x);
  if (tape.val(out).cols() != 1) throw ShapeError("mlp: network output is not scalar");
  return tape.col(out, 0);
}

}  // namespace moectrl::ad
