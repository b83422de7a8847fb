// Copyright 2026 The moectrl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include "moectrl/tensor.hpp"

namespace moectrl::ad {

// Handle into a Tape. Only valid for the tape that produced it.
struct Var {
  std::uint32_t i = UINT32_MAX;
  bool valid() const { return i != UINT32_MAX; }
};

// Reverse-mode tape over Tensor ops. One tape per computation graph, built
// fresh for every update step; single-threaded by construction.
//
// backward(loss) seeds d(loss)=1, propagates through a per-call scratch
// buffer, then accumulates the resulting leaf gradients into persistent
// slots. Repeated backward calls therefore accumulate until zero_grad(),
// which lets one graph serve several loss terms.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaves. Tracked leaves get persistent gradient slots readable via grad().
  Var leaf(Tensor value, bool track = false);

  const Tensor& val(Var v) const { return nodes_[v.i].value; }
  // Accumulated gradient of a tracked leaf.
  const Tensor& grad(Var v) const;

  void backward(Var loss);
  void zero_grad();

  std::size_t size() const { return nodes_.size(); }

  // ---- ops ----------------------------------------------------------------
  // y[B,O] = x[B,I] * w[O,I]^T (+ b[O] broadcast over rows).
  Var affine(Var x, Var w, std::optional<Var> b = std::nullopt);

  // Elementwise; a scalar ([1]) operand broadcasts against any shape.
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var div(Var a, Var b);

  Var scale(Var a, double s);
  Var add_const(Var a, double c);
  Var neg(Var a) { return scale(a, -1.0); }

  Var tanh_of(Var a);
  Var exp_of(Var a);
  Var log_of(Var a);
  Var square(Var a);

  Var sum(Var a);   // -> [1]
  Var mean(Var a);  // -> [1]
  Var row_sum(Var a);  // [B,C] -> [B]
  Var col_sum(Var a);  // [B,C] -> [C]

  Var softmax_rows(Var a);  // [B,M]
  Var normal_cdf(Var a);    // elementwise standard normal CDF
  Var min_elem(Var a, Var b);

  // out[b,m] = max over j != m of x[b,j]; -inf when M == 1.
  // Subgradient routes to the (lowest-index) argmax.
  Var max_excl_rows(Var a);

  Var concat_cols(Var a, Var b);          // [B,C1] ++ [B,C2] -> [B,C1+C2]
  Var col(Var a, std::size_t j);          // [B,C] -> [B]
  Var gather_cols(Var a, std::vector<std::size_t> idx);  // out[b] = a[b, idx[b]]
  Var mul_colvec(Var a, Var v);           // [B,C] * v[B] broadcast over columns

  // out[b,:] = mats[sel[b]].row(b); every mat is [B,C].
  Var select_rows_from(const std::vector<Var>& mats, std::vector<std::size_t> sel);
  // out[b,:] = vecs[sel[b]]; every vec is [C].
  Var stack_select(const std::vector<Var>& vecs, std::vector<std::size_t> sel);

  // ---- composite graphs ----------------------------------------------------
  // Diagonal Gaussian log density, summed over the trailing (action) axis:
  // all of x, mean, log_std are [B,C] -> [B].
  Var gaussian_log_prob(Var x, Var mean, Var log_std);

  // 0.5 * (population std / (mean + stabilizer))^2 of a vector.
  Var cv_squared(Var vec, double mean_stabilizer = 0.0);

 private:
  struct Node {
    Tensor value;
    bool track = false;
    // Propagates scratch[idx] into the scratch slots of the parents.
    std::function<void(Tape&, std::uint32_t)> back;
  };

  Var push(Tensor value, std::function<void(Tape&, std::uint32_t)> back);
  Tensor& scratch(std::uint32_t i);  // lazily zero-initialised per backward pass
  bool has_scratch(std::uint32_t i) const { return scratch_live_[i]; }

  std::vector<Node> nodes_;
  std::vector<Tensor> scratch_;
  std::vector<char> scratch_live_;
  std::unordered_map<std::uint32_t, Tensor> leaf_grads_;
};

}  // namespace moectrl::ad
