// Copyright 2026 The moectrl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "moectrl/checkpoint.hpp"
#include "moectrl/common.hpp"
#include "moectrl/tensor.hpp"

namespace moectrl::policy {

using ad::Tensor;

// The interpretable actor: a linear router over M linear Gaussian experts.
// No bias terms anywhere; the whole policy is readable off the matrices.
struct PolicyParams {
  Tensor router;                        // [M, n_s]
  std::vector<Tensor> expert_weights;   // each [n_a, n_s]
  std::vector<Tensor> expert_log_std;   // each [n_a]
  std::size_t M = 0, n_s = 0, n_a = 0;
  std::size_t k = 1;                    // experts per decision; 1 on every training path
  double log_std_min = -5.0, log_std_max = 2.0;

  // Weights i.i.d. uniform in [-1/sqrt(n_s), 1/sqrt(n_s)], log-std zero.
  static PolicyParams init(std::size_t M, std::size_t n_s, std::size_t n_a, Rng& rng,
                           std::size_t k = 1);

  void clamp_log_std();
  void validate() const;

  ad::Checkpoint to_checkpoint(std::uint64_t seed) const;
  static PolicyParams from_checkpoint(const ad::Checkpoint& c);
};

// Result of one routing decision.
struct GateDecision {
  std::vector<double> preference;    // softmax over (possibly noisy) logits, sums to 1
  std::size_t selected = 0;          // argmax, ties -> lowest index
  std::vector<double> one_hot;       // exactly one 1, at `selected`
  std::vector<double> noisy_logits;  // logits actually ranked (empty when no noise)
};

// logits = router*s; with an rng, adds eps_i ~ N(0, 1/M^2) before softmax.
GateDecision route(const PolicyParams& p, const std::vector<double>& state, Rng* noise = nullptr);

struct StochasticAction {
  std::vector<double> action;    // tanh-squashed, strictly inside (-1, 1)
  double log_prob = 0.0;         // squashed-Gaussian density of `action`
  GateDecision gate;
};

// Gate (with noise when rng provided), sample u ~ N(theta_sel*s, sigma_sel^2),
// squash. log_prob carries the tanh change-of-variables correction.
StochasticAction act_stochastic(const PolicyParams& p, const std::vector<double>& state, Rng& rng,
                                bool gate_noise = true);

// Noise-free gate; action = tanh(theta_sel * s). Only the selected expert is read.
std::vector<double> act_deterministic(const PolicyParams& p, const std::vector<double>& state);

// Top-k generalisation: mask preferences to the k largest, renormalise, and
// mix the experts' pre-squash linear outputs. k=1 reduces exactly to
// act_deterministic.
std::vector<double> act_deterministic_topk(const PolicyParams& p, const std::vector<double>& state,
                                           std::size_t k);

// Renormalised top-k gate weights (unit tests; training paths use k=1).
std::vector<double> topk_gate_weights(const std::vector<double>& preference, std::size_t k);

// (n_active, n_total). Router contributes M*n_s to both when included; each
// expert contributes n_a*n_s + n_a weights (action matrix plus log-std).
std::pair<std::size_t, std::size_t> count_params(const PolicyParams& p, bool include_router = true);

// Numerical constant used in the squashing correction log(1 - tanh(u)^2 + eps).
inline constexpr double kSquashEps = 1e-6;

// Scalar helpers shared with the trainer.
std::vector<double> mat_vec(const Tensor& m, const std::vector<double>& x);
double squashed_gaussian_log_prob(const std::vector<double>& pre_squash,
                                  const std::vector<double>& mean,
                                  const std::vector<double>& log_std);

}  // namespace moectrl::policy
