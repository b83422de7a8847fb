// Copyright 2026 The moectrl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <json.hpp>

#include "moectrl/tensor.hpp"

namespace moectrl::ad {

// JSON checkpoint envelope. Every named tensor is stored as
// {"shape": [...], "values": [...]}; doubles round-trip losslessly.
struct Checkpoint {
  int version = 1;
  std::uint64_t seed = 0;
  nlohmann::json metadata = nlohmann::json::object();
  std::map<std::string, Tensor> tensors;

  nlohmann::json to_json() const;
  static Checkpoint from_json(const nlohmann::json& j);

  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);
};

}  // namespace moectrl::ad
