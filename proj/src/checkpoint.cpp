// Copyright 2026 The moectrl Authors
// SPDX-License-Identifier: Apache-2.0

#include "moectrl/checkpoint.hpp"

#include <fstream>

namespace moectrl::ad {

nlohmann::json Checkpoint::to_json() const {
  nlohmann::json j;
  j["version"] = version;
  j["seed"] = seed;
  j["metadata"] = metadata;
  nlohmann::json ts = nlohmann::json::object();
  for (const auto& [name, t] : tensors) {
    ts[name] = {{"shape", t.shape()}, {"values", t.values()}};
  }
  j["tensors"] = std::move(ts);
  return j;
}

Checkpoint Checkpoint::from_json(const nlohmann::json& j) {
  Checkpoint c;
  c.version = j.at("version").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.metadata = j.value("metadata", nlohmann::json::object());
  for (const auto& [name, tj] : j.at("tensors").items()) {
    c.tensors.emplace(name, Tensor(tj.at("shape").get<std::vector<std::size_t>>(),
                                   tj.at("values").get<std::vector<double>>()));
  }
  return c;
}

void Checkpoint::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw RuntimeFault("checkpoint: cannot open " + path + " for writing");
  out << to_json().dump(1) << "\n";
  if (!out) throw RuntimeFault("checkpoint: write failed for " + path);
}

Checkpoint Checkpoint::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("checkpoint: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

}  // namespace moectrl::ad
