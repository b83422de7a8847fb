// Copyright 2026 The moectrl Authors
// SPDX-License-Identifier: Apache-2.0

#include "moectrl/tensor.hpp"

#include <cmath>

namespace moectrl::ad {

std::size_t shape_numel(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t e : shape) n *= e;
  return n;
}

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), v_(shape_numel(shape_), 0.0) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> values)
    : shape_(std::move(shape)), v_(std::move(values)) {
  if (v_.size() != shape_numel(shape_)) {
    throw ShapeError("tensor: value count does not match shape");
  }
}

Tensor Tensor::full(std::vector<std::size_t> shape, double fill) {
  Tensor t(std::move(shape));
  t.fill(fill);
  return t;
}

Tensor Tensor::row(std::vector<double> values) {
  std::size_t n = values.size();
  return Tensor({n}, std::move(values));
}

Tensor Tensor::matrix(std::initializer_list<std::initializer_list<double>> rows) {
  std::size_t r = rows.size();
  std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> v;
  v.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("tensor: ragged matrix initializer");
    v.insert(v.end(), row.begin(), row.end());
  }
  return Tensor({r, c}, std::move(v));
}

std::size_t Tensor::rows() const {
  if (ndim() != 2) throw ShapeError("tensor: rows() on non-matrix");
  return shape_[0];
}

std::size_t Tensor::cols() const {
  if (ndim() != 2) throw ShapeError("tensor: cols() on non-matrix");
  return shape_[1];
}

double& Tensor::at(std::size_t r, std::size_t c) { return v_[r * cols() + c]; }

double Tensor::at(std::size_t r, std::size_t c) const { return v_[r * cols() + c]; }

bool Tensor::all_finite() const {
  for (double x : v_) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

double Tensor::item() const {
  if (!is_scalar()) throw ShapeError("tensor: item() on non-scalar");
  return v_[0];
}

void Tensor::fill(double v) {
  for (double& x : v_) x = v;
}

void Tensor::add_scaled(const Tensor& o, double s) {
  if (!same_shape(o)) throw ShapeError("tensor: add_scaled shape mismatch");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += s * o.v_[i];
}

}  // namespace moectrl::ad
