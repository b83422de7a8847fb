// Copyright 2026 The moectrl Authors
// SPDX-License-Identifier: Apache-2.0

#include "moectrl/tape.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace moectrl::ad {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

void check_same_or_scalar(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b) && !a.is_scalar() && !b.is_scalar()) {
    throw ShapeError(std::string(op) + ": shape mismatch");
  }
}
}  // namespace

Var Tape::push(Tensor value, std::function<void(Tape&, std::uint32_t)> back) {
  nodes_.push_back(Node{std::move(value), false, std::move(back)});
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Tape::leaf(Tensor value, bool track) {
  if (!value.all_finite()) throw NumericError("leaf: non-finite input");
  Var v = push(std::move(value), nullptr);
  nodes_[v.i].track = track;
  return v;
}

const Tensor& Tape::grad(Var v) const {
  auto it = leaf_grads_.find(v.i);
  if (it == leaf_grads_.end()) {
    throw UsageError("grad: not a tracked leaf or backward never reached it");
  }
  return it->second;
}

Tensor& Tape::scratch(std::uint32_t i) {
  if (!scratch_live_[i]) {
    Tensor& g = scratch_[i];
    if (!g.same_shape(nodes_[i].value)) {
      g = Tensor(nodes_[i].value.shape());
    } else {
      g.fill(0.0);
    }
    scratch_live_[i] = 1;
  }
  return scratch_[i];
}

void Tape::backward(Var loss) {
  const Tensor& lv = nodes_[loss.i].value;
  if (!lv.is_scalar()) throw UsageError("backward: loss must be scalar");
  if (!lv.all_finite()) throw NumericError("backward: non-finite loss");

  scratch_.resize(nodes_.size());
  scratch_live_.assign(nodes_.size(), 0);
  scratch(loss.i)[0] = 1.0;

  for (std::uint32_t i = loss.i + 1; i-- > 0;) {
    if (!scratch_live_[i]) continue;
    Node& n = nodes_[i];
    if (n.back) {
      n.back(*this, i);
    } else if (n.track) {
      auto [it, fresh] = leaf_grads_.try_emplace(i, n.value.shape());
      it->second.add_scaled(scratch_[i], 1.0);
    }
  }
}

void Tape::zero_grad() { leaf_grads_.clear(); }

Var Tape::affine(Var xv, Var wv, std::optional<Var> bv) {
  const Tensor& x = val(xv);
  const Tensor& w = val(wv);
  if (x.ndim() != 2 || w.ndim() != 2) throw ShapeError("affine: expects matrices");
  const std::size_t B = x.rows(), I = x.cols(), O = w.rows();
  if (w.cols() != I) throw ShapeError("affine: inner dimension mismatch");
  if (bv && (val(*bv).ndim() != 1 || val(*bv).shape()[0] != O)) {
    throw ShapeError("affine: bias length mismatch");
  }

  Tensor y({B, O});
  const double* xp = x.data();
  const double* wp = w.data();
  double* yp = y.data();
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t o = 0; o < O; ++o) {
      const double* xr = xp + b * I;
      const double* wr = wp + o * I;
      double acc = 0.0;
      for (std::size_t i = 0; i < I; ++i) acc += xr[i] * wr[i];
      yp[b * O + o] = acc;
    }
    if (bv) {
      const double* bp = val(*bv).data();
      for (std::size_t o = 0; o < O; ++o) yp[b * O + o] += bp[o];
    }
  }

  std::uint32_t xi = xv.i, wi = wv.i;
  std::optional<std::uint32_t> bi = bv ? std::optional<std::uint32_t>(bv->i) : std::nullopt;
  return push(std::move(y), [xi, wi, bi, B, I, O](Tape& t, std::uint32_t self) {
    const double* dy = t.scratch_[self].data();
    const double* xp = t.nodes_[xi].value.data();
    const double* wp = t.nodes_[wi].value.data();
    {
      double* dx = t.scratch(xi).data();
      // dx[b,i] += sum_o dy[b,o] * w[o,i]
      for (std::size_t b = 0; b < B; ++b) {
        for (std::size_t o = 0; o < O; ++o) {
          const double g = dy[b * O + o];
          if (g == 0.0) continue;
          const double* wr = wp + o * I;
          double* dxr = dx + b * I;
          for (std::size_t i = 0; i < I; ++i) dxr[i] += g * wr[i];
        }
      }
    }
    {
      double* dw = t.scratch(wi).data();
      // dw[o,i] += sum_b dy[b,o] * x[b,i]
      for (std::size_t b = 0; b < B; ++b) {
        const double* xr = xp + b * I;
        for (std::size_t o = 0; o < O; ++o) {
          const double g = dy[b * O + o];
          if (g == 0.0) continue;
          double* dwr = dw + o * I;
          for (std::size_t i = 0; i < I; ++i) dwr[i] += g * xr[i];
        }
      }
    }
    if (bi) {
      double* db = t.scratch(*bi).data();
      for (std::size_t b = 0; b < B; ++b) {
        for (std::size_t o = 0; o < O; ++o) db[o] += dy[b * O + o];
      }
    }
  });
}

// Shared skeleton for elementwise binaries with scalar broadcast.
Var Tape::add(Var a, Var b) {
  const Tensor &A = val(a), &BT = val(b);
  check_same_or_scalar(A, BT, "add");
  const bool as = A.is_scalar(), bs = BT.is_scalar();
  Tensor y(as && !bs ? BT.shape() : A.shape());
  for (std::size_t i = 0; i < y.numel(); ++i) y[i] = A[as ? 0 : i] + BT[bs ? 0 : i];
  std::uint32_t ai = a.i, bi = b.i;
  return push(std::move(y), [ai, bi, as, bs](Tape& t, std::uint32_t self) {
    const Tensor& dy = t.scratch_[self];
    Tensor& da = t.scratch(ai);
    Tensor& db = t.scratch(bi);
    for (std::size_t i = 0; i < dy.numel(); ++i) {
      da[as ? 0 : i] += dy[i];
      db[bs ? 0 : i] += dy[i];
    }
  });
}

Var Tape::sub(Var a, Var b) {
  const Tensor &A = val(a), &BT = val(b);
  check_same_or_scalar(A, BT, "sub");
  const bool as = A.is_scalar(), bs = BT.is_scalar();
  Tensor y(as && !bs ? BT.shape() : A.shape());
  for (std::size_t i = 0; i < y.numel(); ++i) y[i] = A[as ? 0 : i] - BT[bs ? 0 : i];
  std::uint32_t ai = a.i, bi = b.i;
  return push(std::move(y), [ai, bi, as, bs](Tape& t, std::uint32_t self) {
    const Tensor& dy = t.scratch_[self];
    Tensor& da = t.scratch(ai);
    Tensor& db = t.scratch(bi);
    for (std::size_t i = 0; i < dy.numel(); ++i) {
      da[as ? 0 : i] += dy[i];
      db[bs ? 0 : i] -= dy[i];
    }
  });
}

Var Tape::mul(Var a, Var b) {
  const Tensor &A = val(a), &BT = val(b);
  check_same_or_scalar(A, BT, "mul");
  const bool as = A.is_scalar(), bs = BT.is_scalar();
  Tensor y(as && !bs ? BT.shape() : A.shape());
  for (std::size_t i = 0; i < y.numel(); ++i) y[i] = A[as ? 0 : i] * BT[bs ? 0 : i];
  std::uint32_t ai = a.i, bi = b.i;
  return push(std::move(y), [ai, bi, as, bs](Tape& t, std::uint32_t self) {
    const Tensor& dy = t.scratch_[self];
    const Tensor& A = t.nodes_[ai].value;
    const Tensor& B = t.nodes_[bi].value;
    Tensor& da = t.scratch(ai);
    Tensor& db = t.scratch(bi);
    for (std::size_t i = 0; i < dy.numel(); ++i) {
      da[as ? 0 : i] += dy[i] * B[bs ? 0 : i];
      db[bs ? 0 : i] += dy[i] * A[as ? 0 : i];
    }
  });
}

Var Tape::div(Var a, Var b) {
  const Tensor &A = val(a), &BT = val(b);
  check_same_or_scalar(A, BT, "div");
  const bool as = A.is_scalar(), bs = BT.is_scalar();
  Tensor y(as && !bs ? BT.shape() : A.shape());
  for (std::size_t i = 0; i < y.numel(); ++i) y[i] = A[as ? 0 : i] / BT[bs ? 0 : i];
  std::uint32_t ai = a.i, bi = b.i;
  return push(std::move(y), [ai, bi, as, bs](Tape& t, std::uint32_t self) {
    const Tensor& dy = t.scratch_[self];
    const Tensor& A = t.nodes_[ai].value;
    const Tensor& B = t.nodes_[bi].value;
    Tensor& da = t.scratch(ai);
    Tensor& db = t.scratch(bi);
    for (std::size_t i = 0; i < dy.numel(); ++i) {
      const double bv = B[bs ? 0 : i];
      da[as ? 0 : i] += dy[i] / bv;
      db[bs ? 0 : i] -= dy[i] * A[as ? 0 : i] / (bv * bv);
    }
  });
}

Var Tape::scale(Var a, double s) {
  Tensor y = val(a);
  for (std::size_t i = 0; i < y.numel(); ++i) y[i] *= s;
  std::uint32_t ai = a.i;
  return push(std::move(y), [ai, s](Tape& t, std::uint32_t self) {
    t.scratch(ai).add_scaled(t.scratch_[self], s);
  });
}

Var Tape::add_const(Var a, double c) {
  Tensor y = val(a);
  for (std::size_t i = 0; i < y.numel(); ++i) y[i] += c;
  std::uint32_t ai = a.i;
  return push(std::move(y), [ai](Tape& t, std::uint32_t self) {
    t.scratch(ai).add_scaled(t.scratch_[self], 1.0);
  });
}

Var Tape::tanh_of(Var a) {
  Tensor y = val(a);
  for (std::size_t i = 0; i < y.numel(); ++i) y[i] = std::tanh(y[i]);
  std::uint32_t ai = a.i;
  return push(std::move(y), [ai](Tape& t, std::uint32_t self) {
    const Tensor& dy = t.scratch_[self];
    const Tensor& y = t.nodes_[self].value;
    Tensor& da = t.scratch(ai);
    for (std::size_t i = 0; i < dy.numel(); ++i) da[i] += dy[i] * (1.0 - y[i] * y[i]);
  });
}

Var Tape::exp_of(Var a) {
  Tensor y = val(a);
  for (std::size_t i = 0; i < y.numel(); ++i) y[i] = std::exp(y[i]);
  std::uint32_t ai = a.i;
  return push(std::move(y), [ai](Tape& t, std::uint32_t self) {
    const Tensor& dy = t.scratch_[self];
    const Tensor& y = t.nodes_[self].value;
    Tensor& da = t.scratch(ai);
    for (std::size_t i = 0; i < dy.numel(); ++i) da[i] += dy[i] * y[i];
  });
}

Var Tape::log_of(Var a) {
  Tensor y = val(a);
  for (std::size_t i = 0; i < y.numel(); ++i) y[i] = std::log(y[i]);
  std::uint32_t ai = a.i;
  return push(std::move(y), [ai](Tape& t, std::uint32_t self) {
    const Tensor& dy = t.scratch_[self];
    const Tensor& x = t.nodes_[ai].value;
    Tensor& da = t.scratch(ai);
    for (std::size_t i = 0; i < dy.numel(); ++i) da[i] += dy[i] / x[i];
  });
}

Var Tape::square(Var a) {
  Tensor y = val(a);
  for (std::size_t i = 0; i < y.numel(); ++i) y[i] *= y[i];
  std::uint32_t ai = a.i;
  return push(std::move(y), [ai](Tape& t, std::uint32_t self) {
    const Tensor& dy = t.scratch_[self];
    const Tensor& x = t.nodes_[ai].value;
    Tensor& da = t.scratch(ai);
    for (std::size_t i = 0; i < dy.numel(); ++i) da[i] += 2.0 * dy[i] * x[i];
  });
}

Var Tape::sum(Var a) {
  double acc = 0.0;
  for (std::size_t i = 0; i < val(a).numel(); ++i) acc += val(a)[i];
  std::uint32_t ai = a.i;
  return push(Tensor::scalar(acc), [ai](Tape& t, std::uint32_t self) {
    const double g = t.scratch_[self][0];
    Tensor& da = t.scratch(ai);
    for (std::size_t i = 0; i < da.numel(); ++i) da[i] += g;
  });
}

Var Tape::mean(Var a) {
  const std::size_t n = val(a).numel();
  if (n == 0) throw UsageError("mean: empty tensor");
  return scale(sum(a), 1.0 / static_cast<double>(n));
}

Var Tape::row_sum(Var a) {
  const Tensor& x = val(a);
  const std::size_t B = x.rows(), C = x.cols();
  Tensor y({B});
  for (std::size_t b = 0; b < B; ++b) {
    double acc = 0.0;
    for (std::size_t c = 0; c < C; ++c) acc += x.at(b, c);
    y[b] = acc;
  }
  std::uint32_t ai = a.i;
  return push(std::move(y), [ai, B, C](Tape& t, std::uint32_t self) {
    const Tensor& dy = t.scratch_[self];
    Tensor& da = t.scratch(ai);
    for (std::size_t b = 0; b < B; ++b) {
      for (std::size_t c = 0; c < C; ++c) da[b * C + c] += dy[b];
    }
  });
}

Var Tape::col_sum(Var a) {
  const Tensor& x = val(a);
  const std::size_t B = x.rows(), C = x.cols();
  Tensor y({C});
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t c = 0; c < C; ++c) y[c] += x.at(b, c);
  }
  std::uint32_t ai = a.i;
  return push(std::move(y), [ai, B, C](Tape& t, std::uint32_t self) {
    const Tensor& dy = t.scratch_[self];
    Tensor& da = t.scratch(ai);
    for (std::size_t b = 0; b < B; ++b) {
      for (std::size_t c = 0; c < C; ++c) da[b * C + c] += dy[c];
    }
  });
}

Var Tape::softmax_rows(Var a) {
  const Tensor& x = val(a);
  const std::size_t B = x.rows(), M = x.cols();
  Tensor y({B, M});
  for (std::size_t b = 0; b < B; ++b) {
    double mx = x.at(b, 0);
    for (std::size_t m = 1; m < M; ++m) mx = std::max(mx, x.at(b, m));
    double z = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
      const double e = std::exp(x.at(b, m) - mx);
      y.at(b, m) = e;
      z += e;
    }
    for (std::size_t m = 0; m < M; ++m) y.at(b, m) /= z;
  }
  std::uint32_t ai = a.i;
  return push(std::move(y), [ai, B, M](Tape& t, std::uint32_t self) {
    const Tensor& dy = t.scratch_[self];
    const Tensor& y = t.nodes_[self].value;
    Tensor& da = t.scratch(ai);
    for (std::size_t b = 0; b < B; ++b) {
      double dot = 0.0;
      for (std::size_t m = 0; m < M; ++m) dot += dy[b * M + m] * y[b * M + m];
      for (std::size_t m = 0; m < M; ++m) {
        da[b * M + m] += y[b * M + m] * (dy[b * M + m] - dot);
      }
    }
  });
}

Var Tape::normal_cdf(Var a) {
  Tensor y = val(a);
  for (std::size_t i = 0; i < y.numel(); ++i) y[i] = 0.5 * std::erfc(-y[i] * kInvSqrt2);
  std::uint32_t ai = a.i;
  return push(std::move(y), [ai](Tape& t, std::uint32_t self) {
    const Tensor& dy = t.scratch_[self];
    const Tensor& x = t.nodes_[ai].value;
    Tensor& da = t.scratch(ai);
    for (std::size_t i = 0; i < dy.numel(); ++i) {
      const double pdf = std::isinf(x[i]) ? 0.0 : kInvSqrt2Pi * std::exp(-0.5 * x[i] * x[i]);
      da[i] += dy[i] * pdf;
    }
  });
}

Var Tape::min_elem(Var a, Var b) {
  const Tensor &A = val(a), &BT = val(b);
  if (!A.same_shape(BT)) throw ShapeError("min_elem: shape mismatch");
  Tensor y(A.shape());
  for (std::size_t i = 0; i < y.numel(); ++i) y[i] = A[i] <= BT[i] ? A[i] : BT[i];
  std::uint32_t ai = a.i, bi = b.i;
  return push(std::move(y), [ai, bi](Tape& t, std::uint32_t self) {
    const Tensor& dy = t.scratch_[self];
    const Tensor& A = t.nodes_[ai].value;
    const Tensor& B = t.nodes_[bi].value;
    Tensor& da = t.scratch(ai);
    Tensor& db = t.scratch(bi);
    for (std::size_t i = 0; i < dy.numel(); ++i) {
      if (A[i] <= B[i]) {
        da[i] += dy[i];
      } else {
        db[i] += dy[i];
      }
    }
  });
}

Var Tape::max_excl_rows(Var a) {
  const Tensor& x = val(a);
  const std::size_t B = x.rows(), M = x.cols();
  Tensor y({B, M});
  auto argmax_excl = [&](std::size_t b, std::size_t m) {
    std::size_t arg = M;  // M == "none" (only when M == 1)
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < M; ++j) {
      if (j == m) continue;
      if (x.at(b, j) > best) {
        best = x.at(b, j);
        arg = j;
      }
    }
    return arg;
  };
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t m = 0; m < M; ++m) {
      const std::size_t j = argmax_excl(b, m);
      y.at(b, m) = j == M ? -std::numeric_limits<double>::infinity() : x.at(b, j);
    }
  }
  std::uint32_t ai = a.i;
  return push(std::move(y), [ai, B, M](Tape& t, std::uint32_t self) {
    const Tensor& dy = t.scratch_[self];
    const Tensor& x = t.nodes_[ai].value;
    Tensor& da = t.scratch(ai);
    for (std::size_t b = 0; b < B; ++b) {
      for (std::size_t m = 0; m < M; ++m) {
        const double g = dy[b * M + m];
        if (g == 0.0) continue;
        std::size_t arg = M;
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < M; ++j) {
          if (j == m) continue;
          if (x[b * M + j] > best) {
            best = x[b * M + j];
            arg = j;
          }
        }
        if (arg != M) da[b * M + arg] += g;
      }
    }
  });
}

Var Tape::concat_cols(Var a, Var b) {
  const Tensor &A = val(a), &BT = val(b);
  if (A.rows() != BT.rows()) throw ShapeError("concat_cols: row mismatch");
  const std::size_t B = A.rows(), C1 = A.cols(), C2 = BT.cols();
  Tensor y({B, C1 + C2});
  for (std::size_t r = 0; r < B; ++r) {
    for (std::size_t c = 0; c < C1; ++c) y.at(r, c) = A.at(r, c);
    for (std::size_t c = 0; c < C2; ++c) y.at(r, C1 + c) = BT.at(r, c);
  }
  std::uint32_t ai = a.i, bi = b.i;
  return push(std::move(y), [ai, bi, B, C1, C2](Tape& t, std::uint32_t self) {
    const Tensor& dy = t.scratch_[self];
    Tensor& da = t.scratch(ai);
    Tensor& db = t.scratch(bi);
    for (std::size_t r = 0; r < B; ++r) {
      for (std::size_t c = 0; c < C1; ++c) da[r * C1 + c] += dy[r * (C1 + C2) + c];
      for (std::size_t c = 0; c < C2; ++c) db[r * C2 + c] += dy[r * (C1 + C2) + C1 + c];
    }
  });
}

Var Tape::col(Var a, std::size_t j) {
  const Tensor& x = val(a);
  const std::size_t B = x.rows(), C = x.cols();
  if (j >= C) throw ShapeError("col: index out of range");
  Tensor y({B});
  for (std::size_t b = 0; b < B; ++b) y[b] = x.at(b, j);
  std::uint32_t ai = a.i;
  return push(std::move(y), [ai, j, B, C](Tape& t, std::uint32_t self) {
    const Tensor& dy = t.scratch_[self];
    Tensor& da = t.scratch(ai);
    for (std::size_t b = 0; b < B; ++b) da[b * C + j] += dy[b];
  });
}

Var Tape::gather_cols(Var a, std::vector<std::size_t> idx) {
  const Tensor& x = val(a);
  const std::size_t B = x.rows(), C = x.cols();
  if (idx.size() != B) throw ShapeError("gather_cols: index length mismatch");
  Tensor y({B});
  for (std::size_t b = 0; b < B; ++b) {
    if (idx[b] >= C) throw ShapeError("gather_cols: index out of range");
    y[b] = x.at(b, idx[b]);
  }
  std::uint32_t ai = a.i;
  return push(std::move(y), [ai, idx = std::move(idx), B, C](Tape& t, std::uint32_t self) {
    const Tensor& dy = t.scratch_[self];
    Tensor& da = t.scratch(ai);
    for (std::size_t b = 0; b < B; ++b) da[b * C + idx[b]] += dy[b];
  });
}

Var Tape::mul_colvec(Var a, Var v) {
  const Tensor& x = val(a);
  const Tensor& w = val(v);
  const std::size_t B = x.rows(), C = x.cols();
  if (w.ndim() != 1 || w.shape()[0] != B) throw ShapeError("mul_colvec: vector length mismatch");
  Tensor y({B, C});
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t c = 0; c < C; ++c) y.at(b, c) = x.at(b, c) * w[b];
  }
  std::uint32_t ai = a.i, vi = v.i;
  return push(std::move(y), [ai, vi, B, C](Tape& t, std::uint32_t self) {
    const Tensor& dy = t.scratch_[self];
    const Tensor& x = t.nodes_[ai].value;
    const Tensor& w = t.nodes_[vi].value;
    Tensor& da = t.scratch(ai);
    Tensor& dv = t.scratch(vi);
    for (std::size_t b = 0; b < B; ++b) {
      double acc = 0.0;
      for (std::size_t c = 0; c < C; ++c) {
        da[b * C + c] += dy[b * C + c] * w[b];
        acc += dy[b * C + c] * x[b * C + c];
      }
      dv[b] += acc;
    }
  });
}

Var Tape::select_rows_from(const std::vector<Var>& mats, std::vector<std::size_t> sel) {
  if (mats.empty()) throw UsageError("select_rows_from: no inputs");
  const std::size_t B = val(mats[0]).rows(), C = val(mats[0]).cols();
  for (Var m : mats) {
    if (val(m).rows() != B || val(m).cols() != C) {
      throw ShapeError("select_rows_from: inputs must share shape");
    }
  }
  if (sel.size() != B) throw ShapeError("select_rows_from: selector length mismatch");
  Tensor y({B, C});
  for (std::size_t b = 0; b < B; ++b) {
    if (sel[b] >= mats.size()) throw ShapeError("select_rows_from: selector out of range");
    const Tensor& src = val(mats[sel[b]]);
    for (std::size_t c = 0; c < C; ++c) y.at(b, c) = src.at(b, c);
  }
  std::vector<std::uint32_t> ids;
  ids.reserve(mats.size());
  for (Var m : mats) ids.push_back(m.i);
  return push(std::move(y),
              [ids = std::move(ids), sel = std::move(sel), B, C](Tape& t, std::uint32_t self) {
                const Tensor& dy = t.scratch_[self];
                for (std::size_t b = 0; b < B; ++b) {
                  Tensor& d = t.scratch(ids[sel[b]]);
                  for (std::size_t c = 0; c < C; ++c) d[b * C + c] += dy[b * C + c];
                }
              });
}

Var Tape::stack_select(const std::vector<Var>& vecs, std::vector<std::size_t> sel) {
  if (vecs.empty()) throw UsageError("stack_select: no inputs");
  const std::size_t C = val(vecs[0]).numel();
  for (Var v : vecs) {
    if (val(v).ndim() != 1 || val(v).numel() != C) {
      throw ShapeError("stack_select: inputs must be equal-length vectors");
    }
  }
  const std::size_t B = sel.size();
  Tensor y({B, C});
  for (std::size_t b = 0; b < B; ++b) {
    if (sel[b] >= vecs.size()) throw ShapeError("stack_select: selector out of range");
    const Tensor& src = val(vecs[sel[b]]);
    for (std::size_t c = 0; c < C; ++c) y.at(b, c) = src[c];
  }
  std::vector<std::uint32_t> ids;
  ids.reserve(vecs.size());
  for (Var v : vecs) ids.push_back(v.i);
  return push(std::move(y),
              [ids = std::move(ids), sel = std::move(sel), B, C](Tape& t, std::uint32_t self) {
                const Tensor& dy = t.scratch_[self];
                for (std::size_t b = 0; b < B; ++b) {
                  Tensor& d = t.scratch(ids[sel[b]]);
                  for (std::size_t c = 0; c < C; ++c) d[c] += dy[b * C + c];
                }
              });
}

Var Tape::gaussian_log_prob(Var x, Var mean, Var log_std) {
  const Tensor &X = val(x), &MU = val(mean), &LS = val(log_std);
  if (!X.same_shape(MU) || !X.same_shape(LS)) {
    throw ShapeError("gaussian_log_prob: shape mismatch");
  }
  if (!LS.all_finite()) throw NumericError("gaussian_log_prob: non-finite log_std");
  // log N(x; mu, e^ls) = -0.5 z^2 - ls - 0.5 log(2 pi), z = (x - mu) e^{-ls}
  constexpr double kHalfLog2Pi = 0.91893853320467274178;
  Var z = mul(sub(x, mean), exp_of(neg(log_std)));
  Var per_dim = sub(scale(square(z), -0.5), add_const(log_std, kHalfLog2Pi));
  return row_sum(per_dim);
}

Var Tape::cv_squared(Var vec, double mean_stabilizer) {
  const Tensor& v = val(vec);
  if (v.ndim() != 1) throw ShapeError("cv_squared: expects a vector");
  Var m = mean(vec);
  Var centered = sub(vec, m);
  Var variance = mean(square(centered));  // population variance
  Var denom = square(add_const(m, mean_stabilizer));
  return scale(div(variance, denom), 0.5);
}

}  // namespace moectrl::ad
