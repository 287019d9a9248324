// Copyright 2026 The snakecr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "snakecr/param_matrix.hpp"

#include <stdexcept>

namespace snakecr {

ParamMatrix ParamMatrix::Identity(int n) {
  ParamMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = ParamField(1);
  return m;
}

namespace {
void CheckSame(const ParamMatrix& a, const ParamMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("matrix shape mismatch");
}
}  // namespace

ParamMatrix operator+(const ParamMatrix& a, const ParamMatrix& b) {
  CheckSame(a, b);
  ParamMatrix r = a;
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) r(i, j) += b(i, j);
  }
  return r;
}

ParamMatrix operator-(const ParamMatrix& a, const ParamMatrix& b) { return a + (-b); }

ParamMatrix ParamMatrix::operator-() const {
  ParamMatrix r = *this;
  for (auto& e : r.a_) e = -e;
  return r;
}

ParamMatrix operator*(const ParamMatrix& a, const ParamMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix shape mismatch");
  ParamMatrix r(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = 0; k < a.cols(); ++k) {
      if (a(i, k).IsZero()) continue;
      for (int j = 0; j < b.cols(); ++j) {
        if (!b(k, j).IsZero()) r(i, j) += a(i, k) * b(k, j);
      }
    }
  }
  return r;
}

ParamMatrix operator*(const ParamField& s, const ParamMatrix& a) {
  ParamMatrix r = a;
  for (auto& e : r.a_) e = s * e;
  return r;
}

bool ParamMatrix::IsZero() const {
  for (const auto& e : a_) {
    if (!e.IsZero()) return false;
  }
  return true;
}

ParamMatrix ParamMatrix::Transpose() const {
  ParamMatrix r(cols_, rows_);
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
  }
  return r;
}

std::vector<std::vector<double>> ParamMatrix::Eval(const std::array<double, kNumParams>& s) const {
  std::vector<std::vector<double>> out(rows_, std::vector<double>(cols_));
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) out[i][j] = (*this)(i, j).Eval(s);
  }
  return out;
}

RowEchelon Rref(ParamMatrix m) {
  RowEchelon out;
  const int rows = m.rows(), cols = m.cols();
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int best = -1;
    for (int i = r; i < rows; ++i) {
      if (m(i, c).IsZero()) continue;
      if (best < 0 || m(i, c).Size() < m(best, c).Size()) best = i;
    }
    if (best < 0) continue;
    if (best != r) {
      for (int j = 0; j < cols; ++j) std::swap(m(r, j), m(best, j));
    }
    const ParamField inv = m(r, c).Inverse();
    for (int j = c; j < cols; ++j) {
      if (!m(r, j).IsZero()) m(r, j) *= inv;
    }
    for (int i = 0; i < rows; ++i) {
      if (i == r || m(i, c).IsZero()) continue;
      const ParamField f = m(i, c);
      for (int j = c; j < cols; ++j) {
        if (!m(r, j).IsZero()) m(i, j) -= f * m(r, j);
      }
    }
    out.pivots.push_back(c);
    ++r;
  }
  out.reduced = ParamMatrix(r, cols);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < cols; ++j) out.reduced(i, j) = m(i, j);
  }
  return out;
}

std::vector<std::vector<ParamField>> Nullspace(const ParamMatrix& m) {
  RowEchelon e = Rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (int p : e.pivots) is_pivot[p] = true;
  std::vector<std::vector<ParamField>> basis;
  for (int f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    std::vector<ParamField> v(m.cols());
    v[f] = ParamField(1);
    for (std::size_t i = 0; i < e.pivots.size(); ++i) v[e.pivots[i]] = -e.reduced(static_cast<int>(i), f);
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<AffineSolution> SolveAffine(const ParamMatrix& m, const std::vector<ParamField>& b) {
  ParamMatrix aug(m.rows(), m.cols() + 1);
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
    aug(i, m.cols()) = b[i];
  }
  RowEchelon e = Rref(aug);
  AffineSolution s;
  s.particular.assign(m.cols(), ParamField());
  for (std::size_t i = 0; i < e.pivots.size(); ++i) {
    if (e.pivots[i] == m.cols()) return std::nullopt;
    s.particular[e.pivots[i]] = e.reduced(static_cast<int>(i), m.cols());
  }
  s.directions = Nullspace(m);
  return s;
}

}  // namespace snakecr
