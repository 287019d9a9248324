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

#ifndef SNAKECR_PARAM_MATRIX_HPP_
#define SNAKECR_PARAM_MATRIX_HPP_

#include <optional>
#include <vector>

#include "snakecr/param_field.hpp"

namespace snakecr {

// Dense matrix over the field of rational functions in s1, s2, s3.
class ParamMatrix {
 public:
  ParamMatrix() = default;
  ParamMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols) {}
  static ParamMatrix Identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const ParamField& operator()(int r, int c) const { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
  ParamField& operator()(int r, int c) { return a_[static_cast<std::size_t>(r) * cols_ + c]; }

  friend ParamMatrix operator+(const ParamMatrix& a, const ParamMatrix& b);
  friend ParamMatrix operator-(const ParamMatrix& a, const ParamMatrix& b);
  friend ParamMatrix operator*(const ParamMatrix& a, const ParamMatrix& b);
  friend ParamMatrix operator*(const ParamField& s, const ParamMatrix& a);
  ParamMatrix operator-() const;
  friend bool operator==(const ParamMatrix&, const ParamMatrix&) = default;

  bool IsZero() const;
  ParamMatrix Transpose() const;
  std::vector<std::vector<double>> Eval(const std::array<double, kNumParams>& s) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<ParamField> a_;
};

struct RowEchelon {
  ParamMatrix reduced;      // reduced row echelon form, zero rows dropped
  std::vector<int> pivots;  // pivot column of each row
};

// Gauss-Jordan elimination; pivots on the smallest nonzero entry.
RowEchelon Rref(ParamMatrix m);

// Basis of {v : m v = 0}, one column per vector.
std::vector<std::vector<ParamField>> Nullspace(const ParamMatrix& m);

// One solution of m v = b with the free variables set to zero, plus a
// nullspace basis; nullopt when inconsistent.
struct AffineSolution {
  std::vector<ParamField> particular;
  std::vector<std::vector<ParamField>> directions;
};
std::optional<AffineSolution> SolveAffine(const ParamMatrix& m, const std::vector<ParamField>& b);

}  // namespace snakecr

#endif  // SNAKECR_PARAM_MATRIX_HPP_
