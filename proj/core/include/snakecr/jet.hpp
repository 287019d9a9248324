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

#ifndef SNAKECR_JET_HPP_
#define SNAKECR_JET_HPP_

#include <complex>
#include <memory>
#include <vector>

namespace snakecr {

// Monomial tables for truncated Taylor series in n variables up to a total
// degree.
class JetSpace {
 public:
  JetSpace(int vars, int order);
  static std::shared_ptr<const JetSpace> Get(int vars, int order);

  int vars() const { return vars_; }
  int order() const { return order_; }
  int size() const { return static_cast<int>(exps_.size()); }
  const std::vector<int>& exponents(int i) const { return exps_[i]; }
  int degree(int i) const { return degree_[i]; }
  int Index(const std::vector<int>& e) const;  // -1 beyond the order
  int Unit(int var) const { return unit_[var]; }

  struct Product {
    int a, b, out;
  };
  const std::vector<Product>& products() const { return products_; }
  // derivative[var][i] = (index of e - unit(var), factor), index -1 if absent
  const std::vector<std::pair<int, int>>& derivative(int var) const { return derivative_[var]; }

 private:
  int vars_;
  int order_;
  std::vector<std::vector<int>> exps_;
  std::vector<int> degree_;
  std::vector<int> unit_;
  std::vector<Product> products_;
  std::vector<std::vector<std::pair<int, int>>> derivative_;
};

// Complex-valued truncated Taylor series of a function of real variables.
class Jet {
 public:
  using Complex = std::complex<double>;

  Jet() = default;
  Jet(std::shared_ptr<const JetSpace> space, Complex value = 0.0);
  static Jet Variable(std::shared_ptr<const JetSpace> space, int var, double value);

  const std::shared_ptr<const JetSpace>& space() const { return space_; }
  // Degrees above valid() are not trustworthy (after differentiation).
  int valid() const { return valid_; }
  Complex value() const { return c_.empty() ? Complex(0) : c_[0]; }
  Complex coeff(int i) const { return c_[i]; }
  Complex& coeff(int i) { return c_[i]; }
  int size() const { return static_cast<int>(c_.size()); }
  // First partial derivative at the base point.
  Complex Partial(int var) const { return c_[space_->Unit(var)]; }

  Jet operator-() const;
  Jet& operator+=(const Jet& b);
  Jet& operator-=(const Jet& b);
  Jet& operator*=(Complex s);
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator*(Complex s, Jet a) { return a *= s; }
  friend Jet operator*(Jet a, Complex s) { return a *= s; }
  friend Jet operator/(const Jet& a, const Jet& b) { return a * b.Inverse(); }

  Jet Conj() const;
  Jet Inverse() const;
  Jet Cos() const;  // for real-valued jets
  Jet Sin() const;
  Jet Differentiate(int var) const;
  Jet Truncate(int order) const;  // drops degrees above order, keeps the space
  double MaxAbs() const;

 private:
  // f(value + u) from the derivatives f^(k)(value), k = 0..order.
  Jet Compose(const std::vector<Complex>& derivs) const;

  std::shared_ptr<const JetSpace> space_;
  std::vector<Complex> c_;
  int valid_ = 0;
};

inline Jet Conj(const Jet& j) { return j.Conj(); }

}  // namespace snakecr

#endif  // SNAKECR_JET_HPP_
