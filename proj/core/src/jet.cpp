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

#include "snakecr/jet.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>

namespace snakecr {

JetSpace::JetSpace(int vars, int order) : vars_(vars), order_(order) {
  // Enumerate exponents by degree, then lexicographically.
  std::vector<int> e(vars, 0);
  for (int d = 0; d <= order; ++d) {
    std::vector<std::vector<int>> level;
    std::function<void(int, int)> rec = [&](int pos, int left) {
      if (pos == vars - 1) {
        e[pos] = left;
        level.push_back(e);
        return;
      }
      for (int k = left; k >= 0; --k) {
        e[pos] = k;
        rec(pos + 1, left - k);
      }
    };
    if (vars == 0) {
      if (d == 0) level.push_back({});
    } else {
      rec(0, d);
    }
    for (auto& x : level) {
      exps_.push_back(x);
      degree_.push_back(d);
    }
  }
  unit_.assign(vars, -1);
  for (int v = 0; v < vars; ++v) {
    std::vector<int> u(vars, 0);
    u[v] = 1;
    unit_[v] = Index(u);
  }
  for (int a = 0; a < size(); ++a) {
    for (int b = 0; b < size(); ++b) {
      if (degree_[a] + degree_[b] > order) continue;
      std::vector<int> s(vars);
      for (int v = 0; v < vars; ++v) s[v] = exps_[a][v] + exps_[b][v];
      products_.push_back({a, b, Index(s)});
    }
  }
  derivative_.resize(vars);
  for (int v = 0; v < vars; ++v) {
    for (int i = 0; i < size(); ++i) {
      if (exps_[i][v] == 0) {
        derivative_[v].push_back({-1, 0});
        continue;
      }
      std::vector<int> s = exps_[i];
      --s[v];
      derivative_[v].push_back({Index(s), exps_[i][v]});
    }
  }
}

int JetSpace::Index(const std::vector<int>& e) const {
  auto it = std::find(exps_.begin(), exps_.end(), e);
  return it == exps_.end() ? -1 : static_cast<int>(it - exps_.begin());
}

std::shared_ptr<const JetSpace> JetSpace::Get(int vars, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const JetSpace>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& s = cache[{vars, order}];
  if (!s) s = std::make_shared<JetSpace>(vars, order);
  return s;
}

Jet::Jet(std::shared_ptr<const JetSpace> space, Complex value)
    : space_(std::move(space)), c_(space_->size()), valid_(space_->order()) {
  c_[0] = value;
}

Jet Jet::Variable(std::shared_ptr<const JetSpace> space, int var, double value) {
  Jet j(space, value);
  if (space->order() > 0) j.c_[space->Unit(var)] = 1.0;
  return j;
}

Jet Jet::operator-() const {
  Jet r = *this;
  for (auto& x : r.c_) x = -x;
  return r;
}

Jet& Jet::operator+=(const Jet& b) {
  if (!space_) return *this = b;
  if (!b.space_) return *this;
  for (int i = 0; i < size(); ++i) c_[i] += b.c_[i];
  valid_ = std::min(valid_, b.valid_);
  return *this;
}

Jet& Jet::operator-=(const Jet& b) { return *this += -b; }

Jet& Jet::operator*=(Complex s) {
  for (auto& x : c_) x *= s;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  if (!a.space_ || !b.space_) return a.space_ ? Jet(a.space_) : Jet(b.space_ ? b.space_ : nullptr);
  Jet r(a.space_);
  r.c_[0] = 0;
  for (const auto& p : a.space_->products()) r.c_[p.out] += a.c_[p.a] * b.c_[p.b];
  r.valid_ = std::min(a.valid_, b.valid_);
  return r;
}

Jet Jet::Conj() const {
  Jet r = *this;
  for (auto& x : r.c_) x = std::conj(x);
  return r;
}

Jet Jet::Compose(const std::vector<Complex>& derivs) const {
  // sum_k f^(k)(c0) u^k / k!, u = this - c0
  Jet u = *this;
  u.c_[0] = 0;
  Jet r(space_, derivs[0]);
  Jet power(space_, 1.0);
  double fact = 1;
  for (int k = 1; k <= space_->order(); ++k) {
    power = power * u;
    fact *= k;
    r += (derivs[k] / fact) * power;
  }
  r.valid_ = valid_;
  return r;
}

Jet Jet::Inverse() const {
  const Complex c = value();
  if (std::abs(c) == 0) throw std::domain_error("jet inverse of a vanishing value");
  std::vector<Complex> d(space_->order() + 1);
  Complex p = 1.0 / c;
  for (int k = 0; k <= space_->order(); ++k) {
    d[k] = p;
    p *= -static_cast<double>(k + 1) / c;
  }
  return Compose(d);
}

Jet Jet::Cos() const {
  const Complex c = value();
  std::vector<Complex> d(space_->order() + 1);
  for (int k = 0; k <= space_->order(); ++k) {
    switch (k % 4) {
      case 0: d[k] = std::cos(c); break;
      case 1: d[k] = -std::sin(c); break;
      case 2: d[k] = -std::cos(c); break;
      default: d[k] = std::sin(c); break;
    }
  }
  return Compose(d);
}

Jet Jet::Sin() const {
  const Complex c = value();
  std::vector<Complex> d(space_->order() + 1);
  for (int k = 0; k <= space_->order(); ++k) {
    switch (k % 4) {
      case 0: d[k] = std::sin(c); break;
      case 1: d[k] = std::cos(c); break;
      case 2: d[k] = -std::sin(c); break;
      default: d[k] = -std::cos(c); break;
    }
  }
  return Compose(d);
}

Jet Jet::Differentiate(int var) const {
  Jet r(space_);
  r.c_[0] = 0;
  const auto& table = space_->derivative(var);
  for (int i = 0; i < size(); ++i) {
    if (table[i].first >= 0) r.c_[table[i].first] += static_cast<double>(table[i].second) * c_[i];
  }
  r.valid_ = std::max(0, valid_ - 1);
  return r;
}

Jet Jet::Truncate(int order) const {
  Jet r = *this;
  for (int i = 0; i < size(); ++i) {
    if (space_->degree(i) > order) r.c_[i] = 0;
  }
  r.valid_ = std::min(valid_, order);
  return r;
}

double Jet::MaxAbs() const {
  double m = 0;
  for (const auto& x : c_) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace snakecr
