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

#ifndef SNAKECR_PARSER_HPP_
#define SNAKECR_PARSER_HPP_

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "snakecr/trig_expr.hpp"

namespace snakecr {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Raw syntax tree, kept so the unsimplified expression can be evaluated
// directly.
struct ExprNode {
  enum class Kind { kNumber, kSymbol, kNeg, kAdd, kSub, kMul, kDiv, kPow, kSin, kCos };
  Kind kind;
  std::size_t position = 0;
  mpz_class number;
  std::string symbol;
  int exponent = 0;
  std::vector<std::unique_ptr<ExprNode>> children;
};

std::unique_ptr<ExprNode> ParseTree(std::string_view text);
TrigExpr Lower(const ExprNode& node);
double EvalTree(const ExprNode& node, const NumericPoint& p);

// Grammar: rationals, s1|s2|s3, variable names, + - * / ^ (integer powers),
// sin(...), cos(...) with integer-linear angle arguments.
TrigExpr Parse(std::string_view text);
ParamField ParseParam(std::string_view text);

}  // namespace snakecr

#endif  // SNAKECR_PARSER_HPP_
