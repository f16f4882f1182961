#pragma once

#include "phhs/core.hpp"

#include <memory>
#include <span>
#include <string_view>

namespace phhs {

struct ParseError : Error {
  ParseError(size_t offset, std::vector<std::string> expected, const std::string &what);
  size_t offset;
  std::vector<std::string> expected;
};

/// Arithmetic over named variables.
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('-' | '+') unary | power
///   power   := primary ('^' unary)?
///   primary := number | identifier | func '(' expr ')' | '(' expr ')'
///
/// Functions: exp, sin, cos, sqrt, conj (identity on reals).
class Expression {
public:
  Expression() = default;

  static Expression parse(std::string_view source, const std::vector<std::string> &variables);

  template <class T>
  T eval(std::span<const T> vars) const;

  double operator()(const Point &p) const {
    return eval<double>(std::span<const double>(p.data(), size_t(p.size())));
  }

  const std::string &source() const { return source_; }
  const std::vector<std::string> &variables() const { return variables_; }
  bool uses(int variable) const;

  struct Node;

private:
  std::string source_;
  std::vector<std::string> variables_;
  std::shared_ptr<const Node> root_;
};

/// x1..xm, y1..ym.
std::vector<std::string> real_variables(int m);

/// Complex names for C^m bound as z_j = x_j + i y_j; with m = 2n also Q1..Qn, P1..Pn.
struct ComplexVariables {
  std::vector<std::string> names;
  std::vector<int> slot;  ///< complex coordinate behind each name
};
ComplexVariables complex_variables(int m, bool qp_aliases);

/// Evaluates a complex expression at the real point p.
cplx eval_complex(const Expression &e, const ComplexVariables &vars, const Point &p);

}  // namespace phhs
