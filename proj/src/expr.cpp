#include "phhs/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

namespace phhs {

namespace {

std::string join(const std::vector<std::string> &items) {
  std::string s;
  for (size_t i = 0; i < items.size(); ++i) s += (i ? ", " : "") + items[i];
  return s;
}

}  // namespace

ParseError::ParseError(size_t off, std::vector<std::string> exp, const std::string &what)
    : Error("ParseError", what + " at byte " + std::to_string(off) + " (expected " + join(exp) + ")"),
      offset(off),
      expected(std::move(exp)) {}

struct Expression::Node {
  enum Kind { Number, Var, Neg, Add, Sub, Mul, Div, Pow, IntPow, Func } kind;
  double number = 0;
  int index = 0;  // variable slot, integer exponent, or function id
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

const std::vector<std::string> kFunctions = {"exp", "sin", "cos", "sqrt", "conj"};

NodePtr make(Node::Kind k, NodePtr a = {}, NodePtr b = {}) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class Parser {
public:
  Parser(std::string_view src, const std::vector<std::string> &vars) : s_(src), vars_(vars) {}

  NodePtr run() {
    NodePtr e = expr();
    skip();
    if (pos_ < s_.size()) fail("unexpected character", after_operand());
    return e;
  }

private:
  std::string_view s_;
  const std::vector<std::string> &vars_;
  size_t pos_ = 0;
  int depth_ = 0;

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  std::vector<std::string> operand_start() const {
    return {"number", "identifier", "'('", "'-'", "'+'"};
  }
  std::vector<std::string> after_operand() const {
    std::vector<std::string> e = {"'+'", "'-'", "'*'", "'/'", "'^'"};
    e.push_back(depth_ > 0 ? "')'" : "end of input");
    return e;
  }

  [[noreturn]] void fail(const std::string &what, std::vector<std::string> expected) {
    throw ParseError(pos_, std::move(expected), what);
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (peek('+')) {
        ++pos_;
        lhs = make(Node::Add, lhs, term());
      } else if (peek('-')) {
        ++pos_;
        lhs = make(Node::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (peek('*')) {
        ++pos_;
        lhs = make(Node::Mul, lhs, unary());
      } else if (peek('/')) {
        ++pos_;
        lhs = make(Node::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (peek('-')) {
      ++pos_;
      return make(Node::Neg, unary());
    }
    if (peek('+')) {
      ++pos_;
      return unary();
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (!peek('^')) return base;
    ++pos_;
    NodePtr ex = unary();
    if (ex->kind == Node::Number && ex->number == std::round(ex->number) && std::abs(ex->number) <= 64) {
      auto n = std::make_shared<Node>();
      n->kind = Node::IntPow;
      n->index = int(ex->number);
      n->a = base;
      return n;
    }
    return make(Node::Pow, base, ex);
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input", operand_start());
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    if (c == '(') {
      ++pos_;
      ++depth_;
      NodePtr e = expr();
      if (!peek(')')) fail("missing ')'", after_operand());
      ++pos_;
      --depth_;
      return e;
    }
    fail("unexpected character", operand_start());
  }

  NodePtr number() {
    const size_t start = pos_;
    auto digits = [&] {
      size_t k = 0;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_, ++k;
      return k;
    };
    size_t count = digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      count += digits();
    }
    if (count == 0) fail("malformed number", {"digit"});
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (digits() == 0) fail("malformed exponent", {"digit"});
    }
    auto n = std::make_shared<Node>();
    n->kind = Node::Number;
    n->number = std::stod(std::string(s_.substr(start, pos_ - start)));
    return n;
  }

  NodePtr identifier() {
    const size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    const std::string name(s_.substr(start, pos_ - start));
    auto fn = std::find(kFunctions.begin(), kFunctions.end(), name);
    if (fn != kFunctions.end()) {
      if (!peek('(')) fail("function needs '('", {"'('"});
      ++pos_;
      ++depth_;
      NodePtr arg = expr();
      if (!peek(')')) fail("missing ')'", after_operand());
      ++pos_;
      --depth_;
      auto n = std::make_shared<Node>();
      n->kind = Node::Func;
      n->index = int(fn - kFunctions.begin());
      n->a = arg;
      return n;
    }
    auto v = std::find(vars_.begin(), vars_.end(), name);
    if (v == vars_.end()) {
      pos_ = start;
      std::vector<std::string> expected = vars_;
      expected.insert(expected.end(), kFunctions.begin(), kFunctions.end());
      fail("unknown identifier '" + name + "'", expected);
    }
    auto n = std::make_shared<Node>();
    n->kind = Node::Var;
    n->index = int(v - vars_.begin());
    return n;
  }
};

template <class T>
T conj_of(const T &v) {
  if constexpr (std::is_same_v<T, double>)
    return v;
  else
    return std::conj(v);
}

template <class T>
T ipow(T base, int e) {
  if (e < 0) return T(1) / ipow(base, -e);
  T r(1);
  while (e) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

template <class T>
T eval_node(const Node &n, std::span<const T> v) {
  switch (n.kind) {
    case Node::Number: return T(n.number);
    case Node::Var: return v[n.index];
    case Node::Neg: return -eval_node(*n.a, v);
    case Node::Add: return eval_node(*n.a, v) + eval_node(*n.b, v);
    case Node::Sub: return eval_node(*n.a, v) - eval_node(*n.b, v);
    case Node::Mul: return eval_node(*n.a, v) * eval_node(*n.b, v);
    case Node::Div: return eval_node(*n.a, v) / eval_node(*n.b, v);
    case Node::Pow: return std::pow(eval_node(*n.a, v), eval_node(*n.b, v));
    case Node::IntPow: return ipow(eval_node(*n.a, v), n.index);
    case Node::Func: {
      const T x = eval_node(*n.a, v);
      switch (n.index) {
        case 0: return std::exp(x);
        case 1: return std::sin(x);
        case 2: return std::cos(x);
        case 3: return std::sqrt(x);
        default: return conj_of(x);
      }
    }
  }
  return T(0);
}

bool node_uses(const Node &n, int var) {
  if (n.kind == Node::Var) return n.index == var;
  return (n.a && node_uses(*n.a, var)) || (n.b && node_uses(*n.b, var));
}

}  // namespace

Expression Expression::parse(std::string_view source, const std::vector<std::string> &variables) {
  Expression e;
  e.source_ = std::string(source);
  e.variables_ = variables;
  e.root_ = Parser(e.source_, e.variables_).run();
  return e;
}

template <class T>
T Expression::eval(std::span<const T> vars) const {
  if (!root_) return T(0);
  return eval_node<T>(*root_, vars);
}

template double Expression::eval<double>(std::span<const double>) const;
template cplx Expression::eval<cplx>(std::span<const cplx>) const;

bool Expression::uses(int variable) const { return root_ && node_uses(*root_, variable); }

std::vector<std::string> real_variables(int m) {
  std::vector<std::string> v;
  for (int j = 1; j <= m; ++j) v.push_back("x" + std::to_string(j));
  for (int j = 1; j <= m; ++j) v.push_back("y" + std::to_string(j));
  return v;
}

ComplexVariables complex_variables(int m, bool qp_aliases) {
  ComplexVariables cv;
  for (int j = 0; j < m; ++j) {
    cv.names.push_back("z" + std::to_string(j + 1));
    cv.slot.push_back(j);
  }
  if (qp_aliases && m % 2 == 0) {
    const int n = m / 2;
    for (int j = 0; j < n; ++j) {
      cv.names.push_back("Q" + std::to_string(j + 1));
      cv.slot.push_back(j);
    }
    for (int j = 0; j < n; ++j) {
      cv.names.push_back("P" + std::to_string(j + 1));
      cv.slot.push_back(n + j);
    }
    if (n == 1) {
      cv.names.push_back("Q");
      cv.slot.push_back(0);
      cv.names.push_back("P");
      cv.slot.push_back(1);
    }
  }
  return cv;
}

cplx eval_complex(const Expression &e, const ComplexVariables &vars, const Point &p) {
  const int m = int(p.size() / 2);
  std::vector<cplx> v(vars.names.size());
  for (size_t k = 0; k < v.size(); ++k) {
    const int j = vars.slot[k];
    v[k] = (j < m) ? cplx(p[j], p[m + j]) : cplx(0, 0);
  }
  return e.eval<cplx>(std::span<const cplx>(v));
}

}  // namespace phhs
