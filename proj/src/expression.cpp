#include "hopf/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace hopf {

struct Expression::Node {
  enum class Kind { constant, variable, negate, add, sub, mul, div, pow, call } kind;
  cplx value = 0.0;
  int index = 0;  // variable slot or function id
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

enum Function { f_conj, f_sech, f_sinh, f_cosh, f_tanh, f_sqrt, f_exp, f_log, f_sin, f_cos };

constexpr const char* kFunctionNames[] = {"conj", "sech", "sinh", "cosh", "tanh",
                                          "sqrt", "exp",  "log",  "sin",  "cos"};

cplx integer_power(cplx base, long exponent) {
  if (exponent < 0) return 1.0 / integer_power(base, -exponent);
  cplx result = 1.0;
  while (exponent > 0) {
    if (exponent & 1) result *= base;
    base *= base;
    exponent >>= 1;
  }
  return result;
}

cplx apply(int f, cplx z) {
  switch (f) {
    case f_conj: return std::conj(z);
    case f_sech: return 1.0 / std::cosh(z);
    case f_sinh: return std::sinh(z);
    case f_cosh: return std::cosh(z);
    case f_tanh: return std::tanh(z);
    case f_sqrt: return std::sqrt(z);
    case f_exp: return std::exp(z);
    case f_log: return std::log(z);
    case f_sin: return std::sin(z);
    case f_cos: return std::cos(z);
  }
  return z;
}

cplx evaluate(const Node& n, std::span<const cplx> values) {
  switch (n.kind) {
    case Node::Kind::constant: return n.value;
    case Node::Kind::variable: return values[n.index];
    case Node::Kind::negate: return -evaluate(*n.lhs, values);
    case Node::Kind::add: return evaluate(*n.lhs, values) + evaluate(*n.rhs, values);
    case Node::Kind::sub: return evaluate(*n.lhs, values) - evaluate(*n.rhs, values);
    case Node::Kind::mul: return evaluate(*n.lhs, values) * evaluate(*n.rhs, values);
    case Node::Kind::div: return evaluate(*n.lhs, values) / evaluate(*n.rhs, values);
    case Node::Kind::pow: {
      const cplx base = evaluate(*n.lhs, values);
      const cplx e = evaluate(*n.rhs, values);
      if (e.imag() == 0.0 && e.real() == std::round(e.real()) && std::abs(e.real()) <= 64.0) {
        return integer_power(base, static_cast<long>(e.real()));
      }
      return std::pow(base, e);
    }
    case Node::Kind::call: return apply(n.index, evaluate(*n.lhs, values));
  }
  return 0.0;
}

class Parser {
 public:
  Parser(const std::string& text, const std::vector<std::string>& variables)
      : text_(text), variables_(variables) {}

  NodePtr parse() {
    NodePtr root = expr();
    skip();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::configuration, "expression \"" + text_ + "\": " + what +
                                              " at position " + std::to_string(pos_));
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static NodePtr make(Node::Kind kind, NodePtr lhs, NodePtr rhs = nullptr, int index = 0) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    n->index = index;
    return n;
  }

  static NodePtr constant(cplx v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::constant;
    n->value = v;
    return n;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Node::Kind::add, lhs, term());
      } else if (accept('-')) {
        lhs = make(Node::Kind::sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Node::Kind::mul, lhs, unary());
      } else if (accept('/')) {
        lhs = make(Node::Kind::div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Node::Kind::negate, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Node::Kind::pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end");
    const char c = text_[pos_];
    if (accept('(')) {
      NodePtr inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = text_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      return constant(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      const std::string name = text_.substr(start, pos_ - start);
      for (std::size_t v = 0; v < variables_.size(); ++v) {
        if (variables_[v] == name) {
          auto n = std::make_shared<Node>();
          n->kind = Node::Kind::variable;
          n->index = static_cast<int>(v);
          return n;
        }
      }
      if (name == "i") return constant(cplx(0.0, 1.0));
      if (name == "pi") return constant(std::acos(-1.0));
      for (int f = 0; f < static_cast<int>(std::size(kFunctionNames)); ++f) {
        if (name == kFunctionNames[f]) {
          if (!accept('(')) fail("expected '(' after " + name);
          NodePtr arg = expr();
          if (!accept(')')) fail("expected ')'");
          return make(Node::Kind::call, arg, nullptr, f);
        }
      }
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& text_;
  const std::vector<std::string>& variables_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text, std::vector<std::string> variables) {
  Expression e;
  e.text_ = text;
  e.root_ = Parser(text, variables).parse();
  return e;
}

cplx Expression::eval(std::span<const cplx> values) const { return evaluate(*root_, values); }

}  // namespace hopf
