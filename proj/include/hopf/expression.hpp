#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hopf/common.hpp"

namespace hopf {

/// Complex arithmetic expression over named variables. Grammar: numbers,
/// variables, the constants i and pi, + - * / ^, parentheses and the functions
/// conj sech sinh cosh tanh sqrt exp log sin cos.
class Expression {
 public:
  /// Throws a configuration error on syntax errors or unknown identifiers.
  static Expression parse(const std::string& text, std::vector<std::string> variables);

  /// Values bound positionally to the variables given to parse.
  cplx eval(std::span<const cplx> values) const;
  cplx operator()(std::initializer_list<cplx> values) const {
    return eval(std::span<const cplx>(values.begin(), values.size()));
  }

  const std::string& text() const noexcept { return text_; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace hopf
