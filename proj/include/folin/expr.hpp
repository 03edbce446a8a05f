#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "folin/error.hpp"
#include "folin/jet.hpp"

namespace folin {

enum class NodeKind { kConstant, kVariable, kNegate, kAdd, kSub, kMul, kDiv, kPow, kCall };

enum class Function { kSin, kCos, kExp, kLog, kSqrt, kAbs };

std::string_view function_name(Function fn);

/// Immutable expression tree. Copies share nodes.
class Expr {
 public:
  struct Node {
    NodeKind kind = NodeKind::kConstant;
    double value = 0.0;        // kConstant
    std::string name;          // kVariable
    unsigned exponent = 0;     // kPow
    Function function{};       // kCall
    std::vector<Expr> children;
  };

  static Expr constant(double value);
  static Expr variable(std::string name);
  static Expr negate(Expr operand);
  static Expr binary(NodeKind kind, Expr lhs, Expr rhs);
  static Expr power(Expr base, unsigned exponent);
  static Expr call(Function fn, Expr argument);

  const Node& node() const { return *node_; }
  NodeKind kind() const { return node_->kind; }
  const std::vector<Expr>& children() const { return node_->children; }

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Parses the expression grammar documented in docs/grammar.md.
/// Throws ParseError carrying the byte offset of the first bad token.
Expr parse(std::string_view text);

/// Fully parenthesized text that parses back to a structurally equal tree.
std::string to_string(const Expr& expr);

std::set<std::string> free_vars(const Expr& expr);

/// Throws InputError naming the first variable (in reading order) outside `allowed`.
void validate(const Expr& expr, const std::set<std::string>& allowed);

/// Replaces variables by expressions; unmapped variables are kept.
Expr substitute(const Expr& expr, const std::map<std::string, Expr>& replacements);

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Per-field primitives used by the evaluator.
template <typename Scalar>
struct ScalarOps;

template <>
struct ScalarOps<double> {
  static double constant(double v, const double&) { return v; }
  static double divide(double a, double b) {
    if (b == 0.0) throw DomainError("division by zero");
    return a / b;
  }
  static double log(double x) {
    if (!(x > 0.0)) throw DomainError("log of non-positive value");
    return std::log(x);
  }
  static double sqrt(double x) {
    if (x < 0.0) throw DomainError("sqrt of negative value");
    return std::sqrt(x);
  }
  static double sin(double x) { return std::sin(x); }
  static double cos(double x) { return std::cos(x); }
  static double exp(double x) { return std::exp(x); }
  static double abs(double x) { return std::abs(x); }
};

template <>
struct ScalarOps<Jet> {
  static Jet constant(double v, const Jet& like) { return Jet(like.order(), v); }
  static Jet divide(const Jet& a, const Jet& b) { return a / b; }
  static Jet log(const Jet& x) { return folin::log(x); }
  static Jet sqrt(const Jet& x) { return folin::sqrt(x); }
  static Jet sin(const Jet& x) { return folin::sin(x); }
  static Jet cos(const Jet& x) { return folin::cos(x); }
  static Jet exp(const Jet& x) { return folin::exp(x); }
  static Jet abs(const Jet& x) { return folin::abs(x); }
};

/// Postfix form of an expression with variables resolved to slots or folded constants.
class Program {
 public:
  enum class Op { kConst, kSlot, kNeg, kAdd, kSub, kMul, kDiv, kPow, kSin, kCos, kExp, kLog, kSqrt, kAbs };
  struct Instruction {
    Op op;
    double value = 0.0;
    std::size_t slot = 0;
    unsigned exponent = 0;
  };

  Program() = default;

  /// `slots` maps names to input positions; `constants` binds the remaining names.
  /// Throws InputError for a name found in neither.
  static Program compile(const Expr& expr, const std::map<std::string, std::size_t>& slots,
                         const std::map<std::string, double>& constants = {});

  template <typename Scalar>
  Scalar operator()(std::span<const Scalar> inputs, const Scalar& prototype) const;

  double operator()(std::span<const double> inputs) const { return (*this)(inputs, 0.0); }

  std::size_t max_depth() const noexcept { return max_depth_; }

 private:
  std::vector<Instruction> code_;
  std::size_t max_depth_ = 0;
};

template <typename Scalar>
Scalar Program::operator()(std::span<const Scalar> inputs, const Scalar& prototype) const {
  using Ops = ScalarOps<Scalar>;
  std::vector<Scalar> stack;
  stack.reserve(max_depth_);
  for (const Instruction& ins : code_) {
    switch (ins.op) {
      case Op::kConst:
        stack.push_back(Ops::constant(ins.value, prototype));
        break;
      case Op::kSlot:
        stack.push_back(inputs[ins.slot]);
        break;
      case Op::kNeg:
        stack.back() = -stack.back();
        break;
      case Op::kPow: {
        const Scalar base = stack.back();
        Scalar acc = Ops::constant(1.0, base);
        for (unsigned i = 0; i < ins.exponent; ++i) acc = acc * base;
        stack.back() = acc;
        break;
      }
      case Op::kSin: stack.back() = Ops::sin(stack.back()); break;
      case Op::kCos: stack.back() = Ops::cos(stack.back()); break;
      case Op::kExp: stack.back() = Ops::exp(stack.back()); break;
      case Op::kLog: stack.back() = Ops::log(stack.back()); break;
      case Op::kSqrt: stack.back() = Ops::sqrt(stack.back()); break;
      case Op::kAbs: stack.back() = Ops::abs(stack.back()); break;
      default: {
        Scalar rhs = std::move(stack.back());
        stack.pop_back();
        Scalar& lhs = stack.back();
        switch (ins.op) {
          case Op::kAdd: lhs = lhs + rhs; break;
          case Op::kSub: lhs = lhs - rhs; break;
          case Op::kMul: lhs = lhs * rhs; break;
          case Op::kDiv: lhs = Ops::divide(lhs, rhs); break;
          default: break;
        }
      }
    }
  }
  return stack.back();
}

/// Ordered name -> value binding.
template <typename Scalar>
struct EvalContext {
  std::vector<std::pair<std::string, Scalar>> bindings;

  EvalContext& bind(std::string name, Scalar value) {
    bindings.emplace_back(std::move(name), std::move(value));
    return *this;
  }
};

/// One-shot evaluation. `prototype` fixes the jet order of literal constants.
template <typename Scalar>
Scalar eval(const Expr& expr, const EvalContext<Scalar>& ctx, const Scalar& prototype = Scalar{}) {
  std::map<std::string, std::size_t> slots;
  std::vector<Scalar> values;
  for (const auto& [name, value] : ctx.bindings) {
    if (!slots.emplace(name, values.size()).second) {
      throw InputError("variable '" + name + "' bound twice");
    }
    values.push_back(value);
  }
  const Program program = Program::compile(expr, slots);
  const Scalar& like = values.empty() ? prototype : values.front();
  return program(std::span<const Scalar>(values), like);
}

}  // namespace folin
