#include "folin/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>

namespace folin {

std::string_view function_name(Function fn) {
  switch (fn) {
    case Function::kSin: return "sin";
    case Function::kCos: return "cos";
    case Function::kExp: return "exp";
    case Function::kLog: return "log";
    case Function::kSqrt: return "sqrt";
    case Function::kAbs: return "abs";
  }
  return "?";
}

namespace {

std::optional<Function> lookup_function(std::string_view name) {
  for (Function fn : {Function::kSin, Function::kCos, Function::kExp, Function::kLog, Function::kSqrt,
                      Function::kAbs}) {
    if (function_name(fn) == name) return fn;
  }
  return std::nullopt;
}

}  // namespace

Expr Expr::constant(double value) {
  Node n;
  n.kind = NodeKind::kConstant;
  n.value = value;
  return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::variable(std::string name) {
  Node n;
  n.kind = NodeKind::kVariable;
  n.name = std::move(name);
  return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::negate(Expr operand) {
  Node n;
  n.kind = NodeKind::kNegate;
  n.children.push_back(std::move(operand));
  return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::binary(NodeKind kind, Expr lhs, Expr rhs) {
  if (kind != NodeKind::kAdd && kind != NodeKind::kSub && kind != NodeKind::kMul && kind != NodeKind::kDiv) {
    throw InputError("not a binary operator kind");
  }
  Node n;
  n.kind = kind;
  n.children.push_back(std::move(lhs));
  n.children.push_back(std::move(rhs));
  return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::power(Expr base, unsigned exponent) {
  Node n;
  n.kind = NodeKind::kPow;
  n.exponent = exponent;
  n.children.push_back(std::move(base));
  return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::call(Function fn, Expr argument) {
  Node n;
  n.kind = NodeKind::kCall;
  n.function = fn;
  n.children.push_back(std::move(argument));
  return Expr(std::make_shared<const Node>(std::move(n)));
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const Expr::Node& x = *a.node_;
  const Expr::Node& y = *b.node_;
  if (x.kind != y.kind || x.children.size() != y.children.size()) return false;
  switch (x.kind) {
    case NodeKind::kConstant:
      if (x.value != y.value) return false;
      break;
    case NodeKind::kVariable:
      if (x.name != y.name) return false;
      break;
    case NodeKind::kPow:
      if (x.exponent != y.exponent) return false;
      break;
    case NodeKind::kCall:
      if (x.function != y.function) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < x.children.size(); ++i) {
    if (!(x.children[i] == y.children[i])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

enum class TokenKind { kNumber, kIdent, kPlus, kMinus, kStar, kSlash, kCaret, kLParen, kRParen, kEnd };

struct Token {
  TokenKind kind;
  std::size_t offset;
  std::string_view text;
  double number = 0.0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::size_t start = pos_;
    if (pos_ >= text_.size()) return {TokenKind::kEnd, start, {}};
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number(start);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      return {TokenKind::kIdent, start, text_.substr(start, pos_ - start)};
    }
    ++pos_;
    switch (c) {
      case '+': return {TokenKind::kPlus, start, text_.substr(start, 1)};
      case '-': return {TokenKind::kMinus, start, text_.substr(start, 1)};
      case '*': return {TokenKind::kStar, start, text_.substr(start, 1)};
      case '/': return {TokenKind::kSlash, start, text_.substr(start, 1)};
      case '^': return {TokenKind::kCaret, start, text_.substr(start, 1)};
      case '(': return {TokenKind::kLParen, start, text_.substr(start, 1)};
      case ')': return {TokenKind::kRParen, start, text_.substr(start, 1)};
      default: break;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", start);
  }

 private:
  Token number(std::size_t start) {
    auto digits = [&] {
      std::size_t count = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++count;
      }
      return count;
    };
    std::size_t mantissa = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) throw ParseError("malformed number", start);
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      const std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) throw ParseError("malformed exponent", save);
    }
    const std::string_view lexeme = text_.substr(start, pos_ - start);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(lexeme.data(), lexeme.data() + lexeme.size(), value);
    if (ec != std::errc() || ptr != lexeme.data() + lexeme.size()) {
      throw ParseError("number out of range", start);
    }
    return {TokenKind::kNumber, start, lexeme, value};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// expr   := term (('+' | '-') term)*
// term   := unary (('*' | '/') unary)*
// unary  := ('-' | '+') unary | power
// power  := primary ('^' unary)?
// primary:= number | ident | ident '(' expr ')' | '(' expr ')'
class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text) { advance(); }

  Expr parse_all() {
    if (current_.kind == TokenKind::kEnd) throw ParseError("empty expression", current_.offset);
    Expr e = expr();
    if (current_.kind != TokenKind::kEnd) throw unexpected();
    return e;
  }

 private:
  void advance() { current_ = lexer_.next(); }

  ParseError unexpected() const {
    if (current_.kind == TokenKind::kEnd) return ParseError("unexpected end of input", current_.offset);
    return ParseError("unexpected token '" + std::string(current_.text) + "'", current_.offset);
  }

  Expr expr() {
    Expr lhs = term();
    while (current_.kind == TokenKind::kPlus || current_.kind == TokenKind::kMinus) {
      const NodeKind kind = current_.kind == TokenKind::kPlus ? NodeKind::kAdd : NodeKind::kSub;
      advance();
      lhs = Expr::binary(kind, std::move(lhs), term());
    }
    return lhs;
  }

  Expr term() {
    Expr lhs = unary();
    while (current_.kind == TokenKind::kStar || current_.kind == TokenKind::kSlash) {
      const NodeKind kind = current_.kind == TokenKind::kStar ? NodeKind::kMul : NodeKind::kDiv;
      advance();
      lhs = Expr::binary(kind, std::move(lhs), unary());
    }
    return lhs;
  }

  Expr unary() {
    if (current_.kind == TokenKind::kMinus) {
      advance();
      return Expr::negate(unary());
    }
    if (current_.kind == TokenKind::kPlus) {
      advance();
      return unary();
    }
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (current_.kind != TokenKind::kCaret) return base;
    advance();
    const std::size_t exponent_offset = current_.offset;
    const Expr exponent = unary();
    return Expr::power(std::move(base), fold_exponent(exponent, exponent_offset));
  }

  // Exponents must reduce to a non-negative integer at parse time.
  static unsigned fold_exponent(const Expr& e, std::size_t offset) {
    if (!free_vars(e).empty()) throw ParseError("exponent must be a constant integer", offset);
    double value = 0.0;
    try {
      value = Program::compile(e, {})(std::span<const double>{});
    } catch (const DomainError&) {
      throw ParseError("exponent is not a finite number", offset);
    }
    if (!(value >= 0.0) || value != std::floor(value) || value > 1.0e6) {
      throw ParseError("exponent must be a non-negative integer", offset);
    }
    return static_cast<unsigned>(value);
  }

  Expr primary() {
    switch (current_.kind) {
      case TokenKind::kNumber: {
        const double v = current_.number;
        advance();
        return Expr::constant(v);
      }
      case TokenKind::kIdent: {
        const Token ident = current_;
        advance();
        if (current_.kind != TokenKind::kLParen) return Expr::variable(std::string(ident.text));
        const auto fn = lookup_function(ident.text);
        if (!fn) throw ParseError("unknown function '" + std::string(ident.text) + "'", ident.offset);
        advance();
        Expr arg = expr();
        expect_rparen();
        return Expr::call(*fn, std::move(arg));
      }
      case TokenKind::kLParen: {
        advance();
        Expr inner = expr();
        expect_rparen();
        return inner;
      }
      default:
        throw unexpected();
    }
  }

  void expect_rparen() {
    if (current_.kind != TokenKind::kRParen) throw unexpected();
    advance();
  }

  Lexer lexer_;
  Token current_{TokenKind::kEnd, 0, {}};
};

}  // namespace

Expr parse(std::string_view text) { return Parser(text).parse_all(); }

// ---------------------------------------------------------------------------
// Printing, variables, substitution
// ---------------------------------------------------------------------------

namespace {

void print(const Expr& e, std::string& out) {
  const Expr::Node& n = e.node();
  switch (n.kind) {
    case NodeKind::kConstant: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      return;
    }
    case NodeKind::kVariable:
      out += n.name;
      return;
    case NodeKind::kNegate:
      out += "(-";
      print(n.children[0], out);
      out += ')';
      return;
    case NodeKind::kPow:
      out += '(';
      print(n.children[0], out);
      out += '^';
      out += std::to_string(n.exponent);
      out += ')';
      return;
    case NodeKind::kCall:
      out += function_name(n.function);
      out += '(';
      print(n.children[0], out);
      out += ')';
      return;
    default: {
      const char op = n.kind == NodeKind::kAdd   ? '+'
                      : n.kind == NodeKind::kSub ? '-'
                      : n.kind == NodeKind::kMul ? '*'
                                                 : '/';
      out += '(';
      print(n.children[0], out);
      out += ' ';
      out += op;
      out += ' ';
      print(n.children[1], out);
      out += ')';
    }
  }
}

void collect(const Expr& e, std::vector<std::string>& names) {
  if (e.kind() == NodeKind::kVariable) {
    names.push_back(e.node().name);
    return;
  }
  for (const Expr& c : e.children()) collect(c, names);
}

}  // namespace

std::string to_string(const Expr& expr) {
  std::string out;
  print(expr, out);
  return out;
}

std::set<std::string> free_vars(const Expr& expr) {
  std::vector<std::string> names;
  collect(expr, names);
  return {names.begin(), names.end()};
}

void validate(const Expr& expr, const std::set<std::string>& allowed) {
  std::vector<std::string> names;
  collect(expr, names);
  for (const std::string& name : names) {
    if (!allowed.contains(name)) throw InputError("unknown variable '" + name + "'");
  }
}

Expr substitute(const Expr& expr, const std::map<std::string, Expr>& replacements) {
  const Expr::Node& n = expr.node();
  switch (n.kind) {
    case NodeKind::kConstant:
      return expr;
    case NodeKind::kVariable: {
      const auto it = replacements.find(n.name);
      return it == replacements.end() ? expr : it->second;
    }
    case NodeKind::kNegate:
      return Expr::negate(substitute(n.children[0], replacements));
    case NodeKind::kPow:
      return Expr::power(substitute(n.children[0], replacements), n.exponent);
    case NodeKind::kCall:
      return Expr::call(n.function, substitute(n.children[0], replacements));
    default:
      return Expr::binary(n.kind, substitute(n.children[0], replacements),
                          substitute(n.children[1], replacements));
  }
}

// ---------------------------------------------------------------------------
// Compilation
// ---------------------------------------------------------------------------

namespace {

struct Compiler {
  const std::map<std::string, std::size_t>& slots;
  const std::map<std::string, double>& constants;
  std::vector<Program::Instruction> code;
  std::size_t depth = 0;
  std::size_t max_depth = 0;

  void push(Program::Instruction ins) {
    code.push_back(ins);
    if (ins.op == Program::Op::kConst || ins.op == Program::Op::kSlot) {
      max_depth = std::max(max_depth, ++depth);
    } else if (ins.op == Program::Op::kAdd || ins.op == Program::Op::kSub || ins.op == Program::Op::kMul ||
               ins.op == Program::Op::kDiv) {
      --depth;
    }
  }

  void emit(const Expr& e) {
    using Op = Program::Op;
    const Expr::Node& n = e.node();
    switch (n.kind) {
      case NodeKind::kConstant:
        push({Op::kConst, n.value});
        return;
      case NodeKind::kVariable: {
        if (const auto it = slots.find(n.name); it != slots.end()) {
          push({Op::kSlot, 0.0, it->second});
        } else if (const auto c = constants.find(n.name); c != constants.end()) {
          push({Op::kConst, c->second});
        } else {
          throw InputError("unbound variable '" + n.name + "'");
        }
        return;
      }
      case NodeKind::kNegate:
        emit(n.children[0]);
        push({Op::kNeg});
        return;
      case NodeKind::kPow:
        emit(n.children[0]);
        push({Op::kPow, 0.0, 0, n.exponent});
        return;
      case NodeKind::kCall: {
        emit(n.children[0]);
        static constexpr Op kOps[] = {Op::kSin, Op::kCos, Op::kExp, Op::kLog, Op::kSqrt, Op::kAbs};
        push({kOps[static_cast<int>(n.function)]});
        return;
      }
      default: {
        emit(n.children[0]);
        emit(n.children[1]);
        const Op op = n.kind == NodeKind::kAdd   ? Op::kAdd
                      : n.kind == NodeKind::kSub ? Op::kSub
                      : n.kind == NodeKind::kMul ? Op::kMul
                                                 : Op::kDiv;
        push({op});
      }
    }
  }
};

}  // namespace

Program Program::compile(const Expr& expr, const std::map<std::string, std::size_t>& slots,
                         const std::map<std::string, double>& constants) {
  Compiler c{slots, constants, {}};
  c.emit(expr);
  Program p;
  p.code_ = std::move(c.code);
  p.max_depth_ = c.max_depth;
  return p;
}

}  // namespace folin
