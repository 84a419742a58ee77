#include "acpm/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <variant>

#include "acpm/errors.hpp"

namespace acpm::expr {

enum class Op { add, sub, mul, div, pow };

struct Constant {
  double value;
};
struct Variable {
  Var var;
};
struct Negate {
  Expr arg;
};
struct Binary {
  Op op;
  Expr lhs, rhs;
};
struct Call {
  Func func;
  Expr arg;
};

struct Node {
  std::variant<Constant, Variable, Negate, Binary, Call> data;
};

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Expr make(auto&& payload) { return Expr(std::make_shared<const Node>(Node{std::forward<decltype(payload)>(payload)})); }

struct FuncName {
  Func func;
  const char* name;
};
constexpr FuncName kFunctions[] = {
    {Func::sin, "sin"},   {Func::cos, "cos"}, {Func::tan, "tan"},   {Func::sinh, "sinh"}, {Func::cosh, "cosh"},
    {Func::exp, "exp"},   {Func::ln, "ln"},   {Func::sqrt, "sqrt"}, {Func::abs, "abs"},   {Func::sgn, "sgn"},
};

const char* func_name(Func f) {
  for (const auto& entry : kFunctions)
    if (entry.func == f) return entry.name;
  return "?";
}

std::optional<Func> func_from_name(std::string_view name) {
  for (const auto& entry : kFunctions)
    if (name == entry.name) return entry.func;
  return std::nullopt;
}

// Precedence used by the printer: + − 1, * / 2, unary − 3, ^ 4, atoms 5.
int precedence(const Node& n) {
  return std::visit(Overloaded{
                        [](const Constant& c) { return c.value < 0 ? 3 : 5; },
                        [](const Variable&) { return 5; },
                        [](const Negate&) { return 3; },
                        [](const Binary& b) {
                          switch (b.op) {
                            case Op::add:
                            case Op::sub: return 1;
                            case Op::mul:
                            case Op::div: return 2;
                            case Op::pow: return 4;
                          }
                          return 0;
                        },
                        [](const Call&) { return 5; },
                    },
                    n.data);
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Shortest form that round-trips exactly.
  for (int digits = 1; digits < 17; ++digits) {
    char trial[40];
    std::snprintf(trial, sizeof trial, "%.*g", digits, v);
    if (std::strtod(trial, nullptr) == v) return trial;
  }
  return buf;
}

std::string print(const Node& n);

std::string wrap(const Expr& child, bool parens) {
  std::string inner = print(child.node());
  return parens ? "(" + inner + ")" : inner;
}

std::string print(const Node& n) {
  return std::visit(Overloaded{
                        [](const Constant& c) { return format_number(c.value); },
                        [](const Variable& v) { return std::string(var_name(v.var)); },
                        [](const Negate& neg) { return "-" + wrap(neg.arg, precedence(neg.arg.node()) < 4); },
                        [&n](const Binary& b) {
                          const int p = precedence(n);
                          const int lp = precedence(b.lhs.node());
                          const int rp = precedence(b.rhs.node());
                          const char* sym = "+";
                          bool left_parens = lp < p;
                          bool right_parens = rp < p;
                          switch (b.op) {
                            case Op::add: sym = "+"; break;
                            case Op::sub: sym = "-"; right_parens = rp <= p; break;
                            case Op::mul: sym = "*"; break;
                            case Op::div: sym = "/"; right_parens = rp <= p; break;
                            case Op::pow:
                              sym = "^";
                              left_parens = lp <= p;
                              right_parens = rp < p;
                              break;
                          }
                          return wrap(b.lhs, left_parens) + sym + wrap(b.rhs, right_parens);
                        },
                        [](const Call& c) { return std::string(func_name(c.func)) + "(" + print(c.arg.node()) + ")"; },
                    },
                    n.data);
}

[[noreturn]] void domain_failure(const std::string& what, const Node& where) {
  throw DomainError(what + " in '" + print(where) + "'");
}

double checked(double value, const Node& where) {
  if (!std::isfinite(value)) domain_failure("non-finite result", where);
  return value;
}

double evaluate(const Node& n, const Bindings& b) {
  return std::visit(
      Overloaded{
          [](const Constant& c) { return c.value; },
          [&b](const Variable& v) {
            const std::optional<double>* slot = nullptr;
            switch (v.var) {
              case Var::s: slot = &b.s; break;
              case Var::x: slot = &b.x; break;
              case Var::y: slot = &b.y; break;
              case Var::z: slot = &b.z; break;
            }
            if (!slot->has_value()) throw ValidationError(std::string("unbound variable '") + var_name(v.var) + "'");
            return **slot;
          },
          [&b](const Negate& neg) { return -evaluate(neg.arg.node(), b); },
          [&b, &n](const Binary& bin) {
            const double l = evaluate(bin.lhs.node(), b);
            const double r = evaluate(bin.rhs.node(), b);
            switch (bin.op) {
              case Op::add: return l + r;
              case Op::sub: return l - r;
              case Op::mul: return l * r;
              case Op::div:
                if (r == 0.0) domain_failure("division by zero", n);
                return checked(l / r, n);
              case Op::pow: {
                const bool integral = std::nearbyint(r) == r;
                if (!integral && l < 0.0) domain_failure("non-integer power of a negative base", n);
                if (l == 0.0 && r < 0.0) domain_failure("negative power of zero", n);
                return checked(std::pow(l, r), n);
              }
            }
            return 0.0;
          },
          [&b, &n](const Call& c) {
            const double a = evaluate(c.arg.node(), b);
            switch (c.func) {
              case Func::sin: return std::sin(a);
              case Func::cos: return std::cos(a);
              case Func::tan: return checked(std::tan(a), n);
              case Func::sinh: return checked(std::sinh(a), n);
              case Func::cosh: return checked(std::cosh(a), n);
              case Func::exp: return checked(std::exp(a), n);
              case Func::ln:
                if (a <= 0.0) domain_failure("logarithm of a non-positive value", n);
                return std::log(a);
              case Func::sqrt:
                if (a < 0.0) domain_failure("square root of a negative value", n);
                return std::sqrt(a);
              case Func::abs: return std::abs(a);
              case Func::sgn:
                if (a == 0.0) domain_failure("derivative of abs at a zero of its argument", n);
                return a > 0.0 ? 1.0 : -1.0;
            }
            return 0.0;
          },
      },
      n.data);
}

bool depends(const Node& n, Var v) {
  return std::visit(Overloaded{
                        [](const Constant&) { return false; },
                        [v](const Variable& var) { return var.var == v; },
                        [v](const Negate& neg) { return depends(neg.arg.node(), v); },
                        [v](const Binary& b) { return depends(b.lhs.node(), v) || depends(b.rhs.node(), v); },
                        [v](const Call& c) { return depends(c.arg.node(), v); },
                    },
                    n.data);
}

bool has_variables(const Node& n) {
  return depends(n, Var::s) || depends(n, Var::x) || depends(n, Var::y) || depends(n, Var::z);
}

// ---------------------------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse_all() {
    skip();
    if (pos_ >= text_.size()) throw ParseError("empty expression", pos_);
    Expr e = parse_expr();
    skip();
    if (pos_ < text_.size()) throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return e;
  }

 private:
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

  Expr parse_expr() {
    Expr lhs = parse_term();
    while (true) {
      if (accept('+'))
        lhs = make(Binary{Op::add, lhs, parse_term()});
      else if (accept('-'))
        lhs = make(Binary{Op::sub, lhs, parse_term()});
      else
        return lhs;
    }
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    while (true) {
      if (accept('*'))
        lhs = make(Binary{Op::mul, lhs, parse_unary()});
      else if (accept('/'))
        lhs = make(Binary{Op::div, lhs, parse_unary()});
      else
        return lhs;
    }
  }

  Expr parse_unary() {
    if (accept('-')) return make(Negate{parse_unary()});
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (accept('^')) return make(Binary{Op::pow, base, parse_unary()});
    return base;
  }

  Expr parse_primary() {
    skip();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = parse_expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      const std::string_view name = text_.substr(start, pos_ - start);
      if (auto v = var_from_name(name)) return make(Variable{*v});
      if (auto f = func_from_name(name)) {
        if (!accept('(')) throw ParseError("expected '(' after function '" + std::string(name) + "'", pos_);
        Expr arg = parse_expr();
        if (!accept(')')) throw ParseError("expected ')'", pos_);
        return make(Call{*f, arg});
      }
      throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    }
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t probe = pos_ + 1;
      if (probe < text_.size() && (text_[probe] == '+' || text_[probe] == '-')) ++probe;
      if (probe < text_.size() && std::isdigit(static_cast<unsigned char>(text_[probe]))) {
        pos_ = probe;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    const std::string token(text_.substr(start, pos_ - start));
    char* end = nullptr;
    const double value = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size()) throw ParseError("malformed number '" + token + "'", start);
    return Expr::constant(value);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------------------------
// Differentiation

Expr derive(const Expr& e, Var v) {
  if (!depends(e.node(), v)) return Expr::constant(0.0);
  return std::visit(
      Overloaded{
          [](const Constant&) { return Expr::constant(0.0); },
          [v](const Variable& var) { return Expr::constant(var.var == v ? 1.0 : 0.0); },
          [v](const Negate& neg) { return -derive(neg.arg, v); },
          [v, &e](const Binary& b) -> Expr {
            const Expr& f = b.lhs;
            const Expr& g = b.rhs;
            switch (b.op) {
              case Op::add: return derive(f, v) + derive(g, v);
              case Op::sub: return derive(f, v) - derive(g, v);
              case Op::mul: return derive(f, v) * g + f * derive(g, v);
              case Op::div: return (derive(f, v) * g - f * derive(g, v)) / pow(g, Expr::constant(2.0));
              case Op::pow:
                if (!depends(g.node(), v)) return g * pow(f, g - Expr::constant(1.0)) * derive(f, v);
                // f^g (g' ln f + g f'/f)
                return e * (derive(g, v) * call(Func::ln, f) + g * derive(f, v) / f);
            }
            return Expr::constant(0.0);
          },
          [v](const Call& c) -> Expr {
            const Expr& u = c.arg;
            const Expr du = derive(u, v);
            switch (c.func) {
              case Func::sin: return call(Func::cos, u) * du;
              case Func::cos: return -(call(Func::sin, u) * du);
              case Func::tan: return du / pow(call(Func::cos, u), Expr::constant(2.0));
              case Func::sinh: return call(Func::cosh, u) * du;
              case Func::cosh: return call(Func::sinh, u) * du;
              case Func::exp: return call(Func::exp, u) * du;
              case Func::ln: return du / u;
              case Func::sqrt: return du / (Expr::constant(2.0) * call(Func::sqrt, u));
              case Func::abs: return call(Func::sgn, u) * du;
              case Func::sgn: return Expr::constant(0.0);
            }
            return Expr::constant(0.0);
          },
      },
      e.node().data);
}

Expr fold_if_constant(const Expr& e) {
  if (has_variables(e.node())) return e;
  try {
    const double value = e.eval(Bindings{});
    return Expr::constant(value);
  } catch (const DomainError&) {
    return e;  // leave for evaluation to report
  }
}

}  // namespace

// ---------------------------------------------------------------------------------------------

Expr::Expr() : Expr(constant(0.0)) {}

Expr Expr::constant(double value) { return make(Constant{value}); }
Expr Expr::variable(Var v) { return make(Variable{v}); }

double Expr::eval(const Bindings& b) const { return evaluate(*node_, b); }
std::string Expr::str() const { return print(*node_); }
bool Expr::depends_on(Var v) const { return depends(*node_, v); }
bool Expr::is_constant() const { return std::holds_alternative<Constant>(node_->data); }

std::optional<double> Expr::constant_value() const {
  if (const auto* c = std::get_if<Constant>(&node_->data)) return c->value;
  return std::nullopt;
}

Expr parse(std::string_view text) { return Parser(text).parse_all(); }

Expr differentiate(const Expr& e, Var v) { return derive(e, v); }

Expr operator+(const Expr& a, const Expr& b) {
  if (a.constant_value() == 0.0) return b;
  if (b.constant_value() == 0.0) return a;
  return fold_if_constant(make(Binary{Op::add, a, b}));
}

Expr operator-(const Expr& a, const Expr& b) {
  if (b.constant_value() == 0.0) return a;
  if (a.constant_value() == 0.0) return -b;
  return fold_if_constant(make(Binary{Op::sub, a, b}));
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.constant_value() == 0.0 || b.constant_value() == 0.0) return Expr::constant(0.0);
  if (a.constant_value() == 1.0) return b;
  if (b.constant_value() == 1.0) return a;
  return fold_if_constant(make(Binary{Op::mul, a, b}));
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.constant_value() == 1.0) return a;
  if (a.constant_value() == 0.0 && b.constant_value() != 0.0) return Expr::constant(0.0);
  return fold_if_constant(make(Binary{Op::div, a, b}));
}

Expr operator-(const Expr& a) {
  if (auto c = a.constant_value()) return Expr::constant(-*c);
  if (const auto* neg = std::get_if<Negate>(&a.node().data)) return neg->arg;
  return make(Negate{a});
}

Expr pow(const Expr& base, const Expr& exponent) {
  if (exponent.constant_value() == 1.0) return base;
  if (exponent.constant_value() == 0.0) return Expr::constant(1.0);
  return fold_if_constant(make(Binary{Op::pow, base, exponent}));
}

Expr call(Func f, const Expr& arg) { return fold_if_constant(make(Call{f, arg})); }

const char* var_name(Var v) {
  switch (v) {
    case Var::s: return "s";
    case Var::x: return "x";
    case Var::y: return "y";
    case Var::z: return "z";
  }
  return "?";
}

std::optional<Var> var_from_name(std::string_view name) {
  if (name == "s") return Var::s;
  if (name == "x") return Var::x;
  if (name == "y") return Var::y;
  if (name == "z") return Var::z;
  return std::nullopt;
}

}  // namespace acpm::expr
