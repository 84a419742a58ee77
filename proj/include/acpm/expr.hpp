#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "acpm/types.hpp"

namespace acpm::expr {

enum class Var { s, x, y, z };

enum class Func { sin, cos, tan, sinh, cosh, exp, ln, sqrt, abs, sgn };

/// Values for the free variables of an expression. Unbound variables are an error at
/// evaluation time.
struct Bindings {
  std::optional<double> s, x, y, z;

  static Bindings at_parameter(double s) { return Bindings{s, {}, {}, {}}; }
  static Bindings at_point(const Point& p) { return Bindings{{}, p.x(), p.y(), p.z()}; }
};

struct Node;

/// Immutable scalar expression over s, x, y, z.
///
/// Grammar (standard precedence, `^` right-associative and binding tighter than unary minus):
///   expr  := term (('+' | '-') term)*
///   term  := unary (('*' | '/') unary)*
///   unary := ('-' | '+') unary | power
///   power := primary ('^' unary)?
///   primary := number | variable | func '(' expr ')' | '(' expr ')'
///
/// `sgn` is accepted so that printed derivatives of `abs` parse back.
class Expr {
 public:
  Expr();  // the constant 0
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  static Expr constant(double value);
  static Expr variable(Var v);

  double eval(const Bindings& b) const;
  std::string str() const;
  bool depends_on(Var v) const;
  bool is_constant() const;
  std::optional<double> constant_value() const;

  const Node& node() const { return *node_; }

 private:
  std::shared_ptr<const Node> node_;
};

Expr parse(std::string_view text);

/// Exact symbolic derivative. Only constant folding and trivial identities (x+0, x*1, x*0)
/// are applied, so the result may be larger than a hand-simplified form.
Expr differentiate(const Expr& e, Var v);

inline double eval(const Expr& e, const Bindings& b) { return e.eval(b); }
inline std::string to_string(const Expr& e) { return e.str(); }

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, const Expr& exponent);
Expr call(Func f, const Expr& arg);

const char* var_name(Var v);
std::optional<Var> var_from_name(std::string_view name);

}  // namespace acpm::expr
