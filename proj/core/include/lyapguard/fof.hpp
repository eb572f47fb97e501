// TPTP fof conjectures for the stability monitor: a small arithmetic AST,
// canonical renderer, parser for the emitted subset, and the emitter that
// instantiates the V' < 0 obligation at a measured error state.
#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lyapguard/controller.hpp"
#include "lyapguard/dynamics.hpp"
#include "lyapguard/errors.hpp"
#include "lyapguard/lyapunov.hpp"
#include "lyapguard/polynomial.hpp"

namespace lyapguard {

/// Arithmetic term. Group records explicit parentheses so text round-trips.
struct Expr {
  enum class Kind { Number, Variable, Call, Neg, Binary, Power, Group };

  Kind kind = Kind::Number;
  double number = 0.0;     // Number
  std::string name;        // Variable, Call (abs, sqrt, sin, cos)
  char op = 0;             // Binary: + - * /
  int exponent = 0;        // Power
  std::vector<Expr> args;  // children

  static Expr num(double value);  // negative values become Neg(num(|value|))
  static Expr var(std::string name);
  static Expr call(std::string fn, Expr arg);
  static Expr neg(Expr arg);
  static Expr binary(char op, Expr lhs, Expr rhs);
  static Expr power(Expr base, int exponent);
  static Expr group(Expr inner);

  bool operator==(const Expr&) const = default;
};

enum class RelOp { Eq, Lt, Le, Gt, Ge };

std::string_view to_string(RelOp op);

struct Atom {
  Expr lhs;
  RelOp op = RelOp::Lt;
  Expr rhs;

  bool operator==(const Atom&) const = default;
};

struct FofConjecture {
  std::string name;
  std::vector<std::string> universal_vars;
  std::vector<std::string> existential_vars;
  /// Hypotheses as rendered lines; all atoms are conjoined.
  std::vector<std::vector<Atom>> hypotheses;
  Atom conclusion;

  std::vector<Atom> hypothesis_atoms() const;

  bool operator==(const FofConjecture&) const = default;
};

/// Shortest round-trip decimal in fixed notation (never an exponent).
std::string format_decimal(double value);

std::string render_expr(const Expr& e);
std::string render_atom(const Atom& a);
std::string render(const FofConjecture& conj);

/// Parse failure with 1-based position of the offending token.
class FofParseError : public Error {
 public:
  enum class Kind { Lexical, Syntax, UnboundVariable };
  FofParseError(Kind kind, std::size_t line, std::size_t column, const std::string& message);

  Kind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  Kind kind_;
  std::size_t line_;
  std::size_t column_;
};

FofConjecture parse(std::string_view text);

using Environment = std::map<std::string, double, std::less<>>;

/// Throws InvalidArgument on an unbound variable or unknown function.
double evaluate(const Expr& e, const Environment& env);
bool evaluate(const Atom& a, const Environment& env);

/// Symbolic pieces of V' with E, V, Delta_E and sin/cos(Phi, Theta) free:
///   quadratic = -E^T P E + 2 s^T V,  coupling = 2 s^T J^{-1}(Phi, Theta) s,
///   norm_sq = s^T s,                 s = B^T Q E.
struct VdotPolynomial {
  Polynomial quadratic;
  Polynomial coupling;
  Polynomial norm_sq;
};

VdotPolynomial vdot_polynomial(const LyapunovCert& cert, const PlantParams& plant);

/// Outside the boundary layer:
///   quadratic - Delta_E*(coupling)/sqrt(norm_sq) < 0
/// Inside: quadratic - (1/sigma) Delta_E coupling < 0, one polynomial.
Atom conclusion_atom(const VdotPolynomial& vdot, Branch branch, double sigma);

/// Relation for |Phi|, |Theta| in the conjecture hypotheses.
inline constexpr double kFofAngleBound = 1.5708;

FofConjecture emit_conjecture(const RobustBounds& bounds, const VBoundTemplate& tmpl,
                              const Vec6& E, const VdotPolynomial& vdot,
                              const std::string& name, Branch branch);

/// Default conjecture names: Stability_Eq15 (Outside), Stability_Eq16 (BoundaryLayer).
std::string default_conjecture_name(Branch branch);

}  // namespace lyapguard
