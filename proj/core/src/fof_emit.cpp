#include <array>
#include <cmath>
#include <optional>
#include <string>

#include "lyapguard/fof.hpp"

namespace lyapguard {
namespace {

// Relative cut for coefficients that are floating-point residue of Q.
constexpr double kPruneRel = 1e-12;

Polynomial sym(Symbol s, int power = 1) { return Polynomial::symbol(s, power); }

// J^{-1} = W^{-1} M^{-1} W^{-T} with entries as Laurent monomials in
// sin/cos of Phi and Theta.
std::array<std::array<Polynomial, 3>, 3> symbolic_j_inverse(const PlantParams& plant) {
  const Polynomial one = Polynomial::constant(1.0);
  const Polynomial sp = sym(Symbol::SinPhi);
  const Polynomial cp = sym(Symbol::CosPhi);
  const Polynomial st = sym(Symbol::SinTheta);
  const Polynomial sec = sym(Symbol::CosTheta, -1);

  std::array<std::array<Polynomial, 3>, 3> w_inv;
  w_inv[0] = {one, sp * st * sec, cp * st * sec};
  w_inv[1] = {Polynomial{}, cp, -1.0 * sp};
  w_inv[2] = {Polynomial{}, sp * sec, cp * sec};

  const Vec3 m_inv = plant.body_inertia.cwiseInverse();
  std::array<std::array<Polynomial, 3>, 3> j_inv;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Polynomial acc;
      for (int k = 0; k < 3; ++k) acc += m_inv(k) * (w_inv[i][k] * w_inv[j][k]);
      j_inv[i][j] = acc;
    }
  }
  return j_inv;
}

Expr factor_expr(Symbol s) {
  switch (s) {
    case Symbol::SinPhi: return Expr::call("sin", Expr::var("Phi"));
    case Symbol::CosPhi: return Expr::call("cos", Expr::var("Phi"));
    case Symbol::SinTheta: return Expr::call("sin", Expr::var("Theta"));
    case Symbol::CosTheta: return Expr::call("cos", Expr::var("Theta"));
    default: return Expr::var(symbol_text(s));
  }
}

Expr raised(Symbol s, int power) {
  Expr f = factor_expr(s);
  return power == 1 ? f : Expr::power(std::move(f), power);
}

// c * numerator factors / denominator factors. A unit coefficient is dropped
// when a numerator factor exists; -1 becomes a unary minus on that factor.
Expr monomial_expr(double c, const Exponents& e) {
  std::vector<Expr> num;
  std::vector<Expr> den;
  for (int i = 0; i < kSymbolCount; ++i) {
    const auto s = static_cast<Symbol>(i);
    if (e[i] > 0) num.push_back(raised(s, e[i]));
    if (e[i] < 0) den.push_back(raised(s, -e[i]));
  }
  std::optional<Expr> acc;
  if (!num.empty() && (c == 1.0 || c == -1.0)) {
    if (c == -1.0) num.front() = Expr::neg(std::move(num.front()));
  } else {
    acc = Expr::num(c);
  }
  for (auto& f : num) acc = acc ? Expr::binary('*', std::move(*acc), std::move(f)) : std::move(f);
  for (auto& f : den) acc = Expr::binary('/', std::move(*acc), std::move(f));
  return std::move(*acc);
}

Expr polynomial_expr(const Polynomial& p) {
  if (p.empty()) return Expr::num(0.0);
  std::optional<Expr> acc;
  for (const auto& [e, c] : p.terms()) {
    if (!acc) {
      acc = monomial_expr(c, e);
    } else {
      acc = Expr::binary(c < 0.0 ? '-' : '+', std::move(*acc), monomial_expr(std::abs(c), e));
    }
  }
  return std::move(*acc);
}

Atom relation(Expr lhs, RelOp op, Expr rhs) { return Atom{std::move(lhs), op, std::move(rhs)}; }

Expr abs_of(const std::string& v) { return Expr::call("abs", Expr::var(v)); }

std::string e_name(int i) { return "E_" + std::to_string(i + 1); }
std::string v_name(int i) { return "V_" + std::to_string(i + 1); }

// (xi*(H+(a*abs(E_{i+3}))+(b*abs(E_i))) + (beta_max*(S+D)))
Expr v_bound_expr(const VBoundTemplate& t, int axis) {
  Expr inner = Expr::binary(
      '+',
      Expr::binary('+', Expr::num(t.ref_accel),
                   Expr::group(Expr::binary('*', Expr::num(t.rate_coeff(axis)),
                                            abs_of(e_name(axis + 3))))),
      Expr::group(Expr::binary('*', Expr::num(t.angle_coeff(axis)), abs_of(e_name(axis)))));
  Expr scaled = Expr::binary('*', Expr::num(t.xi), Expr::group(std::move(inner)));
  Expr floor = Expr::group(Expr::binary(
      '*', Expr::num(t.beta_max),
      Expr::group(Expr::binary('+', Expr::num(t.coriolis_error), Expr::num(t.disturbance)))));
  return Expr::group(Expr::binary('+', std::move(scaled), std::move(floor)));
}

}  // namespace

VdotPolynomial vdot_polynomial(const LyapunovCert& cert, const PlantParams& plant) {
  plant.validate();
  const Mat6& Q = cert.Q();
  const Mat6& P = cert.P();

  std::array<Polynomial, 3> s;
  for (int j = 0; j < 3; ++j) {
    Polynomial acc;
    for (int k = 0; k < 6; ++k) acc += Q(3 + j, k) * Polynomial::error(k);
    s[j] = acc.pruned(kPruneRel);
  }

  VdotPolynomial out;
  Polynomial quad;
  for (int i = 0; i < 6; ++i) {
    for (int k = 0; k < 6; ++k) {
      quad -= P(i, k) * (Polynomial::error(i) * Polynomial::error(k));
    }
  }
  for (int j = 0; j < 3; ++j) {
    quad += 2.0 * (s[j] * sym(static_cast<Symbol>(static_cast<int>(Symbol::V1) + j)));
  }
  out.quadratic = quad.pruned(kPruneRel);

  const auto j_inv = symbolic_j_inverse(plant);
  Polynomial coupling;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) coupling += 2.0 * (s[i] * j_inv[i][j] * s[j]);
  }
  out.coupling = coupling.pruned(kPruneRel);

  Polynomial norm_sq;
  for (int j = 0; j < 3; ++j) norm_sq += s[j] * s[j];
  out.norm_sq = norm_sq.pruned(kPruneRel);
  return out;
}

Atom conclusion_atom(const VdotPolynomial& vdot, Branch branch, double sigma) {
  if (branch == Branch::Outside) {
    Expr robust = Expr::binary(
        '/', Expr::binary('*', Expr::var("Delta_E"), Expr::group(polynomial_expr(vdot.coupling))),
        Expr::call("sqrt", polynomial_expr(vdot.norm_sq)));
    return relation(Expr::binary('-', polynomial_expr(vdot.quadratic), std::move(robust)),
                    RelOp::Lt, Expr::num(0.0));
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("bounds.sigma must be > 0");
  const Polynomial full =
      vdot.quadratic - (1.0 / sigma) * (sym(Symbol::DeltaE) * vdot.coupling);
  return relation(polynomial_expr(full), RelOp::Lt, Expr::num(0.0));
}

std::string default_conjecture_name(Branch branch) {
  return branch == Branch::Outside ? "Stability_Eq15" : "Stability_Eq16";
}

FofConjecture emit_conjecture(const RobustBounds& bounds, const VBoundTemplate& tmpl,
                              const Vec6& E, const VdotPolynomial& vdot,
                              const std::string& name, Branch branch) {
  bounds.validate();
  tmpl.validate();
  if (!E.allFinite()) throw InvalidArgument("E components must be finite");
  if (name.empty()) throw InvalidArgument("conjecture name must not be empty");

  FofConjecture c;
  c.name = name;
  c.universal_vars = {"E_1", "E_2", "E_3", "E_4", "E_5", "E_6", "Phi", "Theta"};
  c.existential_vars = {"V_1", "V_2", "V_3", "Delta_E"};

  std::vector<Atom> values;
  for (int i = 0; i < 6; ++i) {
    values.push_back(relation(Expr::var(e_name(i)), RelOp::Eq, Expr::num(E(i))));
  }
  c.hypotheses.push_back(std::move(values));

  std::vector<Atom> chart;
  for (const char* angle : {"Phi", "Theta"}) {
    chart.push_back(relation(Expr::var(angle), RelOp::Gt, Expr::num(-kFofAngleBound)));
    chart.push_back(relation(Expr::var(angle), RelOp::Lt, Expr::num(kFofAngleBound)));
  }
  c.hypotheses.push_back(std::move(chart));

  for (int axis = 0; axis < 3; ++axis) {
    c.hypotheses.push_back({relation(abs_of(v_name(axis)), RelOp::Le, v_bound_expr(tmpl, axis))});
  }

  Expr sum_sq = Expr::binary(
      '+',
      Expr::binary('+', Expr::power(Expr::var("V_1"), 2), Expr::power(Expr::var("V_2"), 2)),
      Expr::power(Expr::var("V_3"), 2));
  c.hypotheses.push_back(
      {relation(Expr::var("Delta_E"), RelOp::Gt, Expr::num(0.0)),
       relation(Expr::var("Delta_E"), RelOp::Ge,
                Expr::binary('/', Expr::call("sqrt", std::move(sum_sq)),
                             Expr::num(bounds.beta_min)))});

  c.conclusion = conclusion_atom(vdot, branch, bounds.sigma);
  return c;
}

}  // namespace lyapguard
