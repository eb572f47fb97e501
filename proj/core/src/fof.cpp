#include "lyapguard/fof.hpp"

#include <charconv>
#include <cmath>
#include <utility>

namespace lyapguard {
namespace {

constexpr int kPrecAdd = 1;
constexpr int kPrecMul = 2;
constexpr int kPrecNeg = 3;
constexpr int kPrecPow = 4;
constexpr int kPrecAtom = 5;

int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Binary: return (e.op == '+' || e.op == '-') ? kPrecAdd : kPrecMul;
    case Expr::Kind::Neg: return kPrecNeg;
    case Expr::Kind::Power: return kPrecPow;
    default: return kPrecAtom;
  }
}

void render_compact(const Expr& e, std::string& out);

void render_operand(const Expr& e, bool parens, std::string& out) {
  if (parens) out += '(';
  render_compact(e, out);
  if (parens) out += ')';
}

void render_compact(const Expr& e, std::string& out) {
  switch (e.kind) {
    case Expr::Kind::Number:
      out += format_decimal(e.number);
      break;
    case Expr::Kind::Variable:
      out += e.name;
      break;
    case Expr::Kind::Call:
      out += e.name;
      out += '(';
      render_compact(e.args[0], out);
      out += ')';
      break;
    case Expr::Kind::Neg:
      out += '-';
      render_operand(e.args[0], precedence(e.args[0]) < kPrecNeg, out);
      break;
    case Expr::Kind::Binary: {
      const int p = precedence(e);
      render_operand(e.args[0], precedence(e.args[0]) < p, out);
      out += e.op;
      render_operand(e.args[1], precedence(e.args[1]) <= p, out);
      break;
    }
    case Expr::Kind::Power:
      render_operand(e.args[0], precedence(e.args[0]) < kPrecAtom, out);
      out += '^';
      out += std::to_string(e.exponent);
      break;
    case Expr::Kind::Group:
      out += '(';
      render_compact(e.args[0], out);
      out += ')';
      break;
  }
}

// Additive operators on the left spine of a relation side are spaced.
void render_spaced(const Expr& e, std::string& out) {
  if (e.kind == Expr::Kind::Binary && (e.op == '+' || e.op == '-')) {
    render_spaced(e.args[0], out);
    out += ' ';
    out += e.op;
    out += ' ';
    render_operand(e.args[1], precedence(e.args[1]) <= kPrecAdd, out);
    return;
  }
  render_compact(e, out);
}

std::string render_side(const Expr& e) {
  std::string out;
  if (e.kind == Expr::Kind::Group) {
    out += '(';
    render_spaced(e.args[0], out);
    out += ')';
  } else {
    render_spaced(e, out);
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += items[i];
  }
  return out;
}

}  // namespace

Expr Expr::num(double value) {
  if (value < 0.0) return neg(num(-value));
  Expr e;
  e.kind = Kind::Number;
  e.number = value == 0.0 ? 0.0 : value;
  return e;
}

Expr Expr::var(std::string name) {
  Expr e;
  e.kind = Kind::Variable;
  e.name = std::move(name);
  return e;
}

Expr Expr::call(std::string fn, Expr arg) {
  Expr e;
  e.kind = Kind::Call;
  e.name = std::move(fn);
  e.args.push_back(std::move(arg));
  return e;
}

Expr Expr::neg(Expr arg) {
  Expr e;
  e.kind = Kind::Neg;
  e.args.push_back(std::move(arg));
  return e;
}

Expr Expr::binary(char op, Expr lhs, Expr rhs) {
  Expr e;
  e.kind = Kind::Binary;
  e.op = op;
  e.args.push_back(std::move(lhs));
  e.args.push_back(std::move(rhs));
  return e;
}

Expr Expr::power(Expr base, int exponent) {
  Expr e;
  e.kind = Kind::Power;
  e.exponent = exponent;
  e.args.push_back(std::move(base));
  return e;
}

Expr Expr::group(Expr inner) {
  Expr e;
  e.kind = Kind::Group;
  e.args.push_back(std::move(inner));
  return e;
}

std::string_view to_string(RelOp op) {
  switch (op) {
    case RelOp::Eq: return "=";
    case RelOp::Lt: return "<";
    case RelOp::Le: return "<=";
    case RelOp::Gt: return ">";
    case RelOp::Ge: return ">=";
  }
  return "?";
}

std::vector<Atom> FofConjecture::hypothesis_atoms() const {
  std::vector<Atom> out;
  for (const auto& line : hypotheses) out.insert(out.end(), line.begin(), line.end());
  return out;
}

std::string format_decimal(double value) {
  if (!std::isfinite(value)) throw InvalidArgument("non-finite literal in conjecture");
  char buf[512];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
  if (res.ec != std::errc()) throw InvalidArgument("literal out of range for fixed notation");
  return std::string(buf, res.ptr);
}

std::string render_expr(const Expr& e) {
  std::string out;
  render_compact(e, out);
  return out;
}

std::string render_atom(const Atom& a) {
  std::string out = render_side(a.lhs);
  out += ' ';
  out += to_string(a.op);
  out += ' ';
  out += render_side(a.rhs);
  return out;
}

std::string render(const FofConjecture& conj) {
  std::string out = "fof(" + conj.name + ",conjecture, ![" + join(conj.universal_vars) + "] :";
  if (!conj.existential_vars.empty()) out += " ?[" + join(conj.existential_vars) + "]:";
  out += "\n% assumptions\n(";
  for (std::size_t i = 0; i < conj.hypotheses.size(); ++i) {
    if (i) out += "\n& ";
    const auto& line = conj.hypotheses[i];
    for (std::size_t j = 0; j < line.size(); ++j) {
      if (j) out += " & ";
      out += render_atom(line[j]);
    }
  }
  out += "\n% implies\n=> " + render_atom(conj.conclusion) + " )).\n";
  return out;
}

double evaluate(const Expr& e, const Environment& env) {
  switch (e.kind) {
    case Expr::Kind::Number:
      return e.number;
    case Expr::Kind::Variable: {
      const auto it = env.find(e.name);
      if (it == env.end()) throw InvalidArgument("unbound variable " + e.name);
      return it->second;
    }
    case Expr::Kind::Call: {
      const double x = evaluate(e.args[0], env);
      if (e.name == "abs") return std::abs(x);
      if (e.name == "sqrt") return std::sqrt(x);
      if (e.name == "sin") return std::sin(x);
      if (e.name == "cos") return std::cos(x);
      throw InvalidArgument("unknown function " + e.name);
    }
    case Expr::Kind::Neg:
      return -evaluate(e.args[0], env);
    case Expr::Kind::Binary: {
      const double a = evaluate(e.args[0], env);
      const double b = evaluate(e.args[1], env);
      switch (e.op) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        case '/': return a / b;
      }
      throw InvalidArgument(std::string("unknown operator ") + e.op);
    }
    case Expr::Kind::Power:
      return std::pow(evaluate(e.args[0], env), e.exponent);
    case Expr::Kind::Group:
      return evaluate(e.args[0], env);
  }
  return 0.0;
}

bool evaluate(const Atom& a, const Environment& env) {
  const double l = evaluate(a.lhs, env);
  const double r = evaluate(a.rhs, env);
  switch (a.op) {
    case RelOp::Eq: return l == r;
    case RelOp::Lt: return l < r;
    case RelOp::Le: return l <= r;
    case RelOp::Gt: return l > r;
    case RelOp::Ge: return l >= r;
  }
  return false;
}

}  // namespace lyapguard
