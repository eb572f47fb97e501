#include <gtest/gtest.h>

#include <cmath>

#include "lyapguard/fof.hpp"
#include "lyapguard_cli/commands.hpp"
#include "lyapguard_cli/config.hpp"
#include "test_support.hpp"

namespace lyapguard {
namespace {

using testing::Sampler;

const cli::RunConfig& reference_config() {
  static const cli::RunConfig cfg = cli::load_config(testing::config_path("reference_conjecture.json"));
  return cfg;
}

Vec6 vec6(std::initializer_list<double> values) {
  Vec6 v;
  int i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

const Vec6 kE15 = vec6({1.6, 3.1, 2, 9.3, 6.8, 4.8});
const Vec6 kE16 = vec6({2.9, 1.2, 1.8, 6.9, 10.5, 5});

FofConjecture reference_conjecture(Branch branch) {
  const Vec6& E = branch == Branch::Outside ? kE15 : kE16;
  return cli::build_conjecture(reference_config(), E, branch, default_conjecture_name(branch));
}

std::string golden(const std::string& name) { return testing::read_file(testing::golden_path(name)); }

TEST(FofRender, DecimalFormatting) {
  EXPECT_EQ(format_decimal(0.004), "0.004");
  EXPECT_EQ(format_decimal(170.5), "170.5");
  EXPECT_EQ(format_decimal(2.0), "2");
  EXPECT_EQ(format_decimal(1.5708), "1.5708");
  EXPECT_EQ(format_decimal(1e-7), "0.0000001");
  EXPECT_EQ(format_decimal(1e21), "1000000000000000000000");
  EXPECT_EQ(std::stod(format_decimal(0.1 + 0.2)), 0.1 + 0.2);
}

TEST(FofGolden, HypothesesMatchTranscribedListings) {
  for (Branch b : {Branch::Outside, Branch::BoundaryLayer}) {
    const std::string text = render(reference_conjecture(b));
    const std::string expected =
        golden(b == Branch::Outside ? "eq15_hypotheses.txt" : "eq16_hypotheses.txt");
    ASSERT_GE(text.size(), expected.size());
    EXPECT_EQ(text.substr(0, expected.size()), expected);
  }
}

TEST(FofGolden, FullTextMatchesFrozenFile) {
  EXPECT_EQ(render(reference_conjecture(Branch::Outside)), golden("stability_eq15.p"));
  EXPECT_EQ(render(reference_conjecture(Branch::BoundaryLayer)), golden("stability_eq16.p"));
}

TEST(FofGolden, HypothesisLinesFromListing) {
  const std::string text = render(reference_conjecture(Branch::Outside));
  EXPECT_NE(text.find("& abs(V_1) <= (0.5*(1.2+(0.004*abs(E_4))+(17.5*abs(E_1))) + "
                      "(173*(0.001+0.001)))\n"),
            std::string::npos);
  const std::string text16 = render(reference_conjecture(Branch::BoundaryLayer));
  EXPECT_NE(text16.find("Delta_E >= sqrt(V_1^2+V_2^2+V_3^2)/170.5\n"), std::string::npos);
  EXPECT_NE(text16.find("(E_1 = 2.9 & E_2 = 1.2 & E_3 = 1.8 & E_4 = 6.9 & E_5 = 10.5 & E_6 = 5\n"),
            std::string::npos);
}

TEST(FofGolden, ConclusionShape) {
  const std::string t15 = render(reference_conjecture(Branch::Outside));
  EXPECT_NE(t15.find("- Delta_E*("), std::string::npos);
  EXPECT_NE(t15.find(")/sqrt("), std::string::npos);
  EXPECT_EQ(t15.substr(t15.size() - 9), " < 0 )).\n");
  const std::string t16 = render(reference_conjecture(Branch::BoundaryLayer));
  EXPECT_EQ(t16.find("sqrt(", t16.find("% implies")), std::string::npos);
  EXPECT_NE(t16.find("E_1^2"), std::string::npos);
}

TEST(FofParse, GoldenFilesParseWithDeclaredVariables) {
  for (const char* name : {"stability_eq15.p", "stability_eq16.p"}) {
    const std::string text = golden(name);
    const FofConjecture c = parse(text);
    EXPECT_EQ(c.universal_vars,
              (std::vector<std::string>{"E_1", "E_2", "E_3", "E_4", "E_5", "E_6", "Phi", "Theta"}));
    EXPECT_EQ(c.existential_vars, (std::vector<std::string>{"V_1", "V_2", "V_3", "Delta_E"}));
    EXPECT_EQ(c.hypotheses.size(), 6u);
    EXPECT_EQ(render(c), text);
  }
}

TEST(FofParse, RoundTripsGeneratedConjectures) {
  for (Branch b : {Branch::Outside, Branch::BoundaryLayer}) {
    const FofConjecture c = reference_conjecture(b);
    EXPECT_EQ(parse(render(c)), c);
  }
}

TEST(FofParse, MinimalConjecture) {
  const FofConjecture c = parse("fof(x,conjecture, ![A]: (A>0 => A>=0)).");
  EXPECT_EQ(c.name, "x");
  EXPECT_EQ(c.universal_vars, std::vector<std::string>{"A"});
  EXPECT_TRUE(c.existential_vars.empty());
  ASSERT_EQ(c.hypothesis_atoms().size(), 1u);
  EXPECT_EQ(c.hypothesis_atoms()[0].op, RelOp::Gt);
  EXPECT_EQ(c.conclusion.op, RelOp::Ge);
  EXPECT_EQ(c.conclusion.lhs, Expr::var("A"));
  EXPECT_EQ(c.conclusion.rhs, Expr::num(0.0));
}

TEST(FofParse, UnboundVariableNamed) {
  try {
    parse("fof(x,conjecture, ![A]: (A>0 =>\n   Z>=0)).");
    FAIL() << "accepted unbound Z";
  } catch (const FofParseError& e) {
    EXPECT_EQ(e.kind(), FofParseError::Kind::UnboundVariable);
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 4u);
    EXPECT_NE(std::string(e.what()).find("Z"), std::string::npos);
  }
}

TEST(FofParse, LexicalAndSyntaxErrorsCarryPositions) {
  try {
    parse("fof(x,conjecture, ![A]: (A>0 => A#0)).");
    FAIL();
  } catch (const FofParseError& e) {
    EXPECT_EQ(e.kind(), FofParseError::Kind::Lexical);
    EXPECT_EQ(e.line(), 1u);
    EXPECT_EQ(e.column(), 34u);
  }
  try {
    parse("fof(x,conjecture, ![A]: (A>0 => A>=)).");
    FAIL();
  } catch (const FofParseError& e) {
    EXPECT_EQ(e.kind(), FofParseError::Kind::Syntax);
    EXPECT_EQ(e.column(), 36u);
  }
  EXPECT_THROW(parse("fof(x,axiom, ![A]: (A>0 => A>=0))."), FofParseError);
  EXPECT_THROW(parse("fof(x,conjecture, ![A]: (A>0 => A>=1e3))."), FofParseError);
  EXPECT_THROW(parse("fof(x,conjecture, ![A]: (A>0 => tan(A)>=0))."), FofParseError);
  EXPECT_THROW(parse("fof(x,conjecture, ![A,A]: (A>0 => A>=0))."), FofParseError);
  EXPECT_THROW(parse("fof(x,conjecture, ![A]: (A>0 => A>=0))"), FofParseError);
}

TEST(FofParse, DeepNestingIsAnError) {
  std::string deep(500, '(');
  deep = "fof(x,conjecture, ![A]: (A>0 => " + deep + "A" + std::string(500, ')') + ">=0)).";
  EXPECT_THROW(parse(deep), FofParseError);
}

TEST(FofParse, ByteMutationsNeverCrash) {
  const std::string base = golden("stability_eq16.p");
  Sampler s(71);
  const std::string alphabet = "()[]&=<>!?:,.^*/+-_ %\n0123456789EVPhiTaDbs";
  int parsed = 0;
  int rejected = 0;
  for (int i = 0; i < 1000; ++i) {
    std::string text = base;
    const int edits = 1 + static_cast<int>(s.uniform(0, 4));
    for (int k = 0; k < edits; ++k) {
      const auto pos = static_cast<std::size_t>(s.uniform(0, static_cast<double>(text.size())));
      const double op = s.uniform(0, 3);
      const char c = alphabet[static_cast<std::size_t>(s.uniform(0, alphabet.size()))];
      if (op < 1) {
        text[pos] = c;
      } else if (op < 2) {
        text.erase(pos, 1);
      } else {
        text.insert(pos, 1, c);
      }
    }
    try {
      const FofConjecture c = parse(text);
      EXPECT_EQ(parse(render(c)), c);
      ++parsed;
    } catch (const FofParseError& e) {
      EXPECT_GE(e.line(), 1u);
      EXPECT_GE(e.column(), 1u);
      ++rejected;
    }
  }
  EXPECT_EQ(parsed + rejected, 1000);
}

// Random canonical expression: explicit groups wherever the parser would need them.
class ExprGen {
 public:
  ExprGen(Sampler& s, std::vector<std::string> vars) : s_(s), vars_(std::move(vars)) {}

  Expr make(int depth) {
    const double r = s_.uniform(0, 1);
    if (depth <= 0 || r < 0.25) return leaf();
    if (r < 0.55) {
      const char op = "+-*/"[static_cast<int>(s_.uniform(0, 4))];
      const int p = (op == '+' || op == '-') ? 1 : 2;
      Expr lhs = make(depth - 1);
      Expr rhs = make(depth - 1);
      if (prec(lhs) < p) lhs = Expr::group(std::move(lhs));
      if (prec(rhs) <= p) rhs = Expr::group(std::move(rhs));
      return Expr::binary(op, std::move(lhs), std::move(rhs));
    }
    if (r < 0.65) {
      Expr arg = make(depth - 1);
      if (prec(arg) < 3) arg = Expr::group(std::move(arg));
      return Expr::neg(std::move(arg));
    }
    if (r < 0.8) {
      Expr base = make(depth - 1);
      if (prec(base) < 5) base = Expr::group(std::move(base));
      return Expr::power(std::move(base), 1 + static_cast<int>(s_.uniform(0, 6)));
    }
    if (r < 0.9) {
      static const char* fns[] = {"abs", "sqrt", "sin", "cos"};
      return Expr::call(fns[static_cast<int>(s_.uniform(0, 4))], make(depth - 1));
    }
    return Expr::group(make(depth - 1));
  }

 private:
  static int prec(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Binary: return (e.op == '+' || e.op == '-') ? 1 : 2;
      case Expr::Kind::Neg: return 3;
      case Expr::Kind::Power: return 4;
      default: return 5;
    }
  }

  Expr leaf() {
    if (s_.uniform(0, 1) < 0.5) {
      return Expr::var(vars_[static_cast<std::size_t>(s_.uniform(0, vars_.size()))]);
    }
    const double mag = std::pow(10.0, s_.uniform(-6, 6));
    const double value = s_.uniform(0, 1) < 0.3 ? std::round(mag) : mag * s_.uniform(0, 1);
    return Expr::num(value);
  }

  Sampler& s_;
  std::vector<std::string> vars_;
};

TEST(FofParse, FuzzedConjecturesRoundTrip) {
  Sampler s(72);
  const RelOp ops[] = {RelOp::Eq, RelOp::Lt, RelOp::Le, RelOp::Gt, RelOp::Ge};
  for (int i = 0; i < 1000; ++i) {
    FofConjecture c;
    c.name = "Fuzz_" + std::to_string(i);
    c.universal_vars = {"X", "Y_1"};
    if (i % 2) c.existential_vars = {"Z"};
    std::vector<std::string> vars = c.universal_vars;
    vars.insert(vars.end(), c.existential_vars.begin(), c.existential_vars.end());
    ExprGen gen(s, vars);
    const int lines = 1 + static_cast<int>(s.uniform(0, 3));
    for (int l = 0; l < lines; ++l) {
      std::vector<Atom> line;
      const int atoms = 1 + static_cast<int>(s.uniform(0, 3));
      for (int a = 0; a < atoms; ++a) {
        line.push_back(Atom{gen.make(4), ops[static_cast<int>(s.uniform(0, 5))], gen.make(3)});
      }
      c.hypotheses.push_back(std::move(line));
    }
    c.conclusion = Atom{gen.make(5), ops[static_cast<int>(s.uniform(0, 5))], gen.make(2)};
    const std::string text = render(c);
    FofConjecture back;
    ASSERT_NO_THROW(back = parse(text)) << text;
    EXPECT_EQ(back, c) << text;
    EXPECT_EQ(render(back), text);
  }
}

TEST(FofParse, RandomEmittedConjecturesRoundTrip) {
  Sampler s(73);
  const cli::RunConfig& cfg = reference_config();
  for (int i = 0; i < 50; ++i) {
    cli::RunConfig c = cfg;
    c.v_bound = cli::VBoundCoefficients{s.vec3(0.001, 2.0), s.vec3(0.1, 20.0)};
    const Vec6 E = s.vec6(-10, 10);
    const Branch b = i % 2 ? Branch::Outside : Branch::BoundaryLayer;
    const FofConjecture conj = cli::build_conjecture(c, E, b, "Random_" + std::to_string(i));
    const std::string text = render(conj);
    EXPECT_EQ(parse(text), conj);
    EXPECT_EQ(render(parse(text)), text);
  }
}

TEST(FofEmit, ZeroErrorState) {
  const FofConjecture c =
      cli::build_conjecture(reference_config(), Vec6::Zero(), Branch::BoundaryLayer, "Zero");
  const std::string text = render(c);
  EXPECT_NE(text.find("(E_1 = 0 & E_2 = 0 & E_3 = 0 & E_4 = 0 & E_5 = 0 & E_6 = 0\n"),
            std::string::npos);
  EXPECT_EQ(parse(text), c);
}

Environment environment(const Vec6& E, double phi, double theta, const Vec3& v, double delta) {
  Environment env;
  for (int i = 0; i < 6; ++i) env["E_" + std::to_string(i + 1)] = E(i);
  env["Phi"] = phi;
  env["Theta"] = theta;
  for (int i = 0; i < 3; ++i) env["V_" + std::to_string(i + 1)] = v(i);
  env["Delta_E"] = delta;
  return env;
}

// V' from the numeric lyapunov path with gamma at gain Delta_E on the chosen branch.
double numeric_vdot(const cli::RunConfig& cfg, const Vec6& E, double phi, double theta,
                    const Vec3& v, double delta, Branch branch) {
  const LyapunovCert cert(cfg.gains);
  const Vec3 s = cert.switching_vector(E);
  const double scale = branch == Branch::Outside ? s.norm() : cfg.bounds.sigma;
  const Vec3 gam = delta * s / scale;
  const Mat3 j_inv = j_inverse(cfg.plant, Vec3(phi, theta, 0.3));
  return v_dot(cert, cfg.bounds.sigma, E, v, j_inv, gam).value;
}

TEST(FofEmit, ConclusionEvaluatesToVdot) {
  Sampler s(74);
  const cli::RunConfig& cfg = reference_config();
  for (Branch b : {Branch::Outside, Branch::BoundaryLayer}) {
    const Vec6& E = b == Branch::Outside ? kE15 : kE16;
    const FofConjecture c = reference_conjecture(b);
    for (int i = 0; i < 200; ++i) {
      const double phi = s.uniform(-1.4, 1.4);
      const double theta = s.uniform(-1.4, 1.4);
      const Vec3 v = s.vec3(-20, 20);
      const double delta = s.uniform(0.01, 2.0);
      const Environment env = environment(E, phi, theta, v, delta);
      const double lhs = evaluate(c.conclusion.lhs, env);
      const double expected = numeric_vdot(cfg, E, phi, theta, v, delta, b);
      EXPECT_NEAR(lhs, expected, 1e-9 * (1.0 + std::abs(expected)));
      EXPECT_EQ(evaluate(c.conclusion.rhs, env), 0.0);
      EXPECT_EQ(evaluate(c.conclusion, env), expected < 0.0);
    }
  }
}

TEST(FofEmit, HypothesesHoldAtAdmissiblePoint) {
  const cli::RunConfig& cfg = reference_config();
  const FofConjecture c = reference_conjecture(Branch::Outside);
  const VBoundTemplate tmpl = cfg.v_bound_template();
  const Vec3 vb = v_bound(tmpl, kE15);
  const Vec3 v = 0.5 * vb;
  const double delta = v.norm() / cfg.bounds.beta_min + 1e-3;
  const Environment env = environment(kE15, 0.1, -0.2, v, delta);
  for (const Atom& a : c.hypothesis_atoms()) EXPECT_TRUE(evaluate(a, env)) << render_atom(a);
  Environment outside = env;
  outside["V_1"] = vb(0) * 1.01;
  int failing = 0;
  for (const Atom& a : c.hypothesis_atoms()) failing += !evaluate(a, outside);
  EXPECT_GE(failing, 1);
}

TEST(FofEvaluate, RejectsUnboundVariables) {
  EXPECT_THROW(evaluate(Expr::var("Q"), Environment{}), InvalidArgument);
  EXPECT_DOUBLE_EQ(evaluate(Expr::power(Expr::var("X"), 3), Environment{{"X", 2.0}}), 8.0);
}

}  // namespace
}  // namespace lyapguard
