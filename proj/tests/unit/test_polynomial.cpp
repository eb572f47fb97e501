#include <gtest/gtest.h>

#include "lyapguard/polynomial.hpp"
#include "test_support.hpp"

namespace lyapguard {
namespace {

using Values = std::array<double, kSymbolCount>;

Values random_values(testing::Sampler& s) {
  Values v;
  for (auto& x : v) x = s.uniform(0.2, 2.0) * (s.uniform(0, 1) < 0.5 ? -1.0 : 1.0);
  return v;
}

Polynomial random_poly(testing::Sampler& s, int terms) {
  Polynomial p;
  for (int i = 0; i < terms; ++i) {
    Polynomial t = Polynomial::constant(s.uniform(-3, 3));
    for (int k = 0; k < 3; ++k) {
      const auto sym = static_cast<Symbol>(static_cast<int>(s.uniform(0, kSymbolCount - 1e-9)));
      t = t * Polynomial::symbol(sym, static_cast<int>(s.uniform(-2, 3)));
    }
    p += t;
  }
  return p;
}

TEST(Polynomial, GrlexOrder) {
  const GrlexGreater greater;
  Exponents a{};
  Exponents b{};
  a[0] = 2;  // E_1^2
  b[0] = 1;
  b[1] = 1;  // E_1*E_2
  EXPECT_TRUE(greater(a, b));
  EXPECT_FALSE(greater(b, a));
  Exponents c{};
  c[3] = 3;  // degree three beats degree two
  EXPECT_TRUE(greater(c, a));
  Exponents d{};
  d[9] = -2;  // cos(Theta)^-2 has degree two
  d[0] = 1;
  EXPECT_TRUE(greater(d, b));
  EXPECT_FALSE(greater(a, a));
}

TEST(Polynomial, IterationIsCanonical) {
  const Polynomial p = Polynomial::error(1) * Polynomial::error(2) + Polynomial::constant(4.0) +
                       Polynomial::error(0) * Polynomial::error(0) + Polynomial::error(5);
  std::vector<double> coeffs;
  std::vector<int> degrees;
  for (const auto& [e, c] : p.terms()) {
    coeffs.push_back(c);
    int deg = 0;
    for (int x : e) deg += std::abs(x);
    degrees.push_back(deg);
  }
  EXPECT_EQ(degrees, (std::vector<int>{2, 2, 1, 0}));
  EXPECT_EQ(p.terms().begin()->first[0], 2);
}

TEST(Polynomial, ArithmeticMatchesEvaluation) {
  testing::Sampler s(61);
  for (int i = 0; i < 200; ++i) {
    const Polynomial a = random_poly(s, 5);
    const Polynomial b = random_poly(s, 4);
    const Values x = random_values(s);
    const double va = a.evaluate(x);
    const double vb = b.evaluate(x);
    const double scale = 1.0 + std::abs(va) + std::abs(vb) + std::abs(va * vb);
    EXPECT_NEAR((a + b).evaluate(x), va + vb, 1e-12 * scale);
    EXPECT_NEAR((a - b).evaluate(x), va - vb, 1e-12 * scale);
    EXPECT_NEAR((a * b).evaluate(x), va * vb, 1e-11 * scale);
    EXPECT_NEAR((2.5 * a).evaluate(x), 2.5 * va, 1e-12 * scale);
  }
}

TEST(Polynomial, LaurentExponentsCancel) {
  const Polynomial p = Polynomial::symbol(Symbol::CosTheta, -2) * Polynomial::symbol(Symbol::CosTheta, 2);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p.terms().begin()->first, Exponents{});
  EXPECT_EQ(p.terms().begin()->second, 1.0);
}

TEST(Polynomial, SubtractionCancelsExactly) {
  testing::Sampler s(62);
  const Polynomial a = random_poly(s, 6);
  EXPECT_TRUE((a - a).empty());
  EXPECT_TRUE((a * 0.0).empty());
}

TEST(Polynomial, PruningIsRelative) {
  Polynomial p = Polynomial::constant(1e-13) + 1000.0 * Polynomial::error(0) +
                 1e-8 * Polynomial::error(1);
  const Polynomial q = p.pruned(1e-12);
  EXPECT_EQ(q.size(), 2u);
  const Polynomial r = (1e-20 * Polynomial::error(2)).pruned(1e-12);
  EXPECT_EQ(r.size(), 1u);
}

TEST(Polynomial, SymbolText) {
  EXPECT_EQ(symbol_text(Symbol::E1), "E_1");
  EXPECT_EQ(symbol_text(Symbol::E6), "E_6");
  EXPECT_EQ(symbol_text(Symbol::SinPhi), "sin(Phi)");
  EXPECT_EQ(symbol_text(Symbol::CosTheta), "cos(Theta)");
  EXPECT_EQ(symbol_text(Symbol::V2), "V_2");
  EXPECT_EQ(symbol_text(Symbol::DeltaE), "Delta_E");
}

}  // namespace
}  // namespace lyapguard
