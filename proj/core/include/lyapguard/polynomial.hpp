// Sparse Laurent polynomials over the fixed symbol set of the stability
// conjectures. Terms are kept in graded lexicographic order.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace lyapguard {

enum class Symbol : std::uint8_t {
  E1 = 0, E2, E3, E4, E5, E6,
  SinPhi, CosPhi, SinTheta, CosTheta,
  V1, V2, V3,
  DeltaE,
};

inline constexpr int kSymbolCount = 14;

using Exponents = std::array<int, kSymbolCount>;

/// Degree first (sum of |exponent|), then larger exponent on the lower
/// symbol index first. Used as the map order, so iteration is canonical.
struct GrlexGreater {
  bool operator()(const Exponents& a, const Exponents& b) const;
};

class Polynomial {
 public:
  using Terms = std::map<Exponents, double, GrlexGreater>;

  Polynomial() = default;
  static Polynomial constant(double c);
  static Polynomial symbol(Symbol s, int power = 1);

  /// E_index for index in 0..5.
  static Polynomial error(int index) { return symbol(static_cast<Symbol>(index)); }

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(double c);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double c) { return a *= c; }
  friend Polynomial operator*(double c, Polynomial a) { return a *= c; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

  /// Removes terms with |c| <= rel * max|c| (and exact zeros).
  Polynomial pruned(double rel) const;

  double evaluate(const std::array<double, kSymbolCount>& values) const;

  const Terms& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }

  bool operator==(const Polynomial&) const = default;

 private:
  void add_term(const Exponents& e, double c);
  Terms terms_;
};

/// Factor text for a symbol as it appears in the conjectures (E_1, sin(Phi), ...).
const std::string& symbol_text(Symbol s);

}  // namespace lyapguard
