#include "lyapguard/polynomial.hpp"

#include <cmath>
#include <cstdlib>

namespace lyapguard {

bool GrlexGreater::operator()(const Exponents& a, const Exponents& b) const {
  int da = 0;
  int db = 0;
  for (int i = 0; i < kSymbolCount; ++i) {
    da += std::abs(a[i]);
    db += std::abs(b[i]);
  }
  if (da != db) return da > db;
  for (int i = 0; i < kSymbolCount; ++i) {
    if (a[i] != b[i]) return a[i] > b[i];
  }
  return false;
}

Polynomial Polynomial::constant(double c) {
  Polynomial p;
  p.add_term(Exponents{}, c);
  return p;
}

Polynomial Polynomial::symbol(Symbol s, int power) {
  Exponents e{};
  e[static_cast<int>(s)] = power;
  Polynomial p;
  p.add_term(e, 1.0);
  return p;
}

void Polynomial::add_term(const Exponents& e, double c) {
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  for (const auto& [e, c] : other.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  for (const auto& [e, c] : other.terms_) add_term(e, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double c) {
  if (c == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, coeff] : terms_) coeff *= c;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      Exponents e;
      for (int i = 0; i < kSymbolCount; ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

Polynomial Polynomial::pruned(double rel) const {
  double scale = 0.0;
  for (const auto& [e, c] : terms_) scale = std::max(scale, std::abs(c));
  Polynomial out;
  for (const auto& [e, c] : terms_) {
    if (std::abs(c) > rel * scale) out.terms_.emplace(e, c);
  }
  return out;
}

double Polynomial::evaluate(const std::array<double, kSymbolCount>& values) const {
  double sum = 0.0;
  for (const auto& [e, c] : terms_) {
    double term = c;
    for (int i = 0; i < kSymbolCount; ++i) {
      if (e[i] != 0) term *= std::pow(values[i], e[i]);
    }
    sum += term;
  }
  return sum;
}

const std::string& symbol_text(Symbol s) {
  static const std::array<std::string, kSymbolCount> names = {
      "E_1", "E_2", "E_3", "E_4", "E_5", "E_6",
      "sin(Phi)", "cos(Phi)", "sin(Theta)", "cos(Theta)",
      "V_1", "V_2", "V_3", "Delta_E",
  };
  return names[static_cast<int>(s)];
}

}  // namespace lyapguard
