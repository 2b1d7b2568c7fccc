#pragma once

#include <map>
#include <string>

#include "fockforge/rational.hpp"

namespace fockforge {

// Polynomial in the transmission eta with exact rational coefficients.
class EtaPolynomial {
 public:
  EtaPolynomial() = default;

  void add_term(int degree, const Rational& c) {
    if (c == Rational(0)) return;
    auto it = coeffs_.find(degree);
    if (it == coeffs_.end()) {
      coeffs_[degree] = c;
    } else {
      it->second += c;
      if (it->second == Rational(0)) coeffs_.erase(it);
    }
  }

  // Adds c * eta^k * (1-eta)^l, expanded binomially.
  void add_kept_lost_term(int k, int l, const Rational& c) {
    long long binom = 1;
    for (int j = 0; j <= l; ++j) {
      Rational term = c * Rational(j % 2 == 0 ? binom : -binom);
      add_term(k + j, term);
      binom = binom * (l - j) / (j + 1);
    }
  }

  const std::map<int, Rational>& coefficients() const { return coeffs_; }

  Rational coefficient(int degree) const {
    auto it = coeffs_.find(degree);
    return it == coeffs_.end() ? Rational(0) : it->second;
  }

  double eval(double eta) const {
    double v = 0;
    for (const auto& [deg, c] : coeffs_) v += c.to_double() * std::pow(eta, deg);
    return v;
  }

  Rational eval_exact(const Rational& eta) const {
    Rational v(0);
    for (const auto& [deg, c] : coeffs_) {
      Rational p(1);
      for (int i = 0; i < deg; ++i) p *= eta;
      v += c * p;
    }
    return v;
  }

  bool operator==(const EtaPolynomial& o) const { return coeffs_ == o.coeffs_; }

  std::string str() const {
    if (coeffs_.empty()) return "0";
    std::string s;
    for (const auto& [deg, c] : coeffs_) {
      if (!s.empty()) s += " + ";
      s += "(" + c.str() + ")";
      if (deg > 0) s += "*eta^" + std::to_string(deg);
    }
    return s;
  }

 private:
  std::map<int, Rational> coeffs_;
};

}  // namespace fockforge
