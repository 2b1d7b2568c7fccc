#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fockforge {

// Exact rational arithmetic for probabilities. Every probability in this
// problem domain is dyadic (p / 2^q), but sums and binomial expansions are
// easier to keep correct with a general rational type. Intermediates use
// 128-bit to avoid overflow; the reduced values stay far below 2^63.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(long long n) : num_(n), den_(1) {}
  Rational(long long n, long long d) : num_(n), den_(d) {
    if (d == 0) throw std::invalid_argument("Rational: zero denominator");
    normalize();
  }

  long long num() const { return num_; }
  long long den() const { return den_; }

  static Rational dyadic(long long p, int q) {
    if (q < 0) throw std::invalid_argument("Rational::dyadic: negative exponent");
    if (q >= 63) throw std::overflow_error("Rational::dyadic: exponent too large");
    return Rational(p, 1LL << q);
  }

  Rational operator+(const Rational& o) const {
    return make(i128(num_) * o.den_ + i128(o.num_) * den_, i128(den_) * o.den_);
  }
  Rational operator-(const Rational& o) const {
    return make(i128(num_) * o.den_ - i128(o.num_) * den_, i128(den_) * o.den_);
  }
  Rational operator*(const Rational& o) const {
    return make(i128(num_) * o.num_, i128(den_) * o.den_);
  }
  Rational operator/(const Rational& o) const {
    if (o.num_ == 0) throw std::domain_error("Rational: division by zero");
    return make(i128(num_) * o.den_, i128(den_) * o.num_);
  }
  Rational operator-() const { return Rational(-num_, den_); }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const {
    return i128(num_) * o.den_ < i128(o.num_) * den_;
  }
  bool operator<=(const Rational& o) const { return *this < o || *this == o; }
  bool operator>(const Rational& o) const { return o < *this; }
  bool operator>=(const Rational& o) const { return o <= *this; }

  double to_double() const { return double(num_) / double(den_); }

  bool is_dyadic() const { return (den_ & (den_ - 1)) == 0; }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  using i128 = __int128;

  static Rational make(i128 n, i128 d) {
    if (d < 0) { n = -n; d = -d; }
    i128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) { n /= g; d /= g; }
    if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
      throw std::overflow_error("Rational: overflow after reduction");
    Rational r;
    r.num_ = (long long)n;
    r.den_ = (long long)d;
    return r;
  }

  static i128 gcd128(i128 a, i128 b) {
    while (b != 0) { i128 t = a % b; a = b; b = t; }
    return a == 0 ? 1 : a;
  }

  void normalize() {
    *this = make(num_, den_);
  }

  long long num_;
  long long den_;
};

// Snap a floating value to the nearest p/2^q with q <= max_exp if one lies
// within tol; otherwise report failure. Measurement probabilities and
// squared amplitudes in this codebase are dyadic whenever the circuit is
// built from 50:50 beamsplitters, so the snap nearly always succeeds.
inline bool snap_dyadic(double v, Rational& out, double tol = 1e-9, int max_exp = 40) {
  for (int q = 0; q <= max_exp; ++q) {
    double scaled = std::ldexp(v, q);
    double rounded = std::round(scaled);
    if (std::abs(scaled - rounded) <= tol * std::ldexp(1.0, q) ||
        std::abs(scaled - rounded) <= tol) {
      if (std::abs(rounded) > 9e15) return false;
      if (q < 63) {
        out = Rational((long long)rounded, 1LL << q);
        if (std::abs(out.to_double() - v) <= tol) return true;
      }
    }
  }
  return false;
}

}  // namespace fockforge
