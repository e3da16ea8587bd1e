/// @file rational.hpp
/// @brief Exact complex-rational scalar: a + b*i with arbitrary-precision
///        rational parts. No floating point anywhere in this layer.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <sstream>
#include <stdexcept>
#include <string>

namespace macrolab::sym {

using Rational = boost::multiprecision::cpp_rational;

// ============================================================
// GaussRational
// ============================================================

/// Complex number with exact rational real/imaginary parts. cpp_rational
/// keeps every value reduced with positive denominator, so equality is
/// literal representation equality.
struct GaussRational {
  Rational re{0};
  Rational im{0};

  GaussRational() = default;
  GaussRational(long v) : re(v) {}  // NOLINT(google-explicit-constructor)
  GaussRational(Rational r) : re(std::move(r)) {}  // NOLINT
  GaussRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
  GaussRational(long num, long den) : re(Rational(num, den)) {}

  static GaussRational i() { return {Rational(0), Rational(1)}; }

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_real() const { return im == 0; }
  bool is_imag() const { return re == 0 && im != 0; }
  bool is_one() const { return re == 1 && im == 0; }

  friend bool operator==(const GaussRational& a, const GaussRational& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const GaussRational& a, const GaussRational& b) {
    return !(a == b);
  }

  GaussRational operator-() const { return {-re, -im}; }

  GaussRational& operator+=(const GaussRational& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  GaussRational& operator-=(const GaussRational& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  GaussRational& operator*=(const GaussRational& o) {
    Rational r = re * o.re - im * o.im;
    Rational i2 = re * o.im + im * o.re;
    re = std::move(r);
    im = std::move(i2);
    return *this;
  }

  friend GaussRational operator+(GaussRational a, const GaussRational& b) {
    return a += b;
  }
  friend GaussRational operator-(GaussRational a, const GaussRational& b) {
    return a -= b;
  }
  friend GaussRational operator*(GaussRational a, const GaussRational& b) {
    return a *= b;
  }

  /// Exact inverse: (a+bi)^-1 = (a-bi)/(a^2+b^2).
  GaussRational inverse() const {
    Rational n = re * re + im * im;
    if (n == 0) throw std::domain_error("GaussRational: inverse of zero");
    return {re / n, -im / n};
  }

  GaussRational conj() const { return {re, -im}; }

  std::string str() const {
    std::ostringstream os;
    if (im == 0) {
      os << re;
    } else if (re == 0) {
      if (im == 1)
        os << "i";
      else if (im == -1)
        os << "-i";
      else
        os << im << "*i";
    } else {
      os << "(" << re << (im > 0 ? "+" : "-");
      Rational a = im > 0 ? im : Rational(-im);
      if (a != 1) os << a << "*";
      os << "i)";
    }
    return os.str();
  }
};

}  // namespace macrolab::sym
