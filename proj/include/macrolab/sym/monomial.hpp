/// @file monomial.hpp
/// @brief Fixed symbol set and graded-lex monomial order for the boundary
///        symbol algebra: tau (normal frequency), ell (tangential modulus),
///        t1..t3 (tangential wave vector), n1..n3 (unit normal), xi1..xi3
///        (full frequency vector).
#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace macrolab::sym {

// ============================================================
// Symbols
// ============================================================

enum Symbol : int {
  Tau = 0,
  Ell,
  Tan1,
  Tan2,
  Tan3,
  Nor1,
  Nor2,
  Nor3,
  Xi1,
  Xi2,
  Xi3,
  kNumSymbols
};

inline const char* symbol_name(int s) {
  static const char* names[kNumSymbols] = {"tau", "ell", "t1",  "t2",
                                           "t3",  "n1",  "n2",  "n3",
                                           "xi1", "xi2", "xi3"};
  return names[s];
}

// ============================================================
// Monomial
// ============================================================

/// Exponent vector over the fixed symbol set. Comparison is graded lex with
/// symbol priority tau > ell > t1 > t2 > t3 > n1 > n2 > n3 > xi1 > xi2 > xi3.
struct Monomial {
  std::array<std::uint16_t, kNumSymbols> e{};

  int degree() const {
    int d = 0;
    for (auto x : e) d += x;
    return d;
  }
  bool is_unit() const {
    for (auto x : e)
      if (x) return false;
    return true;
  }
  bool divides(const Monomial& m) const {
    for (int i = 0; i < kNumSymbols; ++i)
      if (e[i] > m.e[i]) return false;
    return true;
  }
  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial r;
    for (int i = 0; i < kNumSymbols; ++i)
      r.e[i] = static_cast<std::uint16_t>(a.e[i] + b.e[i]);
    return r;
  }
  /// Requires b.divides(a).
  friend Monomial operator/(const Monomial& a, const Monomial& b) {
    Monomial r;
    for (int i = 0; i < kNumSymbols; ++i)
      r.e[i] = static_cast<std::uint16_t>(a.e[i] - b.e[i]);
    return r;
  }
  friend Monomial lcm(const Monomial& a, const Monomial& b) {
    Monomial r;
    for (int i = 0; i < kNumSymbols; ++i)
      r.e[i] = std::max(a.e[i], b.e[i]);
    return r;
  }
  friend bool operator==(const Monomial& a, const Monomial& b) {
    return a.e == b.e;
  }

  std::string str() const {
    std::string s;
    for (int i = 0; i < kNumSymbols; ++i) {
      if (!e[i]) continue;
      if (!s.empty()) s += "*";
      s += symbol_name(i);
      if (e[i] > 1) s += "^" + std::to_string(e[i]);
    }
    return s;
  }
};

/// true when a > b in graded lex.
inline bool grlex_greater(const Monomial& a, const Monomial& b) {
  int da = a.degree(), db = b.degree();
  if (da != db) return da > db;
  for (int i = 0; i < kNumSymbols; ++i)
    if (a.e[i] != b.e[i]) return a.e[i] > b.e[i];
  return false;
}

struct GrlexGreater {
  bool operator()(const Monomial& a, const Monomial& b) const {
    return grlex_greater(a, b);
  }
};

}  // namespace macrolab::sym
