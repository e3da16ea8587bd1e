/// @file expr.hpp
/// @brief Sparse exact multivariate polynomial over GaussRational with
///        canonical graded-lex term order. Equality of values implies
///        identical representation: p - p collects to the empty polynomial.
#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "macrolab/sym/monomial.hpp"
#include "macrolab/sym/rational.hpp"

namespace macrolab::sym {

using Point = std::array<GaussRational, kNumSymbols>;

// ============================================================
// SymExpr
// ============================================================

class SymExpr {
 public:
  using TermMap = std::map<Monomial, GaussRational, GrlexGreater>;

  SymExpr() = default;
  SymExpr(long v) { *this = constant(GaussRational(v)); }  // NOLINT

  static SymExpr zero() { return SymExpr(); }
  static SymExpr one() { return constant(GaussRational(1)); }
  static SymExpr constant(const GaussRational& c) {
    SymExpr p;
    if (!c.is_zero()) p.terms_[Monomial{}] = c;
    return p;
  }
  static SymExpr imag_unit() { return constant(GaussRational::i()); }
  static SymExpr symbol(Symbol s, int power = 1) {
    SymExpr p;
    Monomial m;
    m.e[s] = static_cast<std::uint16_t>(power);
    p.terms_[m] = GaussRational(1);
    return p;
  }
  static SymExpr term(const GaussRational& c, const Monomial& m) {
    SymExpr p;
    if (!c.is_zero()) p.terms_[m] = c;
    return p;
  }

  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  const TermMap& terms() const { return terms_; }

  bool is_constant() const {
    return terms_.empty() ||
           (terms_.size() == 1 && terms_.begin()->first.is_unit());
  }
  GaussRational constant_value() const {
    if (terms_.empty()) return GaussRational(0);
    if (!is_constant())
      throw std::logic_error("SymExpr: constant_value of non-constant");
    return terms_.begin()->second;
  }

  const Monomial& leading_monomial() const {
    if (terms_.empty()) throw std::logic_error("SymExpr: LM of zero");
    return terms_.begin()->first;
  }
  const GaussRational& leading_coeff() const {
    if (terms_.empty()) throw std::logic_error("SymExpr: LC of zero");
    return terms_.begin()->second;
  }

  int total_degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
    return d;
  }
  int degree_in(Symbol s) const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max<int>(d, m.e[s]);
    return d;
  }

  // ---- arithmetic -------------------------------------------------------

  void add_term(const Monomial& m, const GaussRational& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      terms_.emplace(m, c);
    } else {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  SymExpr& operator+=(const SymExpr& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  SymExpr& operator-=(const SymExpr& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  friend SymExpr operator+(SymExpr a, const SymExpr& b) { return a += b; }
  friend SymExpr operator-(SymExpr a, const SymExpr& b) { return a -= b; }
  SymExpr operator-() const {
    SymExpr r;
    for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
    return r;
  }

  friend SymExpr operator*(const SymExpr& a, const SymExpr& b) {
    SymExpr r;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
    return r;
  }
  SymExpr& operator*=(const SymExpr& o) { return *this = *this * o; }

  friend SymExpr operator*(const GaussRational& c, const SymExpr& p) {
    SymExpr r;
    if (c.is_zero()) return r;
    for (const auto& [m, pc] : p.terms_) r.terms_.emplace(m, c * pc);
    return r;
  }
  friend SymExpr operator*(const SymExpr& p, const GaussRational& c) {
    return c * p;
  }

  SymExpr pow(unsigned k) const {
    SymExpr r = one();
    SymExpr base = *this;
    while (k) {
      if (k & 1u) r = r * base;
      base = base * base;
      k >>= 1u;
    }
    return r;
  }

  friend bool operator==(const SymExpr& a, const SymExpr& b) {
    return a.terms_ == b.terms_;
  }
  friend bool operator!=(const SymExpr& a, const SymExpr& b) {
    return !(a == b);
  }

  // ---- structure wrt one symbol -----------------------------------------

  /// Coefficient of s^k: polynomial in the remaining symbols.
  SymExpr coeff_of(Symbol s, int k) const {
    SymExpr r;
    for (const auto& [m, c] : terms_) {
      if (m.e[s] != k) continue;
      Monomial q = m;
      q.e[s] = 0;
      r.terms_.emplace(q, c);
    }
    return r;
  }

  /// Splits p = p0 + ell*p1 modulo (ell^2 - t1^2 - t2^2 - t3^2); neither part
  /// mentions ell afterward. This is exactly division by that quadratic in
  /// the single variable ell.
  std::pair<SymExpr, SymExpr> split_ell() const {
    SymExpr s2 = symbol(Tan1) * symbol(Tan1) + symbol(Tan2) * symbol(Tan2) +
                 symbol(Tan3) * symbol(Tan3);
    std::vector<SymExpr> s2pow{one()};
    SymExpr p0, p1;
    for (const auto& [m, c] : terms_) {
      int e = m.e[Ell];
      Monomial base = m;
      base.e[Ell] = 0;
      int q = e / 2, r = e % 2;
      while ((int)s2pow.size() <= q) s2pow.push_back(s2pow.back() * s2);
      SymExpr contrib = term(c, base) * s2pow[q];
      if (r == 0)
        p0 += contrib;
      else
        p1 += contrib;
    }
    return {p0, p1};
  }

  // ---- evaluation --------------------------------------------------------

  /// Exact evaluation: substitutes pt[s] for every symbol s.
  GaussRational eval(const Point& pt) const {
    std::array<std::vector<GaussRational>, kNumSymbols> pows;
    for (int s = 0; s < kNumSymbols; ++s) pows[s].push_back(GaussRational(1));
    GaussRational acc(0);
    for (const auto& [m, c] : terms_) {
      GaussRational t = c;
      for (int s = 0; s < kNumSymbols; ++s) {
        int e = m.e[s];
        if (!e) continue;
        auto& tab = pows[s];
        while ((int)tab.size() <= e) tab.push_back(tab.back() * pt[s]);
        t *= tab[e];
      }
      acc += t;
    }
    return acc;
  }

  // ---- printing ----------------------------------------------------------

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      bool neg = false;
      std::string body;
      if (c.is_real()) {
        neg = c.re < 0;
        Rational a = neg ? Rational(-c.re) : c.re;
        if (a != 1 || m.is_unit()) {
          std::ostringstream os;
          os << a;
          body = os.str();
        }
      } else if (c.is_imag()) {
        neg = c.im < 0;
        Rational a = neg ? Rational(-c.im) : c.im;
        if (a == 1) {
          body = "i";
        } else {
          std::ostringstream os;
          os << a << "*i";
          body = os.str();
        }
      } else {
        body = c.str();
      }
      std::string mono = m.str();
      std::string t = body.empty() ? mono
                      : mono.empty() ? body
                                     : body + "*" + mono;
      if (first) {
        out += (neg ? "-" : "") + t;
        first = false;
      } else {
        out += (neg ? " - " : " + ") + t;
      }
    }
    return out;
  }

 private:
  TermMap terms_;
};

/// Substitutes replacement expressions for selected symbols (null pointer =
/// keep the symbol). Fully expands; exact.
inline SymExpr substitute(
    const SymExpr& p, const std::array<const SymExpr*, kNumSymbols>& repl) {
  SymExpr out;
  for (const auto& [m, c] : p.terms()) {
    SymExpr factor = SymExpr::constant(c);
    Monomial rest;
    for (int s = 0; s < kNumSymbols; ++s) {
      int e = m.e[s];
      if (!e) continue;
      if (repl[s])
        factor *= repl[s]->pow(static_cast<unsigned>(e));
      else
        rest.e[s] = static_cast<std::uint16_t>(e);
    }
    out += factor * SymExpr::term(GaussRational(1), rest);
  }
  return out;
}

// Convenience symbol handles.
inline SymExpr sym_tau() { return SymExpr::symbol(Tau); }
inline SymExpr sym_ell() { return SymExpr::symbol(Ell); }
inline SymExpr sym_t(int i) {
  return SymExpr::symbol(static_cast<Symbol>(Tan1 + i));
}
inline SymExpr sym_n(int i) {
  return SymExpr::symbol(static_cast<Symbol>(Nor1 + i));
}
inline SymExpr sym_xi(int i) {
  return SymExpr::symbol(static_cast<Symbol>(Xi1 + i));
}

}  // namespace macrolab::sym
