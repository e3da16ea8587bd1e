/// @file ideal.hpp
/// @brief The boundary-symbol constraint ideal <|n|^2-1, n.t, ell^2-|t|^2>
///        with a cached Groebner basis, full normal-form reduction, a
///        monic-in-tau division with remainder, and a dual-route zero test
///        (normal form + exact evaluation at random constraint points).
#pragma once

#include <optional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "macrolab/sym/expr.hpp"

namespace macrolab::sym {

// ============================================================
// ConstraintIdeal
// ============================================================

class ConstraintIdeal {
 public:
  ConstraintIdeal() {
    SymExpr g1 = sym_n(0) * sym_n(0) + sym_n(1) * sym_n(1) +
                 sym_n(2) * sym_n(2) - SymExpr::one();
    SymExpr g2 = sym_n(0) * sym_t(0) + sym_n(1) * sym_t(1) + sym_n(2) * sym_t(2);
    SymExpr g3 = sym_ell() * sym_ell() - sym_t(0) * sym_t(0) -
                 sym_t(1) * sym_t(1) - sym_t(2) * sym_t(2);
    gens_ = {g1, g2, g3};
    gb_ = buchberger(gens_);
  }

  const std::vector<SymExpr>& generators() const { return gens_; }
  const std::vector<SymExpr>& groebner_basis() const { return gb_; }

  /// Full normal form: no term of the result is divisible by any basis
  /// leading monomial. normal_form is idempotent.
  SymExpr normal_form(const SymExpr& p) const { return reduce(p, gb_); }

  /// Dual-route membership test. Route 1: normal form vanishes. Route 2:
  /// exact evaluation at >= 64 random rational points of the constraint set
  /// (ell handled by parity split with ell^2 -> |t|^2). The two routes must
  /// agree; a mismatch is a defect in this kernel and throws.
  bool is_zero_mod_ideal(const SymExpr& p) const {
    bool nf_zero = normal_form(p).is_zero();
    auto [p0, p1] = p.split_ell();
    const auto& pts = eval_points();
    bool eval_zero = true;
    for (const auto& pt : pts) {
      if (!p0.eval(pt).is_zero() || !p1.eval(pt).is_zero()) {
        eval_zero = false;
        break;
      }
    }
    if (nf_zero != eval_zero)
      throw std::logic_error(
          "ConstraintIdeal: normal-form and evaluation routes disagree");
    return nf_zero;
  }

 private:
  static SymExpr reduce(const SymExpr& p, const std::vector<SymExpr>& basis) {
    SymExpr rest = p, out;
    while (!rest.is_zero()) {
      const Monomial& lm = rest.leading_monomial();
      const GaussRational lc = rest.leading_coeff();
      bool hit = false;
      for (const auto& g : basis) {
        if (!g.leading_monomial().divides(lm)) continue;
        Monomial q = lm / g.leading_monomial();
        GaussRational f = lc * g.leading_coeff().inverse();
        rest -= SymExpr::term(f, q) * g;
        hit = true;
        break;
      }
      if (!hit) {
        out.add_term(lm, lc);
        rest.add_term(lm, -lc);
      }
    }
    return out;
  }

  static std::vector<SymExpr> buchberger(std::vector<SymExpr> basis) {
    for (auto& g : basis) g = g * g.leading_coeff().inverse();
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < (int)basis.size(); ++i)
      for (int j = i + 1; j < (int)basis.size(); ++j) pairs.emplace_back(i, j);
    while (!pairs.empty()) {
      auto [i, j] = pairs.back();
      pairs.pop_back();
      const Monomial &mi = basis[i].leading_monomial(),
                     &mj = basis[j].leading_monomial();
      Monomial l = lcm(mi, mj);
      if (l == mi * mj) continue;  // coprime leading monomials
      SymExpr s = SymExpr::term(GaussRational(1), l / mi) * basis[i] -
                  SymExpr::term(GaussRational(1), l / mj) * basis[j];
      SymExpr r = reduce(s, basis);
      if (!r.is_zero()) {
        r = r * r.leading_coeff().inverse();
        for (int k = 0; k < (int)basis.size(); ++k) pairs.emplace_back(k, (int)basis.size());
        basis.push_back(std::move(r));
      }
    }
    // Inter-reduce for a minimal, tidy basis.
    std::vector<SymExpr> out;
    for (int i = 0; i < (int)basis.size(); ++i) {
      std::vector<SymExpr> others;
      for (int j = 0; j < (int)basis.size(); ++j)
        if (j != i) others.push_back(basis[j]);
      SymExpr r = reduce(basis[i], others);
      if (!r.is_zero()) {
        bool dup = false;
        for (const auto& o : out)
          if (o == r) dup = true;
        if (!dup) out.push_back(r);
      }
    }
    return out;
  }

  /// Random rational points satisfying the constraints exactly: n from the
  /// rational parametrization of the unit sphere, t orthogonalized against n,
  /// tau/xi free. ell is never substituted directly (parity split handles
  /// it), so its slot stays 0.
  const std::vector<Point>& eval_points() const {
    if (pts_.empty()) {
      std::mt19937_64 rng(0x5eedc0ffeeULL);
      std::uniform_int_distribution<long> num(-9, 9), den(1, 7);
      auto rnd = [&]() {
        long n = 0;
        while (n == 0) n = num(rng);
        return Rational(n, den(rng));
      };
      while ((int)pts_.size() < 64) {
        Rational a = rnd(), b = rnd();
        Rational s = a * a + b * b;
        Rational d = s + 1;
        Rational n1 = 2 * a / d, n2 = 2 * b / d, n3 = (s - 1) / d;
        Rational w1 = rnd(), w2 = rnd(), w3 = rnd();
        Rational wn = w1 * n1 + w2 * n2 + w3 * n3;
        Rational t1 = w1 - wn * n1, t2 = w2 - wn * n2, t3 = w3 - wn * n3;
        if (t1 == 0 && t2 == 0 && t3 == 0) continue;
        Point pt{};
        pt[Tau] = GaussRational(rnd());
        pt[Ell] = GaussRational(0);
        pt[Tan1] = GaussRational(t1);
        pt[Tan2] = GaussRational(t2);
        pt[Tan3] = GaussRational(t3);
        pt[Nor1] = GaussRational(n1);
        pt[Nor2] = GaussRational(n2);
        pt[Nor3] = GaussRational(n3);
        pt[Xi1] = GaussRational(rnd());
        pt[Xi2] = GaussRational(rnd());
        pt[Xi3] = GaussRational(rnd());
        pts_.push_back(pt);
      }
    }
    return pts_;
  }

  std::vector<SymExpr> gens_, gb_;
  mutable std::vector<Point> pts_;
};

// ============================================================
// Division in tau
// ============================================================

struct TauDivision {
  SymExpr quotient;
  SymExpr remainder;
};

/// Divides p by m, both viewed as polynomials in tau with SymExpr
/// coefficients; m must be monic in tau. Coefficients of the remainder are
/// kept reduced by the ideal, so p == q*m + r mod ideal and
/// deg_tau(r) < deg_tau(m).
inline TauDivision rem_mod_tau(const SymExpr& p, const SymExpr& m,
                               const ConstraintIdeal& ideal) {
  int dm = m.degree_in(Tau);
  SymExpr lead = m.coeff_of(Tau, dm);
  if (!(lead == SymExpr::one()))
    throw std::invalid_argument("rem_mod_tau: divisor not monic in tau");
  SymExpr r = ideal.normal_form(p);
  SymExpr q;
  while (!r.is_zero()) {
    int dr = r.degree_in(Tau);
    if (dr < dm) break;
    SymExpr c = r.coeff_of(Tau, dr);
    SymExpr t = c * SymExpr::symbol(Tau, dr - dm);
    q += t;
    r = ideal.normal_form(r - t * m);
  }
  return {q, r};
}

}  // namespace macrolab::sym
