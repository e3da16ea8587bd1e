/// @file unit_symkernel.cpp
/// @brief Exactness tests for the symbolic kernel: complex-rational scalars,
///        canonical polynomial arithmetic, matrix identities, tau-division,
///        and the constraint-ideal zero test.
#include <catch2/catch_amalgamated.hpp>

#include "macrolab/sym/expr.hpp"
#include "macrolab/sym/ideal.hpp"
#include "macrolab/sym/matrix.hpp"

using namespace macrolab::sym;

namespace {
const ConstraintIdeal& ideal() {
  static ConstraintIdeal k;
  return k;
}
}  // namespace

TEST_CASE("complex rational scalar arithmetic is exact") {
  GaussRational a(Rational(3, 4), Rational(2));
  GaussRational b = a.conj();
  CHECK(a * b == GaussRational(Rational(73, 16)));
  CHECK((a * a.inverse()).is_one());
  GaussRational i = GaussRational::i();
  CHECK(i * i == GaussRational(-1));
  CHECK((a - a).is_zero());
  CHECK(GaussRational(Rational(2, 4)) == GaussRational(Rational(1, 2)));
}

TEST_CASE("conjugate product identity (x1 + i*x2)(x1 - i*x2) = x1^2 + x2^2") {
  SymExpr x1 = sym_xi(0), x2 = sym_xi(1);
  SymExpr i = SymExpr::imag_unit();
  CHECK((x1 + i * x2) * (x1 - i * x2) == x1 * x1 + x2 * x2);
}

TEST_CASE("polynomial arithmetic is canonical") {
  SymExpr x = sym_t(0), y = sym_t(1);
  SymExpr p = (x + y).pow(2);
  CHECK(p == x * x + GaussRational(2) * x * y + y * y);
  CHECK((p - p).is_zero());
  CHECK(p.size() == 3);
  SymExpr q = (x + y) * (x - y);
  CHECK(q == x * x - y * y);
  CHECK((x - x).is_zero());
  CHECK(SymExpr::zero().str() == "0");
  CHECK((sym_tau() - SymExpr::imag_unit() * sym_ell()).str() == "tau - i*ell");
}

TEST_CASE("graded lex order: leading terms") {
  SymExpr p = sym_ell() * sym_ell() + sym_tau();
  Monomial lm = p.leading_monomial();
  CHECK(lm.e[Ell] == 2);
  SymExpr q = sym_tau() * sym_tau() + sym_ell() * sym_tau();
  CHECK(q.leading_monomial().e[Tau] == 2);
  // Same degree: tau beats ell.
  SymExpr r = sym_ell() * sym_ell() + sym_tau() * sym_ell();
  CHECK(r.leading_monomial().e[Tau] == 1);
}

TEST_CASE("2x2 symbolic determinant") {
  SymMatrix m(2, 2);
  m.at(0, 0) = sym_tau();
  m.at(0, 1) = sym_ell();
  m.at(1, 0) = sym_xi(0);
  m.at(1, 1) = sym_xi(1);
  CHECK(m.det() == sym_tau() * sym_xi(1) - sym_ell() * sym_xi(0));
}

TEST_CASE("3x3 adjugate identity m*adj(m) = det(m)*I") {
  SymMatrix m(3, 3);
  SymExpr syms[9] = {sym_tau(),  sym_ell(),  sym_t(0),
                     sym_t(1),   sym_t(2),   sym_n(0),
                     sym_n(1),   sym_n(2),   sym_xi(0)};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m.at(i, j) = syms[3 * i + j];
  SymMatrix prod = m * m.adjugate();
  SymExpr d = m.det();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == j)
        CHECK(prod.at(i, j) == d);
      else
        CHECK(prod.at(i, j).is_zero());
    }
  SymMatrix prod2 = m.adjugate() * m;
  for (int i = 0; i < 3; ++i) CHECK(prod2.at(i, i) == d);
}

TEST_CASE("4x4 determinant agrees with row expansion by hand") {
  // Block triangular numeric case: det = det(upper-left) * det(lower-right).
  SymMatrix m(4, 4);
  long vals[16] = {2, 1, 0, 0, 3, 4, 0, 0, 7, 9, 5, 6, 1, 8, 7, 9};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      m.at(i, j) = SymExpr::constant(GaussRational(vals[4 * i + j]));
  CHECK(m.det() == SymExpr::constant(GaussRational(5 * 3)));
}

TEST_CASE("tau-division: exact factorization") {
  SymExpr i = SymExpr::imag_unit();
  SymExpr p = sym_tau() * sym_tau() + sym_ell() * sym_ell();
  SymExpr m = sym_tau() - i * sym_ell();
  auto d = rem_mod_tau(p, m, ideal());
  CHECK(d.remainder.is_zero());
  CHECK(d.quotient == sym_tau() + i * sym_ell());
}

TEST_CASE("tau-division: round trip p = q*m + r mod ideal") {
  SymExpr i = SymExpr::imag_unit();
  SymExpr m = (sym_tau() - i * sym_ell()).pow(3);
  SymExpr p = (sym_tau() * sym_t(0) + sym_n(0) * sym_ell()).pow(4) +
              sym_tau() * sym_n(1) + sym_xi(2);
  auto d = rem_mod_tau(p, m, ideal());
  CHECK(d.remainder.degree_in(Tau) < 3);
  CHECK(ideal().is_zero_mod_ideal(p - (d.quotient * m + d.remainder)));
}

TEST_CASE("tau-division requires a divisor monic in tau") {
  SymExpr two_tau = GaussRational(2) * sym_tau() + SymExpr::one();
  CHECK_THROWS_AS(rem_mod_tau(sym_tau(), two_tau, ideal()),
                  std::invalid_argument);
  SymExpr bad = sym_ell() * sym_tau() + SymExpr::one();
  CHECK_THROWS_AS(rem_mod_tau(sym_tau(), bad, ideal()), std::invalid_argument);
}

TEST_CASE("constraint ideal: generators reduce to zero") {
  for (const auto& g : ideal().generators())
    CHECK(ideal().normal_form(g).is_zero());
}

TEST_CASE("constraint ideal: parity split membership") {
  SymExpr s2 = sym_t(0) * sym_t(0) + sym_t(1) * sym_t(1) + sym_t(2) * sym_t(2);
  CHECK(ideal().is_zero_mod_ideal(sym_ell().pow(4) - s2 * s2));
  CHECK(ideal().is_zero_mod_ideal(sym_ell().pow(3) - sym_ell() * s2));
  CHECK(ideal().is_zero_mod_ideal(sym_n(0) * sym_t(0) + sym_n(1) * sym_t(1) +
                                  sym_n(2) * sym_t(2)));
  SymExpr one_minus = SymExpr::one() - sym_n(1) * sym_n(1);
  CHECK(ideal().is_zero_mod_ideal(one_minus - sym_n(0) * sym_n(0) -
                                  sym_n(2) * sym_n(2)));
}

TEST_CASE("constraint ideal: non-members are rejected") {
  CHECK_FALSE(ideal().is_zero_mod_ideal(sym_tau() - sym_ell()));
  CHECK_FALSE(ideal().is_zero_mod_ideal(sym_ell()));
  CHECK_FALSE(ideal().is_zero_mod_ideal(sym_n(0)));
  CHECK_FALSE(ideal().is_zero_mod_ideal(SymExpr::one()));
  CHECK_FALSE(
      ideal().is_zero_mod_ideal(sym_t(0) * sym_n(0) - sym_t(1) * sym_n(1)));
}

TEST_CASE("constraint ideal: random explicit combinations are members") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> coef(-5, 5);
  std::uniform_int_distribution<int> pick(0, kNumSymbols - 1);
  auto rand_poly = [&]() {
    SymExpr p;
    for (int t = 0; t < 4; ++t) {
      SymExpr term = SymExpr::constant(GaussRational(coef(rng)));
      for (int f = 0; f < 2; ++f)
        term = term * SymExpr::symbol(static_cast<Symbol>(pick(rng)));
      p += term;
    }
    return p;
  };
  const auto& gens = ideal().generators();
  for (int rep = 0; rep < 8; ++rep) {
    SymExpr p = rand_poly() * gens[0] + rand_poly() * gens[1] +
                rand_poly() * gens[2];
    CHECK(ideal().is_zero_mod_ideal(p));
  }
}

TEST_CASE("normal form is idempotent and order-canonical") {
  SymExpr p = (sym_n(0) + sym_t(0) + sym_ell()).pow(3) +
              (sym_tau() + sym_n(2)).pow(2);
  SymExpr r = ideal().normal_form(p);
  CHECK(ideal().normal_form(r) == r);
  CHECK(ideal().normal_form(sym_ell() * sym_ell()) ==
        sym_t(0) * sym_t(0) + sym_t(1) * sym_t(1) + sym_t(2) * sym_t(2));
}

TEST_CASE("evaluation at rational points is exact") {
  Point pt{};
  pt[Tau] = GaussRational(Rational(1, 2));
  pt[Tan1] = GaussRational(Rational(-2, 3));
  SymExpr p = sym_tau() * sym_tau() * sym_t(0) + SymExpr::one();
  // (1/2)^2 * (-2/3) + 1 = -1/6 + 1 = 5/6.
  CHECK(p.eval(pt) == GaussRational(Rational(5, 6)));
}
