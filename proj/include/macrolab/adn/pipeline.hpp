#pragma once
/// @file pipeline.hpp
/// @brief Step-by-step replay of the boundary-symbol row-independence
///        (complementing-condition) computation for the slip-boundary
///        elliptic system. Every stored display from tables.hpp is checked
///        against an independently derived value in the quotient ring of the
///        boundary-frame constraint ideal; the pipeline stops at the first
///        failing step and reports expected vs computed per step.

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "macrolab/adn/tables.hpp"
#include "macrolab/sym/expr.hpp"
#include "macrolab/sym/ideal.hpp"
#include "macrolab/sym/matrix.hpp"

namespace macrolab::adn {

using sym::ConstraintIdeal;
using sym::Point;

// ============================================================
// Report types
// ============================================================

struct AdnStep {
  std::string name;
  std::string expected;
  std::string computed;
  std::string note;
  bool pass = true;
};

struct AdnPipelineReport {
  std::vector<AdnStep> steps;
  /// Canonical closed form of the determinant the computation certifies; the
  /// final_determinant step records the proof that the assembled determinant
  /// reduces to it in the quotient ring.
  std::string final_determinant;
  std::vector<std::string> notes;
  bool pass = true;

  /// Name of the earliest failing step, empty when the pipeline passes.
  std::string first_failing_step() const {
    for (const auto& s : steps)
      if (!s.pass) return s.name;
    return {};
  }
};

// ============================================================
// The pipeline
// ============================================================

inline AdnPipelineReport run_pipeline(
    const std::optional<Mutation>& mut = std::nullopt) {
  using namespace detail;
  const AdnTables tb = AdnTables::build(mut);
  const ConstraintIdeal ideal;

  AdnPipelineReport rep;
  rep.notes = {
      "All identities are proved in the quotient ring with the third normal "
      "component kept as a free symbol; the reduced boundary matrix presumes "
      "that component is nonzero, and coordinate relabeling covers the "
      "remaining cases.",
      "The interior operator table corresponds to twice the divergence-form "
      "operator acting on the displacement; the factor-two right-hand-side "
      "scaling is recorded as bookkeeping and not resolved by this pipeline.",
      "The simplified form stored for product entry (2,3) follows the "
      "row-uniform pattern, which agrees with the entry's defining "
      "combination and with the bracket used downstream; a variant closing "
      "form that repeats the leading term and omits the normal-normal term "
      "is inconsistent with both and is not used.",
      "Steps whose computed field shows a single 0 record the canonically "
      "reduced difference between the derived value and the expected "
      "display; 0 certifies agreement in the quotient ring.",
  };

  // Fixed substitution xi -> t + tau*n shared by every interior-to-boundary
  // transition.
  const SymExpr sub_x0 = t(0) + tau() * n(0);
  const SymExpr sub_x1 = t(1) + tau() * n(1);
  const SymExpr sub_x2 = t(2) + tau() * n(2);
  std::array<const SymExpr*, sym::kNumSymbols> repl{};
  repl[sym::Xi1] = &sub_x0;
  repl[sym::Xi2] = &sub_x1;
  repl[sym::Xi3] = &sub_x2;
  auto subst = [&](const SymExpr& p) { return sym::substitute(p, repl); };

  auto nfstr = [&](const SymExpr& p) { return ideal.normal_form(p).str(); };
  auto zero_mod = [&](const SymExpr& p) { return ideal.is_zero_mod_ideal(p); };

  static const std::string kResidualNote =
      "computed is the canonically reduced difference against expected; 0 "
      "certifies agreement in the quotient ring";

  // Runs steps in order and stops after the first failure, mirroring the
  // abort-on-first-failure contract of complementing_determinant().
  auto step = [&](const char* name, auto&& body) {
    if (!rep.pass) return;
    AdnStep s;
    s.name = name;
    body(s);
    if (!s.pass) rep.pass = false;
    rep.steps.push_back(std::move(s));
  };

  // Shared intermediates, each assigned by the step that first derives it;
  // the early-stop rule guarantees they are valid whenever later steps run.
  const SymExpr mplus = tmi().pow(3);
  SymExpr det_sub;
  SymMatrix rem_L(3, 3);
  SymExpr detM;

  // ---- interior operator symbol -------------------------------------------
  step("interior_matrix", [&](AdnStep& s) {
    bool symmetric = true;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (!(tb.interior.at(i, j) == tb.interior.at(j, i))) symmetric = false;
    // Applying the symbol to the frequency vector itself collapses the
    // rank-one part: l(xi) * xi = -2|xi|^2 xi.
    bool eigen = true;
    for (int i = 0; i < 3; ++i) {
      SymExpr v;
      for (int j = 0; j < 3; ++j) v += tb.interior.at(i, j) * x(j);
      if (!(v == c(-2) * xsq() * x(i))) eigen = false;
    }
    Point pt{};
    pt[sym::Xi1] = sym::GaussRational(1);
    SymMatrix got(3, 3), want(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        got.at(i, j) = SymExpr::constant(tb.interior.at(i, j).eval(pt));
    want.at(0, 0) = c(-2);
    want.at(1, 1) = c(-1);
    want.at(2, 2) = c(-1);
    bool spot = true;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (!(got.at(i, j) == want.at(i, j))) spot = false;
    s.expected = want.str();
    s.computed = got.str();
    s.note =
        "matrix shown evaluated at xi=(1,0,0); also checked: symmetry, and "
        "that applying the symbol to xi gives -2|xi|^2 xi";
    s.pass = symmetric && eigen && spot;
  });

  step("interior_determinant", [&](AdnStep& s) {
    SymExpr target = c(-2) * xsq().pow(3);
    SymExpr got = tb.interior.det();
    s.expected = target.str();
    s.computed = got.str();
    s.pass = (got == target);
  });

  step("interior_adjoint_display", [&](AdnStep& s) {
    SymMatrix derived = c(-1) * tb.interior.adjugate();
    bool entries = true;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (!(derived.at(i, j) == tb.adjoint_display.at(i, j)))
          entries = false;
    // The displayed companion matrix carries a leading minus, so the product
    // with the interior symbol is -det * I = 2|xi|^6 * I.
    SymMatrix prod = tb.interior * tb.adjoint_display;
    SymExpr diag = c(2) * xsq().pow(3);
    bool product = true;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const SymExpr want = (i == j) ? diag : SymExpr::zero();
        if (!(prod.at(i, j) == want)) product = false;
      }
    s.expected = tb.adjoint_display.str();
    s.computed = derived.str();
    s.note =
        "computed is the negated adjugate of the interior symbol; the "
        "product of the two matrices is 2|xi|^6 times the identity";
    s.pass = entries && product;
  });

  // ---- boundary-frame substitution ----------------------------------------
  step("substituted_determinant", [&](AdnStep& s) {
    det_sub = subst(tb.interior.det());
    SymMatrix sub_l(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) sub_l.at(i, j) = subst(tb.interior.at(i, j));
    bool commutes = (sub_l.det() == det_sub);
    SymExpr target = c(-2) * (tau() * tau() + ell() * ell()).pow(3);
    s.expected = target.str();
    s.computed = nfstr(det_sub - target);
    s.note = kResidualNote +
             "; substituting into the determinant agrees exactly with "
             "taking the determinant after substitution";
    s.pass = commutes && zero_mod(det_sub - target);
  });

  step("root_factorization", [&](AdnStep& s) {
    // tau^3 - 3i ell tau^2 - 3 ell^2 tau + i ell^3, written term by term.
    SymExpr expanded = tau().pow(3) - ic(3) * ell() * tau().pow(2) -
                       c(3) * ell().pow(2) * tau() + ic(1) * ell().pow(3);
    bool cube = (mplus == expanded);
    bool split = (tau() * tau() + ell() * ell() ==
                  tmi() * (tau() + ic(1) * ell()));
    SymExpr r = sym::rem_mod_tau(det_sub, mplus, ideal).remainder;
    s.expected = expanded.str();
    s.computed = mplus.str();
    s.note =
        "tau^2 + ell^2 factors as (tau - i ell)(tau + i ell); the "
        "substituted determinant is divisible by the cubed factor in the "
        "quotient ring (remainder residual " +
        r.str() + ")";
    s.pass = cube && split && zero_mod(r);
  });

  step("boundary_matrix", [&](AdnStep& s) {
    // Rows one to three applied to the unit normal return the tangential
    // part of the frequency vector; the last row is the unit normal itself.
    SymExpr dot = x(0) * n(0) + x(1) * n(1) + x(2) * n(2);
    std::string exp_s = "[", got_s = "[";
    bool tangential = true;
    for (int i = 0; i < 3; ++i) {
      SymExpr v;
      for (int j = 0; j < 3; ++j) v += tb.boundary.at(i, j) * n(j);
      SymExpr target = x(i) - dot * n(i);
      if (!zero_mod(v - target)) tangential = false;
      if (i) {
        exp_s += ", ";
        got_s += ", ";
      }
      exp_s += nfstr(target);
      got_s += nfstr(v);
    }
    exp_s += "]";
    got_s += "]";
    bool last_row = true;
    for (int j = 0; j < 3; ++j)
      if (!(tb.boundary.at(3, j) == n(j))) last_row = false;
    s.expected = exp_s;
    s.computed = got_s;
    s.note =
        "rows applied to the unit normal, shown canonically reduced; the "
        "fourth row equals the unit normal exactly";
    s.pass = tangential && last_row;
  });

  step("boundary_substituted", [&](AdnStep& s) {
    SymMatrix residual(4, 3);
    bool ok = true;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 3; ++j) {
        SymExpr d = subst(tb.boundary.at(i, j)) -
                    tb.boundary_substituted.at(i, j);
        if (!zero_mod(d)) ok = false;
        residual.at(i, j) = ideal.normal_form(d);
      }
    s.expected = tb.boundary_substituted.str();
    s.computed = residual.str();
    s.note = kResidualNote;
    s.pass = ok;
  });

  step("boundary_rank_deficiency", [&](AdnStep& s) {
    SymExpr d3 = tb.boundary_substituted.select_rows({0, 1, 2}).det();
    s.expected = "0";
    s.computed = nfstr(d3);
    s.note =
        "determinant of the first three substituted boundary rows vanishes "
        "on the constraint set: those rows have rank two";
    s.pass = zero_mod(d3);
  });

  step("boundary_reduced", [&](AdnStep& s) {
    SymMatrix sel = tb.boundary_substituted.select_rows({0, 1, 3});
    bool ok = true;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (!(sel.at(i, j) == tb.reduced_boundary.at(i, j))) ok = false;
    s.expected = tb.reduced_boundary.str();
    s.computed = sel.str();
    s.note =
        "rows one, two, and four are retained; this presumes the third "
        "normal component is nonzero, with the other coordinate cases "
        "covered by relabeling symmetry";
    s.pass = ok;
  });

  // ---- remainders modulo the cubed root factor -----------------------------
  step("quartic_remainder", [&](AdnStep& s) {
    SymExpr r = sym::rem_mod_tau(subst(xsq().pow(2)), mplus, ideal).remainder;
    SymExpr target = c(-4) * ell().pow(2) * tmi().pow(2);
    s.expected = target.str();
    s.computed = r.str();
    s.note =
        "computed shown in canonical reduced coordinates (even powers of "
        "ell rewritten via the tangential norm constraint)";
    s.pass = zero_mod(r - target);
  });

  step("quartic_remainder_tau_weighted", [&](AdnStep& s) {
    SymExpr r =
        sym::rem_mod_tau(tau() * subst(xsq().pow(2)), mplus, ideal).remainder;
    SymExpr target = ic(-4) * ell().pow(3) * tmi().pow(2);
    s.expected = target.str();
    s.computed = r.str();
    s.note =
        "computed shown in canonical reduced coordinates (even powers of "
        "ell rewritten via the tangential norm constraint)";
    s.pass = zero_mod(r - target);
  });

  step("coefficient_table_b", [&](AdnStep& s) {
    SymMatrix residual(3, 3);
    bool ok = true;
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        SymExpr r =
            sym::rem_mod_tau(subst(x(j) * x(k) * xsq()), mplus, ideal)
                .remainder;
        SymExpr d = r - tmi() * tb.coeff_b.at(j, k);
        if (!zero_mod(d)) ok = false;
        residual.at(j, k) = ideal.normal_form(d);
        if (!(tb.coeff_b.at(j, k) == tb.coeff_b.at(k, j))) ok = false;
      }
    s.expected = tb.coeff_b.str();
    s.computed = residual.str();
    s.note = kResidualNote +
             "; each remainder equals (tau - i ell) times the table entry, "
             "and the table is symmetric";
    s.pass = ok;
  });

  step("coefficient_table_c", [&](AdnStep& s) {
    SymMatrix residual(3, 3);
    bool ok = true;
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        SymExpr r = sym::rem_mod_tau(tau() * subst(x(j) * x(k) * xsq()),
                                     mplus, ideal)
                        .remainder;
        SymExpr d = r - tmi() * tb.coeff_c.at(j, k);
        if (!zero_mod(d)) ok = false;
        residual.at(j, k) = ideal.normal_form(d);
        if (!(tb.coeff_c.at(j, k) == tb.coeff_c.at(k, j))) ok = false;
      }
    s.expected = tb.coeff_c.str();
    s.computed = residual.str();
    s.note = kResidualNote +
             "; each tau-weighted remainder equals (tau - i ell) times the "
             "table entry, and the table is symmetric";
    s.pass = ok;
  });

  step("adjoint_remainder_display", [&](AdnStep& s) {
    // Bracket of the displayed remainder: the common factor -(tau - i ell)
    // sits outside it.
    SymMatrix bracket(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        bracket.at(i, j) =
            (i == j) ? c(-8) * ell().pow(2) * tmi() - tb.coeff_b.at(i, i)
                     : -tb.coeff_b.at(i, j);
    SymMatrix residual(3, 3);
    bool ok = true;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        rem_L.at(i, j) =
            sym::rem_mod_tau(subst(tb.adjoint_display.at(i, j)), mplus, ideal)
                .remainder;
        SymExpr d = rem_L.at(i, j) + tmi() * bracket.at(i, j);
        if (!zero_mod(d)) ok = false;
        residual.at(i, j) = ideal.normal_form(d);
      }
    s.expected = bracket.str();
    s.computed = residual.str();
    s.note = kResidualNote +
             "; expected shows the bracket, with the common factor "
             "-(tau - i ell) outside";
    s.pass = ok;
  });

  // ---- product matrix entries ----------------------------------------------
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      std::string name = "product_entry_" + std::to_string(i + 1) +
                         std::to_string(j + 1);
      step(name.c_str(), [&, i, j](AdnStep& s) {
        SymExpr p;
        for (int k = 0; k < 3; ++k)
          p += tb.reduced_boundary.at(i, k) * rem_L.at(k, j);
        SymExpr r = sym::rem_mod_tau(p, mplus, ideal).remainder;
        // The product row equals -(tau - i ell) times the defining
        // combination, which reduces to the simplified form.
        bool from_product =
            zero_mod(r + tmi() * tb.product_definition.at(i, j));
        SymExpr d = tb.product_definition.at(i, j) - tb.product_final.at(i, j);
        bool simplified = zero_mod(d);
        s.expected = tb.product_final.at(i, j).str();
        s.computed = nfstr(d);
        s.note = kResidualNote +
                 "; also checked: the reduced-boundary row times the "
                 "companion remainders equals -(tau - i ell) times this "
                 "entry";
        if (i == 1 && j == 2)
          s.note +=
              "; stored simplified form follows the row-uniform pattern "
              "consistent with the defining combination and the downstream "
              "bracket";
        s.pass = from_product && simplified;
      });
    }

  // ---- first cofactor difference -------------------------------------------
  step("determinant_first_display", [&](AdnStep& s) {
    const SymMatrix& M = tb.product_final;
    SymExpr cof = M.at(0, 1) * M.at(1, 2) - M.at(1, 1) * M.at(0, 2);
    SymExpr d = tb.det_first_display - cof;
    s.expected = "b1 = " + tb.det_first_bracket[0].str() +
                 "; b2 = " + tb.det_first_bracket[1].str() +
                 "; b3 = " + tb.det_first_bracket[2].str() +
                 "; b4 = " + tb.det_first_bracket[3].str();
    s.computed = nfstr(d);
    s.note = kResidualNote +
             "; ell^2 * (b1*b2 - b3*b4) equals the cofactor combination "
             "M12*M23 - M22*M13 of the product matrix";
    s.pass = zero_mod(d);
  });

  for (int g = 0; g < 6; ++g) {
    std::string name = "grouping_first_" + std::to_string(g + 1);
    step(name.c_str(), [&, g](AdnStep& s) {
      const auto& [lhs, rhs] = tb.grouping_first[static_cast<size_t>(g)];
      s.expected = nfstr(rhs);
      s.computed = nfstr(lhs);
      s.note =
          "slot products combined as displayed; both sides shown in "
          "canonical reduced coordinates";
      s.pass = zero_mod(lhs - rhs);
    });
  }

  step("determinant_first_reduced", [&](AdnStep& s) {
    SymExpr d = tb.det_first_reduced - tb.det_first_display;
    s.expected = tb.det_first_reduced.str();
    s.computed = nfstr(d);
    s.note = kResidualNote;
    s.pass = zero_mod(d);
  });

  // ---- the three cofactor blocks -------------------------------------------
  for (int b = 0; b < 3; ++b) {
    std::string name = "determinant_block_" + std::to_string(b + 1);
    step(name.c_str(), [&, b](AdnStep& s) {
      const SymMatrix& M = tb.product_final;
      SymExpr piece;
      if (b == 0)
        piece = M.at(2, 0) * (M.at(0, 1) * M.at(1, 2) -
                              M.at(1, 1) * M.at(0, 2));
      else if (b == 1)
        piece = -(M.at(2, 1) * (M.at(0, 0) * M.at(1, 2) -
                                M.at(1, 0) * M.at(0, 2)));
      else
        piece = M.at(2, 2) * (M.at(0, 0) * M.at(1, 1) -
                              M.at(0, 1) * M.at(1, 0));
      SymExpr d = tb.det_block[static_cast<size_t>(b)] - piece;
      s.expected = tb.det_block[static_cast<size_t>(b)].str();
      s.computed = nfstr(d);
      s.note = kResidualNote +
               "; equals the corresponding cofactor block of the "
               "determinant expansion along the third row";
      s.pass = zero_mod(d);
    });
  }

  for (int g = 0; g < 6; ++g) {
    std::string name = "grouping_block_" + std::to_string(g + 1);
    step(name.c_str(), [&, g](AdnStep& s) {
      const auto& [lhs, rhs] = tb.grouping_block[static_cast<size_t>(g)];
      s.expected = nfstr(rhs);
      s.computed = nfstr(lhs);
      s.note =
          "cross-block products combined as displayed; both sides shown in "
          "canonical reduced coordinates";
      s.pass = zero_mod(lhs - rhs);
    });
  }

  // ---- assembly of the determinant -----------------------------------------
  step("determinant_assembly", [&](AdnStep& s) {
    detM = tb.product_final.det();
    SymExpr blocks = tb.det_block[0] + tb.det_block[1] + tb.det_block[2];
    SymExpr d = detM - tb.assembly[0];
    bool direct = zero_mod(d);
    bool via_blocks = zero_mod(blocks - tb.assembly[0]);
    s.expected = tb.assembly[0].str();
    s.computed = nfstr(d);
    s.note = kResidualNote +
             "; both the direct three-by-three determinant and the sum of "
             "the three cofactor blocks reduce to this stage";
    s.pass = direct && via_blocks;
  });

  step("factored_form_1", [&](AdnStep& s) {
    SymExpr d = tb.assembly[0] - tb.assembly[1];
    s.expected = tb.assembly[1].str();
    s.computed = nfstr(d);
    s.note = kResidualNote;
    s.pass = zero_mod(d);
  });

  step("factored_form_2", [&](AdnStep& s) {
    SymExpr d = tb.assembly[1] - tb.assembly[2];
    s.expected = tb.assembly[2].str();
    s.computed = nfstr(d);
    s.note = kResidualNote;
    s.pass = zero_mod(d);
  });

  step("final_determinant", [&](AdnStep& s) {
    SymExpr d1 = tb.assembly[2] - tb.assembly[3];
    SymExpr d2 = detM - tb.assembly[3];
    s.expected = tb.assembly[3].str();
    s.computed = nfstr(d2);
    s.note = kResidualNote +
             "; the assembled determinant reduces to 384 ell^8 n3 "
             "(tau - i ell)^3, nonzero whenever ell and n3 are nonzero";
    s.pass = zero_mod(d1) && zero_mod(d2);
  });

  step("numeric_spot_check", [&](AdnStep& s) {
    Point pt{};
    pt[sym::Tau] = sym::GaussRational(2);
    pt[sym::Ell] = sym::GaussRational(1);
    pt[sym::Tan1] = sym::GaussRational(1);
    pt[sym::Nor3] = sym::GaussRational(1);
    auto E = [&](int i, int j) { return tb.product_final.at(i, j).eval(pt); };
    sym::GaussRational nd =
        E(0, 0) * (E(1, 1) * E(2, 2) - E(1, 2) * E(2, 1)) -
        E(0, 1) * (E(1, 0) * E(2, 2) - E(1, 2) * E(2, 0)) +
        E(0, 2) * (E(1, 0) * E(2, 1) - E(1, 1) * E(2, 0));
    sym::GaussRational target(sym::Rational(768), sym::Rational(-4224));
    bool numeric = (nd == target);
    bool closed = (tb.assembly[3].eval(pt) == target);
    s.expected = SymExpr::constant(target).str();
    s.computed = SymExpr::constant(nd).str();
    s.note =
        "product matrix evaluated at tau=2, ell=1, t=(1,0,0), n=(0,0,1); "
        "determinant taken numerically and compared against the closed "
        "form 384 * (2 - i)^3";
    s.pass = numeric && closed;
  });

  rep.final_determinant = tb.assembly[3].str();
  return rep;
}

// ============================================================
// Convenience builders with built-in verification
// ============================================================

/// 3x3 interior operator symbol, entries -(|xi|^2 delta_ij + xi_i xi_j).
inline SymMatrix build_l() { return AdnTables::build().interior; }

/// The cubed root factor (tau - i ell)^3, expanded; verifies on the way that
/// the substituted interior determinant is congruent to -2(tau^2 + ell^2)^3,
/// i.e. that all three upper-half-plane roots in tau equal i*ell.
inline SymExpr build_Mplus() {
  using namespace detail;
  const AdnTables tb = AdnTables::build();
  const ConstraintIdeal ideal;
  const SymExpr sub_x0 = t(0) + tau() * n(0);
  const SymExpr sub_x1 = t(1) + tau() * n(1);
  const SymExpr sub_x2 = t(2) + tau() * n(2);
  std::array<const SymExpr*, sym::kNumSymbols> repl{};
  repl[sym::Xi1] = &sub_x0;
  repl[sym::Xi2] = &sub_x1;
  repl[sym::Xi3] = &sub_x2;
  SymExpr det_sub = sym::substitute(tb.interior.det(), repl);
  SymExpr target = c(-2) * (tau() * tau() + ell() * ell()).pow(3);
  if (!ideal.is_zero_mod_ideal(det_sub - target))
    throw std::logic_error(
        "build_Mplus: substituted determinant is not -2(tau^2+ell^2)^3");
  return tmi().pow(3);
}

/// Boundary operator symbol in the boundary frame: the full 4x3 matrix at
/// xi = t + tau*n and the reduced 3x3 matrix of retained rows one, two, four.
struct BoundarySymbols {
  SymMatrix full;     // 4x3
  SymMatrix reduced;  // 3x3
};

inline BoundarySymbols build_boundary() {
  const AdnTables tb = AdnTables::build();
  const ConstraintIdeal ideal;
  if (!ideal.is_zero_mod_ideal(
          tb.boundary_substituted.select_rows({0, 1, 2}).det()))
    throw std::logic_error(
        "build_boundary: first three rows are not rank-deficient");
  SymMatrix sel = tb.boundary_substituted.select_rows({0, 1, 3});
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (!(sel.at(i, j) == tb.reduced_boundary.at(i, j)))
        throw std::logic_error(
            "build_boundary: reduced matrix does not match retained rows");
  return {tb.boundary_substituted, tb.reduced_boundary};
}

/// The two 3x3 coefficient tables of the linear-in-tau remainders: entry
/// (j,k) of .b satisfies
///   (t_j + tau n_j)(t_k + tau n_k)|t + tau n|^2
///     == (tau - i ell) * b_jk   mod (tau - i ell)^3 and the ideal,
/// and entry (j,k) of .c the same with an extra factor of tau on the left.
struct BCCoeffs {
  SymMatrix b;
  SymMatrix c;
};

inline BCCoeffs build_BC_coeffs() {
  using namespace detail;
  const AdnTables tb = AdnTables::build();
  const ConstraintIdeal ideal;
  const SymExpr mplus = tmi().pow(3);
  const SymExpr sub_x0 = t(0) + tau() * n(0);
  const SymExpr sub_x1 = t(1) + tau() * n(1);
  const SymExpr sub_x2 = t(2) + tau() * n(2);
  std::array<const SymExpr*, sym::kNumSymbols> repl{};
  repl[sym::Xi1] = &sub_x0;
  repl[sym::Xi2] = &sub_x1;
  repl[sym::Xi3] = &sub_x2;
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      SymExpr lhs = sym::substitute(x(j) * x(k) * xsq(), repl);
      SymExpr rb = sym::rem_mod_tau(lhs, mplus, ideal).remainder;
      if (!ideal.is_zero_mod_ideal(rb - tmi() * tb.coeff_b.at(j, k)))
        throw std::logic_error("build_BC_coeffs: linear table mismatch");
      SymExpr rc = sym::rem_mod_tau(tau() * lhs, mplus, ideal).remainder;
      if (!ideal.is_zero_mod_ideal(rc - tmi() * tb.coeff_c.at(j, k)))
        throw std::logic_error(
            "build_BC_coeffs: tau-weighted table mismatch");
    }
  return {tb.coeff_b, tb.coeff_c};
}

/// Runs the whole pipeline and returns det(M) for the assembled product
/// matrix; throws with the failing step name if any identity check fails.
/// The returned expression minus 384 ell^8 n3 (tau - i ell)^3 reduces to
/// zero in the quotient ring.
inline SymExpr complementing_determinant() {
  AdnPipelineReport rep = run_pipeline();
  if (!rep.pass)
    throw std::runtime_error("complementing_determinant: step '" +
                             rep.first_failing_step() + "' failed");
  return AdnTables::build().product_final.det();
}

}  // namespace macrolab::adn
