#pragma once
/// @file tables.hpp
/// @brief Fixed symbolic data tables for the slip-boundary elliptic system
///        whose boundary-symbol row-independence computation the pipeline
///        replays: the interior operator symbol, its companion (adjoint-type)
///        matrix, the boundary operator symbol, the linear-in-tau remainder
///        coefficient tables, the product matrix, and every stage of the
///        determinant assembly. Entries are transcribed once, literally, and
///        are cross-checked against independently computed values by the
///        pipeline, so a transcription fault cannot pass silently.

#include <array>
#include <optional>
#include <vector>

#include "macrolab/sym/expr.hpp"
#include "macrolab/sym/matrix.hpp"

namespace macrolab::adn {

using sym::GaussRational;
using sym::Rational;
using sym::SymExpr;
using sym::SymMatrix;

// ============================================================
// Fault injection addressing
// ============================================================

enum class Table : int {
  InteriorMatrix,       // 3x3 interior operator symbol l(xi)
  AdjointMatrix,        // 3x3 companion matrix L(xi) with l*L = -det(l)*I
  BoundaryMatrix,       // 4x3 boundary operator symbol in xi
  BoundarySubstituted,  // 4x3 boundary symbol at xi = t + tau*n
  ReducedBoundary,      // 3x3 retained-row boundary matrix
  CoeffB,               // 3x3 linear-in-tau remainder coefficients
  CoeffC,               // 3x3 tau-weighted remainder coefficients
  ProductDefinition,    // 3x3 product-matrix defining combinations
  ProductFinal,         // 3x3 product-matrix simplified forms
  DetFirstBracket,      // row 0..3 selects one first-cofactor bracket
  DetFirstReduced,      // collapsed first cofactor difference (row/col unused)
  DetBlock,             // row 0..2 selects one cofactor-block display
  Assembly,             // row 0..3 selects one determinant assembly stage
};

/// Negates one stored entry after construction. Used to demonstrate that the
/// pipeline localizes an injected transcription fault at the first step that
/// consumes the damaged table. col is ignored for expression-valued tables.
struct Mutation {
  Table table;
  int row = 0;
  int col = 0;
};

// ============================================================
// Shorthand builders (file-local)
// ============================================================

namespace detail {

inline SymExpr c(long v) { return SymExpr::constant(GaussRational(v)); }
inline SymExpr ic(long v) {
  return SymExpr::constant(GaussRational(Rational(0), Rational(v)));
}
inline SymExpr tau() { return sym::sym_tau(); }
inline SymExpr ell() { return sym::sym_ell(); }
inline SymExpr t(int i) { return sym::sym_t(i); }
inline SymExpr n(int i) { return sym::sym_n(i); }
inline SymExpr x(int i) { return sym::sym_xi(i); }
/// |xi|^2 expanded.
inline SymExpr xsq() {
  return x(0) * x(0) + x(1) * x(1) + x(2) * x(2);
}
/// tau - i*ell, the factor whose third power is the reduction modulus.
inline SymExpr tmi() { return tau() - ic(1) * ell(); }

}  // namespace detail

// ============================================================
// The tables
// ============================================================

struct AdnTables {
  // Interior / boundary operator symbols.
  SymMatrix interior;             // 3x3, in xi
  SymMatrix adjoint_display;      // 3x3, in xi
  SymMatrix boundary;             // 4x3, in xi and n
  SymMatrix boundary_substituted; // 4x3, xi = t + tau*n, constraints applied
  SymMatrix reduced_boundary;     // 3x3, rows {1,2,4} of the substituted form

  // Remainder coefficient tables (symmetric in the two indices).
  SymMatrix coeff_b;  // 3x3
  SymMatrix coeff_c;  // 3x3

  // Product matrix: defining combinations and simplified forms.
  SymMatrix product_definition;  // 3x3
  SymMatrix product_final;       // 3x3

  // First cofactor difference: four brackets, six slot pairings, collapse.
  std::array<SymExpr, 4> det_first_bracket;
  SymExpr det_first_display;  // ell^2 * (b0*b1 - b2*b3)
  std::array<std::pair<SymExpr, SymExpr>, 6> grouping_first;  // lhs -> rhs
  SymExpr det_first_reduced;

  // The three cofactor blocks of the determinant expansion.
  std::array<SymExpr, 3> det_block;
  std::array<std::pair<SymExpr, SymExpr>, 6> grouping_block;  // lhs -> rhs

  // Determinant assembly stages; the last one is the canonical target.
  std::array<SymExpr, 4> assembly;

  static AdnTables build(const std::optional<Mutation>& mut = std::nullopt);
};

inline AdnTables AdnTables::build(const std::optional<Mutation>& mut) {
  using namespace detail;
  AdnTables tb;

  // ---- interior operator symbol: diagonal -(|xi|^2 + xi_i^2),
  //      off-diagonal -(xi_i xi_j) ------------------------------------------
  tb.interior = SymMatrix(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      tb.interior.at(i, j) =
          (i == j) ? -(xsq() + x(i) * x(i)) : -(x(i) * x(j));

  // ---- companion matrix: diagonal -(|xi|^4 + (sum of the other two squared
  //      components)*|xi|^2), off-diagonal +xi_i xi_j |xi|^2 (a leading minus
  //      distributed over a bracket whose off-diagonal entries are negative).
  //      Satisfies interior * adjoint_display = -det(interior) * I. ---------
  tb.adjoint_display = SymMatrix(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == j) {
        int a = (i + 1) % 3, b = (i + 2) % 3;
        tb.adjoint_display.at(i, j) =
            -(xsq().pow(2) + (x(a) * x(a) + x(b) * x(b)) * xsq());
      } else {
        tb.adjoint_display.at(i, j) = x(i) * x(j) * xsq();
      }
    }

  // ---- boundary operator symbol: rows 1..3 are
  //      n_j xi_i - 2 n_i n_j (xi.n) + delta_ij (xi.n); row 4 is n ----------
  tb.boundary = SymMatrix(4, 3);
  {
    SymExpr dot = x(0) * n(0) + x(1) * n(1) + x(2) * n(2);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        SymExpr e = n(j) * x(i) - c(2) * n(i) * n(j) * dot;
        if (i == j) e += dot;
        tb.boundary.at(i, j) = e;
      }
    for (int j = 0; j < 3; ++j) tb.boundary.at(3, j) = n(j);
  }

  // ---- boundary symbol at xi = t + tau*n with the tangency and unit-normal
  //      constraints applied: diagonal tau*(1 - n_i^2) + t_i n_i,
  //      off-diagonal t_i n_j - tau n_i n_j; row 4 is n ----------------------
  tb.boundary_substituted = SymMatrix(4, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      tb.boundary_substituted.at(i, j) =
          (i == j) ? tau() * (c(1) - n(i) * n(i)) + t(i) * n(i)
                   : t(i) * n(j) - tau() * n(i) * n(j);
  for (int j = 0; j < 3; ++j) tb.boundary_substituted.at(3, j) = n(j);

  // ---- retained rows {1, 2, 4} -------------------------------------------
  tb.reduced_boundary = SymMatrix(3, 3);
  for (int j = 0; j < 3; ++j) {
    tb.reduced_boundary.at(0, j) = tb.boundary_substituted.at(0, j);
    tb.reduced_boundary.at(1, j) = tb.boundary_substituted.at(1, j);
    tb.reduced_boundary.at(2, j) = tb.boundary_substituted.at(3, j);
  }

  // ---- linear-in-tau remainder coefficients ------------------------------
  // coeff_b[j][k] = (t_j t_k + 3i ell (t_j n_k + t_k n_j) - 5 n_j n_k ell^2)
  //                 * tau
  //                 + i t_j t_k ell + (n_j t_k + t_j n_k) ell^2
  //                 + 3i n_j n_k ell^3
  tb.coeff_b = SymMatrix(3, 3);
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k)
      tb.coeff_b.at(j, k) =
          (t(j) * t(k) + ic(3) * ell() * t(j) * n(k) +
           ic(3) * ell() * t(k) * n(j) - c(5) * n(j) * n(k) * ell().pow(2)) *
              tau() +
          ic(1) * t(j) * t(k) * ell() + n(j) * t(k) * ell().pow(2) +
          t(j) * n(k) * ell().pow(2) + ic(3) * n(j) * n(k) * ell().pow(3);

  // coeff_c[j][k] = (3i ell t_j t_k - 5 (n_j t_k + t_j n_k) ell^2
  //                  - 7i n_j n_k ell^3) * tau
  //                 + t_j t_k ell^2 + 3i ell^3 (n_j t_k + t_j n_k)
  //                 - 5 n_j n_k ell^4
  tb.coeff_c = SymMatrix(3, 3);
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k)
      tb.coeff_c.at(j, k) =
          (ic(3) * ell() * t(j) * t(k) - c(5) * n(j) * t(k) * ell().pow(2) -
           c(5) * t(j) * n(k) * ell().pow(2) -
           ic(7) * n(j) * n(k) * ell().pow(3)) *
              tau() +
          t(j) * t(k) * ell().pow(2) + ic(3) * ell().pow(3) * n(j) * t(k) +
          ic(3) * ell().pow(3) * t(j) * n(k) -
          c(5) * n(j) * n(k) * ell().pow(4);

  // ---- product matrix: defining combinations -----------------------------
  // Rows 1..2, diagonal:
  //   (1 - n_i^2)(-8i ell^3 (tau - i ell) - C_ii)
  //   + sum_{k != i} n_i n_k C_ki
  //   - 8 t_i n_i ell^2 (tau - i ell) - sum_k t_i n_k B_ki
  // Rows 1..2, off-diagonal (i != j):
  //   -(1 - n_i^2) C_ij + sum_{k != i} n_i n_k C_kj
  //   + 8i ell^3 n_i n_j (tau - i ell)
  //   - 8 t_i n_j ell^2 (tau - i ell) - sum_k t_i n_k B_kj
  // Row 3:
  //   -8 n_j ell^2 (tau - i ell) - sum_k n_k B_kj
  tb.product_definition = SymMatrix(3, 3);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) {
      SymExpr e;
      if (i == j)
        e = (c(1) - n(i) * n(i)) *
            (ic(-8) * ell().pow(3) * tmi() - tb.coeff_c.at(i, i));
      else
        e = -(c(1) - n(i) * n(i)) * tb.coeff_c.at(i, j) +
            ic(8) * ell().pow(3) * n(i) * n(j) * tmi();
      for (int k = 0; k < 3; ++k)
        if (k != i) e += n(i) * n(k) * tb.coeff_c.at(k, j);
      e -= c(8) * t(i) * n(j) * ell().pow(2) * tmi();
      for (int k = 0; k < 3; ++k) e -= t(i) * n(k) * tb.coeff_b.at(k, j);
      tb.product_definition.at(i, j) = e;
    }
  for (int j = 0; j < 3; ++j) {
    SymExpr e = c(-8) * n(j) * ell().pow(2) * tmi();
    for (int k = 0; k < 3; ++k) e -= n(k) * tb.coeff_b.at(k, j);
    tb.product_definition.at(2, j) = e;
  }

  // ---- product matrix: simplified forms -----------------------------------
  // Rows 1..2, diagonal:
  //   -8i ell^3 (1 - n_i^2)(tau - i ell)
  //   - (6i ell t_i^2 - 2 n_i t_i ell^2) tau - 2 t_i^2 ell^2
  //   + 2i n_i t_i ell^3
  // Rows 1..2, off-diagonal:
  //   8i ell^3 n_i n_j (tau - i ell)
  //   - (6i ell t_i t_j - 2 n_j t_i ell^2) tau - 2 t_i t_j ell^2
  //   + 2i ell^3 n_j t_i
  // (The (2,3) entry is stored in this uniform shape, which agrees with its
  //  defining combination; see the pipeline note on that entry.)
  // Row 3:
  //   -8 n_j ell^2 (tau - i ell) - (3i ell t_j - 5 ell^2 n_j) tau
  //   - t_j ell^2 - 3i ell^3 n_j
  tb.product_final = SymMatrix(3, 3);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == j)
        tb.product_final.at(i, j) =
            ic(-8) * ell().pow(3) * (c(1) - n(i) * n(i)) * tmi() -
            (ic(6) * ell() * t(i) * t(i) -
             c(2) * n(i) * t(i) * ell().pow(2)) *
                tau() -
            c(2) * t(i) * t(i) * ell().pow(2) +
            ic(2) * n(i) * t(i) * ell().pow(3);
      else
        tb.product_final.at(i, j) =
            ic(8) * ell().pow(3) * n(i) * n(j) * tmi() -
            (ic(6) * ell() * t(i) * t(j) -
             c(2) * n(j) * t(i) * ell().pow(2)) *
                tau() -
            c(2) * t(i) * t(j) * ell().pow(2) +
            ic(2) * ell().pow(3) * n(j) * t(i);
    }
  for (int j = 0; j < 3; ++j)
    tb.product_final.at(2, j) =
        c(-8) * n(j) * ell().pow(2) * tmi() -
        (ic(3) * ell() * t(j) - c(5) * ell().pow(2) * n(j)) * tau() -
        t(j) * ell().pow(2) - ic(3) * ell().pow(3) * n(j);

  // ---- first cofactor difference -----------------------------------------
  // Each bracket is the matching product-matrix entry with one factor of ell
  // removed: 8i ell^2 N (tau - i ell) + (2 P ell - 6i Q) tau - 2 Q ell
  //          + 2i ell^2 P, with slots
  //   b0: N = n1 n2        (1),  P = t1 n2  (2),  Q = t1 t2  (3)
  //   b1: N = n2 n3        (4),  P = t2 n3  (5),  Q = t3 t2  (6)
  //   b2: N = -(1 - n2^2),       P = n2 t2,       Q = t2^2
  //   b3: N = n1 n3,             P = t1 n3,       Q = t1 t3
  {
    auto bracket = [&](const SymExpr& N, const SymExpr& P, const SymExpr& Q) {
      return ic(8) * ell().pow(2) * N * tmi() +
             (c(2) * P * ell() - ic(6) * Q) * tau() - c(2) * Q * ell() +
             ic(2) * ell().pow(2) * P;
    };
    tb.det_first_bracket[0] = bracket(n(0) * n(1), t(0) * n(1), t(0) * t(1));
    tb.det_first_bracket[1] = bracket(n(1) * n(2), t(1) * n(2), t(2) * t(1));
    tb.det_first_bracket[2] =
        bracket(-(c(1) - n(1) * n(1)), n(1) * t(1), t(1) * t(1));
    tb.det_first_bracket[3] = bracket(n(0) * n(2), t(0) * n(2), t(0) * t(2));
  }

  // ---- slot pairings of the first cofactor difference ---------------------
  // lhs -> rhs, verified in the quotient ring:
  //   (1)*(4):           n1 n2 * n2 n3 + (1 - n2^2) n1 n3        -> n1 n3
  //   (2)*(5):           t1 n2 * t2 n3 - n2 t2 * t1 n3           -> 0
  //   (3)*(6):           t1 t2 * t3 t2 - t2^2 * t1 t3            -> 0
  //   (2)*(6) + (3)*(5): -t1 n2 t3 t2 - t2 n3 t1 t2
  //                      + n2 t2 t1 t3 + t1 n3 t2^2              -> 0
  //   (1)*(5) + (2)*(4): n1 n2 t2 n3 + t1 n2 n2 n3
  //                      + (1 - n2^2) t1 n3 - n1 n3 n2 t2        -> t1 n3
  //   (1)*(6) + (3)*(4): -n1 n2 t3 t2 - t1 t2 n2 n3
  //                      - (1 - n2^2) t1 t3 + n1 n3 t2^2
  //     -> -n1 n2 t2 t3 - t1 t2 n2 n3 + n2^2 t1 t3 + n1 n3 t2^2 - t1 t3
  tb.grouping_first[0] = {
      n(0) * n(1) * n(1) * n(2) + (c(1) - n(1) * n(1)) * n(0) * n(2),
      n(0) * n(2)};
  tb.grouping_first[1] = {
      t(0) * n(1) * t(1) * n(2) - n(1) * t(1) * t(0) * n(2), SymExpr::zero()};
  tb.grouping_first[2] = {
      t(0) * t(1) * t(2) * t(1) - t(1) * t(1) * t(0) * t(2), SymExpr::zero()};
  tb.grouping_first[3] = {-t(0) * n(1) * t(2) * t(1) -
                              t(1) * n(2) * t(0) * t(1) +
                              n(1) * t(1) * t(0) * t(2) +
                              t(0) * n(2) * t(1) * t(1),
                          SymExpr::zero()};
  tb.grouping_first[4] = {
      n(0) * n(1) * t(1) * n(2) + t(0) * n(1) * n(1) * n(2) +
          (c(1) - n(1) * n(1)) * t(0) * n(2) - n(0) * n(2) * n(1) * t(1),
      t(0) * n(2)};
  {
    SymExpr lhs = -n(0) * n(1) * t(2) * t(1) - t(0) * t(1) * n(1) * n(2) -
                  (c(1) - n(1) * n(1)) * t(0) * t(2) +
                  n(0) * n(2) * t(1) * t(1);
    SymExpr rhs = -n(0) * n(1) * t(1) * t(2) - t(0) * t(1) * n(1) * n(2) +
                  n(1) * n(1) * t(0) * t(2) + n(0) * n(2) * t(1) * t(1) -
                  t(0) * t(2);
    tb.grouping_first[5] = {lhs, rhs};
  }

  tb.det_first_display =
      ell().pow(2) * (tb.det_first_bracket[0] * tb.det_first_bracket[1] -
                      tb.det_first_bracket[2] * tb.det_first_bracket[3]);

  // ---- collapsed first cofactor difference --------------------------------
  // ell^2 [ -64 ell^4 n1 n3 (tau - i ell)^2
  //         + 8i ell^2 t1 n3 (tau - i ell)(2 ell tau + 2i ell^2)
  //         + 8i ell^2 (tau - i ell) G (6i tau + 2 ell) ],
  // G = -n1 n2 t2 t3 - t1 t2 n2 n3 + n2^2 t1 t3 + n1 n3 t2^2 - t1 t3
  {
    SymExpr G = tb.grouping_first[5].second;
    tb.det_first_reduced =
        ell().pow(2) *
        (c(-64) * ell().pow(4) * n(0) * n(2) * tmi().pow(2) +
         ic(8) * ell().pow(2) * t(0) * n(2) * tmi() *
             (c(2) * ell() * tau() + ic(2) * ell().pow(2)) +
         ic(8) * ell().pow(2) * tmi() * G *
             (ic(6) * tau() + c(2) * ell()));
  }

  // ---- the three cofactor blocks ------------------------------------------
  // Each block is ell^3 * (row-three factor) * (collapsed cofactor), with
  //   block 1: f = -8 n1 ell (tau - i ell) - (3i t1 - 5 ell n1) tau
  //                - t1 ell - 3i ell^2 n1
  //            big = -64 ell^4 n1 n3 (tau - i ell)^2
  //                  + 8i ell^2 t1 n3 (tau - i ell)(2 ell tau + 2i ell^2)
  //                  + 8i ell^2 (tau - i ell) G1 (6i tau + 2 ell)
  //   block 2: f and the first two big terms with the opposite sign, index 2,
  //            G2 = -n1^2 t2 t3 - n2 n3 t1^2 + n1 n2 t1 t3 + n1 n3 t1 t2
  //                 + t2 t3
  //   block 3: f with index 3,
  //            big = -64 ell^4 (1 - n1^2 - n2^2)(tau - i ell)^2
  //                  - 8i ell^2 (tau - i ell)(n2 t2 + n1 t1)
  //                    (2 ell tau + 2i ell^2)
  //                  + 8i ell^2 (tau - i ell) G3 (6i tau + 2 ell),
  //            G3 = -n1^2 t2^2 - n2^2 t1^2 + 2 n1 n2 t1 t2 + t1^2 + t2^2
  {
    auto rowf = [&](int k) {
      return c(-8) * n(k) * ell() * tmi() -
             (ic(3) * t(k) - c(5) * ell() * n(k)) * tau() - t(k) * ell() -
             ic(3) * ell().pow(2) * n(k);
    };
    SymExpr two_lin = c(2) * ell() * tau() + ic(2) * ell().pow(2);
    SymExpr six_lin = ic(6) * tau() + c(2) * ell();

    SymExpr G1 = tb.grouping_first[5].second;
    SymExpr big1 = c(-64) * ell().pow(4) * n(0) * n(2) * tmi().pow(2) +
                   ic(8) * ell().pow(2) * t(0) * n(2) * tmi() * two_lin +
                   ic(8) * ell().pow(2) * tmi() * G1 * six_lin;
    tb.det_block[0] = ell().pow(3) * rowf(0) * big1;

    SymExpr G2 = -n(0) * n(0) * t(1) * t(2) - n(1) * n(2) * t(0) * t(0) +
                 n(0) * n(1) * t(0) * t(2) + n(0) * n(2) * t(0) * t(1) +
                 t(1) * t(2);
    SymExpr big2 = c(64) * ell().pow(4) * n(1) * n(2) * tmi().pow(2) -
                   ic(8) * ell().pow(2) * t(1) * n(2) * tmi() * two_lin +
                   ic(8) * ell().pow(2) * tmi() * G2 * six_lin;
    tb.det_block[1] = ell().pow(3) * (-rowf(1)) * big2;

    SymExpr G3 = -n(0) * n(0) * t(1) * t(1) - n(1) * n(1) * t(0) * t(0) +
                 c(2) * n(0) * n(1) * t(0) * t(1) + t(0) * t(0) +
                 t(1) * t(1);
    SymExpr big3 =
        c(-64) * ell().pow(4) * (c(1) - n(0) * n(0) - n(1) * n(1)) *
            tmi().pow(2) -
        ic(8) * ell().pow(2) * tmi() * (n(1) * t(1) + n(0) * t(0)) * two_lin +
        ic(8) * ell().pow(2) * tmi() * G3 * six_lin;
    tb.det_block[2] = ell().pow(3) * rowf(2) * big3;
  }

  // ---- slot pairings across the three blocks ------------------------------
  //   [1]*[3]: n1 n1 n3 + n2 n2 n3 + n3 (1 - n1^2 - n2^2)        -> n3
  //   [1]*[4]: -n1 t1 n3 - n2 t2 n3 + n3 (n2 t2 + n1 t1)         -> 0
  //   [1]*[5]: -n1 G1 + n2 G2 - n3 G3 written out term by term   -> -n3 ell^2
  //   [2]*[3]: n1 n3 t1 + n2 n3 t2 + (1 - n1^2 - n2^2) t3        -> 0
  //   [2]*[4]: -t1^2 n3 - t2^2 n3 + t3 (n2 t2 + n1 t1)           -> -n3 ell^2
  //   [2]*[5]: -t1 G1 + t2 G2 - t3 G3 written out term by term   -> 0
  tb.grouping_block[0] = {
      n(0) * n(0) * n(2) + n(1) * n(1) * n(2) +
          n(2) * (c(1) - n(0) * n(0) - n(1) * n(1)),
      n(2)};
  tb.grouping_block[1] = {
      -n(0) * t(0) * n(2) - n(1) * t(1) * n(2) +
          n(2) * (n(1) * t(1) + n(0) * t(0)),
      SymExpr::zero()};
  tb.grouping_block[2] = {
      n(0) * n(0) * n(1) * t(1) * t(2) + n(0) * n(1) * n(2) * t(0) * t(1) -
          n(0) * n(1) * n(1) * t(0) * t(2) - n(0) * n(0) * n(2) * t(1) * t(1) +
          n(0) * t(0) * t(2) - n(0) * n(0) * n(1) * t(1) * t(2) -
          n(1) * n(1) * n(2) * t(0) * t(0) + n(0) * n(1) * n(1) * t(0) * t(2) +
          n(0) * n(1) * n(2) * t(0) * t(1) + n(1) * t(1) * t(2) +
          n(0) * n(0) * n(2) * t(1) * t(1) + n(1) * n(1) * n(2) * t(0) * t(0) -
          c(2) * n(0) * n(1) * n(2) * t(0) * t(1) - n(2) * t(0) * t(0) -
          n(2) * t(1) * t(1),
      -n(2) * ell().pow(2)};
  tb.grouping_block[3] = {
      n(0) * n(2) * t(0) + n(1) * n(2) * t(1) +
          (c(1) - n(0) * n(0) - n(1) * n(1)) * t(2),
      SymExpr::zero()};
  tb.grouping_block[4] = {
      -t(0) * t(0) * n(2) - t(1) * t(1) * n(2) +
          t(2) * (n(1) * t(1) + n(0) * t(0)),
      -n(2) * ell().pow(2)};
  tb.grouping_block[5] = {
      n(0) * n(1) * t(0) * t(1) * t(2) + n(1) * n(2) * t(0) * t(0) * t(1) -
          n(1) * n(1) * t(0) * t(0) * t(2) - n(0) * n(2) * t(0) * t(1) * t(1) +
          t(0) * t(0) * t(2) - n(0) * n(0) * t(1) * t(1) * t(2) -
          n(1) * n(2) * t(0) * t(0) * t(1) + n(0) * n(1) * t(0) * t(1) * t(2) +
          n(0) * n(2) * t(0) * t(1) * t(1) + t(1) * t(1) * t(2) +
          n(0) * n(0) * t(1) * t(1) * t(2) + n(1) * n(1) * t(0) * t(0) * t(2) -
          c(2) * n(0) * n(1) * t(0) * t(1) * t(2) - t(0) * t(0) * t(2) -
          t(1) * t(1) * t(2),
      SymExpr::zero()};

  // ---- determinant assembly stages ----------------------------------------
  // Stage 1: ell^3 [ 64 ell^5 n3 (tau-i ell)^2 (8(tau-i ell) - 5 tau + 3i ell)
  //                  - 8i ell^5 n3 (tau-i ell)(6i tau + 2 ell)
  //                    (8(tau-i ell) - 5 tau + 3i ell)
  //                  - 8i ell^5 n3 (tau-i ell)(2 tau + 2i ell)(3i tau + ell) ]
  // Stage 2: 8 ell^8 n3 (tau-i ell) [ 8(tau-i ell)(3 tau - 5i ell)
  //                                   + (6 tau - 2i ell)(3 tau - 5i ell)
  //                                   + (2 tau + 2i ell)(3 tau - i ell) ]
  // Stage 3: 64 ell^8 n3 (tau-i ell) [ (tau-i ell)(3 tau - 5i ell)
  //                                    + (3 tau - i ell)(tau-i ell) ]
  // Stage 4: 384 ell^8 n3 (tau-i ell)^3
  {
    SymExpr fac = c(8) * tmi() - c(5) * tau() + ic(3) * ell();
    tb.assembly[0] =
        ell().pow(3) *
        (c(64) * ell().pow(5) * n(2) * tmi().pow(2) * fac -
         ic(8) * ell().pow(5) * n(2) * tmi() *
             (ic(6) * tau() + c(2) * ell()) * fac -
         ic(8) * ell().pow(5) * n(2) * tmi() *
             (c(2) * tau() + ic(2) * ell()) * (ic(3) * tau() + ell()));
    tb.assembly[1] =
        c(8) * ell().pow(8) * n(2) * tmi() *
        (c(8) * tmi() * (c(3) * tau() - ic(5) * ell()) +
         (c(6) * tau() - ic(2) * ell()) * (c(3) * tau() - ic(5) * ell()) +
         (c(2) * tau() + ic(2) * ell()) * (c(3) * tau() - ic(1) * ell()));
    tb.assembly[2] =
        c(64) * ell().pow(8) * n(2) * tmi() *
        (tmi() * (c(3) * tau() - ic(5) * ell()) +
         (c(3) * tau() - ic(1) * ell()) * tmi());
    tb.assembly[3] = c(384) * ell().pow(8) * n(2) * tmi().pow(3);
  }

  // ---- fault injection ----------------------------------------------------
  if (mut) {
    auto& m = *mut;
    auto neg_mat = [&](SymMatrix& mx) {
      mx.at(m.row, m.col) = -mx.at(m.row, m.col);
    };
    switch (m.table) {
      case Table::InteriorMatrix: neg_mat(tb.interior); break;
      case Table::AdjointMatrix: neg_mat(tb.adjoint_display); break;
      case Table::BoundaryMatrix: neg_mat(tb.boundary); break;
      case Table::BoundarySubstituted:
        neg_mat(tb.boundary_substituted);
        break;
      case Table::ReducedBoundary: neg_mat(tb.reduced_boundary); break;
      case Table::CoeffB: neg_mat(tb.coeff_b); break;
      case Table::CoeffC: neg_mat(tb.coeff_c); break;
      case Table::ProductDefinition: neg_mat(tb.product_definition); break;
      case Table::ProductFinal: neg_mat(tb.product_final); break;
      case Table::DetFirstBracket:
        tb.det_first_bracket[static_cast<size_t>(m.row)] =
            -tb.det_first_bracket[static_cast<size_t>(m.row)];
        tb.det_first_display =
            detail::ell().pow(2) *
            (tb.det_first_bracket[0] * tb.det_first_bracket[1] -
             tb.det_first_bracket[2] * tb.det_first_bracket[3]);
        break;
      case Table::DetFirstReduced:
        tb.det_first_reduced = -tb.det_first_reduced;
        break;
      case Table::DetBlock:
        tb.det_block[static_cast<size_t>(m.row)] =
            -tb.det_block[static_cast<size_t>(m.row)];
        break;
      case Table::Assembly:
        tb.assembly[static_cast<size_t>(m.row)] =
            -tb.assembly[static_cast<size_t>(m.row)];
        break;
    }
  }

  return tb;
}

/// Ten representative single-sign faults, each localized by the pipeline at a
/// different step.
inline std::vector<Mutation> canned_mutations() {
  return {
      {Table::InteriorMatrix, 0, 1},      {Table::AdjointMatrix, 2, 2},
      {Table::BoundaryMatrix, 3, 0},      {Table::BoundarySubstituted, 1, 1},
      {Table::ReducedBoundary, 0, 0},     {Table::CoeffB, 0, 1},
      {Table::CoeffC, 1, 2},              {Table::ProductFinal, 0, 1},
      {Table::DetFirstReduced, 0, 0},     {Table::Assembly, 3, 0},
  };
}

}  // namespace macrolab::adn
