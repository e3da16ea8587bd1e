/// @file unit_adnverify.cpp
/// @brief End-to-end checks for the boundary-symbol row-independence
///        pipeline: the full replay passes, every display is reproduced,
///        injected single-sign faults are localized at the first consuming
///        step, the numeric spot value matches, and reports are
///        byte-deterministic.
#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "macrolab/adn/pipeline.hpp"
#include "macrolab/adn/tables.hpp"
#include "macrolab/sym/expr.hpp"
#include "macrolab/sym/ideal.hpp"
#include "macrolab/sym/matrix.hpp"

using namespace macrolab;
using namespace macrolab::adn;

namespace {

const ConstraintIdeal& ideal() {
  static ConstraintIdeal k;
  return k;
}

// The unmutated replay. Computed once; several test cases inspect it.
const AdnPipelineReport& baseline() {
  static AdnPipelineReport rep = run_pipeline();
  return rep;
}

SymExpr cst(long v) { return SymExpr::constant(sym::GaussRational(v)); }
SymExpr icst(long v) {
  return SymExpr::constant(sym::GaussRational(sym::Rational(0),
                                              sym::Rational(v)));
}

SymExpr canonical_target() {
  SymExpr tmi = sym::sym_tau() - icst(1) * sym::sym_ell();
  return cst(384) * sym::sym_ell().pow(8) * sym::sym_n(2) * tmi.pow(3);
}

std::string serialize(const AdnPipelineReport& rep) {
  std::string out;
  for (const auto& s : rep.steps) {
    out += s.name + "\x1f" + s.expected + "\x1f" + s.computed + "\x1f" +
           s.note + "\x1f" + (s.pass ? "1" : "0") + "\x1e";
  }
  out += rep.final_determinant + "\x1e";
  for (const auto& n : rep.notes) out += n + "\x1e";
  out += rep.pass ? "P" : "F";
  return out;
}

const std::vector<std::string> kExpectedStepOrder = {
    "interior_matrix",
    "interior_determinant",
    "interior_adjoint_display",
    "substituted_determinant",
    "root_factorization",
    "boundary_matrix",
    "boundary_substituted",
    "boundary_rank_deficiency",
    "boundary_reduced",
    "quartic_remainder",
    "quartic_remainder_tau_weighted",
    "coefficient_table_b",
    "coefficient_table_c",
    "adjoint_remainder_display",
    "product_entry_11",
    "product_entry_12",
    "product_entry_13",
    "product_entry_21",
    "product_entry_22",
    "product_entry_23",
    "product_entry_31",
    "product_entry_32",
    "product_entry_33",
    "determinant_first_display",
    "grouping_first_1",
    "grouping_first_2",
    "grouping_first_3",
    "grouping_first_4",
    "grouping_first_5",
    "grouping_first_6",
    "determinant_first_reduced",
    "determinant_block_1",
    "determinant_block_2",
    "determinant_block_3",
    "grouping_block_1",
    "grouping_block_2",
    "grouping_block_3",
    "grouping_block_4",
    "grouping_block_5",
    "grouping_block_6",
    "determinant_assembly",
    "factored_form_1",
    "factored_form_2",
    "final_determinant",
    "numeric_spot_check",
};

const AdnStep& find_step(const AdnPipelineReport& rep,
                         const std::string& name) {
  for (const auto& s : rep.steps)
    if (s.name == name) return s;
  FAIL("step not found: " << name);
  static AdnStep dummy;
  return dummy;
}

}  // namespace

TEST_CASE("full replay passes every step") {
  const auto& rep = baseline();
  REQUIRE(rep.pass);
  CHECK(rep.first_failing_step().empty());
  for (const auto& s : rep.steps) {
    INFO("step " << s.name << ": expected " << s.expected << " computed "
                 << s.computed);
    CHECK(s.pass);
  }
}

TEST_CASE("step roster covers every display, in order") {
  const auto& rep = baseline();
  REQUIRE(rep.steps.size() == kExpectedStepOrder.size());
  for (size_t k = 0; k < kExpectedStepOrder.size(); ++k)
    CHECK(rep.steps[k].name == kExpectedStepOrder[k]);
}

TEST_CASE("final determinant is the canonical closed form") {
  const auto& rep = baseline();
  CHECK(rep.final_determinant == canonical_target().str());
  const auto& last = find_step(rep, "final_determinant");
  CHECK(last.pass);
  CHECK(last.computed == "0");
}

TEST_CASE("numeric spot value at tau=2, ell=1, t=(1,0,0), n=(0,0,1)") {
  const auto& spot = find_step(baseline(), "numeric_spot_check");
  REQUIRE(spot.pass);
  SymExpr want = cst(768) - icst(4224);
  CHECK(spot.expected == want.str());
  CHECK(spot.computed == want.str());
}

TEST_CASE("first-cofactor slot pairings reduce as displayed") {
  const auto& rep = baseline();
  // The three headline pairings: (1)x(4) -> n1*n3, (2)x(5) -> 0,
  // (3)x(6) -> 0; all six are covered by the roster check.
  CHECK(find_step(rep, "grouping_first_1").expected ==
        ideal().normal_form(sym::sym_n(0) * sym::sym_n(2)).str());
  CHECK(find_step(rep, "grouping_first_2").expected == "0");
  CHECK(find_step(rep, "grouping_first_3").expected == "0");
  for (int g = 1; g <= 6; ++g) {
    const auto& s = find_step(rep, "grouping_first_" + std::to_string(g));
    CHECK(s.pass);
    CHECK(s.expected == s.computed);
  }
}

TEST_CASE("interior symbol builder matches the display") {
  SymMatrix l = build_l();
  SymExpr xs = sym::sym_xi(0) * sym::sym_xi(0) +
               sym::sym_xi(1) * sym::sym_xi(1) +
               sym::sym_xi(2) * sym::sym_xi(2);
  CHECK(l.at(0, 0) == -(xs + sym::sym_xi(0) * sym::sym_xi(0)));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(l.at(i, j) == l.at(j, i));
  sym::Point pt{};
  pt[sym::Xi1] = sym::GaussRational(1);
  CHECK(l.at(0, 0).eval(pt) == sym::GaussRational(-2));
  CHECK(l.at(1, 1).eval(pt) == sym::GaussRational(-1));
  CHECK(l.at(2, 2).eval(pt) == sym::GaussRational(-1));
  CHECK(l.at(0, 1).eval(pt) == sym::GaussRational(0));
}

TEST_CASE("cubed root factor builder expands and divides correctly") {
  SymExpr mplus = build_Mplus();
  SymExpr tau = sym::sym_tau(), ell = sym::sym_ell();
  SymExpr expanded = tau.pow(3) - icst(3) * ell * tau.pow(2) -
                     cst(3) * ell.pow(2) * tau + icst(1) * ell.pow(3);
  CHECK(mplus == expanded);
  SymExpr tmi = tau - icst(1) * ell;
  CHECK(sym::rem_mod_tau(tmi.pow(3), mplus, ideal()).remainder.is_zero());
}

TEST_CASE("boundary builder exposes full and reduced matrices") {
  BoundarySymbols b = build_boundary();
  REQUIRE(b.full.rows() == 4);
  REQUIRE(b.reduced.rows() == 3);
  SymExpr want00 = sym::sym_tau() * (cst(1) - sym::sym_n(0) * sym::sym_n(0)) +
                   sym::sym_t(0) * sym::sym_n(0);
  CHECK(b.reduced.at(0, 0) == want00);
  for (int j = 0; j < 3; ++j) {
    CHECK(b.reduced.at(2, j) == sym::sym_n(j));
    CHECK(b.full.at(3, j) == sym::sym_n(j));
  }
  CHECK(ideal().is_zero_mod_ideal(b.full.select_rows({0, 1, 2}).det()));
}

TEST_CASE("remainder coefficient tables verify and match the spot value") {
  BCCoeffs bc = build_BC_coeffs();
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      CHECK(bc.b.at(j, k) == bc.b.at(k, j));
      CHECK(bc.c.at(j, k) == bc.c.at(k, j));
    }
  // At t=(1,0,0), n=(0,0,1), ell=1 the (1,1) entry is tau + i.
  sym::Point pt{};
  pt[sym::Ell] = sym::GaussRational(1);
  pt[sym::Tan1] = sym::GaussRational(1);
  pt[sym::Nor3] = sym::GaussRational(1);
  CHECK(bc.b.at(0, 0).coeff_of(sym::Tau, 1).eval(pt) ==
        sym::GaussRational(1));
  CHECK(bc.b.at(0, 0).coeff_of(sym::Tau, 0).eval(pt) ==
        sym::GaussRational::i());
}

TEST_CASE("assembled determinant reduces to the closed form") {
  SymExpr d = complementing_determinant();
  CHECK(ideal().is_zero_mod_ideal(d - canonical_target()));
  sym::Point pt{};
  pt[sym::Tau] = sym::GaussRational(2);
  pt[sym::Ell] = sym::GaussRational(1);
  pt[sym::Tan1] = sym::GaussRational(1);
  pt[sym::Nor3] = sym::GaussRational(1);
  CHECK(d.eval(pt) ==
        sym::GaussRational(sym::Rational(768), sym::Rational(-4224)));
}

TEST_CASE("injected single-sign faults are localized at the first consumer") {
  const std::vector<std::pair<Mutation, std::string>> cases = {
      {{Table::InteriorMatrix, 0, 1}, "interior_matrix"},
      {{Table::AdjointMatrix, 2, 2}, "interior_adjoint_display"},
      {{Table::BoundaryMatrix, 3, 0}, "boundary_matrix"},
      {{Table::BoundarySubstituted, 1, 1}, "boundary_substituted"},
      {{Table::ReducedBoundary, 0, 0}, "boundary_reduced"},
      {{Table::CoeffB, 0, 1}, "coefficient_table_b"},
      {{Table::CoeffC, 1, 2}, "coefficient_table_c"},
      {{Table::ProductFinal, 0, 1}, "product_entry_12"},
      {{Table::DetFirstReduced, 0, 0}, "determinant_first_reduced"},
      {{Table::Assembly, 3, 0}, "final_determinant"},
  };
  const std::vector<Mutation> canned_list = canned_mutations();
  REQUIRE(canned_list.size() == cases.size());
  for (size_t k = 0; k < cases.size(); ++k) {
    const auto& [mut, want] = cases[k];
    const auto& canned = canned_list[k];
    CHECK(canned.table == mut.table);
    CHECK(canned.row == mut.row);
    CHECK(canned.col == mut.col);
    AdnPipelineReport rep = run_pipeline(mut);
    INFO("mutation #" << k << " expected to fail at " << want);
    REQUIRE_FALSE(rep.pass);
    CHECK(rep.first_failing_step() == want);
    // The pipeline stops at the fault, and everything before it passes.
    REQUIRE_FALSE(rep.steps.empty());
    CHECK(rep.steps.back().name == want);
    for (size_t s = 0; s + 1 < rep.steps.size(); ++s)
      CHECK(rep.steps[s].pass);
  }
}

TEST_CASE("report is byte-deterministic across runs") {
  AdnPipelineReport again = run_pipeline();
  CHECK(serialize(baseline()) == serialize(again));
}
