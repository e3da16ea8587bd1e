#pragma once

// Estimate evaluators: given a time-sampled kinetic trajectory, compute both
// sides of the two macroscopic control inequalities the workbench checks.
//
//   quadratic, time-integrated:
//     eps^{-s} int ||Pf||^2  vs  eps^{-s} int ||mu^{1/4}(I-P)f||^2
//                              + eps^{-(s+2k)} int ||mu^{1/4} Lf||^2
//                              + [G(t_N) - G(t_0)] + eps^{s} int ||g||^2,
//     where G(t) pairs f against test functions built from elliptic
//     potentials sourced by the instantaneous moments (a scalar Neumann
//     potential for the mass and energy moments, a symmetric-gradient
//     potential with slip walls for half the momentum moment, projected onto
//     the compatible complement of the rigid tangential modes).
//
//   sixth-power, pointwise in time:
//     eps^{-s} ||Pf||^6_{L6}  vs  eps^{-s} ||(I-P)f||^6_{L6}
//                               + eps^{-(s+6k)} ||mu^{1/4} Lf||^6_{L2}
//                               + eps^{5s} ||nu^{-1/2}(g - df/dt)||^6_{L2},
//     evaluated at interior samples with central time differences, reported
//     at the sample of worst ratio.  The momentum-moment source for the
//     companion potential is the componentwise fifth power, with its rigid
//     components removed by the same compatibility projection and the removed
//     coefficients reported.
//
// Time integrals use the trapezoid rule on the sample times.  All velocity
// quadratures use the grid weights; moments are accumulated in extended
// precision.  A ratio of zero is reported when the left side vanishes.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "macrolab/fem/assemble.hpp"
#include "macrolab/fem/mesh.hpp"
#include "macrolab/fem/solve.hpp"
#include "macrolab/kin/bgk.hpp"
#include "macrolab/kin/grid.hpp"
#include "macrolab/kin/testfn.hpp"
#include "macrolab/sim/state.hpp"
#include "macrolab/sim/stepper.hpp"

namespace macrolab::sim {

struct SampleRow {
  double time = 0.0;
  std::map<std::string, double> values;
};

struct EstimateReport {
  std::string kind;  // "l2" | "l6"
  double eps = 1.0;
  int s = 0;
  int k = 0;
  double lhs = 0.0;
  double rhs_total = 0.0;
  double ratio = 0.0;  // 0 when lhs == 0, inf when rhs <= 0 < lhs
  std::map<std::string, double> rhs_items;
  std::vector<SampleRow> samples;
  double g_bound_constant = 0.0;  // quadratic case: max |G(t)| / ||f(t)||^2
  std::map<std::string, double> extras;
  std::vector<std::string> notes;
};

namespace detail {

// Volume-weighted recovery of a cell-constant scalar onto the P1 vertices.
inline fem::ScalarFieldFE recover_scalar(const fem::Mesh& mesh, const TransportTopology& topo,
                                         const std::vector<double>& cell_values) {
  fem::ScalarFieldFE out;
  out.mesh = &mesh;
  out.values.assign(mesh.vertices.size(), 0.0);
  std::vector<double> wsum(mesh.vertices.size(), 0.0);
  for (std::size_t t = 0; t < mesh.tets.size(); ++t)
    for (std::size_t v : mesh.tets[t]) {
      out.values[v] += topo.volume[t] * cell_values[t];
      wsum[v] += topo.volume[t];
    }
  for (std::size_t v = 0; v < out.values.size(); ++v) out.values[v] /= wsum[v];
  return out;
}

inline fem::VectorFieldFE recover_vector(const fem::Mesh& mesh, const TransportTopology& topo,
                                         const std::vector<std::array<double, 3>>& cell_values) {
  fem::VectorFieldFE out;
  out.mesh = &mesh;
  out.values.assign(mesh.vertices.size(), {0.0, 0.0, 0.0});
  std::vector<double> wsum(mesh.vertices.size(), 0.0);
  for (std::size_t t = 0; t < mesh.tets.size(); ++t)
    for (std::size_t v : mesh.tets[t]) {
      for (int d = 0; d < 3; ++d) out.values[v][d] += topo.volume[t] * cell_values[t][d];
      wsum[v] += topo.volume[t];
    }
  for (std::size_t v = 0; v < out.values.size(); ++v)
    for (int d = 0; d < 3; ++d) out.values[v][d] /= wsum[v];
  return out;
}

// Per-cell gradient of a P1 scalar (constant on each tetrahedron).
inline std::vector<std::array<double, 3>> cell_scalar_gradients(
    const std::vector<fem::ElementData>& elems, const std::vector<double>& vertex_values) {
  std::vector<std::array<double, 3>> out(elems.size(), {0.0, 0.0, 0.0});
  for (std::size_t t = 0; t < elems.size(); ++t)
    for (int loc = 0; loc < 4; ++loc) {
      const double u = vertex_values[elems[t].v[loc]];
      for (int d = 0; d < 3; ++d) out[t][d] += u * elems[t].grad[loc][d];
    }
  return out;
}

// Per-cell Jacobian of a P1 vector field: J[i][j] = d u_i / d x_j.
inline std::vector<std::array<std::array<double, 3>, 3>> cell_vector_jacobians(
    const std::vector<fem::ElementData>& elems, const fem::Vec3Field& vertex_values) {
  std::vector<std::array<std::array<double, 3>, 3>> out(
      elems.size(), {{{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}});
  for (std::size_t t = 0; t < elems.size(); ++t)
    for (int loc = 0; loc < 4; ++loc) {
      const auto& u = vertex_values[elems[t].v[loc]];
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out[t][i][j] += u[i] * elems[t].grad[loc][j];
    }
  return out;
}

// Shared validation for a sampled trajectory.
inline void check_samples(const std::vector<KineticState>& snaps, const std::vector<double>& times,
                          std::size_t min_count, const Forcing& forcing, const char* what) {
  if (snaps.size() < min_count)
    throw std::invalid_argument(std::string(what) + ": needs at least " +
                                std::to_string(min_count) + " samples");
  if (snaps.size() != times.size())
    throw std::invalid_argument(std::string(what) + ": sample/time count mismatch");
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    check_state(snaps[i], what);
    if (snaps[i].mesh != snaps[0].mesh || snaps[i].grid != snaps[0].grid)
      throw std::invalid_argument(std::string(what) + ": samples on different meshes or grids");
    if (snaps[i].scaling.eps != snaps[0].scaling.eps || snaps[i].scaling.s != snaps[0].scaling.s ||
        snaps[i].scaling.k != snaps[0].scaling.k)
      throw std::invalid_argument(std::string(what) + ": samples carry different scalings");
    if (i > 0 && !(times[i] > times[i - 1]))
      throw std::invalid_argument(std::string(what) + ": sample times must strictly increase");
  }
  if (!forcing.base.empty() && forcing.base.size() != snaps[0].f.size())
    throw std::invalid_argument(std::string(what) + ": forcing field size mismatch");
}

// Quadrature norms of one sample needed by both evaluators.
struct SampleNorms {
  double pf_l2_sq = 0.0;     // ||Pf||^2
  double pf_l6_six = 0.0;    // ||Pf||^6 (sixth-power quadrature)
  double micro_l2w_sq = 0.0; // ||mu^{1/4}(I-P)f||^2
  double micro_l6_six = 0.0; // ||(I-P)f||^6
  double coll_l2w_sq = 0.0;  // ||mu^{1/4} Lf||^2
  double f_l2_sq = 0.0;      // ||f||^2
};

inline SampleNorms sample_norms(const KineticState& st, const TransportTopology& topo,
                                const std::vector<double>& nu) {
  const kin::VelocityGrid& g = *st.grid;
  const std::size_t nc = st.n_cells();
  const std::size_t nn = st.n_nodes();
  SampleNorms out;
  long double pf2 = 0.0L, pf6 = 0.0L, m2 = 0.0L, m6 = 0.0L, c2 = 0.0L, f2 = 0.0L;
  std::vector<double> micro(nn), coll(nn);
  for (std::size_t t = 0; t < nc; ++t) {
    const double* f = st.cell_data(t);
    long double mom[5] = {0.0L, 0.0L, 0.0L, 0.0L, 0.0L};
    for (std::size_t p = 0; p < nn; ++p) {
      const long double wf = static_cast<long double>(g.weights[p]) * f[p];
      for (int m = 0; m < 5; ++m) mom[m] += wf * g.chi[m][p];
    }
    long double nw[5] = {0.0L, 0.0L, 0.0L, 0.0L, 0.0L};
    for (std::size_t p = 0; p < nn; ++p) {
      double pf = 0.0;
      for (int m = 0; m < 5; ++m) pf += static_cast<double>(mom[m]) * g.chi[m][p];
      micro[p] = f[p] - pf;
      const double w = nu[p] * micro[p];
      coll[p] = w;
      const long double ww = static_cast<long double>(g.weights[p]) * w;
      for (int m = 0; m < 5; ++m) nw[m] += ww * g.chi[m][p];
    }
    long double cell_pf2 = 0.0L, cell_pf6 = 0.0L, cell_m2 = 0.0L, cell_m6 = 0.0L,
                cell_c2 = 0.0L, cell_f2 = 0.0L;
    for (std::size_t p = 0; p < nn; ++p) {
      double lf = coll[p];
      for (int m = 0; m < 5; ++m) lf -= static_cast<double>(nw[m]) * g.chi[m][p];
      const double pf = f[p] - micro[p];
      const double W = g.weights[p];
      const double smu = g.sqrt_mu[p];  // mu^{1/2} = (mu^{1/4})^2
      const double pf2v = pf * pf, m2v = micro[p] * micro[p];
      cell_pf2 += W * pf2v;
      cell_pf6 += W * pf2v * pf2v * pf2v;
      cell_m2 += W * smu * m2v;
      cell_m6 += W * m2v * m2v * m2v;
      cell_c2 += W * smu * lf * lf;
      cell_f2 += W * f[p] * f[p];
    }
    const long double vol = topo.volume[t];
    pf2 += vol * cell_pf2;
    pf6 += vol * cell_pf6;
    m2 += vol * cell_m2;
    m6 += vol * cell_m6;
    c2 += vol * cell_c2;
    f2 += vol * cell_f2;
  }
  out.pf_l2_sq = static_cast<double>(pf2);
  out.pf_l6_six = static_cast<double>(pf6);
  out.micro_l2w_sq = static_cast<double>(m2);
  out.micro_l6_six = static_cast<double>(m6);
  out.coll_l2w_sq = static_cast<double>(c2);
  out.f_l2_sq = static_cast<double>(f2);
  return out;
}

// Test-function fields sourced by the sample's moments: scalar Neumann
// potentials for the mass and energy moments, and a slip-wall
// symmetric-gradient potential for half the momentum moment (compatibility
// projected).  Only first derivatives are sampled; the pairing below needs
// no second derivatives.
struct MomentPotentials {
  kin::TestFunctionField psi_a;
  kin::TestFunctionField psi_b;
  kin::TestFunctionField psi_c;
};

inline MomentPotentials build_moment_potentials(const fem::Mesh& mesh,
                                                const std::vector<fem::ElementData>& elems,
                                                const TransportTopology& topo,
                                                const CellMoments& mom,
                                                const fem::RigidModeBasis& basis) {
  const std::size_t nc = mesh.tets.size();
  MomentPotentials out;

  const fem::ScalarFieldFE phi_a = fem::solve_neumann_poisson(mesh, recover_scalar(mesh, topo, mom.a));
  kin::EllipticSolutionSamples sa;
  sa.scalar.gradient = cell_scalar_gradients(elems, phi_a.values);
  out.psi_a = kin::build_test_function(kin::TestKind::psi_a, sa, nc);

  const fem::ScalarFieldFE phi_c = fem::solve_neumann_poisson(mesh, recover_scalar(mesh, topo, mom.c));
  kin::EllipticSolutionSamples sc;
  sc.scalar.gradient = cell_scalar_gradients(elems, phi_c.values);
  out.psi_c = kin::build_test_function(kin::TestKind::psi_c, sc, nc);

  fem::VectorFieldFE half_b = recover_vector(mesh, topo, mom.b);
  for (auto& v : half_b.values)
    for (int d = 0; d < 3; ++d) v[d] *= 0.5;
  const fem::VectorFieldFE compatible = fem::compatibility_project(half_b, basis);
  const fem::VectorFieldFE phi_b = fem::solve_sym_poisson(mesh, compatible, basis);
  kin::EllipticSolutionSamples sb;
  sb.vector.jacobian = cell_vector_jacobians(elems, phi_b.values);
  out.psi_b = kin::build_test_function(kin::TestKind::psi_b, sb, nc);
  return out;
}

// Pairing G_psi(f) = -sum_cells vol  sum_nodes W psi(cell, v) f(cell, v).
inline double potential_pairing(const KineticState& st, const TransportTopology& topo,
                                const kin::TestFunctionField& psi) {
  const kin::VelocityGrid& g = *st.grid;
  long double acc = 0.0L;
  for (std::size_t t = 0; t < st.n_cells(); ++t) {
    const double* f = st.cell_data(t);
    long double cell = 0.0L;
    for (std::size_t p = 0; p < st.n_nodes(); ++p)
      cell += static_cast<long double>(g.weights[p]) * psi.eval(t, g.nodes[p]) * f[p];
    acc += static_cast<long double>(topo.volume[t]) * cell;
  }
  return -static_cast<double>(acc);
}

// Plain L2 quadrature of a cell-major field.
inline double field_l2_sq(const kin::VelocityGrid& g, const TransportTopology& topo,
                          const std::vector<double>& field) {
  const std::size_t nn = g.size();
  long double acc = 0.0L;
  for (std::size_t t = 0; t < topo.volume.size(); ++t) {
    const double* f = field.data() + t * nn;
    long double cell = 0.0L;
    for (std::size_t p = 0; p < nn; ++p)
      cell += static_cast<long double>(g.weights[p]) * f[p] * f[p];
    acc += static_cast<long double>(topo.volume[t]) * cell;
  }
  return static_cast<double>(acc);
}

inline double trapezoid(const std::vector<double>& times, const std::vector<double>& values) {
  long double acc = 0.0L;
  for (std::size_t i = 1; i < times.size(); ++i)
    acc += 0.5L * (times[i] - times[i - 1]) * (values[i] + values[i - 1]);
  return static_cast<double>(acc);
}

inline double safe_ratio(double lhs, double rhs) {
  if (lhs == 0.0) return 0.0;
  if (!(rhs > 0.0)) return std::numeric_limits<double>::infinity();
  return lhs / rhs;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Quadratic, time-integrated estimate.
// ---------------------------------------------------------------------------
inline EstimateReport evaluate_l2_estimate(const std::vector<KineticState>& snaps,
                                           const std::vector<double>& times,
                                           const Forcing& forcing,
                                           const fem::RigidModeBasis& basis) {
  detail::check_samples(snaps, times, 2, forcing, "evaluate_l2_estimate");
  const fem::Mesh& mesh = *snaps[0].mesh;
  const kin::VelocityGrid& grid = *snaps[0].grid;
  const Scaling sc = snaps[0].scaling;
  const TransportTopology topo = build_transport_topology(mesh);
  const std::vector<fem::ElementData> elems = fem::build_element_data(mesh);
  std::vector<double> nu(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) nu[p] = kin::nu_weight(grid.nodes[p]);

  const std::size_t ns = snaps.size();
  std::vector<double> pf2(ns), micro2(ns), coll2(ns), g2(ns), gval(ns);
  const double forcing_l2 =
      forcing.base.empty() ? 0.0 : detail::field_l2_sq(grid, topo, forcing.base);

  EstimateReport rep;
  rep.kind = "l2";
  rep.eps = sc.eps;
  rep.s = sc.s;
  rep.k = sc.k;
  rep.notes.push_back("forcing: " + forcing.kind);
  rep.notes.push_back("momentum potential projected over " + std::to_string(basis.dim) +
                      " rigid tangential modes");

  double gmax_over_f2 = 0.0;
  for (std::size_t i = 0; i < ns; ++i) {
    const detail::SampleNorms norms = detail::sample_norms(snaps[i], topo, nu);
    pf2[i] = norms.pf_l2_sq;
    micro2[i] = norms.micro_l2w_sq;
    coll2[i] = norms.coll_l2w_sq;
    const double amp = forcing.amplitude(times[i]);
    g2[i] = amp * amp * forcing_l2;

    const CellMoments mom = cell_moments(snaps[i]);
    const detail::MomentPotentials pots =
        detail::build_moment_potentials(mesh, elems, topo, mom, basis);
    const double ga = detail::potential_pairing(snaps[i], topo, pots.psi_a);
    const double gb = detail::potential_pairing(snaps[i], topo, pots.psi_b);
    const double gc = detail::potential_pairing(snaps[i], topo, pots.psi_c);
    gval[i] = ga + gb + gc;
    if (norms.f_l2_sq > 0.0)
      gmax_over_f2 = std::max(gmax_over_f2, std::abs(gval[i]) / norms.f_l2_sq);

    SampleRow row;
    row.time = times[i];
    row.values["potential_a"] = ga;
    row.values["potential_b"] = gb;
    row.values["potential_c"] = gc;
    row.values["potential_total"] = gval[i];
    row.values["pf_l2_sq"] = norms.pf_l2_sq;
    row.values["micro_l2_sq"] = norms.micro_l2w_sq;
    row.values["f_l2_sq"] = norms.f_l2_sq;
    rep.samples.push_back(std::move(row));
  }

  const double eps_ms = std::pow(sc.eps, -sc.s);
  const double eps_coll = std::pow(sc.eps, -(sc.s + 2 * sc.k));
  const double eps_ps = std::pow(sc.eps, sc.s);
  rep.lhs = eps_ms * detail::trapezoid(times, pf2);
  rep.rhs_items["microscopic_term"] = eps_ms * detail::trapezoid(times, micro2);
  rep.rhs_items["collision_term"] = eps_coll * detail::trapezoid(times, coll2);
  rep.rhs_items["potential_window"] = gval.back() - gval.front();
  rep.rhs_items["forcing_term"] = eps_ps * detail::trapezoid(times, g2);
  rep.rhs_total = 0.0;
  for (const auto& [key, value] : rep.rhs_items) rep.rhs_total += value;
  rep.ratio = detail::safe_ratio(rep.lhs, rep.rhs_total);
  rep.g_bound_constant = gmax_over_f2;
  return rep;
}

// ---------------------------------------------------------------------------
// Sixth-power, pointwise-in-time estimate at interior samples.
// ---------------------------------------------------------------------------
inline EstimateReport evaluate_l6_estimate(const std::vector<KineticState>& snaps,
                                           const std::vector<double>& times,
                                           const Forcing& forcing,
                                           const fem::RigidModeBasis& basis) {
  detail::check_samples(snaps, times, 3, forcing, "evaluate_l6_estimate");
  const fem::Mesh& mesh = *snaps[0].mesh;
  const kin::VelocityGrid& grid = *snaps[0].grid;
  const Scaling sc = snaps[0].scaling;
  const TransportTopology topo = build_transport_topology(mesh);
  const std::vector<fem::ElementData> elems = fem::build_element_data(mesh);
  const std::size_t nn = grid.size();
  std::vector<double> nu(nn);
  for (std::size_t p = 0; p < nn; ++p) nu[p] = kin::nu_weight(grid.nodes[p]);

  EstimateReport rep;
  rep.kind = "l6";
  rep.eps = sc.eps;
  rep.s = sc.s;
  rep.k = sc.k;
  rep.notes.push_back("forcing: " + forcing.kind);
  rep.notes.push_back("momentum potential projected over " + std::to_string(basis.dim) +
                      " rigid tangential modes");

  const double eps_ms = std::pow(sc.eps, -sc.s);
  const double eps_coll = std::pow(sc.eps, -(sc.s + 6 * sc.k));
  const double eps_force = std::pow(sc.eps, 5 * sc.s);

  double best_ratio = -1.0;
  std::size_t best = 0;
  double best_lhs = 0.0, best_micro = 0.0, best_coll = 0.0, best_force = 0.0;
  std::vector<double> dtf(snaps[0].f.size());
  for (std::size_t i = 1; i + 1 < snaps.size(); ++i) {
    const detail::SampleNorms norms = detail::sample_norms(snaps[i], topo, nu);
    const double span = times[i + 1] - times[i - 1];
    const double amp = forcing.amplitude(times[i]);
    for (std::size_t j = 0; j < dtf.size(); ++j)
      dtf[j] = (snaps[i + 1].f[j] - snaps[i - 1].f[j]) / span;
    long double force_acc = 0.0L;
    for (std::size_t t = 0; t < topo.volume.size(); ++t) {
      long double cell = 0.0L;
      const double* d = dtf.data() + t * nn;
      const double* b = forcing.base.empty() ? nullptr : forcing.base.data() + t * nn;
      for (std::size_t p = 0; p < nn; ++p) {
        const double gv = b == nullptr ? 0.0 : amp * b[p];
        const double r = gv - d[p];
        cell += static_cast<long double>(grid.weights[p]) * r * r / nu[p];
      }
      force_acc += static_cast<long double>(topo.volume[t]) * cell;
    }
    const double force_sq = static_cast<double>(force_acc);

    const double lhs = eps_ms * norms.pf_l6_six;
    const double micro_term = eps_ms * norms.micro_l6_six;
    const double coll_term =
        eps_coll * norms.coll_l2w_sq * norms.coll_l2w_sq * norms.coll_l2w_sq;
    const double force_term = eps_force * force_sq * force_sq * force_sq;
    const double rhs = micro_term + coll_term + force_term;
    const double ratio = detail::safe_ratio(lhs, rhs);

    SampleRow row;
    row.time = times[i];
    row.values["lhs"] = lhs;
    row.values["rhs_total"] = rhs;
    row.values["ratio"] = ratio;
    rep.samples.push_back(std::move(row));

    if (ratio > best_ratio) {
      best_ratio = ratio;
      best = i;
      best_lhs = lhs;
      best_micro = micro_term;
      best_coll = coll_term;
      best_force = force_term;
    }
  }

  rep.lhs = best_lhs;
  rep.rhs_items["microscopic_term"] = best_micro;
  rep.rhs_items["collision_term"] = best_coll;
  rep.rhs_items["forcing_time_term"] = best_force;
  rep.rhs_total = best_micro + best_coll + best_force;
  rep.ratio = best_ratio < 0.0 ? 0.0 : best_ratio;
  rep.extras["worst_sample_time"] = times[best];

  // Companion potential for the fifth-power momentum moment at the worst
  // sample: record the rigid coefficients removed by the compatibility
  // projection, the energy of the solved potential, and the largest rigid
  // momentum of the plain moment itself.
  {
    const CellMoments mom = cell_moments(snaps[best]);
    std::vector<std::array<double, 3>> b5(mom.b.size());
    for (std::size_t t = 0; t < mom.b.size(); ++t)
      for (int d = 0; d < 3; ++d) {
        const double b = mom.b[t][d];
        b5[t][d] = b * b * b * b * b;
      }
    fem::VectorFieldFE src = detail::recover_vector(mesh, topo, b5);
    for (auto& v : src.values)
      for (int d = 0; d < 3; ++d) v[d] *= 0.5;

    fem::FemOperators ops(mesh);
    rep.extras["b5_projection_modes"] = static_cast<double>(basis.dim);
    if (basis.dim > 0) {
      double cmax = 0.0;
      for (const auto& mode : basis.fields)
        cmax = std::max(cmax, std::abs(ops.l2_inner(mode.values, src.values) /
                                       ops.l2_inner(mode.values, mode.values)));
      rep.extras["b5_projection_coefficient_max"] = cmax;

      double bmax = 0.0;
      const auto modes = modes_at_centroids(mesh, basis);
      for (std::size_t m = 0; m < modes.size(); ++m) {
        long double acc = 0.0L;
        for (std::size_t t = 0; t < mom.b.size(); ++t)
          acc += static_cast<long double>(topo.volume[t]) *
                 fem::detail::dot3(modes[m][t], mom.b[t]);
        bmax = std::max(bmax, std::abs(static_cast<double>(acc)));
      }
      rep.extras["rigid_momentum_max"] = bmax;
    }
    const fem::VectorFieldFE compatible = fem::compatibility_project(src, basis);
    const fem::VectorFieldFE phi = fem::solve_sym_poisson(mesh, compatible, basis);
    fem::Vec3Field kphi;
    ops.apply_sym_stiffness(phi.values, kphi);
    rep.extras["b5_potential_energy"] = fem::detail::dot_flat(phi.values, kphi);
  }
  return rep;
}

// Convenience entry points for a finished simulation run.
inline EstimateReport evaluate_l2_estimate(const SimulationResult& run,
                                           const fem::RigidModeBasis& basis) {
  return evaluate_l2_estimate(run.snapshots, run.snapshot_times, run.forcing, basis);
}

inline EstimateReport evaluate_l6_estimate(const SimulationResult& run,
                                           const fem::RigidModeBasis& basis) {
  return evaluate_l6_estimate(run.snapshots, run.snapshot_times, run.forcing, basis);
}

}  // namespace macrolab::sim
