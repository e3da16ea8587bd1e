#pragma once

// Time stepper for the scaled transport-relaxation equation on a tetrahedral
// mesh with a tensor velocity grid.  One step of size dt applies, in order:
//
//   1. transport   f <- f - dt eps^{-s} * upwind-div(v f) per velocity node,
//      with boundary outflow re-entering through the mirror remap below;
//   2. forcing     f <- f + dt g(t), g constrained to the microscopic
//      complement (no collision-invariant content);
//   3. relaxation  solve (I + dt eps^{-(k+s)} L) f_new = f per cell, where
//      L h = (I-P)[nu (I-P) h], via a diagonal resolvent plus a 5x5 moment
//      correction.  The solve is unconditionally stable and preserves the
//      five collision-invariant moments of its input to rounding.
//
// Mirror remap at a boundary face with outward unit normal n: every velocity
// node with v.n > 0 sends its outgoing packet to the reflected velocity
// v - 2(v.n)n, which generally falls between grid nodes; the packet is split
// over the eight surrounding nodes with trilinear weights and rescaled by the
// ratio of background-weighted masses.  The rescale factor depends only on
// the geometry, never on the packet sign, and makes the mass moment of the
// reflection exact; the induced energy defect is accumulated and reported
// instead of hidden.  Reflections falling outside the grid hull are clamped
// to the outermost bracket, which the same defect accounting covers.
//
// Interior fluxes use one shared face normal per face (see TransportTopology)
// so the pairwise transfers cancel exactly in conserved sums.  Transport
// sweeps are split across threads by velocity-node ranges, every node being
// computed by exactly one thread with a fixed arithmetic order; the remap is
// serialized over boundary faces in ascending cell order.  Results are
// therefore independent of the thread count.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "macrolab/fem/assemble.hpp"
#include "macrolab/fem/mesh.hpp"
#include "macrolab/fem/solve.hpp"
#include "macrolab/kin/bgk.hpp"
#include "macrolab/kin/grid.hpp"
#include "macrolab/sim/state.hpp"

namespace macrolab::sim {

// ---------------------------------------------------------------------------
// Forcing presets.  The base field is stored cell-major like the state; the
// active forcing at time t is amplitude(t) * base.  Scalar modulation keeps
// the microscopic constraint exact once the base satisfies it.
// ---------------------------------------------------------------------------
struct Forcing {
  std::string kind = "zero";  // zero | microscopic_noise | periodic_microscopic
  std::vector<double> base;   // empty for kind zero
  double period = 0.0;        // positive for the periodic kind
  mutable bool verified = false;

  double amplitude(double t) const {
    if (kind == "zero" || base.empty()) return 0.0;
    if (period > 0.0) return std::cos(2.0 * kin::kPi * t / period);
    return 1.0;
  }
};

// Largest collision-invariant moment carried by any cell of a cell-major
// field, together with the largest entry (used to scale the tolerance).
inline double max_macroscopic_moment(const kin::VelocityGrid& grid,
                                     const std::vector<double>& field) {
  if (field.empty()) return 0.0;
  if (field.size() % grid.size() != 0)
    throw std::invalid_argument("max_macroscopic_moment: field size is not a multiple of the grid");
  const std::size_t nn = grid.size();
  const std::size_t nc = field.size() / nn;
  double worst = 0.0;
  for (std::size_t t = 0; t < nc; ++t) {
    const double* f = field.data() + t * nn;
    long double acc[5] = {0.0L, 0.0L, 0.0L, 0.0L, 0.0L};
    for (std::size_t p = 0; p < nn; ++p) {
      const long double wf = static_cast<long double>(grid.weights[p]) * f[p];
      for (int m = 0; m < 5; ++m) acc[m] += wf * grid.chi[m][p];
    }
    for (int m = 0; m < 5; ++m)
      worst = std::max(worst, std::abs(static_cast<double>(acc[m])));
  }
  return worst;
}

// Builds a forcing preset.  The noisy kinds draw one coefficient per velocity
// monomial per cell (seeded, deterministic) and then remove the
// collision-invariant component cellwise, so the microscopic constraint
// holds by construction; the periodic kind modulates the same field by a
// cosine with a period of twenty steps of the supplied dt.
inline Forcing make_forcing(const std::string& kind, const fem::Mesh& mesh,
                            const kin::VelocityGrid& grid, std::uint64_t seed, double dt) {
  Forcing out;
  out.kind = kind;
  if (kind == "zero") return out;
  if (kind != "microscopic_noise" && kind != "periodic_microscopic")
    throw std::invalid_argument("unknown forcing preset: " + kind);
  const std::size_t nc = mesh.tets.size();
  const std::size_t nn = grid.size();
  const auto mono = detail::velocity_monomials(grid);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 0.5);
  out.base.assign(nc * nn, 0.0);
  for (std::size_t t = 0; t < nc; ++t) {
    std::array<double, 10> coeff;
    for (double& c : coeff) c = gauss(rng);
    double* f = out.base.data() + t * nn;
    for (std::size_t p = 0; p < nn; ++p) {
      double s = 0.0;
      for (int m = 0; m < 10; ++m) s += coeff[m] * mono[m][p];
      f[p] = s;
    }
    detail::remove_macroscopic(grid, f);
  }
  if (kind == "periodic_microscopic") {
    if (!(dt > 0.0)) throw std::invalid_argument("make_forcing: periodic kind needs dt > 0");
    out.period = 20.0 * dt;
  }
  return out;
}

struct StepDiagnostics {
  double reflected_mass = 0.0;       // total |mass| routed through the mirror remap
  double remap_energy_defect = 0.0;  // accumulated bound on the remap's energy change
  double dissipation = 0.0;          // quadrature of <nu m, m> after the step (never negative)
  std::vector<double> angular_change;  // per rigid mode: momentum change across the step
};

class TransportStepper {
 public:
  TransportStepper(const fem::Mesh& mesh, const kin::VelocityGrid& grid,
                   const fem::RigidModeBasis* basis = nullptr, bool collision = true)
      : mesh_(&mesh), grid_(&grid), topo_(build_transport_topology(mesh)),
        collision_(collision) {
    double vmax_axis = 0.0;
    for (double x : grid.axis_nodes) vmax_axis = std::max(vmax_axis, std::abs(x));
    vmax_ = std::sqrt(3.0) * vmax_axis;
    double ratio = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < topo_.volume.size(); ++t) {
      double area_sum = 0.0;
      for (const CellFace& cf : topo_.faces[t]) area_sum += cf.area;
      ratio = std::min(ratio, topo_.volume[t] / area_sum);
    }
    cell_ratio_ = ratio;
    if (basis != nullptr && basis->dim > 0)
      centroid_modes_ = modes_at_centroids(mesh, *basis);
  }

  const TransportTopology& topology() const { return topo_; }

  // Largest stable step for the explicit upwind sweep: the per-cell volume /
  // surface ratio divided by the largest grid speed, times eps^s for the
  // transport prefactor.  The speed bound |v| >= (v.n)+ makes it safe for
  // every face orientation.
  double cfl_bound(const Scaling& sc) const {
    return std::pow(sc.eps, sc.s) * cell_ratio_ / vmax_;
  }

  StepDiagnostics step(KineticState& st, double dt, const Forcing& forcing) const {
    check_state(st, "step");
    if (st.mesh != mesh_ || st.grid != grid_)
      throw std::invalid_argument("step: state does not belong to this stepper");
    validate_scaling(st.scaling);
    if (!(dt > 0.0) || !std::isfinite(dt))
      throw std::invalid_argument("step: dt must be a positive finite number");
    if (dt > cfl_bound(st.scaling) * (1.0 + 1e-12))
      throw std::invalid_argument("step: dt exceeds the upwind stability bound");
    if (!forcing.verified && !forcing.base.empty()) {
      if (forcing.base.size() != st.f.size())
        throw std::invalid_argument("step: forcing field size mismatch");
      double scale = 1.0;
      for (double x : forcing.base) scale = std::max(scale, std::abs(x));
      if (max_macroscopic_moment(*grid_, forcing.base) > 1e-10 * scale)
        throw std::invalid_argument("step: forcing carries collision-invariant moments");
      forcing.verified = true;
    }

    const kin::VelocityGrid& g = *grid_;
    const std::size_t nc = st.n_cells();
    const std::size_t nn = st.n_nodes();
    const double speed = std::pow(st.scaling.eps, -st.scaling.s);
    const double relax = dt * std::pow(st.scaling.eps, -(st.scaling.k + st.scaling.s));

    StepDiagnostics diag;
    std::vector<double> pre_angular;
    if (!centroid_modes_.empty()) pre_angular = angular_momenta(st.f, nc, nn);

    // --- 1. upwind transport, node-range parallel -------------------------
    std::vector<double> out(st.f);
    const double* fin = st.f.data();
    fem::detail::parallel_ranges(nn, [&](std::size_t p0, std::size_t p1) {
      for (std::size_t t = 0; t < nc; ++t) {
        const double scale_t = dt * speed / topo_.volume[t];
        const double* fT = fin + t * nn;
        double* oT = out.data() + t * nn;
        for (const CellFace& cf : topo_.faces[t]) {
          const double fa = scale_t * cf.area;
          const double* fN = cf.neighbor >= 0 ? fin + static_cast<std::size_t>(cf.neighbor) * nn
                                              : nullptr;
          for (std::size_t p = p0; p < p1; ++p) {
            const double s = cf.sign * fem::detail::dot3(g.nodes[p], cf.normal);
            if (s > 0.0) {
              oT[p] -= fa * s * fT[p];
            } else if (fN != nullptr) {
              oT[p] -= fa * s * fN[p];
            }
          }
        }
      }
    });

    // --- 2. mirror remap, serialized in ascending cell order --------------
    const int naxis = g.n;
    for (std::size_t t = 0; t < nc; ++t) {
      for (const CellFace& cf : topo_.faces[t]) {
        if (cf.bface < 0) continue;
        const double factor = dt * speed * cf.area / topo_.volume[t];
        double* oT = out.data() + t * nn;
        const double* fT = fin + t * nn;
        for (std::size_t p = 0; p < nn; ++p) {
          const double s = fem::detail::dot3(g.nodes[p], cf.normal);
          if (!(s > 0.0)) continue;
          const double q = factor * s * fT[p];
          if (q == 0.0) continue;
          const std::array<double, 3> u{g.nodes[p][0] - 2.0 * s * cf.normal[0],
                                        g.nodes[p][1] - 2.0 * s * cf.normal[1],
                                        g.nodes[p][2] - 2.0 * s * cf.normal[2]};
          int idx[3];
          double frac[3];
          for (int a = 0; a < 3; ++a) {
            const auto& xs = g.axis_nodes;
            int i = static_cast<int>(std::upper_bound(xs.begin(), xs.end(), u[a]) - xs.begin()) - 1;
            i = std::clamp(i, 0, naxis - 2);
            double tt = (u[a] - xs[i]) / (xs[i + 1] - xs[i]);
            idx[a] = i;
            frac[a] = std::clamp(tt, 0.0, 1.0);
          }
          // Background-weighted mass of the deposited packet, used for the
          // exact-mass rescale: beta depends only on the bracket geometry.
          double denom = 0.0;
          std::array<std::size_t, 8> targets;
          std::array<double, 8> theta;
          int iw = 0;
          for (int da = 0; da < 2; ++da)
            for (int db = 0; db < 2; ++db)
              for (int dc = 0; dc < 2; ++dc) {
                const double w = (da ? frac[0] : 1.0 - frac[0]) *
                                 (db ? frac[1] : 1.0 - frac[1]) *
                                 (dc ? frac[2] : 1.0 - frac[2]);
                const std::size_t node = g.index(idx[0] + da, idx[1] + db, idx[2] + dc);
                targets[iw] = node;
                theta[iw] = w;
                denom += w * g.chi[0][node];
                ++iw;
              }
          const double beta = g.chi[0][p] / denom;
          const double packet = g.weights[p] * q;  // dv measure carried over
          double energy_after = 0.0;
          for (int j = 0; j < 8; ++j) {
            if (theta[j] == 0.0) continue;
            oT[targets[j]] += beta * theta[j] * packet / g.weights[targets[j]];
            energy_after += beta * theta[j] * g.chi[4][targets[j]];
          }
          diag.reflected_mass += std::abs(packet) * g.chi[0][p];
          diag.remap_energy_defect += std::abs(packet * (energy_after - g.chi[4][p]));
        }
      }
    }

    // --- 3. forcing --------------------------------------------------------
    const double amp = forcing.amplitude(st.time);
    if (amp != 0.0) {
      const double fdt = dt * amp;
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += fdt * forcing.base[i];
    }

    if (!centroid_modes_.empty()) {
      const std::vector<double> post_angular = angular_momenta(out, nc, nn);
      diag.angular_change.resize(post_angular.size());
      for (std::size_t m = 0; m < post_angular.size(); ++m)
        diag.angular_change[m] = post_angular[m] - pre_angular[m];
    }

    // --- 4. implicit relaxation -------------------------------------------
    std::vector<double> cell_dissipation(nc, 0.0);
    if (collision_ && relax > 0.0) {
      ensure_relaxation_tables(relax);
      const std::vector<double>& dres = resolvent_diag_;
      const Eigen::Matrix<double, 5, 5> correction = correction_;
      fem::detail::parallel_ranges(nc, [&](std::size_t t0, std::size_t t1) {
        std::vector<double> micro(nn);
        for (std::size_t t = t0; t < t1; ++t) {
          double* fT = out.data() + t * nn;
          long double mom[5] = {0.0L, 0.0L, 0.0L, 0.0L, 0.0L};
          for (std::size_t p = 0; p < nn; ++p) {
            const long double wf = static_cast<long double>(g.weights[p]) * fT[p];
            for (int m = 0; m < 5; ++m) mom[m] += wf * g.chi[m][p];
          }
          for (std::size_t p = 0; p < nn; ++p) {
            double pf = 0.0;
            for (int m = 0; m < 5; ++m) pf += static_cast<double>(mom[m]) * g.chi[m][p];
            micro[p] = fT[p] - pf;
          }
          // Right side of the 5x5 moment system and the diagonal sweep.
          Eigen::Matrix<double, 5, 1> rhs;
          for (int m = 0; m < 5; ++m) {
            long double acc = 0.0L;
            for (std::size_t p = 0; p < nn; ++p)
              acc += static_cast<long double>(g.weights[p]) * g.chi[m][p] * nu_cache_[p] *
                     dres[p] * micro[p];
            rhs(m) = static_cast<double>(acc);
          }
          const Eigen::Matrix<double, 5, 1> corr = correction * rhs;
          long double diss = 0.0L;
          for (std::size_t p = 0; p < nn; ++p) {
            double lift = 0.0;
            for (int m = 0; m < 5; ++m) lift += corr(m) * g.chi[m][p];
            const double mp = dres[p] * (micro[p] + relax * lift);
            double pf = 0.0;
            for (int m = 0; m < 5; ++m) pf += static_cast<double>(mom[m]) * g.chi[m][p];
            fT[p] = pf + mp;
            diss += static_cast<long double>(g.weights[p]) * nu_cache_[p] * mp * mp;
          }
          cell_dissipation[t] = static_cast<double>(diss);
        }
      });
    } else {
      // Report the dissipation quadrature of the untouched microscopic part.
      fem::detail::parallel_ranges(nc, [&](std::size_t t0, std::size_t t1) {
        for (std::size_t t = t0; t < t1; ++t) {
          const double* fT = out.data() + t * nn;
          long double mom[5] = {0.0L, 0.0L, 0.0L, 0.0L, 0.0L};
          for (std::size_t p = 0; p < nn; ++p) {
            const long double wf = static_cast<long double>(g.weights[p]) * fT[p];
            for (int m = 0; m < 5; ++m) mom[m] += wf * g.chi[m][p];
          }
          long double diss = 0.0L;
          for (std::size_t p = 0; p < nn; ++p) {
            double pf = 0.0;
            for (int m = 0; m < 5; ++m) pf += static_cast<double>(mom[m]) * g.chi[m][p];
            const double mp = fT[p] - pf;
            diss += static_cast<long double>(g.weights[p]) *
                    kin::nu_weight(g.nodes[p]) * mp * mp;
          }
          cell_dissipation[t] = static_cast<double>(diss);
        }
      });
    }
    long double diss_total = 0.0L;
    for (std::size_t t = 0; t < nc; ++t)
      diss_total += static_cast<long double>(topo_.volume[t]) * cell_dissipation[t];
    diag.dissipation = static_cast<double>(diss_total);

    st.f = std::move(out);
    st.time += dt;
    return diag;
  }

 private:
  // Momentum of the field about each cached rigid mode.
  std::vector<double> angular_momenta(const std::vector<double>& field, std::size_t nc,
                                      std::size_t nn) const {
    const kin::VelocityGrid& g = *grid_;
    std::vector<double> out(centroid_modes_.size(), 0.0);
    std::vector<long double> acc(centroid_modes_.size(), 0.0L);
    for (std::size_t t = 0; t < nc; ++t) {
      const double* f = field.data() + t * nn;
      long double b[3] = {0.0L, 0.0L, 0.0L};
      for (std::size_t p = 0; p < nn; ++p) {
        const long double wf = static_cast<long double>(g.weights[p]) * f[p];
        b[0] += wf * g.chi[1][p];
        b[1] += wf * g.chi[2][p];
        b[2] += wf * g.chi[3][p];
      }
      for (std::size_t m = 0; m < centroid_modes_.size(); ++m) {
        const auto& r = centroid_modes_[m][t];
        acc[m] += static_cast<long double>(topo_.volume[t]) *
                  (r[0] * static_cast<double>(b[0]) + r[1] * static_cast<double>(b[1]) +
                   r[2] * static_cast<double>(b[2]));
      }
    }
    for (std::size_t m = 0; m < out.size(); ++m) out[m] = static_cast<double>(acc[m]);
    return out;
  }

  // Caches, for one relaxation weight r = dt eps^{-(k+s)}: the diagonal
  // resolvent 1/(1 + r nu), and the inverse of the 5x5 system (I - r T) with
  // T_ab = <chi_a, nu/(1 + r nu) chi_b>.  The eigenvalues of r T stay below
  // one because r nu/(1 + r nu) < 1, so the system is always solvable.
  void ensure_relaxation_tables(double relax) const {
    if (relax == cached_relax_) return;
    const kin::VelocityGrid& g = *grid_;
    const std::size_t nn = g.size();
    if (nu_cache_.empty()) {
      nu_cache_.resize(nn);
      for (std::size_t p = 0; p < nn; ++p) nu_cache_[p] = kin::nu_weight(g.nodes[p]);
    }
    resolvent_diag_.resize(nn);
    for (std::size_t p = 0; p < nn; ++p) resolvent_diag_[p] = 1.0 / (1.0 + relax * nu_cache_[p]);
    Eigen::Matrix<double, 5, 5> tmat;
    for (int a = 0; a < 5; ++a)
      for (int b = a; b < 5; ++b) {
        long double acc = 0.0L;
        for (std::size_t p = 0; p < nn; ++p)
          acc += static_cast<long double>(g.weights[p]) * g.chi[a][p] * nu_cache_[p] *
                 resolvent_diag_[p] * g.chi[b][p];
        tmat(a, b) = tmat(b, a) = static_cast<double>(acc);
      }
    const Eigen::Matrix<double, 5, 5> sys =
        Eigen::Matrix<double, 5, 5>::Identity() - relax * tmat;
    correction_ = sys.inverse();
    cached_relax_ = relax;
  }

  const fem::Mesh* mesh_;
  const kin::VelocityGrid* grid_;
  TransportTopology topo_;
  bool collision_;
  double vmax_ = 1.0;
  double cell_ratio_ = 0.0;
  std::vector<std::vector<std::array<double, 3>>> centroid_modes_;
  mutable double cached_relax_ = -1.0;
  mutable std::vector<double> nu_cache_;
  mutable std::vector<double> resolvent_diag_;
  mutable Eigen::Matrix<double, 5, 5> correction_;
};

// ---------------------------------------------------------------------------
// Simulation driver: initializes from a run configuration, advances the
// state, records one conservation row per step boundary (so a zero-step run
// has exactly one row), and keeps snapshots every `cadence` steps plus the
// final state.
// ---------------------------------------------------------------------------
struct SimulationResult {
  std::vector<KineticState> snapshots;
  std::vector<double> snapshot_times;
  ConservationTrace trace;
  Forcing forcing;
  double dt = 0.0;
  int steps = 0;
  double max_mass_step_drift = 0.0;
  double max_energy_step_drift = 0.0;
  double max_remap_energy_defect = 0.0;
  double total_remap_energy_defect = 0.0;
  double min_dissipation = 0.0;
  std::vector<double> max_angular_drift;  // per mode, relative to the first row
};

inline SimulationResult run_simulation(const fem::Mesh& mesh, const kin::VelocityGrid& grid,
                                       const fem::RigidModeBasis& basis, const RunConfig& cfg,
                                       bool keep_snapshots = true) {
  const Scaling sc{cfg.eps, cfg.s, cfg.k};
  validate_scaling(sc);
  if (cfg.cadence < 1) throw std::invalid_argument("run_simulation: cadence must be positive");
  if (cfg.steps < 0) throw std::invalid_argument("run_simulation: steps must be nonnegative");

  TransportStepper stepper(mesh, grid, &basis);
  const double dt = cfg.dt > 0.0 ? cfg.dt : 0.95 * stepper.cfl_bound(sc);

  SimulationResult res;
  res.dt = dt;
  res.steps = cfg.steps;
  res.forcing = make_forcing(cfg.forcing, mesh, grid, cfg.seed ^ 0x9e3779b97f4a7c15ULL, dt);

  KineticState st = init_state(mesh, grid, cfg.seed, parse_init_preset(cfg.preset), sc, &basis);
  const auto modes = modes_at_centroids(mesh, basis);
  res.trace.angular_dim = basis.dim;
  res.max_angular_drift.assign(basis.dim, 0.0);
  append_row(res.trace, st.time, conserved(st, stepper.topology(), modes));
  if (keep_snapshots) {
    res.snapshots.push_back(st);
    res.snapshot_times.push_back(st.time);
  }

  for (int i = 1; i <= cfg.steps; ++i) {
    const StepDiagnostics diag = stepper.step(st, dt, res.forcing);
    const ConservedQuantities row = conserved(st, stepper.topology(), modes);
    const ConservedQuantities& prev = res.trace.rows.back();
    res.max_mass_step_drift = std::max(res.max_mass_step_drift, std::abs(row.mass - prev.mass));
    res.max_energy_step_drift =
        std::max(res.max_energy_step_drift, std::abs(row.energy - prev.energy));
    for (int m = 0; m < basis.dim; ++m)
      res.max_angular_drift[m] = std::max(
          res.max_angular_drift[m], std::abs(row.angular[m] - res.trace.rows.front().angular[m]));
    res.max_remap_energy_defect = std::max(res.max_remap_energy_defect, diag.remap_energy_defect);
    res.total_remap_energy_defect += diag.remap_energy_defect;
    res.min_dissipation = i == 1 ? diag.dissipation : std::min(res.min_dissipation, diag.dissipation);
    append_row(res.trace, st.time, row);
    if (keep_snapshots && (i % cfg.cadence == 0 || i == cfg.steps)) {
      if (res.snapshot_times.empty() || res.snapshot_times.back() != st.time) {
        res.snapshots.push_back(st);
        res.snapshot_times.push_back(st.time);
      }
    }
  }
  return res;
}

}  // namespace macrolab::sim
