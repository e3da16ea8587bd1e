// Tests for the kinetic transport stepper: cell-face topology, initialization
// presets, specular reflection bookkeeping, implicit relaxation, the
// simulation driver, conservation traces, run configuration parsing, and the
// quadratic / sixth-power macroscopic estimate evaluators.
#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "macrolab/fem/mesh.hpp"
#include "macrolab/fem/solve.hpp"
#include "macrolab/kin/bgk.hpp"
#include "macrolab/kin/grid.hpp"
#include "macrolab/sim/estimate.hpp"
#include "macrolab/sim/state.hpp"
#include "macrolab/sim/stepper.hpp"

namespace {

using namespace macrolab;

const fem::Mesh& ball_mesh() {
  static fem::Mesh m = fem::gen_mesh(fem::Shape::ball(), 0);
  return m;
}

const fem::Mesh& spheroid_mesh() {
  static fem::Mesh m = fem::gen_mesh(fem::Shape::spheroid(1.0, 1.5), 0);
  return m;
}

const fem::Mesh& triaxial_mesh() {
  static fem::Mesh m = fem::gen_mesh(fem::Shape::ellipsoid(1.0, 0.8, 0.6), 0);
  return m;
}

const kin::VelocityGrid& grid8() {
  static kin::VelocityGrid g = kin::make_velocity_grid(8);
  return g;
}

const kin::VelocityGrid& grid12() {
  static kin::VelocityGrid g = kin::make_velocity_grid(12);
  return g;
}

const kin::VelocityGrid& grid16() {
  static kin::VelocityGrid g = kin::make_velocity_grid(16);
  return g;
}

const fem::RigidModeBasis& ball_basis() {
  static fem::RigidModeBasis b = fem::rigid_basis(ball_mesh());
  return b;
}

const fem::RigidModeBasis& spheroid_basis() {
  static fem::RigidModeBasis b = fem::rigid_basis(spheroid_mesh());
  return b;
}

const fem::RigidModeBasis& triaxial_basis() {
  static fem::RigidModeBasis b = fem::rigid_basis(triaxial_mesh());
  return b;
}

sim::KineticState make_state(const fem::Mesh& mesh, const kin::VelocityGrid& g,
                             const char* preset, std::uint64_t seed,
                             const fem::RigidModeBasis* basis) {
  return sim::init_state(mesh, g, seed, sim::parse_init_preset(preset), sim::Scaling{}, basis);
}

sim::KineticState zero_state(const fem::Mesh& mesh, const kin::VelocityGrid& g) {
  sim::KineticState st;
  st.mesh = &mesh;
  st.grid = &g;
  st.f.assign(mesh.tets.size() * g.size(), 0.0);
  return st;
}

// Pointwise combination of the constant and quadratic collision invariants:
// zero gradient and zero collision action, so only reflection can act on it.
sim::KineticState invariant_state(const fem::Mesh& mesh, const kin::VelocityGrid& g, double w0,
                                  double w4) {
  sim::KineticState st = zero_state(mesh, g);
  for (std::size_t t = 0; t < mesh.tets.size(); ++t)
    for (std::size_t p = 0; p < g.size(); ++p)
      st.f[t * g.size() + p] = w0 * g.chi[0][p] + w4 * g.chi[4][p];
  return st;
}

double linf(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool cell_has_boundary_face(const sim::TransportTopology& topo, std::size_t t) {
  for (const sim::CellFace& cf : topo.faces[t])
    if (cf.neighbor < 0) return true;
  return false;
}

}  // namespace

TEST_CASE("transport topology closes cell surfaces and orients boundary faces outward") {
  const fem::Mesh& mesh = ball_mesh();
  const sim::TransportTopology topo = sim::build_transport_topology(mesh);

  double vol_sum = 0.0;
  for (double v : topo.volume) {
    REQUIRE(v > 0.0);
    vol_sum += v;
  }
  REQUIRE(topo.total_volume == Catch::Approx(vol_sum).epsilon(1e-14));

  // The signed face areas of every interior cell telescope to zero; cells
  // touching the curved boundary pick up an O(h^2) gap because their boundary
  // faces carry the analytic mirror normal instead of the facet normal.
  double interior_gap = 0.0, boundary_gap = 0.0;
  for (std::size_t t = 0; t < topo.faces.size(); ++t) {
    std::array<double, 3> acc{0.0, 0.0, 0.0};
    for (const sim::CellFace& cf : topo.faces[t])
      for (int d = 0; d < 3; ++d) acc[d] += cf.sign * cf.area * cf.normal[d];
    const double gap = std::sqrt(acc[0] * acc[0] + acc[1] * acc[1] + acc[2] * acc[2]);
    if (cell_has_boundary_face(topo, t))
      boundary_gap = std::max(boundary_gap, gap);
    else
      interior_gap = std::max(interior_gap, gap);
  }
  REQUIRE(interior_gap <= 1e-14);
  REQUIRE(boundary_gap <= 2e-2);

  for (std::size_t t = 0; t < topo.faces.size(); ++t) {
    for (const sim::CellFace& cf : topo.faces[t]) {
      const double nlen = std::sqrt(cf.normal[0] * cf.normal[0] + cf.normal[1] * cf.normal[1] +
                                    cf.normal[2] * cf.normal[2]);
      REQUIRE(nlen == Catch::Approx(1.0).epsilon(1e-12));
      REQUIRE((cf.sign == 1.0 || cf.sign == -1.0));
      if (cf.neighbor < 0) {
        REQUIRE(cf.bface >= 0);
        // Outward: positive component along centroid -> face direction.
        const fem::BoundaryFace& bf = mesh.boundary_faces[static_cast<std::size_t>(cf.bface)];
        std::array<double, 3> fc{0.0, 0.0, 0.0};
        for (std::size_t v : bf.v)
          for (int d = 0; d < 3; ++d) fc[d] += mesh.vertices[v][d] / 3.0;
        double along = 0.0;
        for (int d = 0; d < 3; ++d)
          along += cf.sign * cf.normal[d] * (fc[d] - topo.centroid[t][d]);
        REQUIRE(along > 0.0);
      } else {
        // The neighbor stores the same face with the same shared normal and
        // the opposite sign, so paired fluxes cancel bitwise.
        const auto& nb = topo.faces[static_cast<std::size_t>(cf.neighbor)];
        bool matched = false;
        for (const sim::CellFace& nf : nb) {
          if (nf.neighbor == static_cast<int>(t) && nf.area == cf.area &&
              nf.normal == cf.normal && nf.sign == -cf.sign)
            matched = true;
        }
        REQUIRE(matched);
      }
    }
  }
}

TEST_CASE("initialization presets carry no conserved content and reproduce by seed") {
  const fem::Mesh& mesh = ball_mesh();
  const kin::VelocityGrid& g = grid8();
  const sim::TransportTopology topo = sim::build_transport_topology(mesh);
  const auto modes = sim::modes_at_centroids(mesh, ball_basis());

  for (const char* preset : {"moment_bump", "random_full", "random_microscopic"}) {
    sim::KineticState st = make_state(mesh, g, preset, 5, &ball_basis());
    REQUIRE(linf(st.f) > 0.0);
    const sim::ConservedQuantities c = sim::conserved(st, topo, modes);
    INFO("preset " << preset);
    REQUIRE(std::abs(c.mass) <= 1e-12);
    REQUIRE(std::abs(c.energy) <= 1e-12);
    REQUIRE(c.angular.size() == 3);
    for (double a : c.angular) REQUIRE(std::abs(a) <= 1e-12);
  }

  // Purely microscopic noise: every cell is orthogonal to all five
  // collision invariants, not just the domain totals.
  {
    sim::KineticState st = make_state(mesh, g, "random_microscopic", 5, &ball_basis());
    const sim::CellMoments mom = sim::cell_moments(st);
    for (std::size_t t = 0; t < mesh.tets.size(); ++t) {
      REQUIRE(std::abs(mom.a[t]) <= 1e-12);
      REQUIRE(std::abs(mom.c[t]) <= 1e-12);
      for (int d = 0; d < 3; ++d) REQUIRE(std::abs(mom.b[t][d]) <= 1e-12);
    }
  }

  // Seeds: identical seeds reproduce bitwise, different seeds differ, and the
  // deterministic bump ignores the seed entirely.
  {
    sim::KineticState a = make_state(mesh, g, "random_full", 11, &ball_basis());
    sim::KineticState b = make_state(mesh, g, "random_full", 11, &ball_basis());
    sim::KineticState c = make_state(mesh, g, "random_full", 12, &ball_basis());
    REQUIRE(a.f == b.f);
    REQUIRE(a.f != c.f);
    sim::KineticState d = make_state(mesh, g, "moment_bump", 1, &ball_basis());
    sim::KineticState e = make_state(mesh, g, "moment_bump", 99, &ball_basis());
    REQUIRE(d.f == e.f);
  }

  REQUIRE(sim::preset_name(sim::parse_init_preset("moment_bump")) == "moment_bump");
  REQUIRE(sim::preset_name(sim::parse_init_preset("random_full")) == "random_full");
  REQUIRE_THROWS_AS(sim::parse_init_preset("gaussian"), std::invalid_argument);
  REQUIRE_THROWS_WITH(sim::parse_init_preset("gaussian"),
                      Catch::Matchers::ContainsSubstring("unknown initialization preset"));
}

TEST_CASE("interior-supported transport conserves mass exactly without collisions") {
  const fem::Mesh& mesh = ball_mesh();
  const kin::VelocityGrid& g = grid8();
  const sim::TransportTopology topo = sim::build_transport_topology(mesh);
  const auto modes = sim::modes_at_centroids(mesh, ball_basis());

  sim::KineticState st = zero_state(mesh, g);
  std::size_t supported = 0;
  for (std::size_t t = 0; t < mesh.tets.size(); ++t) {
    const auto& x = topo.centroid[t];
    if (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] < 0.3 * 0.3) {
      ++supported;
      for (std::size_t p = 0; p < g.size(); ++p)
        st.f[t * g.size() + p] = g.chi[0][p] + 0.3 * g.chi[1][p];
    }
  }
  REQUIRE(supported > 0);
  REQUIRE(supported < mesh.tets.size());

  sim::TransportStepper stepper(mesh, g, &ball_basis(), /*collision=*/false);
  const sim::Forcing fz = sim::make_forcing("zero", mesh, g, 1, 0.0);
  const double mass0 = sim::conserved(st, topo, modes).mass;
  const sim::StepDiagnostics diag = stepper.step(st, 0.95 * stepper.cfl_bound({}), fz);
  const double mass1 = sim::conserved(st, topo, modes).mass;

  REQUIRE(std::abs(mass1 - mass0) <= 1e-14);
  REQUIRE(diag.reflected_mass == 0.0);
  REQUIRE(diag.remap_energy_defect == 0.0);
}

TEST_CASE("pointwise equilibria are steady up to boundary remap error") {
  const fem::Mesh& mesh = ball_mesh();
  const sim::TransportTopology topo = sim::build_transport_topology(mesh);
  const auto modes = sim::modes_at_centroids(mesh, ball_basis());

  // Constant-in-x equilibrium: zero transport in the interior, zero collision
  // action, only the velocity-space remap at reflecting faces perturbs it.
  std::array<double, 3> bdev{};
  std::array<double, 3> rel_energy{};
  int gi = 0;
  for (const kin::VelocityGrid* gp : {&grid8(), &grid12(), &grid16()}) {
    const kin::VelocityGrid& g = *gp;
    sim::TransportStepper stepper(mesh, g, &ball_basis());
    const sim::Forcing fz = sim::make_forcing("zero", mesh, g, 1, 0.0);
    const double dt = 0.95 * stepper.cfl_bound({});

    sim::KineticState st = invariant_state(mesh, g, 1.0, 0.0);
    const std::vector<double> before = st.f;
    const double mass0 = sim::conserved(st, topo, modes).mass;
    stepper.step(st, dt, fz);
    REQUIRE(std::abs(sim::conserved(st, topo, modes).mass - mass0) <= 1e-13);

    double interior_dev = 0.0, boundary_dev = 0.0;
    for (std::size_t t = 0; t < mesh.tets.size(); ++t) {
      double dev = 0.0;
      for (std::size_t p = 0; p < g.size(); ++p)
        dev = std::max(dev, std::abs(st.f[t * g.size() + p] - before[t * g.size() + p]));
      if (cell_has_boundary_face(topo, t))
        boundary_dev = std::max(boundary_dev, dev);
      else
        interior_dev = std::max(interior_dev, dev);
    }
    REQUIRE(interior_dev <= 1e-14);
    bdev[gi] = boundary_dev;

    // Energy-carrying variant: relative energy drift per step is bounded by
    // the defect the remap reports and shrinks as the velocity grid refines.
    sim::KineticState se = invariant_state(mesh, g, 1.0, 1.0);
    const sim::ConservedQuantities e0 = sim::conserved(se, topo, modes);
    REQUIRE(e0.energy > 1.0);
    const sim::StepDiagnostics diag = stepper.step(se, dt, fz);
    const sim::ConservedQuantities e1 = sim::conserved(se, topo, modes);
    REQUIRE(std::abs(e1.mass - e0.mass) <= 1e-13);
    rel_energy[gi] = std::abs(e1.energy - e0.energy) / e0.energy;
    REQUIRE(rel_energy[gi] <= diag.remap_energy_defect / e0.energy + 1e-12);
    ++gi;
  }

  REQUIRE(bdev[0] <= 2e-3);
  REQUIRE(bdev[1] < bdev[0]);
  REQUIRE(bdev[2] < bdev[1]);
  REQUIRE(bdev[2] <= 0.6 * bdev[0]);

  REQUIRE(rel_energy[0] <= 1e-3);
  REQUIRE(rel_energy[1] < rel_energy[0]);
  REQUIRE(rel_energy[2] < rel_energy[1]);
  REQUIRE(rel_energy[2] <= 0.5 * rel_energy[0]);
}

TEST_CASE("stepping rejects invalid time steps, foreign states, and macroscopic forcing") {
  const fem::Mesh& mesh = ball_mesh();
  const kin::VelocityGrid& g = grid8();
  sim::TransportStepper stepper(mesh, g, &ball_basis());
  const sim::Forcing fz = sim::make_forcing("zero", mesh, g, 1, 0.0);
  const double bound = stepper.cfl_bound({});
  REQUIRE(bound > 0.0);

  sim::KineticState st = make_state(mesh, g, "random_full", 3, &ball_basis());

  REQUIRE_THROWS_WITH(stepper.step(st, 1.01 * bound, fz),
                      Catch::Matchers::ContainsSubstring("upwind stability bound"));
  REQUIRE_THROWS_WITH(stepper.step(st, 0.0, fz),
                      Catch::Matchers::ContainsSubstring("positive finite"));
  REQUIRE_THROWS_WITH(stepper.step(st, -1.0, fz),
                      Catch::Matchers::ContainsSubstring("positive finite"));
  REQUIRE_THROWS_WITH(stepper.step(st, std::numeric_limits<double>::quiet_NaN(), fz),
                      Catch::Matchers::ContainsSubstring("positive finite"));

  sim::KineticState foreign = make_state(mesh, grid12(), "random_full", 3, &ball_basis());
  REQUIRE_THROWS_WITH(stepper.step(foreign, 0.5 * bound, fz),
                      Catch::Matchers::ContainsSubstring("does not belong"));

  // Forcing that injects conserved moments must be refused.
  sim::Forcing bad;
  bad.kind = "microscopic_noise";
  bad.base.assign(mesh.tets.size() * g.size(), 0.0);
  for (std::size_t t = 0; t < mesh.tets.size(); ++t)
    for (std::size_t p = 0; p < g.size(); ++p) bad.base[t * g.size() + p] = g.chi[0][p];
  REQUIRE_THROWS_WITH(stepper.step(st, 0.5 * bound, bad),
                      Catch::Matchers::ContainsSubstring("collision-invariant moments"));

  sim::Forcing short_base;
  short_base.kind = "microscopic_noise";
  short_base.base.assign(g.size(), 0.0);
  REQUIRE_THROWS_WITH(stepper.step(st, 0.5 * bound, short_base),
                      Catch::Matchers::ContainsSubstring("size mismatch"));

  REQUIRE_THROWS_WITH(sim::make_forcing("banana", mesh, g, 1, 0.0),
                      Catch::Matchers::ContainsSubstring("unknown forcing preset"));
  REQUIRE_THROWS_AS(sim::make_forcing("periodic_microscopic", mesh, g, 1, 0.0),
                    std::invalid_argument);

  // The advection speed scales the stability bound by eps^s.
  REQUIRE(stepper.cfl_bound({0.5, 1, 1}) == Catch::Approx(0.5 * bound).epsilon(1e-13));
  REQUIRE(stepper.cfl_bound({0.25, 1, 2}) == Catch::Approx(0.25 * bound).epsilon(1e-13));
}

TEST_CASE("implicit relaxation dissipates microscopic content and keeps cell moments") {
  const fem::Mesh& mesh = ball_mesh();
  const kin::VelocityGrid& g = grid8();

  sim::TransportStepper with(mesh, g, &ball_basis(), /*collision=*/true);
  sim::TransportStepper without(mesh, g, &ball_basis(), /*collision=*/false);
  const sim::Forcing fz = sim::make_forcing("zero", mesh, g, 1, 0.0);
  const double dt = 0.95 * with.cfl_bound({});

  sim::KineticState sc = make_state(mesh, g, "random_full", 7, &ball_basis());
  sim::KineticState sn = sc;
  const sim::StepDiagnostics dc = with.step(sc, dt, fz);
  without.step(sn, dt, fz);

  REQUIRE(dc.dissipation > 0.0);
  REQUIRE(std::isfinite(dc.dissipation));

  // Relaxation acts only on the microscopic part: the five moments of every
  // cell agree with the collisionless step to rounding.
  const sim::CellMoments mc = sim::cell_moments(sc);
  const sim::CellMoments mn = sim::cell_moments(sn);
  const double scale = std::max(1.0, linf(sn.f));
  for (std::size_t t = 0; t < mesh.tets.size(); ++t) {
    REQUIRE(std::abs(mc.a[t] - mn.a[t]) <= 1e-12 * scale);
    REQUIRE(std::abs(mc.c[t] - mn.c[t]) <= 1e-12 * scale);
    for (int d = 0; d < 3; ++d) REQUIRE(std::abs(mc.b[t][d] - mn.b[t][d]) <= 1e-12 * scale);
  }

  // The implicit update solves f' + dt * L f' = f_transport cellwise.
  double resid = 0.0;
  std::vector<double> cell(g.size());
  for (std::size_t t = 0; t < mesh.tets.size(); ++t) {
    std::copy(sc.f.begin() + t * g.size(), sc.f.begin() + (t + 1) * g.size(), cell.begin());
    const std::vector<double> lf = kin::bgk_apply(g, cell);
    for (std::size_t p = 0; p < g.size(); ++p) {
      const double r = cell[p] + dt * lf[p] - sn.f[t * g.size() + p];
      resid = std::max(resid, std::abs(r));
    }
  }
  REQUIRE(resid <= 1e-9 * std::max(1.0, linf(sn.f)));

  // Relaxation contracts the microscopic content it acts on.
  auto micro_l2 = [&](const sim::KineticState& st) {
    const sim::CellMoments mom = sim::cell_moments(st);
    long double acc = 0.0L;
    for (std::size_t t = 0; t < mesh.tets.size(); ++t) {
      for (std::size_t p = 0; p < g.size(); ++p) {
        double mac = mom.a[t] * g.chi[0][p] + mom.c[t] * g.chi[4][p];
        for (int d = 0; d < 3; ++d) mac += mom.b[t][d] * g.chi[1 + d][p];
        const double w = st.f[t * g.size() + p] - mac;
        acc += static_cast<long double>(g.weights[p]) * w * w;
      }
    }
    return static_cast<double>(acc);
  };
  REQUIRE(micro_l2(sc) < micro_l2(sn));
}

TEST_CASE("the driver honors cadence, derives the step size, and tracks drift extrema") {
  const fem::Mesh& mesh = ball_mesh();
  const kin::VelocityGrid& g = grid8();

  sim::RunConfig cfg;
  cfg.steps = 40;
  cfg.cadence = 5;
  cfg.seed = 3;
  const sim::SimulationResult run = sim::run_simulation(mesh, g, ball_basis(), cfg);

  sim::TransportStepper stepper(mesh, g, &ball_basis());
  REQUIRE(run.dt == Catch::Approx(0.95 * stepper.cfl_bound({})).epsilon(1e-13));
  REQUIRE(run.steps == 40);
  REQUIRE(run.trace.times.size() == 41);
  REQUIRE(run.trace.rows.size() == 41);
  REQUIRE(run.trace.angular_dim == 3);
  REQUIRE(run.trace.times.front() == 0.0);
  REQUIRE(std::is_sorted(run.trace.times.begin(), run.trace.times.end()));

  REQUIRE(run.snapshots.size() == 9);  // t = 0, every 5th step, final
  REQUIRE(run.snapshot_times.size() == 9);
  REQUIRE(run.snapshot_times.front() == 0.0);
  REQUIRE(run.snapshot_times.back() == Catch::Approx(40 * run.dt).epsilon(1e-12));
  for (std::size_t i = 1; i < run.snapshot_times.size(); ++i)
    REQUIRE(run.snapshot_times[i] > run.snapshot_times[i - 1]);

  REQUIRE(run.max_mass_step_drift <= 1e-12);
  REQUIRE(run.min_dissipation > 0.0);
  REQUIRE(run.max_remap_energy_defect > 0.0);
  REQUIRE(run.total_remap_energy_defect >= run.max_remap_energy_defect);
  REQUIRE(run.max_angular_drift.size() == 3);
  REQUIRE(run.max_energy_step_drift > 0.0);
  REQUIRE(run.max_energy_step_drift < 1e-2);

  // Zero steps still records the initial row and snapshot.
  sim::RunConfig cfg0;
  cfg0.steps = 0;
  const sim::SimulationResult run0 = sim::run_simulation(mesh, g, ball_basis(), cfg0);
  REQUIRE(run0.trace.rows.size() == 1);
  REQUIRE(run0.snapshots.size() == 1);
  REQUIRE(run0.max_mass_step_drift == 0.0);
  REQUIRE(run0.max_energy_step_drift == 0.0);

  // Explicit dt is honored; an unstable request propagates the stability error.
  sim::RunConfig cfgd;
  cfgd.steps = 2;
  cfgd.dt = 1e-4;
  REQUIRE(sim::run_simulation(mesh, g, ball_basis(), cfgd, false).dt == 1e-4);
  sim::RunConfig cfgx;
  cfgx.steps = 1;
  cfgx.dt = 1.0;
  REQUIRE_THROWS_WITH(sim::run_simulation(mesh, g, ball_basis(), cfgx, false),
                      Catch::Matchers::ContainsSubstring("upwind stability bound"));

  // Snapshots can be disabled; the trace is unaffected.
  sim::RunConfig cfgn;
  cfgn.steps = 4;
  const sim::SimulationResult lean = sim::run_simulation(mesh, g, ball_basis(), cfgn, false);
  REQUIRE(lean.snapshots.empty());
  REQUIRE(lean.trace.rows.size() == 5);
}

TEST_CASE("conservation traces serialize at full round-trip precision") {
  sim::ConservationTrace trace;
  trace.angular_dim = 2;
  sim::ConservedQuantities r0;
  r0.mass = 1.0 / 3.0;
  r0.energy = -2.718281828459045e-3;
  r0.angular = {1e-17, -0.4999999999999999};
  sim::append_row(trace, 0.0, r0);
  sim::ConservedQuantities r1 = r0;
  r1.mass = 0.1 + 0.2;  // deliberately not representable as 0.3
  sim::append_row(trace, 1.25e-3, r1);

  std::ostringstream os;
  sim::write_conservation_csv(os, trace);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  REQUIRE(header == "time,mass,energy,angular_momentum_1,angular_momentum_2");

  std::string line;
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string tok;
    std::vector<double> vals;
    while (std::getline(ls, tok, ',')) vals.push_back(std::stod(tok));
    REQUIRE(vals.size() == 5);
    const sim::ConservedQuantities& ref = trace.rows[rows];
    REQUIRE(vals[0] == trace.times[rows]);
    REQUIRE(vals[1] == ref.mass);
    REQUIRE(vals[2] == ref.energy);
    REQUIRE(vals[3] == ref.angular[0]);
    REQUIRE(vals[4] == ref.angular[1]);
    ++rows;
  }
  REQUIRE(rows == 2);

  sim::ConservedQuantities bad = r0;
  bad.angular = {0.0};
  REQUIRE_THROWS_WITH(sim::append_row(trace, 2e-3, bad),
                      Catch::Matchers::ContainsSubstring("angular column count"));
  REQUIRE_THROWS_WITH(sim::append_row(trace, 1e-3, r0),
                      Catch::Matchers::ContainsSubstring("advance in time"));
}

TEST_CASE("run configurations parse from key-value text with strict validation") {
  const std::string text =
      "# kinetic run\n"
      "shape = spheroid:1,1.5\n"
      "\n"
      "refine = 0\n"
      "grid = 12\n"
      "eps = 0.5\n"
      "s = 1\n"
      "k = 1\n"
      "preset = moment_bump\n"
      "seed = 42\n"
      "cadence = 4\n"
      "steps = 80\n"
      "dt = 0.0005\n"
      "forcing = microscopic_noise\n";
  const sim::RunConfig cfg = sim::parse_run_config_text(text);
  REQUIRE(cfg.shape == "spheroid:1,1.5");
  REQUIRE(cfg.refine == 0);
  REQUIRE(cfg.grid == 12);
  REQUIRE(cfg.eps == 0.5);
  REQUIRE(cfg.s == 1);
  REQUIRE(cfg.k == 1);
  REQUIRE(cfg.preset == "moment_bump");
  REQUIRE(cfg.seed == 42);
  REQUIRE(cfg.cadence == 4);
  REQUIRE(cfg.steps == 80);
  REQUIRE(cfg.dt == 0.0005);
  REQUIRE(cfg.forcing == "microscopic_noise");

  REQUIRE_THROWS_WITH(sim::parse_run_config_text("color = red\n"),
                      Catch::Matchers::ContainsSubstring("unknown configuration key: color"));
  REQUIRE_THROWS_WITH(sim::parse_run_config_text("refine = 9\n"),
                      Catch::Matchers::ContainsSubstring("must lie in [0, 8]"));
  REQUIRE_THROWS_WITH(sim::parse_run_config_text("grid = 65\n"),
                      Catch::Matchers::ContainsSubstring("must lie in [2, 64]"));
  REQUIRE_THROWS_WITH(sim::parse_run_config_text("grid = 1\n"),
                      Catch::Matchers::ContainsSubstring("must lie in [2, 64]"));
  REQUIRE_THROWS_WITH(sim::parse_run_config_text("s = 5\n"),
                      Catch::Matchers::ContainsSubstring("must lie in [0, 4]"));
  REQUIRE_THROWS_WITH(sim::parse_run_config_text("eps = 0\n"),
                      Catch::Matchers::ContainsSubstring("eps"));
  REQUIRE_THROWS_WITH(sim::parse_run_config_text("seed = -3\n"),
                      Catch::Matchers::ContainsSubstring("nonnegative"));
  REQUIRE_THROWS_WITH(sim::parse_run_config_text("dt = -1\n"),
                      Catch::Matchers::ContainsSubstring("dt"));
  REQUIRE_THROWS_WITH(sim::parse_run_config_text("forcing = banana\n"),
                      Catch::Matchers::ContainsSubstring("unknown forcing preset"));
  REQUIRE_THROWS_WITH(sim::parse_run_config_text("preset = banana\n"),
                      Catch::Matchers::ContainsSubstring("unknown initialization preset"));
  REQUIRE_THROWS_WITH(sim::parse_run_config_text("shape = cube\n"),
                      Catch::Matchers::ContainsSubstring("unrecognized domain shape"));
  REQUIRE_THROWS_WITH(sim::parse_run_config_text("grid 8\n"),
                      Catch::Matchers::ContainsSubstring("configuration line"));
  REQUIRE_THROWS_AS(sim::parse_run_config_text("grid = 8x\n"), std::invalid_argument);

  REQUIRE_NOTHROW(sim::make_shape("ball"));
  REQUIRE_NOTHROW(sim::make_shape("ellipsoid:1,0.8,0.6"));
  REQUIRE_THROWS_AS(sim::make_shape("spheroid:1"), std::invalid_argument);
}

TEST_CASE("spheroid runs conserve mass and energy drift shrinks under grid refinement") {
  const fem::Mesh& mesh = spheroid_mesh();

  std::array<double, 3> energy_drift{};
  int gi = 0;
  for (const kin::VelocityGrid* gp : {&grid8(), &grid12(), &grid16()}) {
    sim::RunConfig cfg;
    cfg.steps = 20;
    cfg.seed = 21;
    const sim::SimulationResult run = sim::run_simulation(mesh, *gp, spheroid_basis(), cfg, false);
    REQUIRE(run.max_mass_step_drift <= 1e-12);
    REQUIRE(run.min_dissipation >= 0.0);
    energy_drift[gi++] = run.max_energy_step_drift;
  }

  REQUIRE(energy_drift[0] > energy_drift[1]);
  REQUIRE(energy_drift[1] > energy_drift[2]);
  // Convergence order from the 8 -> 16 endpoints of the velocity grid.
  const double order = std::log(energy_drift[0] / energy_drift[2]) / std::log(2.0);
  REQUIRE(order >= 1.0);
}

TEST_CASE("angular momentum drift stays below the discretization tolerance curve") {
  REQUIRE(ball_basis().dim == 3);
  REQUIRE(spheroid_basis().dim == 1);
  REQUIRE(triaxial_basis().dim == 0);

  // Axisymmetric domain: the axis moment drifts only through discretization
  // error, bounded by a linear-in-steps tolerance curve.
  {
    sim::RunConfig cfg;
    cfg.preset = "moment_bump";
    cfg.steps = 100;
    const sim::SimulationResult run =
        sim::run_simulation(spheroid_mesh(), grid8(), spheroid_basis(), cfg, false);
    REQUIRE(run.trace.angular_dim == 1);
    REQUIRE(run.trace.rows.size() == 101);
    const double a0 = run.trace.rows.front().angular[0];
    double worst = 0.0;
    for (std::size_t i = 1; i < run.trace.rows.size(); ++i) {
      const double drift = std::abs(run.trace.rows[i].angular[0] - a0);
      REQUIRE(drift <= 2e-4 * static_cast<double>(i + 1));
      worst = std::max(worst, drift);
    }
    REQUIRE(run.max_angular_drift.size() == 1);
    REQUIRE(run.max_angular_drift[0] == Catch::Approx(worst).margin(1e-15));
  }

  // No continuous rotational symmetry: no angular rows at all.
  {
    sim::RunConfig cfg;
    cfg.steps = 3;
    const sim::SimulationResult run =
        sim::run_simulation(triaxial_mesh(), grid8(), triaxial_basis(), cfg, false);
    REQUIRE(run.trace.angular_dim == 0);
    REQUIRE(run.max_angular_drift.empty());
    std::ostringstream os;
    sim::write_conservation_csv(os, run.trace);
    const std::string out = os.str();
    REQUIRE(out.substr(0, out.find('\n')) == "time,mass,energy");
  }
}

TEST_CASE("the quadratic estimate bounds macroscopic energy with a finite constant") {
  const fem::Mesh& mesh = ball_mesh();
  const kin::VelocityGrid& g = grid8();

  sim::RunConfig cfg;
  cfg.steps = 40;
  cfg.cadence = 8;
  cfg.seed = 3;
  cfg.forcing = "microscopic_noise";
  const sim::SimulationResult run = sim::run_simulation(mesh, g, ball_basis(), cfg);
  const sim::EstimateReport rep = sim::evaluate_l2_estimate(run, ball_basis());

  REQUIRE(rep.kind == "l2");
  REQUIRE(rep.eps == 1.0);
  REQUIRE(rep.lhs > 0.0);
  REQUIRE(std::isfinite(rep.ratio));
  REQUIRE(rep.ratio > 0.02);
  REQUIRE(rep.ratio <= 3.0);  // frozen acceptance cap
  REQUIRE(rep.g_bound_constant > 0.0);
  REQUIRE(rep.g_bound_constant <= 0.05);  // frozen acceptance cap

  REQUIRE(rep.rhs_items.count("microscopic_term") == 1);
  REQUIRE(rep.rhs_items.count("collision_term") == 1);
  REQUIRE(rep.rhs_items.count("potential_window") == 1);
  REQUIRE(rep.rhs_items.count("forcing_term") == 1);
  REQUIRE(rep.rhs_items.at("microscopic_term") >= 0.0);
  REQUIRE(rep.rhs_items.at("collision_term") >= 0.0);
  REQUIRE(rep.rhs_items.at("forcing_term") > 0.0);
  double total = 0.0;
  for (const auto& [key, val] : rep.rhs_items) total += val;
  REQUIRE(rep.rhs_total == Catch::Approx(total).epsilon(1e-12));

  REQUIRE(rep.samples.size() == run.snapshots.size());
  for (const sim::SampleRow& row : rep.samples) {
    for (const char* key : {"potential_a", "potential_b", "potential_c", "potential_total",
                            "pf_l2_sq", "micro_l2_sq", "f_l2_sq"})
      REQUIRE(row.values.count(key) == 1);
    REQUIRE(row.values.at("pf_l2_sq") >= 0.0);
    REQUIRE(row.values.at("f_l2_sq") >= row.values.at("pf_l2_sq") - 1e-14);
  }
  bool noted = false;
  for (const std::string& n : rep.notes)
    if (n.find("microscopic_noise") != std::string::npos) noted = true;
  REQUIRE(noted);

  // Convenience overload and the explicit sample form agree exactly.
  const sim::EstimateReport rep2 =
      sim::evaluate_l2_estimate(run.snapshots, run.snapshot_times, run.forcing, ball_basis());
  REQUIRE(rep2.lhs == rep.lhs);
  REQUIRE(rep2.rhs_total == rep.rhs_total);

  // Degenerate content: an identically zero trace scores zero on both sides.
  {
    std::vector<sim::KineticState> snaps(2, zero_state(mesh, g));
    snaps[1].time = 1e-3;
    const sim::Forcing fz = sim::make_forcing("zero", mesh, g, 1, 0.0);
    const sim::EstimateReport zr =
        sim::evaluate_l2_estimate(snaps, {0.0, 1e-3}, fz, ball_basis());
    REQUIRE(zr.lhs <= 1e-20);
    REQUIRE(zr.ratio <= 1e-15);
    REQUIRE(zr.g_bound_constant <= 1e-12);
  }

  // Purely microscopic content has no macroscopic energy: lhs and ratio vanish.
  {
    sim::KineticState st = make_state(mesh, g, "random_microscopic", 5, &ball_basis());
    std::vector<sim::KineticState> snaps(2, st);
    snaps[1].time = 1e-3;
    const sim::Forcing fz = sim::make_forcing("zero", mesh, g, 1, 0.0);
    const sim::EstimateReport mr =
        sim::evaluate_l2_estimate(snaps, {0.0, 1e-3}, fz, ball_basis());
    REQUIRE(mr.lhs <= 1e-20);
    REQUIRE(mr.ratio <= 1e-18);
  }

  // Input validation.
  {
    std::vector<sim::KineticState> one(1, zero_state(mesh, g));
    const sim::Forcing fz = sim::make_forcing("zero", mesh, g, 1, 0.0);
    REQUIRE_THROWS_WITH(sim::evaluate_l2_estimate(one, {0.0}, fz, ball_basis()),
                        Catch::Matchers::ContainsSubstring("evaluate_l2_estimate"));
    std::vector<sim::KineticState> two(2, zero_state(mesh, g));
    REQUIRE_THROWS_AS(sim::evaluate_l2_estimate(two, {1e-3, 0.0}, fz, ball_basis()),
                      std::invalid_argument);
  }
}

TEST_CASE("the sixth-power estimate is stable under velocity-grid refinement") {
  const fem::Mesh& mesh = ball_mesh();

  double ratio8 = 0.0, ratio12 = 0.0;
  for (int which = 0; which < 2; ++which) {
    const kin::VelocityGrid& g = which == 0 ? grid8() : grid12();
    sim::RunConfig cfg;
    cfg.preset = "moment_bump";
    cfg.steps = 30;
    cfg.cadence = 3;
    cfg.dt = 2.5e-4;  // keep the time discretization fixed across grids
    const sim::SimulationResult run = sim::run_simulation(mesh, g, ball_basis(), cfg);
    const sim::EstimateReport rep = sim::evaluate_l6_estimate(run, ball_basis());
    REQUIRE(rep.kind == "l6");
    REQUIRE(rep.lhs > 0.0);
    REQUIRE(std::isfinite(rep.ratio));
    REQUIRE(rep.ratio > 0.0);
    REQUIRE(rep.ratio <= 3.0);  // frozen acceptance cap
    (which == 0 ? ratio8 : ratio12) = rep.ratio;
  }
  REQUIRE(std::abs(ratio8 - ratio12) <= 0.2 * ratio12);

  // Degenerate content scores zero.
  {
    const kin::VelocityGrid& g = grid8();
    std::vector<sim::KineticState> snaps(3, zero_state(mesh, g));
    snaps[1].time = 1e-3;
    snaps[2].time = 2e-3;
    const sim::Forcing fz = sim::make_forcing("zero", mesh, g, 1, 0.0);
    const sim::EstimateReport zr =
        sim::evaluate_l6_estimate(snaps, {0.0, 1e-3, 2e-3}, fz, ball_basis());
    REQUIRE(zr.lhs <= 1e-30);
    REQUIRE(zr.ratio <= 1e-20);

    sim::KineticState micro = make_state(mesh, g, "random_microscopic", 5, &ball_basis());
    std::vector<sim::KineticState> ms(3, micro);
    ms[1].time = 1e-3;
    ms[2].time = 2e-3;
    const sim::EstimateReport mr =
        sim::evaluate_l6_estimate(ms, {0.0, 1e-3, 2e-3}, fz, ball_basis());
    REQUIRE(mr.lhs <= 1e-30);
    REQUIRE(mr.ratio <= 1e-20);

    std::vector<sim::KineticState> two(2, zero_state(mesh, g));
    REQUIRE_THROWS_WITH(sim::evaluate_l6_estimate(two, {0.0, 1e-3}, fz, ball_basis()),
                        Catch::Matchers::ContainsSubstring("evaluate_l6_estimate"));
  }
}

TEST_CASE("the sixth-power report projects the axis companion on symmetric domains") {
  // One rotational symmetry: the fifth-power companion of the momentum field
  // is projected to satisfy the compatibility constraint, and the projection
  // coefficient plus the residual axis momentum are reported.
  {
    sim::RunConfig cfg;
    cfg.preset = "moment_bump";
    cfg.steps = 20;
    cfg.cadence = 2;
    cfg.seed = 31;
    const sim::SimulationResult run =
        sim::run_simulation(spheroid_mesh(), grid8(), spheroid_basis(), cfg);
    const sim::EstimateReport rep = sim::evaluate_l6_estimate(run, spheroid_basis());

    REQUIRE(rep.extras.at("b5_projection_modes") == 1.0);
    REQUIRE(rep.extras.count("b5_projection_coefficient_max") == 1);
    REQUIRE(rep.extras.at("b5_projection_coefficient_max") > 0.0);
    REQUIRE(rep.extras.at("b5_projection_coefficient_max") <= 1e-3);
    REQUIRE(rep.extras.count("rigid_momentum_max") == 1);
    REQUIRE(rep.extras.at("rigid_momentum_max") <= 5e-3);
    REQUIRE(rep.extras.at("b5_potential_energy") >= 0.0);
    REQUIRE(rep.extras.at("worst_sample_time") > 0.0);
    REQUIRE(rep.extras.at("worst_sample_time") <= run.snapshot_times.back());
    REQUIRE(std::isfinite(rep.ratio));
    REQUIRE(rep.ratio <= 3.0);
  }

  // No rotational symmetry: nothing to project against.
  {
    sim::RunConfig cfg;
    cfg.preset = "moment_bump";
    cfg.steps = 8;
    cfg.cadence = 2;
    const sim::SimulationResult run =
        sim::run_simulation(triaxial_mesh(), grid8(), triaxial_basis(), cfg);
    const sim::EstimateReport rep = sim::evaluate_l6_estimate(run, triaxial_basis());
    REQUIRE(rep.extras.at("b5_projection_modes") == 0.0);
    REQUIRE(rep.extras.count("b5_projection_coefficient_max") == 0);
    REQUIRE(rep.extras.count("rigid_momentum_max") == 0);
    REQUIRE(rep.extras.at("b5_potential_energy") >= 0.0);
  }
}

TEST_CASE("worker thread count does not change stepping results") {
  static fem::Mesh mesh = fem::gen_mesh(fem::Shape::ball(), 1);
  static fem::RigidModeBasis basis = fem::rigid_basis(mesh);
  const kin::VelocityGrid& g = grid12();  // large enough to engage the pool

  sim::RunConfig cfg;
  cfg.steps = 2;
  cfg.seed = 9;
  cfg.forcing = "microscopic_noise";

  setenv("MACROLAB_THREADS", "1", 1);
  const sim::SimulationResult serial = sim::run_simulation(mesh, g, basis, cfg, false);
  setenv("MACROLAB_THREADS", "4", 1);
  const sim::SimulationResult pooled = sim::run_simulation(mesh, g, basis, cfg, false);
  unsetenv("MACROLAB_THREADS");

  REQUIRE(serial.trace.rows.size() == pooled.trace.rows.size());
  for (std::size_t r = 0; r < serial.trace.rows.size(); ++r) {
    REQUIRE(serial.trace.rows[r].mass == pooled.trace.rows[r].mass);
    REQUIRE(serial.trace.rows[r].energy == pooled.trace.rows[r].energy);
  }
  REQUIRE(serial.max_mass_step_drift == pooled.max_mass_step_drift);
  REQUIRE(serial.min_dissipation == pooled.min_dissipation);
}
