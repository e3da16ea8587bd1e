// Command-line entry point for the verification workbench.
//
// Subcommands: verify-adn, check-moments, solve-sym-poisson, korn-constant,
// simulate, estimate-report. Every subcommand writes a versioned JSON
// document ("schema": 1) to --out (or stdout) that is byte-identical across
// reruns of the same configuration except for the "timestamp" field.
//
// Exit codes: 0 all checks of the invoked suite pass, 1 suite failure (the
// failing check names are printed to stderr and listed in the JSON),
// 2 usage or configuration error. Nothing else is ever returned.
//
// The MACROLAB_THREADS environment variable caps internal parallelism.
#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "macrolab/adn/pipeline.hpp"
#include "macrolab/fem/assemble.hpp"
#include "macrolab/fem/mesh.hpp"
#include "macrolab/fem/solve.hpp"
#include "macrolab/kin/basis.hpp"
#include "macrolab/kin/grid.hpp"
#include "macrolab/kin/testfn.hpp"
#include "macrolab/sim/estimate.hpp"
#include "macrolab/sim/state.hpp"
#include "macrolab/sim/stepper.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace macrolab;

// JSON cannot hold non-finite numbers; encode them as strings so reports
// stay machine-readable without silently turning infinities into null.
json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0.0 ? "inf" : "-inf";
}

std::string iso_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json make_root(const std::string& subcommand) {
  json root;
  root["schema"] = 1;
  root["subcommand"] = subcommand;
  root["timestamp"] = iso_timestamp();
  return root;
}

// One named pass/fail check inside a suite.
struct Check {
  std::string name;
  double value = 0.0;
  std::string requirement;
  bool pass = true;
};

json checks_json(const std::vector<Check>& checks) {
  json arr = json::array();
  for (const Check& c : checks) {
    json row;
    row["name"] = c.name;
    row["value"] = num(c.value);
    row["requirement"] = c.requirement;
    row["pass"] = c.pass;
    arr.push_back(row);
  }
  return arr;
}

// Appends the failure list + overall verdict, writes the document, prints
// failing check names, and converts them into the exit code.
int finish(json& root, const std::vector<Check>& checks, const std::string& out_path) {
  json failures = json::array();
  for (const Check& c : checks)
    if (!c.pass) failures.push_back(c.name);
  root["failures"] = failures;
  root["pass"] = failures.empty();

  const std::string text = root.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream os(out_path);
    os << text;
    if (!os) throw std::invalid_argument("cannot write output file: " + out_path);
  }
  for (const Check& c : checks)
    if (!c.pass) std::cerr << "FAIL: " << c.name << "\n";
  return failures.empty() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// Run configuration assembly: config file first, explicit flags override.
// ---------------------------------------------------------------------------
struct RunFlags {
  std::string config_path;
  std::string shape, preset, forcing;
  int refine = 0, grid = 0, s = 0, k = 0, steps = 0, cadence = 0;
  double eps = 0.0, dt = 0.0;
  std::uint64_t seed = 0;
  CLI::Option *o_shape = nullptr, *o_refine = nullptr, *o_grid = nullptr, *o_eps = nullptr,
              *o_s = nullptr, *o_k = nullptr, *o_seed = nullptr, *o_preset = nullptr,
              *o_steps = nullptr, *o_cadence = nullptr, *o_dt = nullptr, *o_forcing = nullptr;
};

void attach_run_flags(CLI::App* sub, RunFlags& rf) {
  sub->add_option("--config", rf.config_path,
                  "key-value run configuration file; explicit flags override it");
  rf.o_shape = sub->add_option("--shape", rf.shape,
                               "domain: ball | spheroid[:a,c] | ellipsoid[:a,b,c]");
  rf.o_refine = sub->add_option("--refine", rf.refine, "mesh refinement level");
  rf.o_grid = sub->add_option("--grid", rf.grid, "velocity nodes per axis");
  rf.o_eps = sub->add_option("--eps", rf.eps, "scaling parameter epsilon");
  rf.o_s = sub->add_option("--s", rf.s, "time-scaling exponent");
  rf.o_k = sub->add_option("--k", rf.k, "collision-scaling exponent");
  rf.o_seed = sub->add_option("--seed", rf.seed, "random seed");
  rf.o_preset = sub->add_option("--preset", rf.preset,
                                "initial state: moment_bump | random_full | random_microscopic");
  rf.o_steps = sub->add_option("--steps", rf.steps, "number of time steps");
  rf.o_cadence = sub->add_option("--cadence", rf.cadence, "snapshot cadence in steps");
  rf.o_dt = sub->add_option("--dt", rf.dt, "time step (0 = derive from the stability bound)");
  rf.o_forcing = sub->add_option(
      "--forcing", rf.forcing, "source: zero | microscopic_noise | periodic_microscopic");
}

void validate_config(const sim::RunConfig& cfg) {
  sim::make_shape(cfg.shape);            // throws on unknown shapes
  sim::parse_init_preset(cfg.preset);    // throws on unknown presets
  if (cfg.refine < 0 || cfg.refine > 8)
    throw std::invalid_argument("refine must lie in [0, 8]");
  if (cfg.grid < 2 || cfg.grid > 64) throw std::invalid_argument("grid must lie in [2, 64]");
  if (!(cfg.eps > 0.0) || !std::isfinite(cfg.eps))
    throw std::invalid_argument("eps must be a positive finite number");
  if (cfg.s < 0 || cfg.s > 4 || cfg.k < 0 || cfg.k > 4)
    throw std::invalid_argument("s and k must lie in [0, 4]");
  if (cfg.cadence < 1) throw std::invalid_argument("cadence must be at least 1");
  if (cfg.steps < 0) throw std::invalid_argument("steps must be nonnegative");
  if (cfg.dt < 0.0 || !std::isfinite(cfg.dt))
    throw std::invalid_argument("dt must be a nonnegative finite number");
  if (cfg.forcing != "zero" && cfg.forcing != "microscopic_noise" &&
      cfg.forcing != "periodic_microscopic")
    throw std::invalid_argument("unknown forcing preset: " + cfg.forcing);
}

sim::RunConfig assemble_config(const RunFlags& rf) {
  sim::RunConfig cfg;
  if (!rf.config_path.empty()) {
    std::ifstream is(rf.config_path);
    if (!is) throw std::invalid_argument("cannot read config file: " + rf.config_path);
    cfg = sim::parse_run_config(is);
  }
  if (rf.o_shape->count()) cfg.shape = rf.shape;
  if (rf.o_refine->count()) cfg.refine = rf.refine;
  if (rf.o_grid->count()) cfg.grid = rf.grid;
  if (rf.o_eps->count()) cfg.eps = rf.eps;
  if (rf.o_s->count()) cfg.s = rf.s;
  if (rf.o_k->count()) cfg.k = rf.k;
  if (rf.o_seed->count()) cfg.seed = rf.seed;
  if (rf.o_preset->count()) cfg.preset = rf.preset;
  if (rf.o_steps->count()) cfg.steps = rf.steps;
  if (rf.o_cadence->count()) cfg.cadence = rf.cadence;
  if (rf.o_dt->count()) cfg.dt = rf.dt;
  if (rf.o_forcing->count()) cfg.forcing = rf.forcing;
  validate_config(cfg);
  return cfg;
}

json config_json(const sim::RunConfig& cfg) {
  json j;
  j["shape"] = cfg.shape;
  j["refine"] = cfg.refine;
  j["grid"] = cfg.grid;
  j["eps"] = cfg.eps;
  j["s"] = cfg.s;
  j["k"] = cfg.k;
  j["preset"] = cfg.preset;
  j["seed"] = cfg.seed;
  j["cadence"] = cfg.cadence;
  j["steps"] = cfg.steps;
  j["dt"] = cfg.dt;
  j["forcing"] = cfg.forcing;
  return j;
}

json trace_json(const sim::ConservationTrace& trace) {
  json cols = json::array({"time", "mass", "energy"});
  for (int m = 0; m < trace.angular_dim; ++m)
    cols.push_back("angular_momentum_" + std::to_string(m + 1));
  json rows = json::array();
  for (std::size_t r = 0; r < trace.rows.size(); ++r) {
    json row = json::array({trace.times[r], trace.rows[r].mass, trace.rows[r].energy});
    for (double a : trace.rows[r].angular) row.push_back(a);
    rows.push_back(row);
  }
  json j;
  j["columns"] = cols;
  j["rows"] = rows;
  return j;
}

json report_json(const sim::EstimateReport& rep) {
  json j;
  j["kind"] = rep.kind;
  j["eps"] = rep.eps;
  j["s"] = rep.s;
  j["k"] = rep.k;
  j["lhs"] = num(rep.lhs);
  j["rhs_total"] = num(rep.rhs_total);
  j["ratio"] = num(rep.ratio);
  json items;
  for (const auto& [key, val] : rep.rhs_items) items[key] = num(val);
  j["rhs_items"] = items;
  j["g_bound_constant"] = num(rep.g_bound_constant);
  json extras;
  for (const auto& [key, val] : rep.extras) extras[key] = num(val);
  j["extras"] = extras;
  json samples = json::array();
  for (const sim::SampleRow& row : rep.samples) {
    json r;
    r["time"] = row.time;
    json vals;
    for (const auto& [key, val] : row.values) vals[key] = num(val);
    r["values"] = vals;
    samples.push_back(r);
  }
  j["samples"] = samples;
  j["notes"] = rep.notes;
  return j;
}

void simulation_checks(const sim::SimulationResult& run, std::vector<Check>& checks) {
  checks.push_back({"mass_conservation_per_step", run.max_mass_step_drift, "<= 1e-12",
                    run.max_mass_step_drift <= 1e-12});
  checks.push_back({"dissipation_nonnegative", run.min_dissipation, ">= 0",
                    run.min_dissipation >= 0.0});
}

// ---------------------------------------------------------------------------
// verify-adn: runs the exact symbolic boundary-condition pipeline.
// ---------------------------------------------------------------------------
int cmd_verify_adn(const std::string& out_path) {
  const adn::AdnPipelineReport rep = adn::run_pipeline();
  json root = make_root("verify-adn");
  root["final_determinant"] = rep.final_determinant;
  json steps = json::array();
  std::vector<Check> checks;
  for (const adn::AdnStep& s : rep.steps) {
    json row;
    row["name"] = s.name;
    row["pass"] = s.pass;
    row["expected"] = s.expected;
    row["computed"] = s.computed;
    row["note"] = s.note;
    steps.push_back(row);
    checks.push_back({s.name, s.pass ? 0.0 : 1.0, "identity holds in the quotient ring", s.pass});
  }
  root["steps"] = steps;
  root["notes"] = rep.notes;
  root["checks"] = checks_json(checks);
  return finish(root, checks, out_path);
}

// ---------------------------------------------------------------------------
// check-moments: Gaussian moment facts, basis orthonormality, projection
// identities, and the two display forms of the test-function fields.
// ---------------------------------------------------------------------------
int cmd_check_moments(int grid_n, const std::string& out_path) {
  if (grid_n < 2 || grid_n > 64) throw std::invalid_argument("grid must lie in [2, 64]");
  const kin::VelocityGrid g = kin::make_velocity_grid(grid_n);
  const double tol = 1e-12;

  struct Row {
    std::string name;
    double value = 0.0;
    double reference = 0.0;
    double defect = 0.0;
  };
  std::vector<Row> rows;

  auto moment = [&](auto&& poly) {
    std::vector<double> f(g.size());
    for (std::size_t p = 0; p < g.size(); ++p) f[p] = poly(g.nodes[p]) * g.mu[p];
    return g.integrate(f);
  };

  {
    Row r{"fact:1", moment([](const std::array<double, 3>&) { return 1.0; }), 1.0, 0.0};
    r.defect = std::abs(r.value - r.reference);
    rows.push_back(r);
  }
  {
    Row r{"fact:|v_i|^2", 0.0, 1.0, 0.0};
    for (int i = 0; i < 3; ++i) {
      const double v = moment([i](const std::array<double, 3>& x) { return x[i] * x[i]; });
      if (i == 0) r.value = v;
      r.defect = std::max(r.defect, std::abs(v - r.reference));
    }
    rows.push_back(r);
  }
  {
    Row r{"fact:|v_i|^4", 0.0, 3.0, 0.0};
    for (int i = 0; i < 3; ++i) {
      const double v =
          moment([i](const std::array<double, 3>& x) { return x[i] * x[i] * x[i] * x[i]; });
      if (i == 0) r.value = v;
      r.defect = std::max(r.defect, std::abs(v - r.reference));
    }
    rows.push_back(r);
  }
  {
    Row r{"fact:|v_i v_j|^2", 0.0, 1.0, 0.0};
    bool first = true;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        if (i == j) continue;
        const double v = moment(
            [i, j](const std::array<double, 3>& x) { return x[i] * x[i] * x[j] * x[j]; });
        if (first) r.value = v, first = false;
        r.defect = std::max(r.defect, std::abs(v - r.reference));
      }
    rows.push_back(r);
  }
  {
    Row r{"fact:|v|^2", moment([](const std::array<double, 3>& x) {
            return x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
          }),
          3.0, 0.0};
    r.defect = std::abs(r.value - r.reference);
    rows.push_back(r);
  }
  {
    Row r{"fact:|v|^4", moment([](const std::array<double, 3>& x) {
            const double s = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            return s * s;
          }),
          15.0, 0.0};
    r.defect = std::abs(r.value - r.reference);
    rows.push_back(r);
  }

  {
    Row r{"chi:orthonormality", 0.0, 0.0, 0.0};
    for (int a = 0; a < 5; ++a)
      for (int b = 0; b < 5; ++b) {
        const double ip = g.inner(g.chi[a], g.chi[b]);
        r.defect = std::max(r.defect, std::abs(ip - (a == b ? 1.0 : 0.0)));
      }
    r.value = r.defect;
    rows.push_back(r);
  }

  {
    // The traceless second-order functions carry no macroscopic content.
    Row r{"projection:burnett_A", 0.0, 0.0, 0.0};
    std::vector<double> f(g.size());
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        for (std::size_t p = 0; p < g.size(); ++p) f[p] = kin::burnett(g.nodes[p]).A[i][j];
        const kin::Projection pr = kin::project_P(g, f);
        double norm2 = pr.a * pr.a + pr.c * pr.c;
        for (int d = 0; d < 3; ++d) norm2 += pr.b[d] * pr.b[d];
        r.defect = std::max(r.defect, std::sqrt(norm2));
      }
    r.value = r.defect;
    rows.push_back(r);
  }

  {
    // Projecting v_i^3 sqrt(mu) returns three times the momentum basis.
    Row r{"projection:v_i^3", 0.0, 0.0, 0.0};
    std::vector<double> f(g.size());
    for (int i = 0; i < 3; ++i) {
      for (std::size_t p = 0; p < g.size(); ++p) {
        const double vi = g.nodes[p][i];
        f[p] = vi * vi * vi * g.sqrt_mu[p];
      }
      const kin::Projection pr = kin::project_P(g, f);
      double norm2 = pr.a * pr.a + pr.c * pr.c;
      for (int d = 0; d < 3; ++d) {
        const double expect = (d == i) ? 3.0 : 0.0;
        norm2 += (pr.b[d] - expect) * (pr.b[d] - expect);
      }
      r.defect = std::max(r.defect, std::sqrt(norm2));
    }
    r.value = r.defect;
    rows.push_back(r);
  }

  {
    // Raw display form versus basis-expansion form of the test functions.
    Row r{"testfn:two_form_agreement", 0.0, 0.0, 0.0};
    kin::EllipticSolutionSamples scalar_sol;
    scalar_sol.scalar.gradient.push_back({0.4, -0.7, 0.2});
    for (kin::TestKind kind : {kin::TestKind::psi_a, kin::TestKind::psi_c}) {
      const kin::TestFunctionField tf = kin::build_test_function(kind, scalar_sol, 1);
      for (std::size_t p = 0; p < g.size(); ++p)
        r.defect = std::max(
            r.defect, std::abs(tf.eval(0, g.nodes[p]) - tf.eval_basis_form(0, g.nodes[p])));
    }
    kin::EllipticSolutionSamples vector_sol;
    vector_sol.vector.jacobian.push_back(
        {{{0.3, -0.2, 0.5}, {0.1, 0.7, -0.4}, {-0.6, 0.2, 0.1}}});
    const kin::TestFunctionField tb =
        kin::build_test_function(kin::TestKind::psi_b, vector_sol, 1);
    for (std::size_t p = 0; p < g.size(); ++p)
      r.defect = std::max(r.defect,
                          std::abs(tb.eval(0, g.nodes[p]) - tb.eval_basis_form(0, g.nodes[p])));
    r.value = r.defect;
    rows.push_back(r);
  }

  json root = make_root("check-moments");
  root["grid"] = grid_n;
  json table = json::array();
  std::vector<Check> checks;
  for (const Row& r : rows) {
    json row;
    row["name"] = r.name;
    row["value"] = num(r.value);
    row["reference"] = r.reference;
    row["defect"] = num(r.defect);
    row["pass"] = r.defect <= tol;
    table.push_back(row);
    checks.push_back({r.name, r.defect, "defect <= 1e-12", r.defect <= tol});
  }
  root["table"] = table;
  root["checks"] = checks_json(checks);
  return finish(root, checks, out_path);
}

// ---------------------------------------------------------------------------
// solve-sym-poisson: one constrained elliptic solve with its certificates.
// ---------------------------------------------------------------------------
int cmd_solve_sym_poisson(const std::string& shape, int refine, std::uint64_t seed,
                          const std::string& out_path) {
  if (refine < 0 || refine > 8) throw std::invalid_argument("refine must lie in [0, 8]");
  const fem::Mesh mesh = fem::gen_mesh(sim::make_shape(shape), refine);
  fem::FemOperators ops(mesh);
  const fem::RigidModeBasis basis = fem::rigid_basis(mesh, ops);
  std::vector<Check> checks;

  // A zero source must produce the zero solution.
  fem::VectorFieldFE zero;
  zero.mesh = &mesh;
  zero.values.assign(mesh.vertices.size(), {0.0, 0.0, 0.0});
  const fem::VectorFieldFE u0 = fem::solve_sym_poisson(mesh, zero, basis);
  const double n0 = std::sqrt(ops.l2_inner(u0.values, u0.values));
  checks.push_back({"zero_source_zero_solution", n0, "<= 1e-14", n0 <= 1e-14});

  // Seeded random source, projected onto the compatible complement and
  // normalized, then solved.
  fem::VectorFieldFE h;
  h.mesh = &mesh;
  h.values.resize(mesh.vertices.size());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (auto& v : h.values)
    for (int d = 0; d < 3; ++d) v[d] = uni(rng);

  // An incompatible source must be rejected when rigid modes exist.
  bool rejected = true;
  if (basis.dim > 0) {
    rejected = false;
    try {
      (void)fem::solve_sym_poisson(mesh, h, basis);
    } catch (const std::invalid_argument&) {
      rejected = true;
    }
    checks.push_back({"incompatible_source_rejected", rejected ? 0.0 : 1.0,
                      "solver refuses a source with rigid content", rejected});
  }

  fem::VectorFieldFE hp = fem::compatibility_project(h, basis);
  const double hn = std::sqrt(ops.l2_inner(hp.values, hp.values));
  if (hn > 0.0)
    for (auto& v : hp.values)
      for (int d = 0; d < 3; ++d) v[d] /= hn;
  const fem::VectorFieldFE u = fem::solve_sym_poisson(mesh, hp, basis);

  // Energy identity: symmetric-gradient energy equals the source work.
  fem::Vec3Field ku, mh;
  ops.apply_sym_stiffness(u.values, ku);
  ops.apply_mass(hp.values, mh);
  double energy = 0.0, work = 0.0;
  for (std::size_t v = 0; v < u.values.size(); ++v)
    for (int d = 0; d < 3; ++d) {
      energy += u.values[v][d] * ku[v][d];
      work += u.values[v][d] * mh[v][d];
    }
  const double energy_defect = std::abs(energy - work) / std::max(energy, 1e-300);
  checks.push_back({"energy_identity_relative", energy_defect, "<= 1e-8",
                    energy_defect <= 1e-8});

  double slip = 0.0;
  for (std::size_t b = 0; b < mesh.boundary_vertices.size(); ++b)
    slip = std::max(slip, std::abs(fem::detail::dot3(u.values[mesh.boundary_vertices[b]],
                                                     mesh.vertex_normals[b])));
  checks.push_back({"slip_constraint", slip, "<= 1e-9", slip <= 1e-9});

  double rigid = 0.0;
  for (const auto& mode : basis.fields)
    rigid = std::max(rigid, std::abs(ops.l2_inner(mode.values, u.values)));
  checks.push_back({"rigid_orthogonality", rigid, "<= 1e-9", rigid <= 1e-9});

  json root = make_root("solve-sym-poisson");
  root["shape"] = shape;
  root["refine"] = refine;
  root["seed"] = seed;
  root["vertices"] = mesh.vertices.size();
  root["cells"] = mesh.tets.size();
  root["rigid_dim"] = basis.dim;
  root["energy"] = num(energy);
  root["work"] = num(work);
  root["checks"] = checks_json(checks);
  return finish(root, checks, out_path);
}

// ---------------------------------------------------------------------------
// korn-constant: smallest symmetric-gradient Rayleigh quotient.
// ---------------------------------------------------------------------------
int cmd_korn_constant(const std::string& shape, int refine, const std::string& out_path) {
  if (refine < 0 || refine > 8) throw std::invalid_argument("refine must lie in [0, 8]");
  const fem::Mesh mesh = fem::gen_mesh(sim::make_shape(shape), refine);
  const fem::RigidModeBasis basis = fem::rigid_basis(mesh);
  const double constant = fem::korn_constant(mesh, basis);
  std::vector<Check> checks;
  checks.push_back({"korn_constant_positive", constant, "> 0", constant > 0.0});

  json root = make_root("korn-constant");
  root["shape"] = shape;
  root["refine"] = refine;
  root["vertices"] = mesh.vertices.size();
  root["cells"] = mesh.tets.size();
  root["rigid_dim"] = basis.dim;
  root["constant"] = num(constant);
  root["checks"] = checks_json(checks);
  return finish(root, checks, out_path);
}

// ---------------------------------------------------------------------------
// simulate: time integration with conservation bookkeeping.
// ---------------------------------------------------------------------------
int cmd_simulate(const sim::RunConfig& cfg, const std::string& out_path,
                 const std::string& trace_path) {
  const fem::Mesh mesh = fem::gen_mesh(sim::make_shape(cfg.shape), cfg.refine);
  const kin::VelocityGrid grid = kin::make_velocity_grid(cfg.grid);
  const fem::RigidModeBasis basis = fem::rigid_basis(mesh);
  const sim::SimulationResult run =
      sim::run_simulation(mesh, grid, basis, cfg, /*keep_snapshots=*/false);

  if (!trace_path.empty()) {
    std::ofstream os(trace_path);
    sim::write_conservation_csv(os, run.trace);
    if (!os) throw std::invalid_argument("cannot write trace file: " + trace_path);
  }

  std::vector<Check> checks;
  simulation_checks(run, checks);

  json root = make_root("simulate");
  root["config"] = config_json(cfg);
  root["mesh"] = {{"vertices", mesh.vertices.size()},
                  {"cells", mesh.tets.size()},
                  {"boundary_faces", mesh.boundary_faces.size()},
                  {"rigid_dim", basis.dim}};
  root["dt_effective"] = run.dt;
  json summary;
  summary["max_mass_step_drift"] = num(run.max_mass_step_drift);
  summary["max_energy_step_drift"] = num(run.max_energy_step_drift);
  summary["max_remap_energy_defect"] = num(run.max_remap_energy_defect);
  summary["total_remap_energy_defect"] = num(run.total_remap_energy_defect);
  summary["min_dissipation"] = num(run.min_dissipation);
  json ang = json::array();
  for (double a : run.max_angular_drift) ang.push_back(num(a));
  summary["max_angular_drift"] = ang;
  root["summary"] = summary;
  root["trace"] = trace_json(run.trace);
  root["checks"] = checks_json(checks);
  return finish(root, checks, out_path);
}

// ---------------------------------------------------------------------------
// estimate-report: run, then evaluate the macroscopic-energy estimates.
// ---------------------------------------------------------------------------
int cmd_estimate_report(const sim::RunConfig& cfg, const std::string& kind, double ratio_cap,
                        double gbound_cap, const std::string& out_path) {
  const fem::Mesh mesh = fem::gen_mesh(sim::make_shape(cfg.shape), cfg.refine);
  const kin::VelocityGrid grid = kin::make_velocity_grid(cfg.grid);
  const fem::RigidModeBasis basis = fem::rigid_basis(mesh);
  const sim::SimulationResult run = sim::run_simulation(mesh, grid, basis, cfg);

  std::vector<Check> checks;
  simulation_checks(run, checks);

  json root = make_root("estimate-report");
  root["config"] = config_json(cfg);
  root["dt_effective"] = run.dt;
  root["snapshots"] = run.snapshots.size();
  root["caps"] = {{"ratio", ratio_cap}, {"g_bound", gbound_cap}};

  if (kind == "l2" || kind == "both") {
    const sim::EstimateReport rep = sim::evaluate_l2_estimate(run, basis);
    root["l2"] = report_json(rep);
    const bool ratio_ok = rep.lhs == 0.0 || (std::isfinite(rep.ratio) && rep.ratio <= ratio_cap);
    checks.push_back({"l2_ratio_within_cap", rep.ratio, "<= ratio cap", ratio_ok});
    checks.push_back({"l2_g_bound_within_cap", rep.g_bound_constant, "<= g-bound cap",
                      rep.g_bound_constant <= gbound_cap});
  }
  if (kind == "l6" || kind == "both") {
    const sim::EstimateReport rep = sim::evaluate_l6_estimate(run, basis);
    root["l6"] = report_json(rep);
    const bool ratio_ok = rep.lhs == 0.0 || (std::isfinite(rep.ratio) && rep.ratio <= ratio_cap);
    checks.push_back({"l6_ratio_within_cap", rep.ratio, "<= ratio cap", ratio_ok});
  }

  root["checks"] = checks_json(checks);
  return finish(root, checks, out_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "macrolab: verification workbench for a kinetic transport solver with "
      "specular reflection, its elliptic auxiliaries, and the exact symbolic "
      "boundary-condition certificate.\n"
      "Set MACROLAB_THREADS to cap internal parallelism."};
  app.require_subcommand(1);

  std::string out_adn, out_mom, out_sym, out_korn, out_sim, out_est, trace_path;
  int mom_grid = 8;
  std::string sym_shape = "ball", korn_shape = "ball";
  int sym_refine = 1, korn_refine = 1;
  std::uint64_t sym_seed = 1;
  std::string est_kind = "both";
  double ratio_cap = 3.0, gbound_cap = 0.05;

  CLI::App* sc_adn = app.add_subcommand(
      "verify-adn", "replay the exact symbolic boundary-condition pipeline");
  sc_adn->add_option("--out", out_adn, "JSON output path (default: stdout)");

  CLI::App* sc_mom = app.add_subcommand(
      "check-moments", "Gaussian moment facts and projection identities on the velocity grid");
  sc_mom->add_option("--out", out_mom, "JSON output path (default: stdout)");
  sc_mom->add_option("--grid", mom_grid, "velocity nodes per axis");

  CLI::App* sc_sym = app.add_subcommand(
      "solve-sym-poisson", "constrained elliptic solve with energy and constraint certificates");
  sc_sym->add_option("--out", out_sym, "JSON output path (default: stdout)");
  sc_sym->add_option("--shape", sym_shape, "domain: ball | spheroid[:a,c] | ellipsoid[:a,b,c]");
  sc_sym->add_option("--refine", sym_refine, "mesh refinement level");
  sc_sym->add_option("--seed", sym_seed, "source field seed");

  CLI::App* sc_korn = app.add_subcommand(
      "korn-constant", "smallest symmetric-gradient Rayleigh quotient of the domain");
  sc_korn->add_option("--out", out_korn, "JSON output path (default: stdout)");
  sc_korn->add_option("--shape", korn_shape, "domain: ball | spheroid[:a,c] | ellipsoid[:a,b,c]");
  sc_korn->add_option("--refine", korn_refine, "mesh refinement level");

  CLI::App* sc_sim = app.add_subcommand(
      "simulate", "integrate the kinetic equation and record conservation traces");
  RunFlags rf_sim;
  attach_run_flags(sc_sim, rf_sim);
  sc_sim->add_option("--out", out_sim, "JSON output path (default: stdout)");
  sc_sim->add_option("--trace", trace_path, "also write the conservation trace as CSV");

  CLI::App* sc_est = app.add_subcommand(
      "estimate-report", "integrate, then evaluate the macroscopic energy estimates");
  RunFlags rf_est;
  attach_run_flags(sc_est, rf_est);
  sc_est->add_option("--out", out_est, "JSON output path (default: stdout)");
  sc_est->add_option("--kind", est_kind, "which estimate: l2 | l6 | both")
      ->check(CLI::IsMember({"l2", "l6", "both"}));
  sc_est->add_option("--ratio-cap", ratio_cap, "calibrated cap on lhs/rhs")
      ->check(CLI::PositiveNumber);
  sc_est->add_option("--gbound-cap", gbound_cap, "calibrated cap on the potential constant")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n"
              << "run 'macrolab --help' for usage\n";
    return 2;
  }

  try {
    if (app.got_subcommand(sc_adn)) return cmd_verify_adn(out_adn);
    if (app.got_subcommand(sc_mom)) return cmd_check_moments(mom_grid, out_mom);
    if (app.got_subcommand(sc_sym))
      return cmd_solve_sym_poisson(sym_shape, sym_refine, sym_seed, out_sym);
    if (app.got_subcommand(sc_korn)) return cmd_korn_constant(korn_shape, korn_refine, out_korn);
    if (app.got_subcommand(sc_sim)) return cmd_simulate(assemble_config(rf_sim), out_sim,
                                                        trace_path);
    if (app.got_subcommand(sc_est))
      return cmd_estimate_report(assemble_config(rf_est), est_kind, ratio_cap, gbound_cap,
                                 out_est);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "error: no subcommand selected\n";
  return 2;
}
