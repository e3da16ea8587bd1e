#pragma once

// Discrete kinetic state on a tetrahedral mesh crossed with a tensor-product
// velocity grid, plus the bookkeeping around it:
//   - cell-major storage of the distribution (one velocity profile per cell),
//   - a face-sharing cell topology for conservative finite-volume sweeps,
//   - seeded initialization presets whose conserved moments (mass, energy,
//     and the angular momenta of every rigid tangential mode) are zeroed
//     exactly by subtraction,
//   - conserved-quantity accounting and a CSV trace writer,
//   - a key-value run-configuration parser for the simulation drivers.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "macrolab/fem/mesh.hpp"
#include "macrolab/fem/solve.hpp"
#include "macrolab/kin/basis.hpp"
#include "macrolab/kin/grid.hpp"

namespace macrolab::sim {

// Dimensionless scaling carried by a run: the small parameter and the two
// exponents weighting transport and relaxation.
struct Scaling {
  double eps = 1.0;
  int s = 0;
  int k = 0;
};

inline void validate_scaling(const Scaling& sc) {
  if (!(sc.eps > 0.0) || !std::isfinite(sc.eps))
    throw std::invalid_argument("scaling: eps must be a positive finite number");
  if (sc.s < 0 || sc.s > 4 || sc.k < 0 || sc.k > 4)
    throw std::invalid_argument("scaling: exponents must lie in [0, 4]");
}

struct KineticState {
  const fem::Mesh* mesh = nullptr;
  const kin::VelocityGrid* grid = nullptr;
  std::vector<double> f;  // cell-major: f[cell * grid->size() + node]
  double time = 0.0;
  Scaling scaling;

  std::size_t n_cells() const { return mesh == nullptr ? 0 : mesh->tets.size(); }
  std::size_t n_nodes() const { return grid == nullptr ? 0 : grid->size(); }
  double* cell_data(std::size_t t) { return f.data() + t * n_nodes(); }
  const double* cell_data(std::size_t t) const { return f.data() + t * n_nodes(); }
};

inline void check_state(const KineticState& st, const char* what) {
  if (st.mesh == nullptr || st.grid == nullptr)
    throw std::invalid_argument(std::string(what) + ": state has no mesh or grid");
  if (st.f.size() != st.n_cells() * st.n_nodes())
    throw std::invalid_argument(std::string(what) + ": state storage size mismatch");
}

// ---------------------------------------------------------------------------
// Face-sharing cell topology.
//
// Interior faces store one shared unit normal plus a per-side sign, so the
// two incident cells always compute exactly opposite normal velocities and
// the pairwise fluxes cancel bitwise in conserved sums.  Boundary faces use
// the analytic outward normal of the surface, which is also the mirror axis
// of the reflection remap.
// ---------------------------------------------------------------------------
struct CellFace {
  double area = 0.0;
  std::array<double, 3> normal{0.0, 0.0, 0.0};  // shared unit normal
  double sign = 1.0;                            // outward normal of this cell = sign * normal
  int neighbor = -1;                            // adjacent cell, or -1 at the boundary
  int bface = -1;                               // boundary-face index when neighbor < 0
};

struct TransportTopology {
  std::vector<double> volume;
  std::vector<std::array<double, 3>> centroid;
  std::vector<std::array<CellFace, 4>> faces;
  double total_volume = 0.0;
};

inline TransportTopology build_transport_topology(const fem::Mesh& mesh) {
  const std::size_t n = mesh.tets.size();
  TransportTopology topo;
  topo.volume.resize(n);
  topo.centroid.resize(n);
  topo.faces.resize(n);

  std::map<std::array<std::size_t, 3>, int> boundary_lookup;
  for (std::size_t b = 0; b < mesh.boundary_faces.size(); ++b) {
    auto key = mesh.boundary_faces[b].v;
    std::sort(key.begin(), key.end());
    boundary_lookup.emplace(key, static_cast<int>(b));
  }

  long double vol_acc = 0.0L;
  std::map<std::array<std::size_t, 3>, std::pair<int, int>> pending;  // sorted verts -> (cell, local)
  for (std::size_t t = 0; t < n; ++t) {
    const auto& tet = mesh.tets[t];
    const auto& p0 = mesh.vertices[tet[0]];
    const auto& p1 = mesh.vertices[tet[1]];
    const auto& p2 = mesh.vertices[tet[2]];
    const auto& p3 = mesh.vertices[tet[3]];
    topo.volume[t] = fem::detail::tet_volume(p0, p1, p2, p3);
    vol_acc += topo.volume[t];
    for (int d = 0; d < 3; ++d)
      topo.centroid[t][d] = 0.25 * (p0[d] + p1[d] + p2[d] + p3[d]);

    for (int l = 0; l < 4; ++l) {
      const std::array<std::size_t, 3> verts{tet[(l + 1) % 4], tet[(l + 2) % 4], tet[(l + 3) % 4]};
      const auto& q0 = mesh.vertices[verts[0]];
      const auto& q1 = mesh.vertices[verts[1]];
      const auto& q2 = mesh.vertices[verts[2]];
      CellFace& cf = topo.faces[t][l];
      cf.area = fem::detail::face_area(q0, q1, q2);

      // Geometric unit normal of the face plane, oriented away from the
      // opposite vertex of this cell.
      const std::array<double, 3> e1{q1[0] - q0[0], q1[1] - q0[1], q1[2] - q0[2]};
      const std::array<double, 3> e2{q2[0] - q0[0], q2[1] - q0[1], q2[2] - q0[2]};
      std::array<double, 3> geo = fem::detail::cross3(e1, e2);
      const double len = fem::detail::norm3(geo);
      if (!(len > 0.0)) throw std::invalid_argument("transport topology: degenerate face");
      for (double& c : geo) c /= len;
      const auto& apex = mesh.vertices[tet[l]];
      const std::array<double, 3> to_face{q0[0] - apex[0], q0[1] - apex[1], q0[2] - apex[2]};
      if (fem::detail::dot3(geo, to_face) < 0.0)
        for (double& c : geo) c = -c;

      std::array<std::size_t, 3> key = verts;
      std::sort(key.begin(), key.end());
      const auto bit = boundary_lookup.find(key);
      if (bit != boundary_lookup.end()) {
        cf.normal = mesh.boundary_faces[bit->second].normal;
        cf.sign = 1.0;
        cf.neighbor = -1;
        cf.bface = bit->second;
        if (fem::detail::dot3(cf.normal, geo) <= 0.0)
          throw std::runtime_error("transport topology: boundary normal points inward");
        continue;
      }
      const auto pit = pending.find(key);
      if (pit == pending.end()) {
        cf.normal = geo;
        cf.sign = 1.0;
        pending.emplace(key, std::make_pair(static_cast<int>(t), l));
      } else {
        const auto [other_cell, other_local] = pit->second;
        CellFace& of = topo.faces[other_cell][other_local];
        cf.normal = of.normal;  // share one normal and area so paired
        cf.area = of.area;      // fluxes cancel bitwise
        cf.sign = -1.0;
        cf.neighbor = other_cell;
        of.neighbor = static_cast<int>(t);
        pending.erase(pit);
      }
    }
  }
  if (!pending.empty())
    throw std::runtime_error("transport topology: unmatched interior face");
  topo.total_volume = static_cast<double>(vol_acc);
  return topo;
}

// ---------------------------------------------------------------------------
// Cellwise moments against the orthonormal collision-invariant basis.
// ---------------------------------------------------------------------------
struct CellMoments {
  std::vector<double> a;
  std::vector<std::array<double, 3>> b;
  std::vector<double> c;
};

inline CellMoments cell_moments(const KineticState& st) {
  check_state(st, "cell_moments");
  const kin::VelocityGrid& g = *st.grid;
  const std::size_t nc = st.n_cells();
  const std::size_t nn = st.n_nodes();
  CellMoments mom;
  mom.a.resize(nc);
  mom.b.resize(nc);
  mom.c.resize(nc);
  for (std::size_t t = 0; t < nc; ++t) {
    const double* f = st.cell_data(t);
    long double acc[5] = {0.0L, 0.0L, 0.0L, 0.0L, 0.0L};
    for (std::size_t p = 0; p < nn; ++p) {
      const long double wf = static_cast<long double>(g.weights[p]) * f[p];
      acc[0] += wf * g.chi[0][p];
      acc[1] += wf * g.chi[1][p];
      acc[2] += wf * g.chi[2][p];
      acc[3] += wf * g.chi[3][p];
      acc[4] += wf * g.chi[4][p];
    }
    mom.a[t] = static_cast<double>(acc[0]);
    for (int d = 0; d < 3; ++d) mom.b[t][d] = static_cast<double>(acc[1 + d]);
    mom.c[t] = static_cast<double>(acc[4]);
  }
  return mom;
}

// Rigid tangential modes sampled at cell centroids; the modes are affine in
// space, so the centroid value (mean of the four vertex values) is exact.
inline std::vector<std::vector<std::array<double, 3>>> modes_at_centroids(
    const fem::Mesh& mesh, const fem::RigidModeBasis& basis) {
  std::vector<std::vector<std::array<double, 3>>> out(basis.fields.size());
  for (std::size_t m = 0; m < basis.fields.size(); ++m) {
    const auto& vals = basis.fields[m].values;
    out[m].resize(mesh.tets.size());
    for (std::size_t t = 0; t < mesh.tets.size(); ++t) {
      const auto& tet = mesh.tets[t];
      for (int d = 0; d < 3; ++d)
        out[m][t][d] = 0.25 * (vals[tet[0]][d] + vals[tet[1]][d] + vals[tet[2]][d] +
                               vals[tet[3]][d]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Conserved quantities and the per-run trace.
// ---------------------------------------------------------------------------
struct ConservedQuantities {
  double mass = 0.0;
  double energy = 0.0;
  std::vector<double> angular;  // one entry per rigid tangential mode
};

inline ConservedQuantities conserved(const KineticState& st, const TransportTopology& topo,
                                     const std::vector<std::vector<std::array<double, 3>>>&
                                         centroid_modes) {
  check_state(st, "conserved");
  const CellMoments mom = cell_moments(st);
  ConservedQuantities out;
  long double mass = 0.0L, energy = 0.0L;
  for (std::size_t t = 0; t < st.n_cells(); ++t) {
    mass += static_cast<long double>(topo.volume[t]) * mom.a[t];
    energy += static_cast<long double>(topo.volume[t]) * mom.c[t];
  }
  out.mass = static_cast<double>(mass);
  out.energy = static_cast<double>(energy);
  out.angular.resize(centroid_modes.size());
  for (std::size_t m = 0; m < centroid_modes.size(); ++m) {
    long double ang = 0.0L;
    for (std::size_t t = 0; t < st.n_cells(); ++t)
      ang += static_cast<long double>(topo.volume[t]) *
             fem::detail::dot3(centroid_modes[m][t], mom.b[t]);
    out.angular[m] = static_cast<double>(ang);
  }
  return out;
}

inline ConservedQuantities conserved(const KineticState& st, const fem::RigidModeBasis& basis) {
  check_state(st, "conserved");
  const TransportTopology topo = build_transport_topology(*st.mesh);
  return conserved(st, topo, modes_at_centroids(*st.mesh, basis));
}

inline ConservedQuantities conserved(const KineticState& st) {
  check_state(st, "conserved");
  return conserved(st, fem::rigid_basis(*st.mesh));
}

struct ConservationTrace {
  int angular_dim = 0;
  std::vector<double> times;
  std::vector<ConservedQuantities> rows;
};

inline void append_row(ConservationTrace& trace, double time, ConservedQuantities row) {
  if (static_cast<int>(row.angular.size()) != trace.angular_dim)
    throw std::invalid_argument("conservation trace: angular column count mismatch");
  if (!trace.times.empty() && !(time >= trace.times.back()))
    throw std::invalid_argument("conservation trace: rows must advance in time");
  trace.times.push_back(time);
  trace.rows.push_back(std::move(row));
}

namespace detail {

inline std::string full_precision(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

inline void write_conservation_csv(std::ostream& os, const ConservationTrace& trace) {
  os << "time,mass,energy";
  for (int m = 0; m < trace.angular_dim; ++m) os << ",angular_momentum_" << (m + 1);
  os << "\n";
  for (std::size_t r = 0; r < trace.rows.size(); ++r) {
    os << detail::full_precision(trace.times[r]) << ','
       << detail::full_precision(trace.rows[r].mass) << ','
       << detail::full_precision(trace.rows[r].energy);
    for (double ang : trace.rows[r].angular) os << ',' << detail::full_precision(ang);
    os << "\n";
  }
}

// ---------------------------------------------------------------------------
// Initialization presets.
// ---------------------------------------------------------------------------
enum class InitPreset { random_microscopic, random_full, moment_bump };

inline InitPreset parse_init_preset(const std::string& name) {
  if (name == "random_microscopic") return InitPreset::random_microscopic;
  if (name == "random_full") return InitPreset::random_full;
  if (name == "moment_bump") return InitPreset::moment_bump;
  throw std::invalid_argument("unknown initialization preset: " + name);
}

inline const char* preset_name(InitPreset p) {
  switch (p) {
    case InitPreset::random_microscopic: return "random_microscopic";
    case InitPreset::random_full: return "random_full";
    default: return "moment_bump";
  }
}

namespace detail {

// Velocity monomials of degree <= 2 times the background square root,
// sampled on the grid; the random presets draw one coefficient per monomial
// per cell.
inline std::vector<std::vector<double>> velocity_monomials(const kin::VelocityGrid& g) {
  std::vector<std::vector<double>> mono(10, std::vector<double>(g.size()));
  for (std::size_t p = 0; p < g.size(); ++p) {
    const auto& v = g.nodes[p];
    const double sm = g.sqrt_mu[p];
    mono[0][p] = sm;
    mono[1][p] = v[0] * sm;
    mono[2][p] = v[1] * sm;
    mono[3][p] = v[2] * sm;
    mono[4][p] = v[0] * v[0] * sm;
    mono[5][p] = v[1] * v[1] * sm;
    mono[6][p] = v[2] * v[2] * sm;
    mono[7][p] = v[0] * v[1] * sm;
    mono[8][p] = v[0] * v[2] * sm;
    mono[9][p] = v[1] * v[2] * sm;
  }
  return mono;
}

// Removes the collision-invariant component of one cell profile in place.
inline void remove_macroscopic(const kin::VelocityGrid& g, double* f) {
  long double acc[5] = {0.0L, 0.0L, 0.0L, 0.0L, 0.0L};
  for (std::size_t p = 0; p < g.size(); ++p) {
    const long double wf = static_cast<long double>(g.weights[p]) * f[p];
    for (int m = 0; m < 5; ++m) acc[m] += wf * g.chi[m][p];
  }
  for (std::size_t p = 0; p < g.size(); ++p)
    for (int m = 0; m < 5; ++m) f[p] -= static_cast<double>(acc[m]) * g.chi[m][p];
}

}  // namespace detail

// Builds a seeded state whose total mass, total energy, and angular momentum
// about every rigid tangential mode are zeroed exactly by subtracting the
// matching collision-invariant components (a global constant for mass and
// energy, a per-cell affine momentum correction for the rigid modes).
inline KineticState init_state(const fem::Mesh& mesh, const kin::VelocityGrid& grid,
                               std::uint64_t seed, InitPreset preset, Scaling scaling = {},
                               const fem::RigidModeBasis* basis = nullptr) {
  validate_scaling(scaling);
  KineticState st;
  st.mesh = &mesh;
  st.grid = &grid;
  st.scaling = scaling;
  st.time = 0.0;
  const std::size_t nc = mesh.tets.size();
  const std::size_t nn = grid.size();
  st.f.assign(nc * nn, 0.0);

  const TransportTopology topo = build_transport_topology(mesh);

  if (preset == InitPreset::moment_bump) {
    double rmax = 0.0;
    for (const auto& c : topo.centroid) rmax = std::max(rmax, fem::detail::norm3(c));
    for (std::size_t t = 0; t < nc; ++t) {
      const auto& x = topo.centroid[t];
      const double u2 = fem::detail::dot3(x, x) / (rmax * rmax);
      const double bump = (1.0 - u2) * (1.0 - u2);
      const double a = bump;
      const std::array<double, 3> b{bump * x[1], bump * x[2], bump * x[0]};
      const double c = bump * (0.5 - u2);
      double* f = st.cell_data(t);
      for (std::size_t p = 0; p < nn; ++p)
        f[p] = a * grid.chi[0][p] + b[0] * grid.chi[1][p] + b[1] * grid.chi[2][p] +
               b[2] * grid.chi[3][p] + c * grid.chi[4][p];
    }
  } else {
    const auto mono = detail::velocity_monomials(grid);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t t = 0; t < nc; ++t) {
      std::array<double, 10> coeff;
      for (double& c : coeff) c = gauss(rng);
      double* f = st.cell_data(t);
      for (std::size_t p = 0; p < nn; ++p) {
        double s = 0.0;
        for (int m = 0; m < 10; ++m) s += coeff[m] * mono[m][p];
        f[p] = s;
      }
      if (preset == InitPreset::random_microscopic) detail::remove_macroscopic(grid, f);
    }
  }

  // Zero the conserved moments.  Mass and energy subtract global constants;
  // each rigid tangential mode subtracts an affine momentum field whose
  // coefficients solve the (at most 3x3) centroid-quadrature Gram system, so
  // the same quadrature that measures the momenta sees exact zeros.
  const CellMoments mom = cell_moments(st);
  long double mass = 0.0L, energy = 0.0L;
  for (std::size_t t = 0; t < nc; ++t) {
    mass += static_cast<long double>(topo.volume[t]) * mom.a[t];
    energy += static_cast<long double>(topo.volume[t]) * mom.c[t];
  }
  const double a_shift = static_cast<double>(mass) / topo.total_volume;
  const double c_shift = static_cast<double>(energy) / topo.total_volume;
  for (std::size_t t = 0; t < nc; ++t) {
    double* f = st.cell_data(t);
    for (std::size_t p = 0; p < nn; ++p)
      f[p] -= a_shift * grid.chi[0][p] + c_shift * grid.chi[4][p];
  }

  fem::RigidModeBasis local_basis;
  const fem::RigidModeBasis& rb = basis != nullptr ? *basis : (local_basis = fem::rigid_basis(mesh));
  if (rb.dim > 0) {
    const auto modes = modes_at_centroids(mesh, rb);
    const int d = rb.dim;
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd mom_vec = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < d; ++i) {
      long double li = 0.0L;
      for (std::size_t t = 0; t < nc; ++t)
        li += static_cast<long double>(topo.volume[t]) *
              fem::detail::dot3(modes[i][t], mom.b[t]);
      mom_vec(i) = static_cast<double>(li);
      for (int j = i; j < d; ++j) {
        long double gij = 0.0L;
        for (std::size_t t = 0; t < nc; ++t)
          gij += static_cast<long double>(topo.volume[t]) *
                 fem::detail::dot3(modes[i][t], modes[j][t]);
        gram(i, j) = gram(j, i) = static_cast<double>(gij);
      }
    }
    const Eigen::VectorXd gamma = gram.ldlt().solve(mom_vec);
    for (std::size_t t = 0; t < nc; ++t) {
      std::array<double, 3> shift{0.0, 0.0, 0.0};
      for (int i = 0; i < d; ++i)
        for (int dd = 0; dd < 3; ++dd) shift[dd] += gamma(i) * modes[i][t][dd];
      double* f = st.cell_data(t);
      for (std::size_t p = 0; p < nn; ++p)
        f[p] -= shift[0] * grid.chi[1][p] + shift[1] * grid.chi[2][p] +
                shift[2] * grid.chi[3][p];
    }
  }

  for (double x : st.f)
    if (!std::isfinite(x)) throw std::runtime_error("init_state: non-finite entry generated");
  return st;
}

// ---------------------------------------------------------------------------
// Run configuration: a flat key-value text format with '#' comments.
// ---------------------------------------------------------------------------
struct RunConfig {
  std::string shape = "ball";
  int refine = 1;
  int grid = 8;
  double eps = 1.0;
  int s = 0;
  int k = 0;
  std::string preset = "random_full";
  std::uint64_t seed = 1;
  int cadence = 1;
  int steps = 0;
  double dt = 0.0;  // 0 = derive from the stability bound
  std::string forcing = "zero";
};

inline fem::Shape make_shape(const std::string& desc) {
  if (desc == "ball") return fem::Shape::ball();
  // Bare names pick the workbench's canonical axes.
  if (desc == "spheroid") return fem::Shape::spheroid(1.0, 1.5);
  if (desc == "ellipsoid") return fem::Shape::ellipsoid(1.0, 0.8, 0.6);
  const auto colon = desc.find(':');
  const std::string head = desc.substr(0, colon);
  std::vector<double> axes;
  if (colon != std::string::npos) {
    std::istringstream ss(desc.substr(colon + 1));
    std::string part;
    while (std::getline(ss, part, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(part, &used);
        if (used != part.size()) throw std::invalid_argument(part);
        axes.push_back(v);
      } catch (const std::exception&) {
        throw std::invalid_argument("unrecognized domain shape: " + desc);
      }
    }
  }
  if (head == "spheroid" && axes.size() == 2) return fem::Shape::spheroid(axes[0], axes[1]);
  if (head == "ellipsoid" && axes.size() == 3)
    return fem::Shape::ellipsoid(axes[0], axes[1], axes[2]);
  throw std::invalid_argument("unrecognized domain shape: " + desc);
}

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline long long parse_integer(const std::string& key, const std::string& value, long long lo,
                               long long hi) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    if (v < lo || v > hi)
      throw std::out_of_range(key + " must lie in [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "]");
    return v;
  } catch (const std::out_of_range& e) {
    throw std::invalid_argument("configuration key '" + key + "': " + e.what());
  } catch (const std::exception&) {
    throw std::invalid_argument("configuration key '" + key + "' has a malformed value: " +
                                value);
  }
}

inline double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size() || !std::isfinite(v)) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("configuration key '" + key + "' has a malformed value: " +
                                value);
  }
}

}  // namespace detail

inline RunConfig parse_run_config(std::istream& in) {
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("configuration line " + std::to_string(lineno) +
                                  " is not of the form key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("configuration line " + std::to_string(lineno) +
                                  " has an empty key or value");
    if (key == "shape") {
      make_shape(value);  // validate eagerly
      cfg.shape = value;
    } else if (key == "refine") {
      cfg.refine = static_cast<int>(detail::parse_integer(key, value, 0, 8));
    } else if (key == "grid") {
      cfg.grid = static_cast<int>(detail::parse_integer(key, value, 2, 64));
    } else if (key == "eps") {
      cfg.eps = detail::parse_real(key, value);
      if (!(cfg.eps > 0.0)) throw std::invalid_argument("configuration key 'eps' must be positive");
    } else if (key == "s") {
      cfg.s = static_cast<int>(detail::parse_integer(key, value, 0, 4));
    } else if (key == "k") {
      cfg.k = static_cast<int>(detail::parse_integer(key, value, 0, 4));
    } else if (key == "preset") {
      parse_init_preset(value);  // validate eagerly
      cfg.preset = value;
    } else if (key == "seed") {
      if (!value.empty() && value[0] == '-')
        throw std::invalid_argument("configuration key 'seed' must be nonnegative");
      try {
        std::size_t used = 0;
        cfg.seed = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
      } catch (const std::exception&) {
        throw std::invalid_argument("configuration key 'seed' has a malformed value: " + value);
      }
    } else if (key == "cadence") {
      cfg.cadence = static_cast<int>(detail::parse_integer(key, value, 1, 1000000));
    } else if (key == "steps") {
      cfg.steps = static_cast<int>(detail::parse_integer(key, value, 0, 100000000));
    } else if (key == "dt") {
      cfg.dt = detail::parse_real(key, value);
      if (cfg.dt < 0.0) throw std::invalid_argument("configuration key 'dt' must be nonnegative");
    } else if (key == "forcing") {
      if (value != "zero" && value != "microscopic_noise" && value != "periodic_microscopic")
        throw std::invalid_argument("unknown forcing preset: " + value);
      cfg.forcing = value;
    } else {
      throw std::invalid_argument("unknown configuration key: " + key);
    }
  }
  return cfg;
}

inline RunConfig parse_run_config_text(const std::string& text) {
  std::istringstream ss(text);
  return parse_run_config(ss);
}

}  // namespace macrolab::sim
