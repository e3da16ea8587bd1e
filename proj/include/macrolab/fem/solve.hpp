#pragma once

// Solvers on top of the P1 operators: rigid-mode detection and removal,
// compatibility projection, the symmetric-gradient Poisson system with slip
// walls, the scalar Neumann Poisson problem, discrete Korn and Poincare
// constants by inverse iteration, and a residual report for solved fields.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "macrolab/fem/assemble.hpp"
#include "macrolab/fem/mesh.hpp"

namespace macrolab::fem {

struct VectorFieldFE {
  const Mesh* mesh = nullptr;
  Vec3Field values;
};

struct ScalarFieldFE {
  const Mesh* mesh = nullptr;
  std::vector<double> values;
};

// L2-orthonormal basis of mesh-tangent rigid rotation fields Mx (M
// antisymmetric, Mx . n = 0 on the boundary within the detection threshold).
struct RigidModeBasis {
  int dim = 0;
  std::vector<VectorFieldFE> fields;
};

namespace detail {

inline void check_field(const Mesh& mesh, const VectorFieldFE& f, const char* what) {
  if (f.mesh != &mesh || f.values.size() != mesh.vertices.size())
    throw std::invalid_argument(std::string(what) + ": field does not belong to this mesh");
}

inline void project_slip(const Mesh& mesh, Vec3Field& u) {
  for (std::size_t b = 0; b < mesh.boundary_vertices.size(); ++b) {
    auto& val = u[mesh.boundary_vertices[b]];
    const auto& n = mesh.vertex_normals[b];
    const double d = dot3(val, n);
    for (int k = 0; k < 3; ++k) val[k] -= d * n[k];
  }
}

// Removes the L2 components along the rigid basis fields.
inline void deflate_rigid(const FemOperators& ops, const RigidModeBasis& basis, Vec3Field& u) {
  for (const auto& mode : basis.fields) {
    const double num = ops.l2_inner(mode.values, u);
    const double den = ops.l2_inner(mode.values, mode.values);
    const double c = num / den;
    for (std::size_t v = 0; v < u.size(); ++v)
      for (int k = 0; k < 3; ++k) u[v][k] -= c * mode.values[v][k];
  }
}

inline double dot_flat(const Vec3Field& a, const Vec3Field& b) {
  long double acc = 0.0L;
  for (std::size_t v = 0; v < a.size(); ++v)
    for (int k = 0; k < 3; ++k) acc += static_cast<long double>(a[v][k]) * b[v][k];
  return static_cast<double>(acc);
}

inline double dot_flat_scalar(const std::vector<double>& a, const std::vector<double>& b) {
  long double acc = 0.0L;
  for (std::size_t v = 0; v < a.size(); ++v) acc += static_cast<long double>(a[v]) * b[v];
  return static_cast<double>(acc);
}

struct PcgOutcome {
  int iterations = 0;
  double rel_residual = 0.0;
};

// Preconditioned conjugate gradients restricted to a projected subspace.
// apply_a and project mutate their output argument in place; diag is the
// Jacobi preconditioner.  With warm=false the initial guess is zero.
template <typename ApplyA, typename Project>
inline PcgOutcome pcg_vec(ApplyA&& apply_a, Project&& project, const Vec3Field& diag,
                          const Vec3Field& b, Vec3Field& x, double tol, int maxit, bool warm) {
  const std::size_t n = b.size();
  Vec3Field r = b, q(n), z(n), p(n);
  if (warm && x.size() == n) {
    apply_a(x, q);
    for (std::size_t v = 0; v < n; ++v)
      for (int k = 0; k < 3; ++k) r[v][k] = b[v][k] - q[v][k];
  } else {
    x.assign(n, {0.0, 0.0, 0.0});
  }
  project(r);
  Vec3Field pb = b;
  project(pb);
  const double bnorm = std::sqrt(dot_flat(pb, pb));
  if (bnorm == 0.0) {
    x.assign(n, {0.0, 0.0, 0.0});
    return {0, 0.0};
  }
  auto precondition = [&](const Vec3Field& in, Vec3Field& out) {
    out.resize(n);
    for (std::size_t v = 0; v < n; ++v)
      for (int k = 0; k < 3; ++k) out[v][k] = in[v][k] / diag[v][k];
    project(out);
  };
  precondition(r, z);
  p = z;
  double rz = dot_flat(r, z);
  double rel = std::sqrt(dot_flat(r, r)) / bnorm;
  double rel_best = rel;
  int it = 0, last_progress = 0;
  while (rel > tol && it < maxit) {
    apply_a(p, q);
    project(q);
    const double pq = dot_flat(p, q);
    if (!(pq > 0.0)) throw std::runtime_error("conjugate gradient breakdown: non-positive curvature");
    const double alpha = rz / pq;
    for (std::size_t v = 0; v < n; ++v)
      for (int k = 0; k < 3; ++k) {
        x[v][k] += alpha * p[v][k];
        r[v][k] -= alpha * q[v][k];
      }
    ++it;
    if (it % 64 == 0) {  // recompute the residual to curb drift
      apply_a(x, q);
      for (std::size_t v = 0; v < n; ++v)
        for (int k = 0; k < 3; ++k) r[v][k] = b[v][k] - q[v][k];
      project(r);
    }
    rel = std::sqrt(dot_flat(r, r)) / bnorm;
    if (rel < 0.99 * rel_best) {
      rel_best = rel;
      last_progress = it;
    } else if (it - last_progress > 300) {
      break;  // rounding floor reached; caller checks the final residual
    }
    precondition(r, z);
    const double rz_new = dot_flat(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t v = 0; v < n; ++v)
      for (int k = 0; k < 3; ++k) p[v][k] = z[v][k] + beta * p[v][k];
  }
  project(x);
  return {it, rel};
}

template <typename ApplyA, typename Project>
inline PcgOutcome pcg_scalar(ApplyA&& apply_a, Project&& project, const std::vector<double>& diag,
                             const std::vector<double>& b, std::vector<double>& x, double tol,
                             int maxit) {
  const std::size_t n = b.size();
  x.assign(n, 0.0);
  std::vector<double> r = b, q(n), z(n), p(n);
  project(r);
  const double bnorm = std::sqrt(dot_flat_scalar(r, r));
  if (bnorm == 0.0) return {0, 0.0};
  auto precondition = [&](const std::vector<double>& in, std::vector<double>& out) {
    out.resize(n);
    for (std::size_t v = 0; v < n; ++v) out[v] = in[v] / diag[v];
    project(out);
  };
  precondition(r, z);
  p = z;
  double rz = dot_flat_scalar(r, z);
  double rel = 1.0;
  double rel_best = rel;
  int it = 0, last_progress = 0;
  while (rel > tol && it < maxit) {
    apply_a(p, q);
    project(q);
    const double pq = dot_flat_scalar(p, q);
    if (!(pq > 0.0)) throw std::runtime_error("conjugate gradient breakdown: non-positive curvature");
    const double alpha = rz / pq;
    for (std::size_t v = 0; v < n; ++v) {
      x[v] += alpha * p[v];
      r[v] -= alpha * q[v];
    }
    ++it;
    if (it % 64 == 0) {
      apply_a(x, q);
      for (std::size_t v = 0; v < n; ++v) r[v] = b[v] - q[v];
      project(r);
    }
    rel = std::sqrt(dot_flat_scalar(r, r)) / bnorm;
    if (rel < 0.99 * rel_best) {
      rel_best = rel;
      last_progress = it;
    } else if (it - last_progress > 300) {
      break;
    }
    precondition(r, z);
    const double rz_new = dot_flat_scalar(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t v = 0; v < n; ++v) p[v] = z[v] + beta * p[v];
  }
  project(x);
  return {it, rel};
}

// Deterministic start field for the inverse iterations.  Built only from
// rotation-equivariant mesh data (positions and their boundary fourth
// moments), so running the same algorithm on a rigidly rotated mesh produces
// the rotated iterates exactly, up to roundoff.
inline Vec3Field equivariant_start(const Mesh& mesh) {
  const std::size_t n = mesh.vertices.size();
  Vec3Field s(n);
  for (std::size_t v = 0; v < n; ++v) {
    const auto& x = mesh.vertices[v];
    const double r2 = dot3(x, x);
    for (int k = 0; k < 3; ++k) s[v][k] = x[k] * (1.0 + r2 / 7.0);
  }
  // Fourth-moment tensor of the boundary vertices; its anisotropic part
  // seeds the components even under point reflection.
  double C[3][3][3][3] = {};
  for (std::size_t b = 0; b < mesh.boundary_vertices.size(); ++b) {
    const auto& x = mesh.vertices[mesh.boundary_vertices[b]];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) C[i][j][k][l] += x[i] * x[j] * x[k] * x[l];
  }
  Vec3Field u4(n);
  double norm_s = 0.0, norm_u = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    const auto& x = mesh.vertices[v];
    std::array<double, 3> w{0, 0, 0};
    for (int b = 0; b < 3; ++b) {
      double acc = 0.0;
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) acc += C[b][j][k][l] * x[j] * x[k] * x[l];
      w[b] = acc;
    }
    u4[v] = cross3(x, w);
    norm_s += dot3(s[v], s[v]);
    norm_u += dot3(u4[v], u4[v]);
  }
  if (norm_u > 1e-24 * norm_s) {
    const double scale = std::sqrt(norm_s / norm_u);
    for (std::size_t v = 0; v < n; ++v)
      for (int k = 0; k < 3; ++k) s[v][k] += scale * u4[v][k];
  }
  return s;
}

// Smallest eigenvalue of the pencil (A, B) on the projected subspace by
// inverse iteration with a fixed number of outer steps.
template <typename ApplyA, typename ApplyB, typename Project>
inline double smallest_pencil_eigenvalue(ApplyA&& apply_a, ApplyB&& apply_b, Project&& project,
                                         const Vec3Field& diag_a, Vec3Field x, int outer_steps) {
  const std::size_t n = x.size();
  project(x);
  Vec3Field bx(n), y(n), ax(n);
  apply_b(x, bx);
  double nb = std::sqrt(std::max(dot_flat(x, bx), 0.0));
  if (!(nb > 0.0)) throw std::runtime_error("inverse iteration: start vector is degenerate");
  for (std::size_t v = 0; v < n; ++v)
    for (int k = 0; k < 3; ++k) x[v][k] /= nb;

  bool warm = false;
  for (int step = 0; step < outer_steps; ++step) {
    apply_b(x, bx);
    project(bx);
    const PcgOutcome out =
        pcg_vec(apply_a, project, diag_a, bx, y, 1e-12, 20000, warm);
    if (out.rel_residual > 1e-10)
      throw std::runtime_error("inverse iteration: inner solve did not converge");
    warm = true;
    apply_b(y, bx);
    nb = std::sqrt(std::max(dot_flat(y, bx), 0.0));
    if (!(nb > 0.0)) throw std::runtime_error("inverse iteration: iterate collapsed");
    for (std::size_t v = 0; v < n; ++v)
      for (int k = 0; k < 3; ++k) x[v][k] = y[v][k] / nb;
  }
  apply_a(x, ax);
  apply_b(x, bx);
  return dot_flat(x, ax) / dot_flat(x, bx);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Rigid-mode basis: minimize the boundary normal-component energy over the
// three-dimensional space of rotation fields e_k x x via a 3x3 generalized
// eigenproblem; modes below the detection threshold form the basis.
// ---------------------------------------------------------------------------
inline RigidModeBasis rigid_basis(const Mesh& mesh, const FemOperators& ops) {
  const std::size_t n = mesh.vertices.size();
  std::array<Vec3Field, 3> w;
  for (int k = 0; k < 3; ++k) w[k].resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    const auto& x = mesh.vertices[v];
    w[0][v] = {0.0, -x[2], x[1]};
    w[1][v] = {x[2], 0.0, -x[0]};
    w[2][v] = {-x[1], x[0], 0.0};
  }

  // Boundary vertex area weights (one third of the incident face areas).
  std::vector<double> area(mesh.boundary_vertices.size(), 0.0);
  for (const auto& f : mesh.boundary_faces) {
    const double a = detail::face_area(mesh.vertices[f.v[0]], mesh.vertices[f.v[1]],
                                       mesh.vertices[f.v[2]]) /
                     3.0;
    for (std::size_t corner : f.v) area[mesh.boundary_index[corner]] += a;
  }

  Eigen::Matrix3d E = Eigen::Matrix3d::Zero(), G = Eigen::Matrix3d::Zero();
  for (std::size_t b = 0; b < mesh.boundary_vertices.size(); ++b) {
    const std::size_t v = mesh.boundary_vertices[b];
    const auto& nrm = mesh.vertex_normals[b];
    std::array<double, 3> comp{};
    for (int k = 0; k < 3; ++k) comp[k] = detail::dot3(w[k][v], nrm);
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) E(k, l) += area[b] * comp[k] * comp[l];
  }
  for (int k = 0; k < 3; ++k)
    for (int l = k; l < 3; ++l) {
      G(k, l) = ops.l2_inner(w[k], w[l]);
      G(l, k) = G(k, l);
    }

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix3d> es(E, G);
  if (es.info() != Eigen::Success) throw std::runtime_error("rigid_basis: eigensolve failed");

  RigidModeBasis basis;
  for (int m = 0; m < 3; ++m) {
    const double ratio = std::sqrt(std::max(es.eigenvalues()(m), 0.0));
    if (ratio >= 1e-6) continue;  // detection threshold (relative: ||R||_L2 = 1)
    VectorFieldFE mode;
    mode.mesh = &mesh;
    mode.values.assign(n, {0.0, 0.0, 0.0});
    for (int k = 0; k < 3; ++k) {
      const double c = es.eigenvectors()(k, m);
      for (std::size_t v = 0; v < n; ++v)
        for (int d = 0; d < 3; ++d) mode.values[v][d] += c * w[k][v][d];
    }
    basis.fields.push_back(std::move(mode));
  }
  basis.dim = static_cast<int>(basis.fields.size());
  return basis;
}

inline RigidModeBasis rigid_basis(const Mesh& mesh) {
  FemOperators ops(mesh);
  return rigid_basis(mesh, ops);
}

// ---------------------------------------------------------------------------
// Compatibility projection: subtract the rigid components of the source so
// the slip problem's solvability condition holds.
// ---------------------------------------------------------------------------
inline VectorFieldFE compatibility_project(const VectorFieldFE& h, const RigidModeBasis& basis) {
  if (h.mesh == nullptr) throw std::invalid_argument("compatibility_project: null mesh");
  VectorFieldFE out = h;
  if (basis.dim == 0) return out;
  FemOperators ops(*h.mesh);
  for (const auto& mode : basis.fields) {
    detail::check_field(*h.mesh, mode, "compatibility_project");
    const double B = ops.l2_inner(mode.values, h.values);
    const double M = ops.l2_inner(mode.values, mode.values);
    const double c = B / M;
    for (std::size_t v = 0; v < out.values.size(); ++v)
      for (int k = 0; k < 3; ++k) out.values[v][k] -= c * mode.values[v][k];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Symmetric-gradient Poisson solve with slip walls and natural
// tangential-traction condition, over the rigid-mode-free subspace.
// ---------------------------------------------------------------------------
inline VectorFieldFE solve_sym_poisson(const Mesh& mesh, const VectorFieldFE& h,
                                       const RigidModeBasis& basis) {
  detail::check_field(mesh, h, "solve_sym_poisson");
  FemOperators ops(mesh);

  if (basis.dim > 0) {
    const double hn = std::sqrt(std::max(ops.l2_inner(h.values, h.values), 0.0));
    for (const auto& mode : basis.fields) {
      detail::check_field(mesh, mode, "solve_sym_poisson");
      const double B = ops.l2_inner(mode.values, h.values);
      const double rn = std::sqrt(std::max(ops.l2_inner(mode.values, mode.values), 0.0));
      if (std::abs(B) > 1e-8 * std::max(hn * rn, 1e-300))
        throw std::invalid_argument(
            "solve_sym_poisson: source violates the rigid-mode compatibility condition; "
            "apply compatibility_project first");
    }
  }

  Vec3Field b;
  ops.apply_mass(h.values, b);
  const Vec3Field diag = ops.sym_stiffness_diagonal();
  auto apply_a = [&ops](const Vec3Field& in, Vec3Field& out) { ops.apply_sym_stiffness(in, out); };
  auto project = [&](Vec3Field& u) {
    detail::project_slip(mesh, u);
    detail::deflate_rigid(ops, basis, u);
    detail::project_slip(mesh, u);
  };

  VectorFieldFE u;
  u.mesh = &mesh;
  const detail::PcgOutcome out =
      detail::pcg_vec(apply_a, project, diag, b, u.values, 1e-10, 20000, false);
  if (out.rel_residual > 1e-10) {
    std::ostringstream msg;
    msg << "solve_sym_poisson: solver did not converge; relative residual " << out.rel_residual;
    throw std::runtime_error(msg.str());
  }
  return u;
}

// ---------------------------------------------------------------------------
// Scalar Neumann Poisson solve: mean-zero solution of -lap(phi) = h - mean(h)
// with the natural zero-flux wall condition.
// ---------------------------------------------------------------------------
inline ScalarFieldFE solve_neumann_poisson(const Mesh& mesh, const ScalarFieldFE& h) {
  if (h.mesh != &mesh || h.values.size() != mesh.vertices.size())
    throw std::invalid_argument("solve_neumann_poisson: field does not belong to this mesh");
  FemOperators ops(mesh);

  // Row sums of the mass matrix give exact mean removal via one dot product.
  std::vector<double> ones(mesh.vertices.size(), 1.0), msum;
  ops.apply_scalar_mass(ones, msum);
  const double total = detail::dot_flat_scalar(msum, ones);
  auto remove_mean = [&](std::vector<double>& u) {
    const double mean = detail::dot_flat_scalar(msum, u) / total;
    for (auto& x : u) x -= mean;
  };

  std::vector<double> src = h.values;
  remove_mean(src);
  std::vector<double> b;
  ops.apply_scalar_mass(src, b);
  const std::vector<double> diag = ops.scalar_stiffness_diagonal();
  auto apply_a = [&ops](const std::vector<double>& in, std::vector<double>& out) {
    ops.apply_scalar_stiffness(in, out);
  };

  ScalarFieldFE phi;
  phi.mesh = &mesh;
  const detail::PcgOutcome out =
      detail::pcg_scalar(apply_a, remove_mean, diag, b, phi.values, 1e-10, 20000);
  if (out.rel_residual > 1e-10) {
    std::ostringstream msg;
    msg << "solve_neumann_poisson: solver did not converge; relative residual "
        << out.rel_residual;
    throw std::runtime_error(msg.str());
  }
  remove_mean(phi.values);
  return phi;
}

// ---------------------------------------------------------------------------
// Discrete Korn constant: smallest Rayleigh quotient of the symmetric-
// gradient energy against the full H1 norm over the slip-constrained,
// rigid-mode-free subspace.
// ---------------------------------------------------------------------------
inline double korn_constant(const Mesh& mesh, const RigidModeBasis& basis) {
  FemOperators ops(mesh);
  auto apply_a = [&ops](const Vec3Field& in, Vec3Field& out) { ops.apply_sym_stiffness(in, out); };
  auto apply_b = [&ops](const Vec3Field& in, Vec3Field& out) {
    Vec3Field tmp;
    ops.apply_grad_stiffness(in, out);
    ops.apply_mass(in, tmp);
    for (std::size_t v = 0; v < out.size(); ++v)
      for (int k = 0; k < 3; ++k) out[v][k] += tmp[v][k];
  };
  auto project = [&](Vec3Field& u) {
    detail::project_slip(mesh, u);
    detail::deflate_rigid(ops, basis, u);
    detail::project_slip(mesh, u);
  };
  const double k = detail::smallest_pencil_eigenvalue(
      apply_a, apply_b, project, ops.sym_stiffness_diagonal(), detail::equivariant_start(mesh), 40);
  if (!(k > 0.0)) throw std::runtime_error("korn_constant: nonpositive Rayleigh quotient");
  return k;
}

// Discrete Poincare constant: smallest C with ||u||_L2 <= C ||grad u||_L2
// over the slip-constrained subspace (rigid modes included).
inline double poincare_constant(const Mesh& mesh) {
  FemOperators ops(mesh);
  auto apply_a = [&ops](const Vec3Field& in, Vec3Field& out) { ops.apply_grad_stiffness(in, out); };
  auto apply_b = [&ops](const Vec3Field& in, Vec3Field& out) { ops.apply_mass(in, out); };
  auto project = [&](Vec3Field& u) { detail::project_slip(mesh, u); };
  const double lambda = detail::smallest_pencil_eigenvalue(
      apply_a, apply_b, project, ops.grad_stiffness_diagonal(), detail::equivariant_start(mesh),
      40);
  if (!(lambda > 0.0)) throw std::runtime_error("poincare_constant: nonpositive eigenvalue");
  return 1.0 / std::sqrt(lambda);
}

// ---------------------------------------------------------------------------
// Residual report for a solved field.
// ---------------------------------------------------------------------------
struct ResidualReport {
  double interior_residual = 0.0;  // projected discrete residual, dual-norm
  double slip_residual = 0.0;      // max boundary-vertex |u . n|
  // Weak tangential-traction defect: Euclidean norm over boundary faces of
  // the per-face integral of the tangential part of (sym grad u) n.  The
  // gradient is constant on each parent tet, so every face integral is
  // exactly the face area times the sampled traction vector.
  double traction_residual = 0.0;
};

inline ResidualReport residual_report(const VectorFieldFE& u, const VectorFieldFE& h) {
  if (u.mesh == nullptr || u.mesh != h.mesh)
    throw std::invalid_argument("residual_report: fields on different meshes");
  const Mesh& mesh = *u.mesh;
  FemOperators ops(mesh);
  const RigidModeBasis basis = rigid_basis(mesh, ops);
  const VectorFieldFE hhat = compatibility_project(h, basis);

  Vec3Field b, r;
  ops.apply_mass(hhat.values, b);
  ops.apply_sym_stiffness(u.values, r);
  for (std::size_t v = 0; v < r.size(); ++v)
    for (int k = 0; k < 3; ++k) r[v][k] = b[v][k] - r[v][k];
  auto project = [&](Vec3Field& w) {
    detail::project_slip(mesh, w);
    detail::deflate_rigid(ops, basis, w);
    detail::project_slip(mesh, w);
  };
  project(r);
  Vec3Field pb = b;
  project(pb);

  // Dual norm against the lumped mass (row sums of the consistent mass).
  std::vector<double> lump(mesh.vertices.size(), 0.0);
  for (const auto& e : ops.elements())
    for (int a = 0; a < 4; ++a) lump[e.v[a]] += e.volume / 4.0;
  auto dual_norm = [&](const Vec3Field& w) {
    long double acc = 0.0L;
    for (std::size_t v = 0; v < w.size(); ++v)
      acc += static_cast<long double>(detail::dot3(w[v], w[v])) / lump[v];
    return std::sqrt(static_cast<double>(acc));
  };
  ResidualReport rep;
  const double denom = dual_norm(pb);
  rep.interior_residual = denom > 0.0 ? dual_norm(r) / denom : dual_norm(r);

  for (std::size_t bidx = 0; bidx < mesh.boundary_vertices.size(); ++bidx) {
    const double s =
        std::abs(detail::dot3(u.values[mesh.boundary_vertices[bidx]], mesh.vertex_normals[bidx]));
    rep.slip_residual = std::max(rep.slip_residual, s);
  }

  long double tr = 0.0L;
  for (const auto& f : mesh.boundary_faces) {
    const ElementData& e = ops.elements()[f.parent_tet];
    double S[3][3] = {};
    for (int a = 0; a < 4; ++a)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          S[i][j] += 0.5 * (u.values[e.v[a]][i] * e.grad[a][j] +
                            e.grad[a][i] * u.values[e.v[a]][j]);
    const auto& n = f.normal;
    std::array<double, 3> sn{};
    for (int i = 0; i < 3; ++i) sn[i] = S[i][0] * n[0] + S[i][1] * n[1] + S[i][2] * n[2];
    const double nn = detail::dot3(sn, n);
    std::array<double, 3> tang{sn[0] - nn * n[0], sn[1] - nn * n[1], sn[2] - nn * n[2]};
    const double area =
        detail::face_area(mesh.vertices[f.v[0]], mesh.vertices[f.v[1]], mesh.vertices[f.v[2]]);
    tr += area * area * detail::dot3(tang, tang);
  }
  rep.traction_residual = std::sqrt(static_cast<double>(tr));
  return rep;
}

}  // namespace macrolab::fem
