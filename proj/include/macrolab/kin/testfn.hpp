#pragma once

// Weak-formulation test functions built from derivatives of an elliptic
// potential, with two independently computable display forms each, a
// transport-identity checker against the projected + microscopic
// decomposition, and a boundary-moment vanishing check.
//
// Kinds:
//   a: psi = sum_i d_i(phi) v_i (|v|^2 - 10) sqrt(mu)
//          = sum_i d_i(phi) (sqrt(10) B_hat_i - 5 chi_i)
//   b: psi = sum_ij d_j(phi^i) v_i v_j sqrt(mu) - div(phi) sqrt(mu)
//          = sum_ij d_j(phi^i) A_hat_ij + (sqrt(6)/3) div(phi) chi_4
//   c: psi = sum_i d_i(phi) v_i (|v|^2 - 5) sqrt(mu)
//          = sqrt(10) sum_i d_i(phi) B_hat_i

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include "macrolab/kin/basis.hpp"
#include "macrolab/kin/grid.hpp"

namespace macrolab::kin {

enum class TestKind { psi_a, psi_b, psi_c };

// ---------------------------------------------------------------------------
// Trivariate polynomial in the spatial variable, with exact derivatives.
// ---------------------------------------------------------------------------
struct Poly3 {
  std::map<std::array<int, 3>, double> terms;  // exponent triple -> coefficient

  static Poly3 zero() { return {}; }

  void add_term(int e1, int e2, int e3, double coeff) {
    if (e1 < 0 || e2 < 0 || e3 < 0) throw std::invalid_argument("Poly3: negative exponent");
    if (coeff == 0.0) return;
    auto key = std::array<int, 3>{e1, e2, e3};
    auto it = terms.find(key);
    if (it == terms.end()) {
      terms.emplace(key, coeff);
    } else {
      it->second += coeff;
      if (it->second == 0.0) terms.erase(it);
    }
  }

  int degree() const {
    int d = 0;
    for (const auto& [e, c] : terms) d = std::max(d, e[0] + e[1] + e[2]);
    return d;
  }

  double eval(const std::array<double, 3>& x) const {
    double s = 0.0;
    for (const auto& [e, c] : terms) {
      double t = c;
      for (int axis = 0; axis < 3; ++axis)
        for (int q = 0; q < e[axis]; ++q) t *= x[axis];
      s += t;
    }
    return s;
  }

  Poly3 derivative(int axis) const {
    if (axis < 0 || axis > 2) throw std::invalid_argument("Poly3::derivative: bad axis");
    Poly3 out;
    for (const auto& [e, c] : terms) {
      if (e[axis] == 0) continue;
      auto e2 = e;
      e2[axis] -= 1;
      out.add_term(e2[0], e2[1], e2[2], c * e[axis]);
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Per-cell derivative samples of the underlying elliptic solutions.
// ---------------------------------------------------------------------------
struct ScalarPotentialSamples {
  std::vector<std::array<double, 3>> gradient;                    // required
  std::vector<std::array<std::array<double, 3>, 3>> hessian;      // needed for transport evaluation
};

struct VectorPotentialSamples {
  // jacobian[cell][i][j] = d phi^i / d x_j
  std::vector<std::array<std::array<double, 3>, 3>> jacobian;     // required
  // hessian[cell][i][j][k] = d^2 phi^i / (d x_j d x_k)
  std::vector<std::array<std::array<std::array<double, 3>, 3>, 3>> hessian;
};

struct EllipticSolutionSamples {
  ScalarPotentialSamples scalar;  // kinds a and c
  VectorPotentialSamples vector;  // kind b
};

// ---------------------------------------------------------------------------
// The sampled test function field.
// ---------------------------------------------------------------------------
struct TestFunctionField {
  TestKind kind = TestKind::psi_a;
  std::vector<std::array<double, 3>> grad;                                  // kinds a, c
  std::vector<std::array<std::array<double, 3>, 3>> hess_scalar;            // kinds a, c (optional)
  std::vector<std::array<std::array<double, 3>, 3>> jac;                    // kind b
  std::vector<std::array<std::array<std::array<double, 3>, 3>, 3>> hess_vector;  // kind b (optional)

  std::size_t cells() const {
    return kind == TestKind::psi_b ? jac.size() : grad.size();
  }

  // Raw display form (velocity polynomial times sqrt(mu)).
  double eval(std::size_t cell, const std::array<double, 3>& v) const {
    const double sm = sqrt_maxwellian(v);
    const double r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    if (kind == TestKind::psi_b) {
      const auto& J = jac.at(cell);
      double quad = 0.0, div = 0.0;
      for (int i = 0; i < 3; ++i) {
        div += J[i][i];
        for (int j = 0; j < 3; ++j) quad += J[i][j] * v[i] * v[j];
      }
      return quad * sm - div * sm;
    }
    const auto& gr = grad.at(cell);
    const double shift = (kind == TestKind::psi_a) ? 10.0 : 5.0;
    double s = 0.0;
    for (int i = 0; i < 3; ++i) s += gr[i] * v[i] * (r2 - shift);
    return s * sm;
  }

  // Equivalent expansion in the chi / Burnett basis.
  double eval_basis_form(std::size_t cell, const std::array<double, 3>& v) const {
    const Burnett bu = burnett(v);
    const auto ch = chi_basis(v);
    if (kind == TestKind::psi_b) {
      const auto& J = jac.at(cell);
      double s = 0.0, div = 0.0;
      for (int i = 0; i < 3; ++i) {
        div += J[i][i];
        for (int j = 0; j < 3; ++j) s += J[i][j] * bu.A[i][j];
      }
      return s + div * std::sqrt(6.0) / 3.0 * ch[4];
    }
    const auto& gr = grad.at(cell);
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
      if (kind == TestKind::psi_a)
        s += gr[i] * (std::sqrt(10.0) * bu.B[i] - 5.0 * ch[1 + i]);
      else
        s += gr[i] * std::sqrt(10.0) * bu.B[i];
    }
    return s;
  }

  // -v . grad_x psi at (cell, v); requires second-derivative samples.
  double eval_transport(std::size_t cell, const std::array<double, 3>& v) const {
    const double sm = sqrt_maxwellian(v);
    const double r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    if (kind == TestKind::psi_b) {
      if (cell >= hess_vector.size())
        throw std::invalid_argument("eval_transport: missing second-derivative samples");
      const auto& H = hess_vector[cell];
      double cubic = 0.0, lin = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) {
          lin += H[i][k][i] * v[k];
          for (int j = 0; j < 3; ++j) cubic += H[i][k][j] * v[i] * v[j] * v[k];
        }
      return (-cubic + lin) * sm;
    }
    if (cell >= hess_scalar.size())
      throw std::invalid_argument("eval_transport: missing second-derivative samples");
    const auto& H = hess_scalar[cell];
    const double shift = (kind == TestKind::psi_a) ? 10.0 : 5.0;
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) s += H[k][i] * v[i] * v[k];
    return -s * (r2 - shift) * sm;
  }
};

inline TestFunctionField build_test_function(TestKind kind, const EllipticSolutionSamples& sol,
                                             std::size_t n_cells) {
  TestFunctionField tf;
  tf.kind = kind;
  if (kind == TestKind::psi_b) {
    if (sol.vector.jacobian.size() != n_cells || n_cells == 0)
      throw std::invalid_argument("build_test_function: missing vector derivative samples");
    if (!sol.vector.hessian.empty() && sol.vector.hessian.size() != n_cells)
      throw std::invalid_argument("build_test_function: inconsistent vector hessian samples");
    tf.jac = sol.vector.jacobian;
    tf.hess_vector = sol.vector.hessian;
  } else {
    if (sol.scalar.gradient.size() != n_cells || n_cells == 0)
      throw std::invalid_argument("build_test_function: missing scalar derivative samples");
    if (!sol.scalar.hessian.empty() && sol.scalar.hessian.size() != n_cells)
      throw std::invalid_argument("build_test_function: inconsistent scalar hessian samples");
    tf.grad = sol.scalar.gradient;
    tf.hess_scalar = sol.scalar.hessian;
  }
  return tf;
}

namespace detail {

// Microscopic parts (I - P) of the velocity polynomials entering the
// transport decompositions, sampled on the grid.
inline std::vector<double> micro_part(const VelocityGrid& g, const std::vector<double>& f) {
  Projection pr = project_P(g, f);
  std::vector<double> out(g.size());
  for (std::size_t p = 0; p < g.size(); ++p) out[p] = f[p] - pr.Pf[p];
  return out;
}

}  // namespace detail

// Checks, for a vector polynomial potential (kind b), that the directly
// differentiated transport term -v . grad_x psi matches the projected part
// -sum_i chi_i [Lap(phi^i) + d_i div(phi)] plus the microscopic remainder
// -sum_ijk d_kj(phi^i) (I-P)(v_i v_j v_k sqrt(mu)) at random spatial points
// and all grid velocities.  Returns the maximum absolute defect.
inline double transport_identity_check(const VelocityGrid& g, TestKind kind,
                                       const std::array<Poly3, 3>& phi, int n_points = 8,
                                       unsigned long long seed = 0x9e3779b97f4a7c15ULL) {
  if (kind != TestKind::psi_b)
    throw std::invalid_argument("transport_identity_check: vector potential requires kind b");
  for (const auto& c : phi)
    if (c.degree() > 4)
      throw std::invalid_argument("transport_identity_check: polynomial degree exceeds 4");

  // Second derivative polynomials d_j d_k phi^i.
  std::array<std::array<std::array<Poly3, 3>, 3>, 3> dd;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Poly3 dj = phi[i].derivative(j);
      for (int k = 0; k < 3; ++k) dd[i][j][k] = dj.derivative(k);
    }

  // Microscopic parts of v_i v_j v_k sqrt(mu).
  std::array<std::array<std::array<std::vector<double>, 3>, 3>, 3> M;
  std::vector<double> work(g.size());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        for (std::size_t p = 0; p < g.size(); ++p) {
          const auto& v = g.nodes[p];
          work[p] = v[i] * v[j] * v[k] * g.sqrt_mu[p];
        }
        M[i][j][k] = detail::micro_part(g, work);
      }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  double defect = 0.0;
  for (int pt = 0; pt < n_points; ++pt) {
    const std::array<double, 3> x{uni(rng), uni(rng), uni(rng)};
    std::array<std::array<std::array<double, 3>, 3>, 3> H{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) H[i][j][k] = dd[i][j][k].eval(x);

    // Projected coefficients -[Lap(phi^i) + d_i div(phi)](x).
    std::array<double, 3> proj{};
    for (int i = 0; i < 3; ++i) {
      double lap = 0.0, ddiv = 0.0;
      for (int j = 0; j < 3; ++j) {
        lap += H[i][j][j];
        ddiv += H[j][i][j];  // d_i d_j phi^j
      }
      proj[i] = -(lap + ddiv);
    }

    for (std::size_t p = 0; p < g.size(); ++p) {
      const auto& v = g.nodes[p];
      double lhs_cubic = 0.0, lhs_lin = 0.0, micro = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) {
          lhs_lin += H[i][k][i] * v[k];
          for (int j = 0; j < 3; ++j) {
            lhs_cubic += H[i][k][j] * v[i] * v[j] * v[k];
            micro += H[i][k][j] * M[i][j][k][p];
          }
        }
      const double lhs = (-lhs_cubic + lhs_lin) * g.sqrt_mu[p];
      const double rhs =
          proj[0] * g.chi[1][p] + proj[1] * g.chi[2][p] + proj[2] * g.chi[3][p] - micro;
      defect = std::max(defect, std::abs(lhs - rhs));
    }
  }
  return defect;
}

// Scalar-potential version for kinds a and c: the projected part is
// +5 Lap(phi) chi_0 (kind a) or -(5 sqrt(6)/3) Lap(phi) chi_4 (kind c), and
// the microscopic remainder is -sum_ij d_ij(phi) (I-P)(v_i v_j (|v|^2-s) sqrt(mu))
// with s = 10 or 5.  (The signs follow from the second moments of the two
// velocity weights against chi_0 and chi_4: -5 and +5 sqrt(6)/3 per diagonal
// entry respectively.)
inline double transport_identity_check(const VelocityGrid& g, TestKind kind, const Poly3& phi,
                                       int n_points = 8,
                                       unsigned long long seed = 0x9e3779b97f4a7c15ULL) {
  if (kind == TestKind::psi_b)
    throw std::invalid_argument("transport_identity_check: kind b requires a vector potential");
  if (phi.degree() > 4)
    throw std::invalid_argument("transport_identity_check: polynomial degree exceeds 4");
  const double shift = (kind == TestKind::psi_a) ? 10.0 : 5.0;

  std::array<std::array<Poly3, 3>, 3> dd;
  for (int i = 0; i < 3; ++i) {
    Poly3 di = phi.derivative(i);
    for (int j = 0; j < 3; ++j) dd[i][j] = di.derivative(j);
  }

  std::array<std::array<std::vector<double>, 3>, 3> M;
  std::vector<double> work(g.size());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      for (std::size_t p = 0; p < g.size(); ++p) {
        const auto& v = g.nodes[p];
        const double r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        work[p] = v[i] * v[j] * (r2 - shift) * g.sqrt_mu[p];
      }
      M[i][j] = detail::micro_part(g, work);
    }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  double defect = 0.0;
  for (int pt = 0; pt < n_points; ++pt) {
    const std::array<double, 3> x{uni(rng), uni(rng), uni(rng)};
    std::array<std::array<double, 3>, 3> H{};
    double lap = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) H[i][j] = dd[i][j].eval(x);
      lap += H[i][i];
    }
    const double proj_coeff =
        (kind == TestKind::psi_a) ? 5.0 * lap : -5.0 * std::sqrt(6.0) / 3.0 * lap;
    const int chi_idx = (kind == TestKind::psi_a) ? 0 : 4;

    for (std::size_t p = 0; p < g.size(); ++p) {
      const auto& v = g.nodes[p];
      const double r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
      double quad = 0.0, micro = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          quad += H[i][j] * v[i] * v[j];
          micro += H[i][j] * M[i][j][p];
        }
      const double lhs = -quad * (r2 - shift) * g.sqrt_mu[p];
      const double rhs = proj_coeff * g.chi[chi_idx][p] - micro;
      defect = std::max(defect, std::abs(lhs - rhs));
    }
  }
  return defect;
}

// ---------------------------------------------------------------------------
// Boundary moment check: max over samples of | integral (n.v) psi f dv |.
// ---------------------------------------------------------------------------
struct BoundarySample {
  std::size_t cell = 0;
  std::array<double, 3> normal{1.0, 0.0, 0.0};
  std::vector<double> f;  // sampled boundary distribution on the grid
};

inline double boundary_vanish_check(const VelocityGrid& g, const TestFunctionField& psi,
                                    const std::vector<BoundarySample>& samples) {
  if (psi.kind != TestKind::psi_b)
    throw std::invalid_argument("boundary_vanish_check: field must be of kind b");
  double worst = 0.0;
  for (const auto& s : samples) {
    const double len =
        std::sqrt(s.normal[0] * s.normal[0] + s.normal[1] * s.normal[1] + s.normal[2] * s.normal[2]);
    if (std::abs(len - 1.0) > 1e-12)
      throw std::invalid_argument("boundary_vanish_check: normal is not unit length");
    if (s.f.size() != g.size())
      throw std::invalid_argument("boundary_vanish_check: sample size mismatch");
    long double acc = 0.0L;
    for (std::size_t p = 0; p < g.size(); ++p) {
      const auto& v = g.nodes[p];
      const double nv = s.normal[0] * v[0] + s.normal[1] * v[1] + s.normal[2] * v[2];
      acc += static_cast<long double>(g.weights[p]) * nv * psi.eval(s.cell, v) * s.f[p];
    }
    worst = std::max(worst, std::abs(static_cast<double>(acc)));
  }
  return worst;
}

}  // namespace macrolab::kin
