#pragma once

// Tensor-product Gauss-Hermite velocity grid for integrals against the unit
// Gaussian background, with:
//   - dv-quadrature weights (the Gaussian factored into the weights),
//   - the background density and its square root sampled at the nodes,
//   - the orthonormal five-dimensional collision-invariant basis chi,
//   - an exact spectral differentiation matrix for Hermite-expansion data.
//
// Per-axis nodes/weights come from the Golub-Welsch eigenvalue method for the
// monic Hermite recurrence with weight exp(-x^2/2)/sqrt(2*pi); the per-axis
// weights sum to one.  A grid with n nodes per axis integrates per-axis
// polynomial moments of the background exactly through degree 2n-1.

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace macrolab::kin {

inline constexpr double kPi = 3.14159265358979323846;

// Background density (unit-variance Gaussian, unit mass).
inline double maxwellian(const std::array<double, 3>& v) {
  const double r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
  return std::pow(2.0 * kPi, -1.5) * std::exp(-0.5 * r2);
}

inline double sqrt_maxwellian(const std::array<double, 3>& v) {
  const double r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
  return std::pow(2.0 * kPi, -0.75) * std::exp(-0.25 * r2);
}

// Orthonormal null-space basis sampled at a single velocity:
// chi0 = sqrt(mu), chi_i = v_i sqrt(mu), chi4 = (|v|^2 - 3)/sqrt(6) sqrt(mu).
inline std::array<double, 5> chi_basis(const std::array<double, 3>& v) {
  const double sm = sqrt_maxwellian(v);
  const double r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
  return {sm, v[0] * sm, v[1] * sm, v[2] * sm, (r2 - 3.0) / std::sqrt(6.0) * sm};
}

struct VelocityGrid {
  int n = 0;                                 // nodes per axis
  std::vector<double> axis_nodes;            // ascending, symmetric about 0
  std::vector<double> axis_weights;          // Gaussian-measure weights, sum 1
  std::vector<std::array<double, 3>> nodes;  // size n^3
  std::vector<double> weights;               // dv weights: sum w_p g(v_p) ~ integral of g dv
  std::vector<double> mu;                    // background density at node
  std::vector<double> sqrt_mu;
  std::array<std::vector<double>, 5> chi;    // chi basis sampled at nodes
  std::vector<double> diff;                  // n*n row-major per-axis differentiation matrix

  std::size_t size() const { return nodes.size(); }

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n + j) * n + k;
  }

  // Integral of a node-sampled function against dv.
  double integrate(const std::vector<double>& g) const {
    if (g.size() != size()) throw std::invalid_argument("integrate: size mismatch");
    long double acc = 0.0L;
    for (std::size_t p = 0; p < g.size(); ++p) acc += static_cast<long double>(weights[p]) * g[p];
    return static_cast<double>(acc);
  }

  // L^2_v inner product of two node-sampled functions.
  double inner(const std::vector<double>& f, const std::vector<double>& g) const {
    if (f.size() != size() || g.size() != size())
      throw std::invalid_argument("inner: size mismatch");
    long double acc = 0.0L;
    for (std::size_t p = 0; p < f.size(); ++p)
      acc += static_cast<long double>(weights[p]) * f[p] * g[p];
    return static_cast<double>(acc);
  }
};

namespace detail {

// Values of the orthonormal Hermite polynomials (unit Gaussian weight) at x:
// h_0 = 1, h_1 = x, h_{k+1} = (x h_k - sqrt(k) h_{k-1}) / sqrt(k+1).
inline void orthonormal_hermite_row(double x, int n, std::vector<double>& out) {
  out.resize(n);
  out[0] = 1.0;
  if (n > 1) out[1] = x;
  for (int k = 1; k + 1 < n; ++k)
    out[k + 1] = (x * out[k] - std::sqrt(static_cast<double>(k)) * out[k - 1]) /
                 std::sqrt(static_cast<double>(k + 1));
}

}  // namespace detail

inline VelocityGrid make_velocity_grid(int n_per_axis = 16) {
  if (n_per_axis < 2 || n_per_axis > 64)
    throw std::invalid_argument("make_velocity_grid: nodes per axis must be in [2, 64]");
  const int n = n_per_axis;

  // Golub-Welsch: symmetric tridiagonal Jacobi matrix with off-diagonal sqrt(k).
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = std::sqrt(static_cast<double>(k));
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("make_velocity_grid: eigensolve failed");

  VelocityGrid g;
  g.n = n;
  g.axis_nodes.resize(n);
  g.axis_weights.resize(n);
  for (int i = 0; i < n; ++i) {
    g.axis_nodes[i] = es.eigenvalues()(i);
    const double q0 = es.eigenvectors()(0, i);
    g.axis_weights[i] = q0 * q0;  // total Gaussian mass is 1
  }
  // Enforce exact +- symmetry of the rule (the measure is even).
  for (int i = 0; i < n / 2; ++i) {
    const int j = n - 1 - i;
    const double x = 0.5 * (g.axis_nodes[j] - g.axis_nodes[i]);
    g.axis_nodes[i] = -x;
    g.axis_nodes[j] = x;
    const double w = 0.5 * (g.axis_weights[i] + g.axis_weights[j]);
    g.axis_weights[i] = w;
    g.axis_weights[j] = w;
  }
  if (n % 2 == 1) g.axis_nodes[n / 2] = 0.0;
  for (double w : g.axis_weights)
    if (!(w > 0.0)) throw std::runtime_error("make_velocity_grid: nonpositive weight");

  const std::size_t total = static_cast<std::size_t>(n) * n * n;
  g.nodes.resize(total);
  g.weights.resize(total);
  g.mu.resize(total);
  g.sqrt_mu.resize(total);
  for (auto& c : g.chi) c.resize(total);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const std::size_t p = g.index(i, j, k);
        const std::array<double, 3> v{g.axis_nodes[i], g.axis_nodes[j], g.axis_nodes[k]};
        g.nodes[p] = v;
        g.mu[p] = maxwellian(v);
        g.sqrt_mu[p] = sqrt_maxwellian(v);
        g.weights[p] = g.axis_weights[i] * g.axis_weights[j] * g.axis_weights[k] / g.mu[p];
        const auto c = chi_basis(v);
        for (int m = 0; m < 5; ++m) g.chi[m][p] = c[m];
      }

  // Spectral differentiation matrix in the orthonormal Hermite basis:
  // expansion coefficients c_k = sum_b h_k(x_b) F(x_b) w_b are exact for
  // per-axis polynomial data of degree <= n-1, and h_k' = sqrt(k) h_{k-1}.
  std::vector<std::vector<double>> H(n);
  for (int b = 0; b < n; ++b) detail::orthonormal_hermite_row(g.axis_nodes[b], n, H[b]);
  g.diff.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      long double acc = 0.0L;
      for (int k = 1; k < n; ++k)
        acc += std::sqrt(static_cast<long double>(k)) * H[a][k - 1] * H[b][k];
      g.diff[static_cast<std::size_t>(a) * n + b] = static_cast<double>(acc * g.axis_weights[b]);
    }

  return g;
}

// Velocity derivatives of node-sampled data f = F * sqrt(mu): differentiates
// the tensor Hermite expansion of F exactly (per-axis polynomial degree up to
// n-1), then d_i f = (d_i F - v_i F / 2) * sqrt(mu).
inline std::array<std::vector<double>, 3> velocity_derivatives(const VelocityGrid& g,
                                                               const std::vector<double>& f) {
  if (f.size() != g.size()) throw std::invalid_argument("velocity_derivatives: size mismatch");
  const int n = g.n;
  std::vector<double> F(g.size());
  for (std::size_t p = 0; p < g.size(); ++p) F[p] = f[p] / g.sqrt_mu[p];

  std::array<std::vector<double>, 3> out;
  for (auto& a : out) a.assign(g.size(), 0.0);

  std::vector<double> dF(g.size(), 0.0);
  for (int axis = 0; axis < 3; ++axis) {
    std::fill(dF.begin(), dF.end(), 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          const std::size_t p = g.index(i, j, k);
          long double acc = 0.0L;
          if (axis == 0) {
            for (int a = 0; a < n; ++a)
              acc += static_cast<long double>(g.diff[static_cast<std::size_t>(i) * n + a]) *
                     F[g.index(a, j, k)];
          } else if (axis == 1) {
            for (int a = 0; a < n; ++a)
              acc += static_cast<long double>(g.diff[static_cast<std::size_t>(j) * n + a]) *
                     F[g.index(i, a, k)];
          } else {
            for (int a = 0; a < n; ++a)
              acc += static_cast<long double>(g.diff[static_cast<std::size_t>(k) * n + a]) *
                     F[g.index(i, j, a)];
          }
          dF[p] = static_cast<double>(acc);
        }
    for (std::size_t p = 0; p < g.size(); ++p)
      out[axis][p] = (dF[p] - 0.5 * g.nodes[p][axis] * F[p]) * g.sqrt_mu[p];
  }
  return out;
}

}  // namespace macrolab::kin
