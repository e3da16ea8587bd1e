#pragma once

// Collision-frequency coefficient matrices for the Coulomb-type kernel
//   K^{ij}(z) = |z|^{-1} (delta_ij - z_i z_j / |z|^2),
// convolved with the Gaussian background:  sigma^{ij}(v) = (K^{ij} * mu)(v),
// plus the weighted dissipation norm built from them.
//
// The convolution is rotation covariant, so sigma(v) = A(s) (I - u u^T)
// + B(s) u u^T with s = |v|, u = v/s.  After an exact angular reduction the
// radial profiles are
//   A(s) = (2 pi)^{-1/2} * 1/2 * int_0^inf r E(r) [I0 + I2](s r) dr
//   B(s) = (2 pi)^{-1/2} *       int_0^inf r E(r) [I0 - I2](s r) dr
// with E(r) = exp(-(s^2+r^2)/2), I0(a) = int_{-1}^{1} e^{a u} du and
// I2(a) = int_{-1}^{1} u^2 e^{a u} du.  The products E*(I0 +- I2) are
// evaluated in cancellation-free closed forms (series for small a), and the
// radial integral uses composite Simpson with interval doubling and a
// Richardson-style convergence test.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "macrolab/kin/grid.hpp"

namespace macrolab::kin {

struct SigmaCoeffs {
  std::vector<std::array<std::array<double, 3>, 3>> node_sigma;  // one matrix per grid node
};

namespace detail {

// E(r) * (I0 + I2) and E(r) * (I0 - I2) for a = s*r, stable for all a >= 0.
inline std::pair<double, double> angular_factors(double s, double r) {
  const double a = s * r;
  if (a < 0.5) {
    const double e0 = std::exp(-0.5 * (s * s + r * r));
    const double a2 = a * a;
    // I0 = 2 sum a^{2k}/(2k+1)!,  I2 = 2 sum a^{2k}/( (2k)! (2k+3) ).
    const double i0 =
        2.0 + a2 * (1.0 / 3.0 + a2 * (1.0 / 60.0 + a2 * (1.0 / 2520.0 + a2 / 181440.0)));
    const double i2 =
        2.0 / 3.0 + a2 * (1.0 / 5.0 + a2 * (1.0 / 84.0 + a2 * (1.0 / 3240.0 + a2 / 221760.0)));
    return {e0 * (i0 + i2), e0 * (i0 - i2)};
  }
  const double em = std::exp(-0.5 * (r - s) * (r - s));
  const double ep = std::exp(-0.5 * (r + s) * (r + s));
  const double a3 = a * a * a;
  const double plus = 2.0 * (em * (a * a - a + 1.0) - ep * (a * a + a + 1.0)) / a3;
  const double minus = 2.0 * (em * (a - 1.0) + ep * (a + 1.0)) / a3;
  return {plus, minus};
}

// Simultaneous composite-Simpson integration of the two radial integrands,
// doubling the panel count until the Richardson error estimate meets tol.
inline std::pair<double, double> radial_profiles(double s, double tol) {
  const double hi = s + 12.0;  // Gaussian tail below 1e-30 beyond this
  auto simpson = [&](int m) -> std::pair<double, double> {
    const double h = hi / m;
    long double accA = 0.0L, accB = 0.0L;
    for (int q = 0; q <= m; ++q) {
      const double r = h * q;
      const auto [fp, fm] = angular_factors(s, r);
      const double w = (q == 0 || q == m) ? 1.0 : (q % 2 == 1 ? 4.0 : 2.0);
      accA += static_cast<long double>(w) * (0.5 * r * fp);
      accB += static_cast<long double>(w) * (r * fm);
    }
    return {static_cast<double>(accA * h / 3.0L), static_cast<double>(accB * h / 3.0L)};
  };

  int m = 128;
  auto prev = simpson(m);
  for (int level = 0; level < 16; ++level) {
    m *= 2;
    auto cur = simpson(m);
    const double errA = (cur.first - prev.first) / 15.0;
    const double errB = (cur.second - prev.second) / 15.0;
    const double extA = cur.first + errA;
    const double extB = cur.second + errB;
    if (std::abs(errA) <= tol * std::max(1.0, std::abs(extA)) &&
        std::abs(errB) <= tol * std::max(1.0, std::abs(extB))) {
      const double pref = std::pow(2.0 * kPi, -0.5);
      return {pref * extA, pref * extB};
    }
    prev = cur;
  }
  throw std::runtime_error("sigma coefficients: radial quadrature did not converge");
}

inline std::array<std::array<double, 3>, 3> assemble_sigma(const std::array<double, 3>& v,
                                                           double A, double B) {
  const double s2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
  std::array<std::array<double, 3>, 3> out{};
  if (s2 < 1e-20) {
    for (int i = 0; i < 3; ++i) out[i][i] = A;
    return out;
  }
  const double s = std::sqrt(s2);
  const std::array<double, 3> u{v[0] / s, v[1] / s, v[2] / s};
  // Fill the upper triangle and mirror so the result is bitwise symmetric.
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      out[i][j] = ((i == j) ? A : 0.0) + (B - A) * (u[i] * u[j]);
      out[j][i] = out[i][j];
    }
  return out;
}

}  // namespace detail

// Coefficient matrix at a single velocity.
inline std::array<std::array<double, 3>, 3> sigma_at(const std::array<double, 3>& v,
                                                     double tol = 1e-8) {
  const double s = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  const auto [A, B] = detail::radial_profiles(s, tol);
  return detail::assemble_sigma(v, A, B);
}

// Coefficient matrices at every grid node; radial profiles are memoized by
// |v|^2 since the tensor grid carries few distinct radii.
inline SigmaCoeffs sigma_coeffs(const VelocityGrid& g, double tol = 1e-8) {
  SigmaCoeffs out;
  out.node_sigma.resize(g.size());
  std::map<std::int64_t, std::pair<double, double>> memo;
  for (std::size_t p = 0; p < g.size(); ++p) {
    const auto& v = g.nodes[p];
    const double s2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    const std::int64_t key = std::llround(s2 * 1e9);
    auto it = memo.find(key);
    if (it == memo.end()) it = memo.emplace(key, detail::radial_profiles(std::sqrt(s2), tol)).first;
    out.node_sigma[p] = detail::assemble_sigma(v, it->second.first, it->second.second);
  }
  return out;
}

// Independent 1D reference for the trace: since the kernel trace is 2/|z|,
// trace sigma(v) = 2 int |v-u|^{-1} mu(u) du, reduced by the shell theorem to
//   2 * 4 pi (2 pi)^{-3/2} int_0^inf r^2 e^{-r^2/2} / max(r, s) dr,
// evaluated by adaptive Simpson on the two smooth pieces.
inline double sigma_trace_reference(double s, double tol = 1e-10) {
  if (s < 0.0) throw std::invalid_argument("sigma_trace_reference: negative radius");
  auto simpson = [&](auto&& fn, double lo, double hi) -> double {
    if (hi <= lo) return 0.0;
    int m = 64;
    auto run = [&](int panels) {
      const double h = (hi - lo) / panels;
      long double acc = 0.0L;
      for (int q = 0; q <= panels; ++q) {
        const double w = (q == 0 || q == panels) ? 1.0 : (q % 2 == 1 ? 4.0 : 2.0);
        acc += static_cast<long double>(w) * fn(lo + h * q);
      }
      return static_cast<double>(acc * h / 3.0L);
    };
    double prev = run(m);
    for (int level = 0; level < 16; ++level) {
      m *= 2;
      const double cur = run(m);
      const double err = (cur - prev) / 15.0;
      if (std::abs(err) <= tol * std::max(1.0, std::abs(cur + err))) return cur + err;
      prev = cur;
    }
    throw std::runtime_error("sigma trace reference: quadrature did not converge");
  };
  const double pref = 2.0 * 4.0 * kPi * std::pow(2.0 * kPi, -1.5);
  const double inner =
      (s > 0.0) ? simpson([&](double r) { return r * r * std::exp(-0.5 * r * r) / s; }, 0.0, s)
                : 0.0;
  const double outer = simpson([&](double r) { return r * std::exp(-0.5 * r * r); },
                               std::max(s, 0.0), s + 14.0);
  return pref * (inner + outer);
}

// Velocity-space dissipation seminorm:
//   int [ sigma^{ij} d_i f d_j f + sigma^{ij} v_i v_j f^2 ] dv.
inline double sigma_norm(const VelocityGrid& g, const std::vector<double>& f,
                         const std::array<std::vector<double>, 3>& dvf, const SigmaCoeffs& sig) {
  if (f.size() != g.size() || sig.node_sigma.size() != g.size())
    throw std::invalid_argument("sigma_norm: size mismatch");
  for (const auto& d : dvf)
    if (d.size() != g.size()) throw std::invalid_argument("sigma_norm: derivative size mismatch");
  long double acc = 0.0L;
  for (std::size_t p = 0; p < g.size(); ++p) {
    const auto& S = sig.node_sigma[p];
    const auto& v = g.nodes[p];
    double grad_term = 0.0, weight_term = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        grad_term += S[i][j] * dvf[i][p] * dvf[j][p];
        weight_term += S[i][j] * v[i] * v[j];
      }
    acc += static_cast<long double>(g.weights[p]) * (grad_term + weight_term * f[p] * f[p]);
  }
  return static_cast<double>(acc);
}

}  // namespace macrolab::kin
