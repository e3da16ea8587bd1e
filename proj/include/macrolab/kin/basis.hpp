#pragma once

// Macroscopic/microscopic decomposition tools over a velocity grid:
//   - Burnett functions A_hat (traceless second order) and B_hat (third order),
//   - specular reflection of a velocity about a unit normal,
//   - the L^2_v projection onto the span of the chi basis, per distribution
//     and per cell field.

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "macrolab/kin/grid.hpp"

namespace macrolab::kin {

struct Burnett {
  std::array<std::array<double, 3>, 3> A;  // A[i][j] = (v_i v_j - delta_ij |v|^2/3) sqrt(mu)
  std::array<double, 3> B;                 // B[i] = v_i (|v|^2 - 5)/sqrt(10) sqrt(mu)
};

inline Burnett burnett(const std::array<double, 3>& v) {
  const double sm = sqrt_maxwellian(v);
  const double r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
  Burnett out;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double kron = (i == j) ? 1.0 : 0.0;
      out.A[i][j] = (v[i] * v[j] - kron * r2 / 3.0) * sm;
    }
    out.B[i] = v[i] * (r2 - 5.0) / std::sqrt(10.0) * sm;
  }
  return out;
}

// v - 2 n (n . v); n must be a unit vector.
inline std::array<double, 3> specular_reflect(const std::array<double, 3>& v,
                                              const std::array<double, 3>& n) {
  const double len2 = n[0] * n[0] + n[1] * n[1] + n[2] * n[2];
  if (std::abs(std::sqrt(len2) - 1.0) > 1e-12)
    throw std::invalid_argument("specular_reflect: normal is not unit length");
  const double nv = n[0] * v[0] + n[1] * v[1] + n[2] * v[2];
  return {v[0] - 2.0 * n[0] * nv, v[1] - 2.0 * n[1] * nv, v[2] - 2.0 * n[2] * nv};
}

// Macroscopic moments and projected part of one velocity distribution.
struct Projection {
  double a = 0.0;
  std::array<double, 3> b{0.0, 0.0, 0.0};
  double c = 0.0;
  std::vector<double> Pf;
};

inline Projection project_P(const VelocityGrid& g, const std::vector<double>& f) {
  if (f.size() != g.size()) throw std::invalid_argument("project_P: size mismatch");
  Projection out;
  out.a = g.inner(f, g.chi[0]);
  for (int i = 0; i < 3; ++i) out.b[i] = g.inner(f, g.chi[1 + i]);
  out.c = g.inner(f, g.chi[4]);
  out.Pf.resize(g.size());
  for (std::size_t p = 0; p < g.size(); ++p)
    out.Pf[p] = out.a * g.chi[0][p] + out.b[0] * g.chi[1][p] + out.b[1] * g.chi[2][p] +
                out.b[2] * g.chi[3][p] + out.c * g.chi[4][p];
  return out;
}

// Cellwise macroscopic fields extracted from a list of distributions.
struct MomentState {
  std::vector<double> a;
  std::vector<std::array<double, 3>> b;
  std::vector<double> c;
};

inline MomentState project_P_field(const VelocityGrid& g,
                                   const std::vector<std::vector<double>>& f_cells,
                                   std::vector<std::vector<double>>* Pf_out = nullptr) {
  MomentState ms;
  ms.a.reserve(f_cells.size());
  ms.b.reserve(f_cells.size());
  ms.c.reserve(f_cells.size());
  if (Pf_out) Pf_out->clear();
  for (const auto& f : f_cells) {
    Projection pr = project_P(g, f);
    ms.a.push_back(pr.a);
    ms.b.push_back(pr.b);
    ms.c.push_back(pr.c);
    if (Pf_out) Pf_out->push_back(std::move(pr.Pf));
  }
  return ms;
}

}  // namespace macrolab::kin
