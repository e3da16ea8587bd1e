#pragma once

// Relaxation surrogate for the linearized collision operator: a multiple of
// the microscopic part with collision frequency nu(v) = sqrt(1 + |v|^2),
// re-projected so the null space is annihilated exactly:
//   L f = (I - P)[ nu * (I - P) f ].
// By construction P(L f) = 0 and <L f, f> = <nu (I-P)f, (I-P)f> >= 0.

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "macrolab/kin/basis.hpp"
#include "macrolab/kin/grid.hpp"

namespace macrolab::kin {

inline double nu_weight(const std::array<double, 3>& v) {
  return std::sqrt(1.0 + v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

inline std::vector<double> bgk_apply(const VelocityGrid& g, const std::vector<double>& f) {
  if (f.size() != g.size()) throw std::invalid_argument("bgk_apply: size mismatch");
  Projection pr = project_P(g, f);
  std::vector<double> scaled(g.size());
  for (std::size_t p = 0; p < g.size(); ++p)
    scaled[p] = nu_weight(g.nodes[p]) * (f[p] - pr.Pf[p]);
  Projection pr2 = project_P(g, scaled);
  std::vector<double> out(g.size());
  for (std::size_t p = 0; p < g.size(); ++p) out[p] = scaled[p] - pr2.Pf[p];
  return out;
}

}  // namespace macrolab::kin
