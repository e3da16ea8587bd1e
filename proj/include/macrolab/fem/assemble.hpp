#pragma once

// Piecewise-linear finite-element operators on tetrahedral meshes, applied
// matrix-free: symmetric-gradient stiffness, full-gradient stiffness, mass,
// and their scalar counterparts.  Element work is parallel over tetrahedra
// (MACROLAB_THREADS), and the scatter into global vectors is a serial pass in
// fixed element order, so results are bitwise independent of the thread count.

#include <array>
#include <cstddef>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "macrolab/fem/mesh.hpp"

namespace macrolab::fem {

// Parallelism cap from the environment; values below 1 or non-numeric fall
// back to serial execution.
inline int thread_count() {
  const char* env = std::getenv("MACROLAB_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == nullptr || *end != '\0' || v < 1) return 1;
  return static_cast<int>(v > 64 ? 64 : v);
}

namespace detail {

// Runs fn(begin, end) over a partition of [0, n) on up to thread_count()
// threads.  Each range is disjoint, so no synchronization is needed.
template <typename Fn>
inline void parallel_ranges(std::size_t n, Fn&& fn) {
  const int threads = thread_count();
  if (threads <= 1 || n < 1024) {
    fn(std::size_t{0}, n);
    return;
  }
  const std::size_t chunk = (n + threads - 1) / threads;
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) {
    const std::size_t lo = chunk * t;
    if (lo >= n) break;
    const std::size_t hi = std::min(n, lo + chunk);
    pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
  }
  fn(std::size_t{0}, std::min(n, chunk));
  for (auto& th : pool) th.join();
}

}  // namespace detail

struct ElementData {
  std::array<std::size_t, 4> v{};                 // vertex indices
  std::array<std::array<double, 3>, 4> grad{};    // barycentric gradients
  double volume = 0.0;
};

inline std::vector<ElementData> build_element_data(const Mesh& mesh) {
  std::vector<ElementData> out(mesh.tets.size());
  detail::parallel_ranges(mesh.tets.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t t = lo; t < hi; ++t) {
      ElementData& ed = out[t];
      ed.v = mesh.tets[t];
      const auto& p0 = mesh.vertices[ed.v[0]];
      const auto& p1 = mesh.vertices[ed.v[1]];
      const auto& p2 = mesh.vertices[ed.v[2]];
      const auto& p3 = mesh.vertices[ed.v[3]];
      const std::array<double, 3> e1{p1[0] - p0[0], p1[1] - p0[1], p1[2] - p0[2]};
      const std::array<double, 3> e2{p2[0] - p0[0], p2[1] - p0[1], p2[2] - p0[2]};
      const std::array<double, 3> e3{p3[0] - p0[0], p3[1] - p0[1], p3[2] - p0[2]};
      const std::array<double, 3> c23 = detail::cross3(e2, e3);
      const std::array<double, 3> c31 = detail::cross3(e3, e1);
      const std::array<double, 3> c12 = detail::cross3(e1, e2);
      const double six_vol = detail::dot3(e1, c23);
      if (!(six_vol > 0.0)) throw std::invalid_argument("element data: nonpositive volume");
      ed.volume = six_vol / 6.0;
      for (int d = 0; d < 3; ++d) {
        ed.grad[1][d] = c23[d] / six_vol;
        ed.grad[2][d] = c31[d] / six_vol;
        ed.grad[3][d] = c12[d] / six_vol;
        ed.grad[0][d] = -(ed.grad[1][d] + ed.grad[2][d] + ed.grad[3][d]);
      }
    }
  });
  return out;
}

using Vec3Field = std::vector<std::array<double, 3>>;

// Matrix-free operator bundle for one mesh.
class FemOperators {
 public:
  explicit FemOperators(const Mesh& mesh)
      : mesh_(&mesh), ed_(build_element_data(mesh)), local_(ed_.size()) {}

  const Mesh& mesh() const { return *mesh_; }
  const std::vector<ElementData>& elements() const { return ed_; }
  std::size_t n_vertices() const { return mesh_->vertices.size(); }

  double domain_volume() const {
    long double acc = 0.0L;
    for (const auto& e : ed_) acc += e.volume;
    return static_cast<double>(acc);
  }

  // y = K_sym x with K_sym the bilinear form of the symmetric gradient:
  // a(u,w) = sum_T vol * sym(grad u) : sym(grad w).
  void apply_sym_stiffness(const Vec3Field& x, Vec3Field& y) const {
    elementwise_vec(x, y, [](const ElementData& e, const std::array<std::array<double, 3>, 4>& u,
                             std::array<std::array<double, 3>, 4>& r) {
      double S[3][3] = {};
      for (int a = 0; a < 4; ++a)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            S[i][j] += 0.5 * (u[a][i] * e.grad[a][j] + e.grad[a][i] * u[a][j]);
      for (int b = 0; b < 4; ++b)
        for (int i = 0; i < 3; ++i) {
          double s = 0.0;
          for (int j = 0; j < 3; ++j) s += S[i][j] * e.grad[b][j];
          r[b][i] = e.volume * s;
        }
    });
  }

  // y = K_grad x with the full-gradient form sum_T vol * grad u : grad w.
  void apply_grad_stiffness(const Vec3Field& x, Vec3Field& y) const {
    elementwise_vec(x, y, [](const ElementData& e, const std::array<std::array<double, 3>, 4>& u,
                             std::array<std::array<double, 3>, 4>& r) {
      double G[3][3] = {};
      for (int a = 0; a < 4; ++a)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) G[i][j] += u[a][i] * e.grad[a][j];
      for (int b = 0; b < 4; ++b)
        for (int i = 0; i < 3; ++i) {
          double s = 0.0;
          for (int j = 0; j < 3; ++j) s += G[i][j] * e.grad[b][j];
          r[b][i] = e.volume * s;
        }
    });
  }

  // y = M x with the consistent vector mass matrix.
  void apply_mass(const Vec3Field& x, Vec3Field& y) const {
    elementwise_vec(x, y, [](const ElementData& e, const std::array<std::array<double, 3>, 4>& u,
                             std::array<std::array<double, 3>, 4>& r) {
      std::array<double, 3> sum{0, 0, 0};
      for (int a = 0; a < 4; ++a)
        for (int i = 0; i < 3; ++i) sum[i] += u[a][i];
      for (int b = 0; b < 4; ++b)
        for (int i = 0; i < 3; ++i) r[b][i] = e.volume / 20.0 * (sum[i] + u[b][i]);
    });
  }

  void apply_scalar_stiffness(const std::vector<double>& x, std::vector<double>& y) const {
    elementwise_scalar(x, y, [](const ElementData& e, const std::array<double, 4>& u,
                                std::array<double, 4>& r) {
      std::array<double, 3> g{0, 0, 0};
      for (int a = 0; a < 4; ++a)
        for (int d = 0; d < 3; ++d) g[d] += u[a] * e.grad[a][d];
      for (int b = 0; b < 4; ++b)
        r[b] = e.volume * (g[0] * e.grad[b][0] + g[1] * e.grad[b][1] + g[2] * e.grad[b][2]);
    });
  }

  void apply_scalar_mass(const std::vector<double>& x, std::vector<double>& y) const {
    elementwise_scalar(x, y, [](const ElementData& e, const std::array<double, 4>& u,
                                std::array<double, 4>& r) {
      const double sum = u[0] + u[1] + u[2] + u[3];
      for (int b = 0; b < 4; ++b) r[b] = e.volume / 20.0 * (sum + u[b]);
    });
  }

  // Diagonal of K_sym (per vertex and component), for Jacobi preconditioning.
  Vec3Field sym_stiffness_diagonal() const {
    Vec3Field diag(n_vertices(), {0.0, 0.0, 0.0});
    for (const auto& e : ed_)
      for (int b = 0; b < 4; ++b) {
        const double g2 = detail::dot3(e.grad[b], e.grad[b]);
        for (int d = 0; d < 3; ++d)
          diag[e.v[b]][d] += e.volume * 0.5 * (g2 + e.grad[b][d] * e.grad[b][d]);
      }
    return diag;
  }

  Vec3Field grad_stiffness_diagonal() const {
    Vec3Field diag(n_vertices(), {0.0, 0.0, 0.0});
    for (const auto& e : ed_)
      for (int b = 0; b < 4; ++b) {
        const double g2 = detail::dot3(e.grad[b], e.grad[b]);
        for (int d = 0; d < 3; ++d) diag[e.v[b]][d] += e.volume * g2;
      }
    return diag;
  }

  std::vector<double> scalar_stiffness_diagonal() const {
    std::vector<double> diag(n_vertices(), 0.0);
    for (const auto& e : ed_)
      for (int b = 0; b < 4; ++b) diag[e.v[b]] += e.volume * detail::dot3(e.grad[b], e.grad[b]);
    return diag;
  }

  // L2 inner products through the consistent mass matrix.
  double l2_inner(const Vec3Field& u, const Vec3Field& w) const {
    check_size(u.size());
    check_size(w.size());
    long double acc = 0.0L;
    for (const auto& e : ed_) {
      std::array<double, 3> su{0, 0, 0}, sw{0, 0, 0};
      long double diag = 0.0L;
      for (int a = 0; a < 4; ++a)
        for (int d = 0; d < 3; ++d) {
          su[d] += u[e.v[a]][d];
          sw[d] += w[e.v[a]][d];
          diag += static_cast<long double>(u[e.v[a]][d]) * w[e.v[a]][d];
        }
      acc += e.volume / 20.0 *
             (static_cast<long double>(su[0]) * sw[0] + static_cast<long double>(su[1]) * sw[1] +
              static_cast<long double>(su[2]) * sw[2] + diag);
    }
    return static_cast<double>(acc);
  }

  double l2_inner_scalar(const std::vector<double>& u, const std::vector<double>& w) const {
    check_size(u.size());
    check_size(w.size());
    long double acc = 0.0L;
    for (const auto& e : ed_) {
      double su = 0.0, sw = 0.0;
      long double diag = 0.0L;
      for (int a = 0; a < 4; ++a) {
        su += u[e.v[a]];
        sw += w[e.v[a]];
        diag += static_cast<long double>(u[e.v[a]]) * w[e.v[a]];
      }
      acc += e.volume / 20.0 * (static_cast<long double>(su) * sw + diag);
    }
    return static_cast<double>(acc);
  }

 private:
  void check_size(std::size_t got) const {
    if (got != n_vertices()) throw std::invalid_argument("fem operator: field size mismatch");
  }

  template <typename Kernel>
  void elementwise_vec(const Vec3Field& x, Vec3Field& y, Kernel&& kernel) const {
    check_size(x.size());
    detail::parallel_ranges(ed_.size(), [&](std::size_t lo, std::size_t hi) {
      for (std::size_t t = lo; t < hi; ++t) {
        const ElementData& e = ed_[t];
        std::array<std::array<double, 3>, 4> u;
        for (int a = 0; a < 4; ++a) u[a] = x[e.v[a]];
        kernel(e, u, local_[t]);
      }
    });
    y.assign(n_vertices(), {0.0, 0.0, 0.0});
    for (std::size_t t = 0; t < ed_.size(); ++t)
      for (int b = 0; b < 4; ++b)
        for (int d = 0; d < 3; ++d) y[ed_[t].v[b]][d] += local_[t][b][d];
  }

  template <typename Kernel>
  void elementwise_scalar(const std::vector<double>& x, std::vector<double>& y,
                          Kernel&& kernel) const {
    check_size(x.size());
    detail::parallel_ranges(ed_.size(), [&](std::size_t lo, std::size_t hi) {
      for (std::size_t t = lo; t < hi; ++t) {
        const ElementData& e = ed_[t];
        std::array<double, 4> u;
        for (int a = 0; a < 4; ++a) u[a] = x[e.v[a]];
        std::array<double, 4> r;
        kernel(e, u, r);
        for (int b = 0; b < 4; ++b) local_[t][b][0] = r[b];
      }
    });
    y.assign(n_vertices(), 0.0);
    for (std::size_t t = 0; t < ed_.size(); ++t)
      for (int b = 0; b < 4; ++b) y[ed_[t].v[b]] += local_[t][b][0];
  }

  const Mesh* mesh_;
  std::vector<ElementData> ed_;
  mutable std::vector<std::array<std::array<double, 3>, 4>> local_;
};

}  // namespace macrolab::fem
