#pragma once

// Tetrahedral meshes of smooth star-shaped domains (ball, spheroid,
// ellipsoid): structured generation from a cube lattice through an
// area-preserving elliptical map, boundary data with exact analytic normals,
// an ASCII interchange format, and structural validation.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace macrolab::fem {

// ---------------------------------------------------------------------------
// Domain shapes: axis-aligned ellipsoids x'Ax = 1 described by semi-axes.
// ---------------------------------------------------------------------------
struct Shape {
  std::array<double, 3> semi_axes{1.0, 1.0, 1.0};

  static Shape ball() { return Shape{{1.0, 1.0, 1.0}}; }
  static Shape spheroid(double a, double c) { return Shape{{a, a, c}}; }
  static Shape ellipsoid(double a, double b, double c) { return Shape{{a, b, c}}; }
};

struct BoundaryFace {
  std::array<std::size_t, 3> v{};        // vertex indices
  std::array<double, 3> normal{};        // outward unit normal
  std::size_t parent_tet = 0;            // the unique adjacent tetrahedron
};

struct Mesh {
  std::vector<std::array<double, 3>> vertices;
  std::vector<std::array<std::size_t, 4>> tets;
  std::vector<BoundaryFace> boundary_faces;

  // Boundary vertex bookkeeping: boundary_index[v] is -1 for interior
  // vertices, otherwise an index into boundary_vertices / vertex_normals.
  std::vector<int> boundary_index;
  std::vector<std::size_t> boundary_vertices;
  std::vector<std::array<double, 3>> vertex_normals;  // outward unit normals
};

namespace detail {

inline double dot3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline std::array<double, 3> cross3(const std::array<double, 3>& a,
                                    const std::array<double, 3>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline double norm3(const std::array<double, 3>& a) { return std::sqrt(dot3(a, a)); }

inline double tet_volume(const std::array<double, 3>& p0, const std::array<double, 3>& p1,
                         const std::array<double, 3>& p2, const std::array<double, 3>& p3) {
  const std::array<double, 3> e1{p1[0] - p0[0], p1[1] - p0[1], p1[2] - p0[2]};
  const std::array<double, 3> e2{p2[0] - p0[0], p2[1] - p0[1], p2[2] - p0[2]};
  const std::array<double, 3> e3{p3[0] - p0[0], p3[1] - p0[1], p3[2] - p0[2]};
  return dot3(e1, cross3(e2, e3)) / 6.0;
}

inline double face_area(const std::array<double, 3>& p0, const std::array<double, 3>& p1,
                        const std::array<double, 3>& p2) {
  const std::array<double, 3> e1{p1[0] - p0[0], p1[1] - p0[1], p1[2] - p0[2]};
  const std::array<double, 3> e2{p2[0] - p0[0], p2[1] - p0[1], p2[2] - p0[2]};
  return 0.5 * norm3(cross3(e1, e2));
}

// Smooth bijection from the cube [-1,1]^3 onto the unit ball that carries the
// cube surface exactly onto the unit sphere.
inline std::array<double, 3> cube_to_ball(const std::array<double, 3>& c) {
  const double x = c[0], y = c[1], z = c[2];
  const auto safe_sqrt = [](double t) { return std::sqrt(t > 0.0 ? t : 0.0); };
  return {x * safe_sqrt(1.0 - y * y / 2.0 - z * z / 2.0 + y * y * z * z / 3.0),
          y * safe_sqrt(1.0 - z * z / 2.0 - x * x / 2.0 + z * z * x * x / 3.0),
          z * safe_sqrt(1.0 - x * x / 2.0 - y * y / 2.0 + x * x * y * y / 3.0)};
}

// Outward unit normal of the ellipsoid with the given semi-axes at (or near)
// a surface point.
inline std::array<double, 3> surface_normal(const Shape& shape, const std::array<double, 3>& p) {
  const auto& ax = shape.semi_axes;
  std::array<double, 3> n{p[0] / (ax[0] * ax[0]), p[1] / (ax[1] * ax[1]),
                          p[2] / (ax[2] * ax[2])};
  const double len = norm3(n);
  if (!(len > 0.0)) throw std::runtime_error("surface_normal: degenerate point");
  for (auto& x : n) x /= len;
  return n;
}

inline void fill_vertex_normal_slots(Mesh& mesh) {
  mesh.boundary_index.assign(mesh.vertices.size(), -1);
  mesh.boundary_vertices.clear();
  for (const auto& f : mesh.boundary_faces)
    for (std::size_t corner : f.v)
      if (mesh.boundary_index[corner] < 0) {
        mesh.boundary_index[corner] = static_cast<int>(mesh.boundary_vertices.size());
        mesh.boundary_vertices.push_back(corner);
      }
  mesh.vertex_normals.assign(mesh.boundary_vertices.size(), {0.0, 0.0, 0.0});
}

// Extracts the boundary faces (faces adjacent to exactly one tetrahedron) and
// checks that every face of the mesh is shared by at most two tetrahedra.
inline std::vector<std::pair<std::array<std::size_t, 3>, std::size_t>> boundary_face_set(
    const Mesh& mesh) {
  std::map<std::array<std::size_t, 3>, std::pair<int, std::size_t>> count;
  static const int local_faces[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
  for (std::size_t t = 0; t < mesh.tets.size(); ++t)
    for (const auto& lf : local_faces) {
      std::array<std::size_t, 3> key{mesh.tets[t][lf[0]], mesh.tets[t][lf[1]],
                                     mesh.tets[t][lf[2]]};
      if (key[0] > key[1]) std::swap(key[0], key[1]);
      if (key[1] > key[2]) std::swap(key[1], key[2]);
      if (key[0] > key[1]) std::swap(key[0], key[1]);
      auto [it, fresh] = count.emplace(key, std::make_pair(0, t));
      it->second.first += 1;
      if (!fresh) it->second.second = std::min(it->second.second, t);
      if (it->second.first > 2)
        throw std::invalid_argument("mesh: a face is shared by more than two tetrahedra");
    }
  std::vector<std::pair<std::array<std::size_t, 3>, std::size_t>> out;
  for (const auto& [key, val] : count)
    if (val.first == 1) out.emplace_back(key, val.second);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Structural validation of the mesh invariants.
// ---------------------------------------------------------------------------
inline void validate_mesh(const Mesh& mesh) {
  if (mesh.vertices.empty() || mesh.tets.empty() || mesh.boundary_faces.empty())
    throw std::invalid_argument("mesh: empty vertex, tet, or boundary list");
  for (const auto& t : mesh.tets) {
    for (std::size_t idx : t)
      if (idx >= mesh.vertices.size()) throw std::invalid_argument("mesh: tet index out of range");
    const double vol = detail::tet_volume(mesh.vertices[t[0]], mesh.vertices[t[1]],
                                          mesh.vertices[t[2]], mesh.vertices[t[3]]);
    if (!(vol > 0.0)) throw std::invalid_argument("mesh: nonpositive tetrahedron volume");
  }

  // The listed boundary faces must be exactly the faces adjacent to one tet.
  auto expected = detail::boundary_face_set(mesh);
  if (expected.size() != mesh.boundary_faces.size())
    throw std::invalid_argument("mesh: boundary faces do not tile the surface exactly once");
  std::map<std::array<std::size_t, 3>, std::size_t> expect_map(expected.begin(), expected.end());
  for (const auto& f : mesh.boundary_faces) {
    std::array<std::size_t, 3> key = f.v;
    if (key[0] > key[1]) std::swap(key[0], key[1]);
    if (key[1] > key[2]) std::swap(key[1], key[2]);
    if (key[0] > key[1]) std::swap(key[0], key[1]);
    auto it = expect_map.find(key);
    if (it == expect_map.end())
      throw std::invalid_argument("mesh: listed boundary face is not on the surface");
    if (f.parent_tet != it->second)
      throw std::invalid_argument("mesh: boundary face parent tetrahedron mismatch");
    expect_map.erase(it);

    const double len = detail::norm3(f.normal);
    if (std::abs(len - 1.0) > 1e-12)
      throw std::invalid_argument("mesh: boundary face normal is not unit length");

    // Outward: the normal points away from the parent tet centroid.
    const auto& tet = mesh.tets[f.parent_tet];
    std::array<double, 3> tc{0, 0, 0}, fc{0, 0, 0};
    for (int k = 0; k < 4; ++k)
      for (int d = 0; d < 3; ++d) tc[d] += mesh.vertices[tet[k]][d] / 4.0;
    for (int k = 0; k < 3; ++k)
      for (int d = 0; d < 3; ++d) fc[d] += mesh.vertices[f.v[k]][d] / 3.0;
    const std::array<double, 3> away{fc[0] - tc[0], fc[1] - tc[1], fc[2] - tc[2]};
    if (!(detail::dot3(away, f.normal) > 0.0))
      throw std::invalid_argument("mesh: boundary face normal is not outward");
  }
  if (!expect_map.empty())
    throw std::invalid_argument("mesh: boundary faces do not tile the surface exactly once");

  if (mesh.boundary_index.size() != mesh.vertices.size() ||
      mesh.vertex_normals.size() != mesh.boundary_vertices.size())
    throw std::invalid_argument("mesh: inconsistent boundary vertex bookkeeping");
  for (const auto& n : mesh.vertex_normals)
    if (std::abs(detail::norm3(n) - 1.0) > 1e-12)
      throw std::invalid_argument("mesh: boundary vertex normal is not unit length");
}

// ---------------------------------------------------------------------------
// Structured mesh generation.  Refinement level L uses (4 + 2L)^3 lattice
// cells, each split into six tetrahedra sharing the cell's main diagonal, so
// successive levels refine smoothly at desk scale.
// ---------------------------------------------------------------------------
inline Mesh gen_mesh(const Shape& shape, int level) {
  for (double ax : shape.semi_axes)
    if (!(ax > 0.0) || !std::isfinite(ax))
      throw std::invalid_argument("gen_mesh: degenerate axes");
  if (level < 0 || level > 8) throw std::invalid_argument("gen_mesh: refinement level out of range");

  const int n = 4 + 2 * level;  // lattice cells per axis
  const int m = n + 1;          // lattice vertices per axis
  Mesh mesh;
  mesh.vertices.resize(static_cast<std::size_t>(m) * m * m);

  const auto vid = [m](int i, int j, int k) {
    return (static_cast<std::size_t>(i) * m + j) * m + k;
  };

  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        std::array<double, 3> c{2.0 * i / n - 1.0, 2.0 * j / n - 1.0, 2.0 * k / n - 1.0};
        std::array<double, 3> p = detail::cube_to_ball(c);
        const bool on_surface = (i == 0 || i == n || j == 0 || j == n || k == 0 || k == n);
        if (on_surface) {
          // Project exactly onto the unit sphere before axis scaling.
          const double r = detail::norm3(p);
          for (auto& x : p) x /= r;
        }
        for (int d = 0; d < 3; ++d) p[d] *= shape.semi_axes[d];
        mesh.vertices[vid(i, j, k)] = p;
      }

  // Six path tetrahedra per cell, all sharing the main diagonal; odd
  // permutations are reordered so every tet is positively oriented.
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                  {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  static const int parity[6] = {1, -1, -1, 1, 1, -1};
  mesh.tets.reserve(static_cast<std::size_t>(n) * n * n * 6);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int q = 0; q < 6; ++q) {
          int corner[3] = {i, j, k};
          std::array<std::size_t, 4> tet;
          tet[0] = vid(corner[0], corner[1], corner[2]);
          for (int step = 0; step < 3; ++step) {
            corner[perms[q][step]] += 1;
            tet[step + 1] = vid(corner[0], corner[1], corner[2]);
          }
          if (parity[q] < 0) std::swap(tet[2], tet[3]);
          const double vol = detail::tet_volume(mesh.vertices[tet[0]], mesh.vertices[tet[1]],
                                                mesh.vertices[tet[2]], mesh.vertices[tet[3]]);
          if (!(vol > 0.0)) throw std::runtime_error("gen_mesh: degenerate mapped tetrahedron");
          mesh.tets.push_back(tet);
        }

  // Boundary faces carry the analytic outward normal at the face centroid.
  for (const auto& [key, parent] : detail::boundary_face_set(mesh)) {
    BoundaryFace f;
    f.v = key;
    f.parent_tet = parent;
    std::array<double, 3> centroid{0, 0, 0};
    for (std::size_t corner : key)
      for (int d = 0; d < 3; ++d) centroid[d] += mesh.vertices[corner][d] / 3.0;
    f.normal = detail::surface_normal(shape, centroid);
    mesh.boundary_faces.push_back(f);
  }

  // Boundary vertices carry the exact analytic normal at the vertex itself.
  detail::fill_vertex_normal_slots(mesh);
  for (std::size_t b = 0; b < mesh.boundary_vertices.size(); ++b)
    mesh.vertex_normals[b] = detail::surface_normal(shape, mesh.vertices[mesh.boundary_vertices[b]]);

  validate_mesh(mesh);
  return mesh;
}

// Total area of the boundary triangulation (polyhedral surface area).
inline double surface_area(const Mesh& mesh) {
  long double acc = 0.0L;
  for (const auto& f : mesh.boundary_faces)
    acc += detail::face_area(mesh.vertices[f.v[0]], mesh.vertices[f.v[1]], mesh.vertices[f.v[2]]);
  return static_cast<double>(acc);
}

// ---------------------------------------------------------------------------
// ASCII interchange format.  Header `msh3 <nv> <nt> <nb>`, then `v x y z`
// vertex lines, `t i j k l` tetrahedron lines, and `b i j k nx ny nz`
// boundary-face lines, all indices zero-based.
// ---------------------------------------------------------------------------
inline void write_msh3(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_msh3: cannot open " + path);
  out << "msh3 " << mesh.vertices.size() << ' ' << mesh.tets.size() << ' '
      << mesh.boundary_faces.size() << '\n';
  char buf[256];
  for (const auto& p : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", p[0], p[1], p[2]);
    out << buf;
  }
  for (const auto& t : mesh.tets)
    out << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << '\n';
  for (const auto& f : mesh.boundary_faces) {
    std::snprintf(buf, sizeof buf, "b %zu %zu %zu %.17g %.17g %.17g\n", f.v[0], f.v[1], f.v[2],
                  f.normal[0], f.normal[1], f.normal[2]);
    out << buf;
  }
  if (!out) throw std::runtime_error("write_msh3: write failed for " + path);
}

// Reads the ASCII format and reconstructs derived boundary data.  Vertex
// normals are rebuilt as the area-weighted average of the incident face
// normals (generated meshes carry exact analytic vertex normals instead).
inline Mesh read_msh3(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_msh3: cannot open " + path);
  std::string tag;
  std::size_t nv = 0, nt = 0, nb = 0;
  if (!(in >> tag >> nv >> nt >> nb) || tag != "msh3")
    throw std::invalid_argument("read_msh3: malformed header");

  Mesh mesh;
  mesh.vertices.resize(nv);
  mesh.tets.resize(nt);
  mesh.boundary_faces.resize(nb);
  for (std::size_t i = 0; i < nv; ++i) {
    auto& p = mesh.vertices[i];
    if (!(in >> tag >> p[0] >> p[1] >> p[2]) || tag != "v")
      throw std::invalid_argument("read_msh3: malformed vertex line");
  }
  for (std::size_t i = 0; i < nt; ++i) {
    auto& t = mesh.tets[i];
    if (!(in >> tag >> t[0] >> t[1] >> t[2] >> t[3]) || tag != "t")
      throw std::invalid_argument("read_msh3: malformed tetrahedron line");
  }
  std::map<std::array<std::size_t, 3>, std::size_t> parents;
  for (const auto& [key, parent] : detail::boundary_face_set(mesh)) parents.emplace(key, parent);
  for (std::size_t i = 0; i < nb; ++i) {
    auto& f = mesh.boundary_faces[i];
    if (!(in >> tag >> f.v[0] >> f.v[1] >> f.v[2] >> f.normal[0] >> f.normal[1] >> f.normal[2]) ||
        tag != "b")
      throw std::invalid_argument("read_msh3: malformed boundary line");
    std::array<std::size_t, 3> key = f.v;
    if (key[0] > key[1]) std::swap(key[0], key[1]);
    if (key[1] > key[2]) std::swap(key[1], key[2]);
    if (key[0] > key[1]) std::swap(key[0], key[1]);
    auto it = parents.find(key);
    if (it == parents.end())
      throw std::invalid_argument("read_msh3: boundary face is not on the surface");
    f.parent_tet = it->second;
  }

  detail::fill_vertex_normal_slots(mesh);
  std::vector<std::array<double, 3>> acc(mesh.boundary_vertices.size(), {0.0, 0.0, 0.0});
  for (const auto& f : mesh.boundary_faces) {
    const double area =
        detail::face_area(mesh.vertices[f.v[0]], mesh.vertices[f.v[1]], mesh.vertices[f.v[2]]);
    for (std::size_t corner : f.v) {
      const int slot = mesh.boundary_index[corner];
      for (int d = 0; d < 3; ++d) acc[slot][d] += area * f.normal[d];
    }
  }
  for (std::size_t b = 0; b < acc.size(); ++b) {
    const double len = detail::norm3(acc[b]);
    if (!(len > 0.0)) throw std::invalid_argument("read_msh3: isolated boundary vertex");
    for (int d = 0; d < 3; ++d) mesh.vertex_normals[b][d] = acc[b][d] / len;
  }

  validate_mesh(mesh);
  return mesh;
}

}  // namespace macrolab::fem
