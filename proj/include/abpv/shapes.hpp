#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "abpv/common.hpp"
#include "abpv/mesh.hpp"

namespace abpv {

using AnyMesh = std::variant<DomainMesh, SurfaceMesh, CurveMesh>;

/// Shape parameters by name; generators read what they need and fall back to
/// documented defaults.
using ShapeParams = std::map<std::string, double>;

namespace shapedetail {

inline double param(const ShapeParams& p, const std::string& key, double def) {
  auto it = p.find(key);
  return it == p.end() ? def : it->second;
}

/// Triangulates the annular band between two concentric vertex rings by a
/// two-pointer merge over angles. Handles the degenerate inner ring (a single
/// center vertex) uniformly. Emits counterclockwise triangles.
inline void merge_rings(const std::vector<int>& inner, const std::vector<int>& outer,
                        std::vector<Eigen::Vector3i>* tris) {
  const int na = static_cast<int>(inner.size());
  const int nb = static_cast<int>(outer.size());
  const int na_steps = na == 1 ? 0 : na;  // a center vertex has no own advance
  int ia = 0, ib = 0;
  while (ia < na_steps || ib < nb) {
    bool advance_outer;
    if (ib >= nb) {
      advance_outer = false;
    } else if (ia >= na || na == 1) {
      advance_outer = true;
    } else {
      advance_outer = (ib + 1) * na <= (ia + 1) * nb;  // compare next angles
    }
    if (advance_outer) {
      tris->emplace_back(inner[ia % na], outer[ib % nb], outer[(ib + 1) % nb]);
      ++ib;
    } else {
      tris->emplace_back(inner[ia % na], outer[ib % nb], inner[(ia + 1) % na]);
      ++ia;
    }
  }
}

inline int disk_rings(int level) { return std::max(1, (3 << level) / 2); }

}  // namespace shapedetail

/// Radially meshed disk of the given radius: ring j carries 6j vertices, so
/// triangle quality stays uniform toward the center.
inline DomainMesh make_disk(double radius, int level) {
  require(radius > 0.0, "make_disk: radius must be positive");
  require(level >= 0, "make_disk: refinement level must be >= 0");
  const int rings = shapedetail::disk_rings(level);
  const int s = 6;
  std::vector<Eigen::Vector2d> verts;
  std::vector<std::vector<int>> ring_ids(rings + 1);
  verts.emplace_back(0.0, 0.0);
  ring_ids[0] = {0};
  for (int j = 1; j <= rings; ++j) {
    double r = radius * j / rings;
    int n = s * j;
    for (int i = 0; i < n; ++i) {
      double a = 2.0 * M_PI * i / n;
      ring_ids[j].push_back(static_cast<int>(verts.size()));
      verts.emplace_back(r * std::cos(a), r * std::sin(a));
    }
  }
  std::vector<Eigen::Vector3i> tris;
  for (int j = 0; j < rings; ++j) shapedetail::merge_rings(ring_ids[j], ring_ids[j + 1], &tris);

  DomainMesh mesh;
  mesh.vertices.resize(verts.size(), 2);
  for (size_t i = 0; i < verts.size(); ++i) mesh.vertices.row(i) = verts[i].transpose();
  mesh.triangles.resize(tris.size(), 3);
  for (size_t i = 0; i < tris.size(); ++i) mesh.triangles.row(i) = tris[i].transpose();
  finalize_domain_mesh(mesh);
  return mesh;
}

/// Axis-aligned unit-structured square [0, side]^2.
inline DomainMesh make_square(double side, int level) {
  require(side > 0.0, "make_square: side must be positive");
  const int k = 4 << level;
  DomainMesh mesh;
  mesh.vertices.resize((k + 1) * (k + 1), 2);
  for (int j = 0; j <= k; ++j) {
    for (int i = 0; i <= k; ++i) {
      mesh.vertices.row(j * (k + 1) + i) << side * i / k, side * j / k;
    }
  }
  mesh.triangles.resize(2 * k * k, 3);
  int t = 0;
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < k; ++i) {
      int v00 = j * (k + 1) + i, v10 = v00 + 1, v01 = v00 + (k + 1), v11 = v01 + 1;
      mesh.triangles.row(t++) << v00, v10, v11;
      mesh.triangles.row(t++) << v00, v11, v01;
    }
  }
  finalize_domain_mesh(mesh);
  return mesh;
}

inline DomainMesh make_annulus(double r_in, double r_out, int level) {
  require(0.0 < r_in && r_in < r_out, "make_annulus: need 0 < r_in < r_out");
  const int n = 12 << level;
  const int rings =
      std::max(2, static_cast<int>(std::lround(n * (r_out - r_in) / (2.0 * M_PI * r_out))));
  DomainMesh mesh;
  mesh.vertices.resize((rings + 1) * n, 2);
  for (int j = 0; j <= rings; ++j) {
    double r = r_in + (r_out - r_in) * j / rings;
    for (int i = 0; i < n; ++i) {
      double a = 2.0 * M_PI * i / n;
      mesh.vertices.row(j * n + i) << r * std::cos(a), r * std::sin(a);
    }
  }
  mesh.triangles.resize(2 * rings * n, 3);
  int t = 0;
  for (int j = 0; j < rings; ++j) {
    for (int i = 0; i < n; ++i) {
      int i1 = (i + 1) % n;
      int v00 = j * n + i, v10 = j * n + i1, v01 = (j + 1) * n + i, v11 = (j + 1) * n + i1;
      mesh.triangles.row(t++) << v00, v11, v10;
      mesh.triangles.row(t++) << v00, v01, v11;
    }
  }
  finalize_domain_mesh(mesh);
  return mesh;
}

/// Icosphere: subdivided icosahedron reprojected to the sphere of the given
/// radius. `level` subdivision passes quadruple the face count each.
inline SurfaceMesh make_icosphere(double radius, int level, int ambient_dim = 3) {
  require(radius > 0.0, "make_icosphere: radius must be positive");
  require(ambient_dim == 3 || ambient_dim == 4, "make_icosphere: ambient dim must be 3 or 4");
  const double phi = 0.5 * (1.0 + std::sqrt(5.0));
  std::vector<Eigen::Vector3d> verts = {
      {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& v : verts) v.normalize();
  std::vector<Eigen::Vector3i> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int pass = 0; pass < level; ++pass) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      int id = static_cast<int>(verts.size());
      verts.push_back(((verts[a] + verts[b]) * 0.5).normalized());
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<Eigen::Vector3i> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }
  SurfaceMesh mesh;
  mesh.vertices = Eigen::MatrixXd::Zero(verts.size(), ambient_dim);
  for (size_t i = 0; i < verts.size(); ++i) {
    mesh.vertices.block(i, 0, 1, 3) = (radius * verts[i]).transpose();
  }
  mesh.triangles.resize(faces.size(), 3);
  for (size_t i = 0; i < faces.size(); ++i) mesh.triangles.row(i) = faces[i].transpose();
  finalize_surface_mesh(mesh);
  return mesh;
}

/// Flat disk embedded in R^4 as (x, y, 0, 0): totally geodesic codimension-2
/// test surface.
inline SurfaceMesh make_flat_disk4(double radius, int level) {
  DomainMesh disk = make_disk(radius, level);
  SurfaceMesh mesh;
  mesh.vertices = Eigen::MatrixXd::Zero(disk.num_vertices(), 4);
  mesh.vertices.block(0, 0, disk.num_vertices(), 2) = disk.vertices;
  mesh.triangles = disk.triangles;
  finalize_surface_mesh(mesh);
  return mesh;
}

/// Spherical cap of polar angle [0, pi/2] on the unit 2-sphere, embedded in
/// R^4; boundary is the equator.
inline SurfaceMesh make_hemisphere4(double radius, int level) {
  require(radius > 0.0, "make_hemisphere4: radius must be positive");
  const int rings = std::max(2, 2 * shapedetail::disk_rings(level));
  const int s = 6;
  std::vector<Eigen::Vector4d> verts;
  std::vector<std::vector<int>> ring_ids(rings + 1);
  verts.emplace_back(0.0, 0.0, radius, 0.0);
  ring_ids[0] = {0};
  for (int j = 1; j <= rings; ++j) {
    double theta = 0.5 * M_PI * j / rings;
    int n = s * j;
    for (int i = 0; i < n; ++i) {
      double a = 2.0 * M_PI * i / n;
      ring_ids[j].push_back(static_cast<int>(verts.size()));
      verts.emplace_back(radius * std::sin(theta) * std::cos(a),
                         radius * std::sin(theta) * std::sin(a), radius * std::cos(theta), 0.0);
    }
  }
  std::vector<Eigen::Vector3i> tris;
  for (int j = 0; j < rings; ++j) shapedetail::merge_rings(ring_ids[j], ring_ids[j + 1], &tris);
  SurfaceMesh mesh;
  mesh.vertices.resize(verts.size(), 4);
  for (size_t i = 0; i < verts.size(); ++i) mesh.vertices.row(i) = verts[i].transpose();
  mesh.triangles.resize(tris.size(), 3);
  for (size_t i = 0; i < tris.size(); ++i) mesh.triangles.row(i) = tris[i].transpose();
  finalize_surface_mesh(mesh);
  return mesh;
}

inline SurfaceMesh make_torus(double ring_radius, double tube_radius, int level) {
  require(ring_radius > tube_radius && tube_radius > 0.0,
          "make_torus: need ring_radius > tube_radius > 0");
  const int nu = 16 << level, nv = 8 << level;
  SurfaceMesh mesh;
  mesh.vertices.resize(nu * nv, 3);
  for (int iu = 0; iu < nu; ++iu) {
    double u = 2.0 * M_PI * iu / nu;
    for (int iv = 0; iv < nv; ++iv) {
      double v = 2.0 * M_PI * iv / nv;
      double w = ring_radius + tube_radius * std::cos(v);
      mesh.vertices.row(iu * nv + iv) << w * std::cos(u), w * std::sin(u),
          tube_radius * std::sin(v);
    }
  }
  mesh.triangles.resize(2 * nu * nv, 3);
  int t = 0;
  for (int iu = 0; iu < nu; ++iu) {
    int iu1 = (iu + 1) % nu;
    for (int iv = 0; iv < nv; ++iv) {
      int iv1 = (iv + 1) % nv;
      int v00 = iu * nv + iv, v10 = iu1 * nv + iv, v01 = iu * nv + iv1, v11 = iu1 * nv + iv1;
      mesh.triangles.row(t++) << v00, v10, v11;
      mesh.triangles.row(t++) << v00, v11, v01;
    }
  }
  finalize_surface_mesh(mesh);
  return mesh;
}

inline CurveMesh make_circle(double radius, int n_vertices, int ambient_dim = 3) {
  require(radius > 0.0 && n_vertices >= 3, "make_circle: bad parameters");
  CurveMesh mesh;
  mesh.closed = true;
  mesh.vertices = Eigen::MatrixXd::Zero(n_vertices, ambient_dim);
  for (int i = 0; i < n_vertices; ++i) {
    double a = 2.0 * M_PI * i / n_vertices;
    mesh.vertices(i, 0) = radius * std::cos(a);
    mesh.vertices(i, 1) = radius * std::sin(a);
  }
  finalize_curve_mesh(mesh);
  return mesh;
}

inline CurveMesh make_ellipse(double a, double b, int n_vertices, int ambient_dim = 3) {
  require(a > 0.0 && b > 0.0 && n_vertices >= 3, "make_ellipse: bad parameters");
  CurveMesh mesh;
  mesh.closed = true;
  mesh.vertices = Eigen::MatrixXd::Zero(n_vertices, ambient_dim);
  for (int i = 0; i < n_vertices; ++i) {
    double t = 2.0 * M_PI * i / n_vertices;
    mesh.vertices(i, 0) = a * std::cos(t);
    mesh.vertices(i, 1) = b * std::sin(t);
  }
  finalize_curve_mesh(mesh);
  return mesh;
}

/// (p, q) torus knot on the torus with the given radii; (2, 3) is a trefoil,
/// whose total curvature exceeds 4 pi by the polygonal Fary-Milnor theorem.
inline CurveMesh make_torus_knot(int p, int q, double ring_radius, double tube_radius,
                                 int n_vertices) {
  require(p >= 1 && q >= 1 && n_vertices >= 12, "make_torus_knot: bad parameters");
  CurveMesh mesh;
  mesh.closed = true;
  mesh.vertices.resize(n_vertices, 3);
  for (int i = 0; i < n_vertices; ++i) {
    double t = 2.0 * M_PI * i / n_vertices;
    double w = ring_radius + tube_radius * std::cos(q * t);
    mesh.vertices.row(i) << w * std::cos(p * t), w * std::sin(p * t),
        tube_radius * std::sin(q * t);
  }
  finalize_curve_mesh(mesh);
  return mesh;
}

/// Named shape factory backing the CLI geometry specs. Refinement doubles the
/// resolution per level.
inline AnyMesh builtin_shape(const std::string& name, const ShapeParams& params, int refinement) {
  using shapedetail::param;
  require(refinement >= 0, "builtin_shape: refinement must be >= 0");
  if (name == "disk") return make_disk(param(params, "radius", 1.0), refinement);
  if (name == "square") return make_square(param(params, "side", 1.0), refinement);
  if (name == "annulus") {
    return make_annulus(param(params, "inner_radius", 0.5), param(params, "outer_radius", 1.0),
                        refinement);
  }
  if (name == "icosphere") return make_icosphere(param(params, "radius", 1.0), refinement, 3);
  if (name == "sphere4") return make_icosphere(param(params, "radius", 1.0), refinement, 4);
  if (name == "flatdisk4") return make_flat_disk4(param(params, "radius", 1.0), refinement);
  if (name == "hemisphere4") return make_hemisphere4(param(params, "radius", 1.0), refinement);
  if (name == "torus") {
    return make_torus(param(params, "ring_radius", 2.0), param(params, "tube_radius", 1.0),
                      refinement);
  }
  if (name == "circle") {
    int n = static_cast<int>(param(params, "n_vertices", 64 << refinement));
    return make_circle(param(params, "radius", 1.0), n,
                       static_cast<int>(param(params, "dim", 3)));
  }
  if (name == "ellipse") {
    int n = static_cast<int>(param(params, "n_vertices", 64 << refinement));
    return make_ellipse(param(params, "a", 2.0), param(params, "b", 1.0), n,
                        static_cast<int>(param(params, "dim", 3)));
  }
  if (name == "torus_knot") {
    int n = static_cast<int>(param(params, "n_vertices", 256 << refinement));
    return make_torus_knot(static_cast<int>(param(params, "p", 2)),
                           static_cast<int>(param(params, "q", 3)),
                           param(params, "ring_radius", 2.0), param(params, "tube_radius", 1.0),
                           n);
  }
  fail("builtin_shape: unknown shape name '", name, "'");
}

}  // namespace abpv
