#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <utility>
#include <vector>

#include "abpv/common.hpp"

namespace abpv {

/// One scalar per vertex.
using ScalarField = Eigen::VectorXd;

/// One ambient vector per face (row-major: F x d) or per vertex (V x d).
using VectorField = Eigen::MatrixXd;

/// Per-vertex symmetric matrices expressed in the vertex tangent frame,
/// with a validity flag (rank-deficient fit patches are excluded).
struct SymmetricField {
  std::vector<Eigen::Matrix2d> mats;
  std::vector<char> valid;

  int size() const { return static_cast<int>(mats.size()); }
};

struct BoundaryEdge {
  int a = -1;            // directed tail (triangle orientation)
  int b = -1;            // directed head
  int face = -1;         // unique adjacent triangle
  Eigen::VectorXd conormal;  // outward unit conormal, in the face plane
  double length = 0.0;
};

namespace meshdetail {

inline double face_area_of(const Eigen::MatrixXd& V, int i, int j, int k) {
  Eigen::VectorXd e1 = V.row(j) - V.row(i);
  Eigen::VectorXd e2 = V.row(k) - V.row(i);
  double g11 = e1.squaredNorm(), g22 = e2.squaredNorm(), g12 = e1.dot(e2);
  double det = g11 * g22 - g12 * g12;
  return det > 0.0 ? 0.5 * std::sqrt(det) : 0.0;
}

struct Connectivity {
  std::vector<std::vector<int>> vertex_neighbors;  // sorted one-rings
  std::vector<std::vector<int>> vertex_faces;      // sorted incident faces
  std::vector<BoundaryEdge> boundary_edges;
  std::vector<std::vector<int>> boundary_loops;
  std::vector<char> is_boundary_vertex;
  double mean_edge_length = 0.0;
};

/// Builds adjacency and validates manifoldness + orientation consistency:
/// each directed edge occurs at most once, each undirected edge bounds at
/// most two triangles.
inline Connectivity build_connectivity(const Eigen::MatrixXd& V, const Eigen::MatrixXi& F) {
  const int nv = static_cast<int>(V.rows());
  const int nf = static_cast<int>(F.rows());
  Connectivity c;
  c.vertex_neighbors.resize(nv);
  c.vertex_faces.resize(nv);
  c.is_boundary_vertex.assign(nv, 0);

  std::map<std::pair<int, int>, int> directed;  // (a,b) -> face
  for (int f = 0; f < nf; ++f) {
    for (int e = 0; e < 3; ++e) {
      int a = F(f, e), b = F(f, (e + 1) % 3);
      require(a >= 0 && a < nv && b >= 0 && b < nv, "mesh: face ", f,
              " references vertex out of range");
      require(a != b, "mesh: face ", f, " has a repeated vertex");
      auto ins = directed.emplace(std::make_pair(a, b), f);
      require(ins.second, "mesh: non-manifold or inconsistently oriented edge (", a, ", ", b,
              ") shared by faces ", ins.first->second, " and ", f);
      c.vertex_faces[a].push_back(f);
    }
  }
  for (auto& vf : c.vertex_faces) {
    std::sort(vf.begin(), vf.end());
    vf.erase(std::unique(vf.begin(), vf.end()), vf.end());
  }

  KahanSum edge_len;
  int edge_count = 0;
  for (const auto& [ab, f] : directed) {
    auto [a, b] = ab;
    if (a < b || !directed.count({b, a})) {
      edge_len.add((V.row(a) - V.row(b)).norm());
      ++edge_count;
    }
    c.vertex_neighbors[a].push_back(b);
    c.vertex_neighbors[b].push_back(a);
  }
  c.mean_edge_length = edge_count > 0 ? edge_len.value() / edge_count : 0.0;
  for (auto& vn : c.vertex_neighbors) {
    std::sort(vn.begin(), vn.end());
    vn.erase(std::unique(vn.begin(), vn.end()), vn.end());
  }

  // Boundary edges: directed edges whose reverse is absent. Walk them into
  // loops; orientation follows the triangles, so the domain stays on the left.
  std::map<int, std::pair<int, int>> next_of;  // a -> (b, face)
  for (const auto& [ab, f] : directed) {
    if (!directed.count({ab.second, ab.first})) {
      auto ins = next_of.emplace(ab.first, std::make_pair(ab.second, f));
      require(ins.second, "mesh: non-manifold boundary at vertex ", ab.first);
      c.is_boundary_vertex[ab.first] = 1;
      c.is_boundary_vertex[ab.second] = 1;
    }
  }
  std::map<int, std::pair<int, int>> remaining = next_of;
  while (!remaining.empty()) {
    int start = remaining.begin()->first;
    std::vector<int> loop;
    int cur = start;
    do {
      auto it = remaining.find(cur);
      require(it != remaining.end(), "mesh: open boundary chain at vertex ", cur);
      loop.push_back(cur);
      BoundaryEdge be;
      be.a = cur;
      be.b = it->second.first;
      be.face = it->second.second;
      be.length = (V.row(be.a) - V.row(be.b)).norm();
      c.boundary_edges.push_back(be);
      cur = it->second.first;
      remaining.erase(it);
    } while (cur != start);
    c.boundary_loops.push_back(std::move(loop));
  }
  std::sort(c.boundary_edges.begin(), c.boundary_edges.end(),
            [](const BoundaryEdge& x, const BoundaryEdge& y) {
              return std::make_pair(x.a, x.b) < std::make_pair(y.a, y.b);
            });
  return c;
}

/// In-plane unit conormal of a boundary edge, perpendicular to the edge and
/// pointing away from the triangle's third vertex.
inline Eigen::VectorXd edge_conormal(const Eigen::MatrixXd& V, const Eigen::MatrixXi& F,
                                     const BoundaryEdge& be) {
  int cidx = -1;
  for (int e = 0; e < 3; ++e) {
    int v = F(be.face, e);
    if (v != be.a && v != be.b) cidx = v;
  }
  Eigen::VectorXd edge = V.row(be.b) - V.row(be.a);
  Eigen::VectorXd w = V.row(cidx) - V.row(be.a);
  Eigen::VectorXd ehat = edge.normalized();
  Eigen::VectorXd eta = -(w - w.dot(ehat) * ehat);
  double norm = eta.norm();
  require(norm > 0.0, "mesh: degenerate boundary triangle ", be.face);
  return eta / norm;
}

inline void fix_eigenvector_sign(Eigen::VectorXd& v) {
  int imax = 0;
  for (int i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
  }
  if (v[imax] < 0.0) v = -v;
}

}  // namespace meshdetail

/// Planar computational domain: triangulated region of R^2 with positively
/// oriented triangles and outward boundary conormals.
struct DomainMesh {
  Eigen::MatrixXd vertices;   // V x 2
  Eigen::MatrixXi triangles;  // F x 3, counterclockwise
  std::vector<std::vector<int>> boundary_loops;
  std::vector<BoundaryEdge> boundary_edges;
  std::vector<char> is_boundary_vertex;
  std::vector<std::vector<int>> vertex_neighbors;
  std::vector<std::vector<int>> vertex_faces;

  Eigen::VectorXd face_area;              // per face
  Eigen::VectorXd vertex_area;            // lumped (third of incident faces)
  Eigen::VectorXd vertex_boundary_length; // lumped boundary measure, 0 inside
  double mean_edge_length = 0.0;

  int num_vertices() const { return static_cast<int>(vertices.rows()); }
  int num_faces() const { return static_cast<int>(triangles.rows()); }
  int dim() const { return 2; }
};

/// Embedded surface: 2-dimensional triangulated submanifold of R^3 or R^4
/// with per-vertex orthonormal tangent/normal frames.
struct SurfaceMesh {
  Eigen::MatrixXd vertices;   // V x d, d in {3, 4}
  Eigen::MatrixXi triangles;  // F x 3, consistently oriented
  std::vector<std::vector<int>> boundary_loops;
  std::vector<BoundaryEdge> boundary_edges;
  std::vector<char> is_boundary_vertex;
  std::vector<std::vector<int>> vertex_neighbors;
  std::vector<std::vector<int>> vertex_faces;

  // Row r of tangent_frame[v] is the r-th tangent basis vector; likewise for
  // the (d - 2)-row normal frame. Orthonormal, tangent perpendicular to normal.
  std::vector<Eigen::MatrixXd> tangent_frame;  // 2 x d
  std::vector<Eigen::MatrixXd> normal_frame;   // (d-2) x d

  Eigen::VectorXd face_area;
  Eigen::VectorXd vertex_area;
  Eigen::VectorXd vertex_boundary_length;
  double mean_edge_length = 0.0;

  int num_vertices() const { return static_cast<int>(vertices.rows()); }
  int num_faces() const { return static_cast<int>(triangles.rows()); }
  int dim() const { return static_cast<int>(vertices.cols()); }
  int codim() const { return dim() - 2; }
  bool closed() const { return boundary_loops.empty(); }
};

/// Polyline curve in R^2 or R^3; vertices in path order, consecutive pairs
/// joined by edges, optionally closed.
struct CurveMesh {
  Eigen::MatrixXd vertices;  // V x d, d in {2, 3}
  bool closed = false;

  Eigen::VectorXd vertex_length;  // lumped edge measure
  double mean_edge_length = 0.0;

  int num_vertices() const { return static_cast<int>(vertices.rows()); }
  int num_edges() const { return closed ? num_vertices() : num_vertices() - 1; }
  int dim() const { return static_cast<int>(vertices.cols()); }
  int codim() const { return dim() - 1; }

  int edge_tail(int e) const { return e; }
  int edge_head(int e) const { return (e + 1) % num_vertices(); }
};

/// Validates and finalizes a planar mesh: orientation, areas, boundary
/// structure, outward conormals.
inline void finalize_domain_mesh(DomainMesh& mesh) {
  require(mesh.vertices.cols() == 2, "DomainMesh: vertices must live in R^2");
  const int nv = mesh.num_vertices();
  const int nf = mesh.num_faces();
  require(nf > 0, "DomainMesh: no triangles");

  mesh.face_area.resize(nf);
  for (int f = 0; f < nf; ++f) {
    Eigen::Vector2d a = mesh.vertices.row(mesh.triangles(f, 0));
    Eigen::Vector2d b = mesh.vertices.row(mesh.triangles(f, 1));
    Eigen::Vector2d c = mesh.vertices.row(mesh.triangles(f, 2));
    double signed_area = 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
    require(signed_area > 0.0, "DomainMesh: face ", f,
            " is degenerate or clockwise (signed area ", signed_area, ")");
    mesh.face_area[f] = signed_area;
  }

  auto conn = meshdetail::build_connectivity(mesh.vertices, mesh.triangles);
  mesh.vertex_neighbors = std::move(conn.vertex_neighbors);
  mesh.vertex_faces = std::move(conn.vertex_faces);
  mesh.boundary_edges = std::move(conn.boundary_edges);
  mesh.boundary_loops = std::move(conn.boundary_loops);
  mesh.is_boundary_vertex = std::move(conn.is_boundary_vertex);
  mesh.mean_edge_length = conn.mean_edge_length;
  require(!mesh.boundary_loops.empty(), "DomainMesh: a compact planar domain needs a boundary");

  mesh.vertex_area = Eigen::VectorXd::Zero(nv);
  for (int f = 0; f < nf; ++f) {
    for (int e = 0; e < 3; ++e) mesh.vertex_area[mesh.triangles(f, e)] += mesh.face_area[f] / 3.0;
  }
  mesh.vertex_boundary_length = Eigen::VectorXd::Zero(nv);
  for (auto& be : mesh.boundary_edges) {
    be.conormal = meshdetail::edge_conormal(mesh.vertices, mesh.triangles, be);
    mesh.vertex_boundary_length[be.a] += 0.5 * be.length;
    mesh.vertex_boundary_length[be.b] += 0.5 * be.length;
  }
}

/// Validates and finalizes an embedded surface: manifoldness, areas, boundary
/// structure, and per-vertex frames. The tangent plane at a vertex is the
/// dominant plane of the area-weighted face projectors; the normal frame
/// spans its orthogonal complement.
inline void finalize_surface_mesh(SurfaceMesh& mesh) {
  const int d = mesh.dim();
  require(d == 3 || d == 4, "SurfaceMesh: ambient dimension must be 3 or 4, got ", d);
  const int nv = mesh.num_vertices();
  const int nf = mesh.num_faces();
  require(nf > 0, "SurfaceMesh: no triangles");

  mesh.face_area.resize(nf);
  for (int f = 0; f < nf; ++f) {
    double area = meshdetail::face_area_of(mesh.vertices, mesh.triangles(f, 0),
                                            mesh.triangles(f, 1), mesh.triangles(f, 2));
    require(area > 0.0, "SurfaceMesh: face ", f, " is degenerate");
    mesh.face_area[f] = area;
  }

  auto conn = meshdetail::build_connectivity(mesh.vertices, mesh.triangles);
  mesh.vertex_neighbors = std::move(conn.vertex_neighbors);
  mesh.vertex_faces = std::move(conn.vertex_faces);
  mesh.boundary_edges = std::move(conn.boundary_edges);
  mesh.boundary_loops = std::move(conn.boundary_loops);
  mesh.is_boundary_vertex = std::move(conn.is_boundary_vertex);
  mesh.mean_edge_length = conn.mean_edge_length;

  mesh.vertex_area = Eigen::VectorXd::Zero(nv);
  for (int f = 0; f < nf; ++f) {
    for (int e = 0; e < 3; ++e) mesh.vertex_area[mesh.triangles(f, e)] += mesh.face_area[f] / 3.0;
  }
  mesh.vertex_boundary_length = Eigen::VectorXd::Zero(nv);
  for (auto& be : mesh.boundary_edges) {
    be.conormal = meshdetail::edge_conormal(mesh.vertices, mesh.triangles, be);
    mesh.vertex_boundary_length[be.a] += 0.5 * be.length;
    mesh.vertex_boundary_length[be.b] += 0.5 * be.length;
  }

  mesh.tangent_frame.assign(nv, Eigen::MatrixXd());
  mesh.normal_frame.assign(nv, Eigen::MatrixXd());
  for (int v = 0; v < nv; ++v) {
    require(!mesh.vertex_faces[v].empty(), "SurfaceMesh: isolated vertex ", v);
    Eigen::MatrixXd accum = Eigen::MatrixXd::Zero(d, d);
    for (int f : mesh.vertex_faces[v]) {
      Eigen::VectorXd e1 = mesh.vertices.row(mesh.triangles(f, 1)) -
                           mesh.vertices.row(mesh.triangles(f, 0));
      Eigen::VectorXd e2 = mesh.vertices.row(mesh.triangles(f, 2)) -
                           mesh.vertices.row(mesh.triangles(f, 0));
      Eigen::MatrixXd basis(d, 2);
      basis.col(0) = e1.normalized();
      Eigen::VectorXd t2 = e2 - e2.dot(basis.col(0)) * basis.col(0);
      basis.col(1) = t2.normalized();
      accum += mesh.face_area[f] * basis * basis.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(accum);
    require(es.info() == Eigen::Success, "SurfaceMesh: frame eigensolve failed at vertex ", v);
    // Eigenvalues ascending: last two span the tangent plane.
    Eigen::MatrixXd tf(2, d), nfm(d - 2, d);
    for (int r = 0; r < 2; ++r) {
      Eigen::VectorXd col = es.eigenvectors().col(d - 1 - r);
      meshdetail::fix_eigenvector_sign(col);
      tf.row(r) = col.transpose();
    }
    for (int r = 0; r < d - 2; ++r) {
      Eigen::VectorXd col = es.eigenvectors().col(r);
      meshdetail::fix_eigenvector_sign(col);
      nfm.row(r) = col.transpose();
    }
    mesh.tangent_frame[v] = tf;
    mesh.normal_frame[v] = nfm;
  }
}

inline void finalize_curve_mesh(CurveMesh& mesh) {
  const int d = mesh.dim();
  require(d == 2 || d == 3, "CurveMesh: ambient dimension must be 2 or 3, got ", d);
  const int nv = mesh.num_vertices();
  require(nv >= (mesh.closed ? 3 : 2), "CurveMesh: too few vertices");

  mesh.vertex_length = Eigen::VectorXd::Zero(nv);
  KahanSum total;
  for (int e = 0; e < mesh.num_edges(); ++e) {
    double len = (mesh.vertices.row(mesh.edge_head(e)) - mesh.vertices.row(mesh.edge_tail(e))).norm();
    require(len > 0.0, "CurveMesh: repeated vertex at edge ", e);
    mesh.vertex_length[mesh.edge_tail(e)] += 0.5 * len;
    mesh.vertex_length[mesh.edge_head(e)] += 0.5 * len;
    total.add(len);
  }
  mesh.mean_edge_length = total.value() / mesh.num_edges();
}

}  // namespace abpv
