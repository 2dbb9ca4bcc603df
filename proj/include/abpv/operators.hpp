#pragma once

#include <Eigen/Dense>
#include <vector>

#include "abpv/common.hpp"
#include "abpv/mesh.hpp"

namespace abpv {

// ---------------------------------------------------------------------------
// Quadrature (vertex-lumped; exact for piecewise-linear fields)
// ---------------------------------------------------------------------------

template <typename Mesh>
double integrate(const Mesh& mesh, const ScalarField& f) {
  require(f.size() == mesh.num_vertices(), "integrate: field size ", f.size(),
          " does not match mesh with ", mesh.num_vertices(), " vertices");
  KahanSum s;
  for (int v = 0; v < mesh.num_vertices(); ++v) s.add(f[v] * mesh.vertex_area[v]);
  return s.value();
}

inline double integrate(const CurveMesh& mesh, const ScalarField& f) {
  require(f.size() == mesh.num_vertices(), "integrate: field size ", f.size(),
          " does not match curve with ", mesh.num_vertices(), " vertices");
  KahanSum s;
  for (int v = 0; v < mesh.num_vertices(); ++v) s.add(f[v] * mesh.vertex_length[v]);
  return s.value();
}

/// Integral over the boundary loops (lumped edge measure).
template <typename Mesh>
double integrate_boundary(const Mesh& mesh, const ScalarField& f) {
  require(f.size() == mesh.num_vertices(), "integrate_boundary: field size mismatch");
  KahanSum s;
  for (int v = 0; v < mesh.num_vertices(); ++v) s.add(f[v] * mesh.vertex_boundary_length[v]);
  return s.value();
}

template <typename Mesh>
double total_area(const Mesh& mesh) {
  KahanSum s;
  for (int f = 0; f < mesh.num_faces(); ++f) s.add(mesh.face_area[f]);
  return s.value();
}

template <typename Mesh>
double boundary_length(const Mesh& mesh) {
  KahanSum s;
  for (const auto& be : mesh.boundary_edges) s.add(be.length);
  return s.value();
}

inline double curve_length(const CurveMesh& mesh) {
  KahanSum s;
  for (int v = 0; v < mesh.num_vertices(); ++v) s.add(mesh.vertex_length[v]);
  return s.value();
}

// ---------------------------------------------------------------------------
// Gradients
// ---------------------------------------------------------------------------

/// Per-face constant gradient of a vertex field (P1 element gradient). For a
/// surface the result is tangent to the face. Exact on affine fields.
template <typename Mesh>
VectorField gradient(const Mesh& mesh, const ScalarField& f) {
  require(f.size() == mesh.num_vertices(), "gradient: field size mismatch");
  const int d = mesh.dim();
  VectorField g(mesh.num_faces(), d);
  for (int fi = 0; fi < mesh.num_faces(); ++fi) {
    int i = mesh.triangles(fi, 0), j = mesh.triangles(fi, 1), k = mesh.triangles(fi, 2);
    Eigen::VectorXd e1 = mesh.vertices.row(j) - mesh.vertices.row(i);
    Eigen::VectorXd e2 = mesh.vertices.row(k) - mesh.vertices.row(i);
    Eigen::Matrix2d gram;
    gram << e1.squaredNorm(), e1.dot(e2), e1.dot(e2), e2.squaredNorm();
    double det = gram.determinant();
    require(det > 0.0, "gradient: degenerate face ", fi);
    Eigen::Vector2d rhs(f[j] - f[i], f[k] - f[i]);
    Eigen::Vector2d coef = gram.inverse() * rhs;
    g.row(fi) = (coef[0] * e1 + coef[1] * e2).transpose();
  }
  return g;
}

/// Area-weighted average of incident face gradients; the vertex-level
/// gradient recovery used to evaluate |grad f| in right-hand sides.
template <typename Mesh>
VectorField vertex_gradient(const Mesh& mesh, const ScalarField& f) {
  VectorField fg = gradient(mesh, f);
  VectorField vg = VectorField::Zero(mesh.num_vertices(), mesh.dim());
  Eigen::VectorXd wsum = Eigen::VectorXd::Zero(mesh.num_vertices());
  for (int fi = 0; fi < mesh.num_faces(); ++fi) {
    for (int e = 0; e < 3; ++e) {
      int v = mesh.triangles(fi, e);
      vg.row(v) += mesh.face_area[fi] * fg.row(fi);
      wsum[v] += mesh.face_area[fi];
    }
  }
  for (int v = 0; v < mesh.num_vertices(); ++v) vg.row(v) /= wsum[v];
  return vg;
}

// ---------------------------------------------------------------------------
// Two-ring quadratic fits: Hessian recovery and second fundamental form
// ---------------------------------------------------------------------------

namespace meshdetail {

template <typename Mesh>
std::vector<int> two_ring(const Mesh& mesh, int v) {
  std::vector<int> patch;
  for (int u : mesh.vertex_neighbors[v]) {
    patch.push_back(u);
    for (int w : mesh.vertex_neighbors[u]) {
      if (w != v) patch.push_back(w);
    }
  }
  std::sort(patch.begin(), patch.end());
  patch.erase(std::unique(patch.begin(), patch.end()), patch.end());
  return patch;
}

/// Fit patch around a vertex: the two-ring, grown ring by ring (low-valence
/// and one-sided boundary patches) until it supports the full fit basis.
template <typename Mesh>
std::vector<int> fit_patch(const Mesh& mesh, int v) {
  std::vector<int> patch = two_ring(mesh, v);
  for (int grow = 0; grow < 2 && static_cast<int>(patch.size()) < 16; ++grow) {
    std::vector<int> wide = patch;
    for (int u : patch) {
      for (int w : mesh.vertex_neighbors[u]) {
        if (w != v) wide.push_back(w);
      }
    }
    std::sort(wide.begin(), wide.end());
    wide.erase(std::unique(wide.begin(), wide.end()), wide.end());
    patch = std::move(wide);
  }
  return patch;
}

/// Tangent-plane coordinates of the patch around vertex v. For a DomainMesh
/// the tangent frame is the ambient basis of R^2.
inline Eigen::Vector2d local_coords(const DomainMesh& mesh, int v, int u) {
  return (mesh.vertices.row(u) - mesh.vertices.row(v)).transpose();
}

inline Eigen::Vector2d local_coords(const SurfaceMesh& mesh, int v, int u) {
  Eigen::VectorXd delta = (mesh.vertices.row(u) - mesh.vertices.row(v)).transpose();
  return mesh.tangent_frame[v] * delta;
}

/// Weighted least-squares polynomial fit over one patch; the reported
/// Hessian is the quadratic part. The basis carries the cubic monomials
/// (and the quartic ones when the patch supports them): higher-order
/// truncation terms would otherwise bias the quadratic coefficients on
/// curved patches. Returns false when the patch is rank-deficient. Rows of
/// `targets` match `coords`; the vertex itself must be included by the
/// caller (coordinate zero).
inline bool fit_quadratic(const std::vector<Eigen::Vector2d>& coords,
                          const Eigen::MatrixXd& targets, double scale,
                          Eigen::MatrixXd* hessians_out, Eigen::MatrixXd* gradients_out,
                          Eigen::VectorXd* values_out) {
  const int np = static_cast<int>(coords.size());
  const int nt = static_cast<int>(targets.cols());
  const int basis = np >= 17 ? 15 : 10;  // degree 4 when supported, else 3
  if (np < 12) return false;
  Eigen::MatrixXd A(np, basis);
  Eigen::MatrixXd B(np, nt);
  for (int i = 0; i < np; ++i) {
    Eigen::Vector2d x = coords[i] / scale;
    double w = std::exp(-0.5 * x.squaredNorm());
    A(i, 0) = w;
    A(i, 1) = w * x[0];
    A(i, 2) = w * x[1];
    A(i, 3) = w * 0.5 * x[0] * x[0];
    A(i, 4) = w * x[0] * x[1];
    A(i, 5) = w * 0.5 * x[1] * x[1];
    int col = 6;
    for (int deg = 3; deg <= (basis == 15 ? 4 : 3); ++deg) {
      for (int k = 0; k <= deg; ++k) {
        A(i, col++) = w * std::pow(x[0], deg - k) * std::pow(x[1], k);
      }
    }
    B.row(i) = w * targets.row(i);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-8);
  if (qr.rank() < basis) return false;
  Eigen::MatrixXd coef = qr.solve(B);  // basis x nt
  if (hessians_out) {
    hessians_out->resize(3, nt);  // rows: a_xx, a_xy, a_yy (unscaled)
    hessians_out->row(0) = coef.row(3) / (scale * scale);
    hessians_out->row(1) = coef.row(4) / (scale * scale);
    hessians_out->row(2) = coef.row(5) / (scale * scale);
  }
  if (gradients_out) {
    gradients_out->resize(2, nt);
    gradients_out->row(0) = coef.row(1) / scale;
    gradients_out->row(1) = coef.row(2) / scale;
  }
  if (values_out) *values_out = coef.row(0).transpose();
  return true;
}

template <typename Mesh>
double patch_scale(const Mesh& mesh, int v, const std::vector<int>& patch) {
  double scale = 0.0;
  for (int u : patch) scale = std::max(scale, local_coords(mesh, v, u).norm());
  return scale > 0.0 ? scale : 1.0;
}

}  // namespace meshdetail

/// Per-vertex symmetric Hessian from a weighted quadratic fit over the
/// two-ring, expressed in the vertex tangent frame. Exact (up to conditioning)
/// on quadratic fields over planar meshes. Vertices with rank-deficient
/// patches are flagged invalid and excluded downstream.
template <typename Mesh>
SymmetricField hessian_recover(const Mesh& mesh, const ScalarField& f) {
  require(f.size() == mesh.num_vertices(), "hessian_recover: field size mismatch");
  const int nv = mesh.num_vertices();
  SymmetricField out;
  out.mats.assign(nv, Eigen::Matrix2d::Zero());
  out.valid.assign(nv, 0);
  for (int v = 0; v < nv; ++v) {
    std::vector<int> patch = meshdetail::fit_patch(mesh, v);
    std::vector<Eigen::Vector2d> coords;
    coords.reserve(patch.size() + 1);
    Eigen::MatrixXd targets(patch.size() + 1, 1);
    coords.push_back(Eigen::Vector2d::Zero());
    targets(0, 0) = f[v];
    for (size_t i = 0; i < patch.size(); ++i) {
      coords.push_back(meshdetail::local_coords(mesh, v, patch[i]));
      targets(i + 1, 0) = f[patch[i]];
    }
    double scale = meshdetail::patch_scale(mesh, v, patch);
    Eigen::MatrixXd hess;
    if (meshdetail::fit_quadratic(coords, targets, scale, &hess, nullptr, nullptr)) {
      out.mats[v] << hess(0, 0), hess(1, 0), hess(1, 0), hess(2, 0);
      out.valid[v] = 1;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Curvature
// ---------------------------------------------------------------------------

/// Mean curvature vector and second fundamental form components.
/// Conventions: H is the Laplace-Beltrami of the position (unnormalized
/// trace), so |H| = n/R on a radius-R n-sphere and H points inward.
/// II[v][alpha] = <II, nu_alpha> as a symmetric matrix in the tangent frame,
/// with trace consistency sum_alpha tr(II[v][alpha]) nu_alpha ~ H(v).
struct CurvatureData {
  VectorField H;                                  // V x d
  std::vector<std::vector<Eigen::Matrix2d>> II;   // V x m, tangent-frame 2x2
  std::vector<char> valid;
};

/// Surface curvature: H from the cotangent Laplacian at interior vertices
/// (fit-based at boundary vertices, where the cotangent formula picks up the
/// conormal boundary term), II from the two-ring quadric fit of the normal
/// offsets.
inline CurvatureData curvature(const SurfaceMesh& mesh) {
  const int nv = mesh.num_vertices();
  const int d = mesh.dim();
  const int m = mesh.codim();
  CurvatureData data;
  data.H = VectorField::Zero(nv, d);
  data.II.assign(nv, std::vector<Eigen::Matrix2d>(m, Eigen::Matrix2d::Zero()));
  data.valid.assign(nv, 0);

  // Cotangent weights per edge and the mixed Voronoi cell area (the lumped
  // mass that keeps the operator pointwise consistent at irregular vertices).
  std::vector<std::map<int, double>> w(nv);
  Eigen::VectorXd mixed_area = Eigen::VectorXd::Zero(nv);
  for (int f = 0; f < mesh.num_faces(); ++f) {
    int idx[3] = {mesh.triangles(f, 0), mesh.triangles(f, 1), mesh.triangles(f, 2)};
    double cot[3];
    bool obtuse[3];
    for (int corner = 0; corner < 3; ++corner) {
      int c = idx[corner], a = idx[(corner + 1) % 3], b = idx[(corner + 2) % 3];
      Eigen::VectorXd ca = mesh.vertices.row(a) - mesh.vertices.row(c);
      Eigen::VectorXd cb = mesh.vertices.row(b) - mesh.vertices.row(c);
      cot[corner] = ca.dot(cb) / (2.0 * mesh.face_area[f]);
      obtuse[corner] = cot[corner] < 0.0;
      w[a][b] += 0.5 * cot[corner];
      w[b][a] += 0.5 * cot[corner];
    }
    bool any_obtuse = obtuse[0] || obtuse[1] || obtuse[2];
    for (int corner = 0; corner < 3; ++corner) {
      int c = idx[corner], a = idx[(corner + 1) % 3], b = idx[(corner + 2) % 3];
      if (!any_obtuse) {
        double la2 = (mesh.vertices.row(b) - mesh.vertices.row(c)).squaredNorm();
        double lb2 = (mesh.vertices.row(a) - mesh.vertices.row(c)).squaredNorm();
        mixed_area[c] += 0.125 * (la2 * cot[(corner + 1) % 3] + lb2 * cot[(corner + 2) % 3]);
      } else {
        mixed_area[c] += obtuse[corner] ? 0.5 * mesh.face_area[f] : 0.25 * mesh.face_area[f];
      }
    }
  }
  for (int v = 0; v < nv; ++v) {
    if (mesh.is_boundary_vertex[v]) continue;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
    for (const auto& [u, wuv] : w[v]) {
      acc += wuv * (mesh.vertices.row(u) - mesh.vertices.row(v)).transpose();
    }
    data.H.row(v) = acc.transpose() / mixed_area[v];
  }

  // Quadric fit of normal offsets over the two-ring.
  for (int v = 0; v < nv; ++v) {
    std::vector<int> patch = meshdetail::fit_patch(mesh, v);
    std::vector<Eigen::Vector2d> coords;
    coords.reserve(patch.size() + 1);
    Eigen::MatrixXd targets(patch.size() + 1, m);
    coords.push_back(Eigen::Vector2d::Zero());
    targets.row(0).setZero();
    for (size_t i = 0; i < patch.size(); ++i) {
      Eigen::VectorXd delta =
          (mesh.vertices.row(patch[i]) - mesh.vertices.row(v)).transpose();
      coords.push_back(mesh.tangent_frame[v] * delta);
      targets.row(i + 1) = (mesh.normal_frame[v] * delta).transpose();
    }
    double scale = meshdetail::patch_scale(mesh, v, patch);
    Eigen::MatrixXd hess;
    if (!meshdetail::fit_quadratic(coords, targets, scale, &hess, nullptr, nullptr)) continue;
    data.valid[v] = 1;
    for (int alpha = 0; alpha < m; ++alpha) {
      data.II[v][alpha] << hess(0, alpha), hess(1, alpha), hess(1, alpha), hess(2, alpha);
    }
    if (mesh.is_boundary_vertex[v]) {
      Eigen::VectorXd h = Eigen::VectorXd::Zero(d);
      for (int alpha = 0; alpha < m; ++alpha) {
        h += data.II[v][alpha].trace() * mesh.normal_frame[v].row(alpha).transpose();
      }
      data.H.row(v) = h.transpose();
    }
  }
  return data;
}

/// Curve curvature from turning angles: |H| integrates to the total turning
/// (exactly 2 pi for a convex planar polygon), and the curvature vector
/// points toward the concave side. II reduces to the normal components of H.
struct CurveCurvature {
  VectorField H;                     // V x d curvature vector
  Eigen::VectorXd turning_angle;     // per vertex
  double total_curvature = 0.0;      // sum of turning angles
};

inline CurveCurvature curvature(const CurveMesh& mesh) {
  const int nv = mesh.num_vertices();
  const int d = mesh.dim();
  CurveCurvature data;
  data.H = VectorField::Zero(nv, d);
  data.turning_angle = Eigen::VectorXd::Zero(nv);
  KahanSum total;
  for (int v = 0; v < nv; ++v) {
    if (!mesh.closed && (v == 0 || v == nv - 1)) continue;
    int prev = (v - 1 + nv) % nv, next = (v + 1) % nv;
    Eigen::VectorXd tin = (mesh.vertices.row(v) - mesh.vertices.row(prev)).normalized();
    Eigen::VectorXd tout = (mesh.vertices.row(next) - mesh.vertices.row(v)).normalized();
    double dot = std::clamp(tin.dot(tout), -1.0, 1.0);
    double cross;
    if (d == 2) {
      cross = std::abs(tin[0] * tout[1] - tin[1] * tout[0]);
    } else {
      cross = Eigen::Vector3d(tin).cross(Eigen::Vector3d(tout)).norm();
    }
    double theta = std::atan2(cross, dot);
    data.turning_angle[v] = theta;
    total.add(theta);
    Eigen::VectorXd dir = tout - tin;
    double dn = dir.norm();
    if (theta > 0.0 && dn > 1e-300) {
      data.H.row(v) = (theta / mesh.vertex_length[v]) * (dir / dn).transpose();
    }
  }
  data.total_curvature = total.value();
  return data;
}

}  // namespace abpv
