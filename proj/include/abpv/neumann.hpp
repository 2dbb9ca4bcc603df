#pragma once

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <optional>
#include <vector>

#include "abpv/common.hpp"
#include "abpv/mesh.hpp"
#include "abpv/operators.hpp"

namespace abpv {

/// Which elliptic problem the potential solves. The three modes share the
/// divergence-form operator div(f grad u) and differ in the right-hand side
/// and the presence of the unit-flux boundary condition.
enum class NeumannMode { kSobolev, kMichaelSimon, kLogSobolev };

inline const char* to_string(NeumannMode mode) {
  switch (mode) {
    case NeumannMode::kSobolev: return "sobolev";
    case NeumannMode::kMichaelSimon: return "michael_simon";
    case NeumannMode::kLogSobolev: return "log_sobolev";
  }
  return "?";
}

struct NormalizedDensity {
  ScalarField f;       // scaled density c * f
  double constant;     // the multiplier c
};

namespace neumanndetail {

inline ScalarField gradient_norms(const VectorField& vg) {
  ScalarField out(vg.rows());
  for (int v = 0; v < vg.rows(); ++v) out[v] = vg.row(v).norm();
  return out;
}

template <typename Mesh>
ScalarField curvature_norm_sq(const Mesh& mesh, const CurvatureData& cd) {
  ScalarField out(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) out[v] = cd.H.row(v).squaredNorm();
  return out;
}

}  // namespace neumanndetail

/// Scales f so that the mode's normalization identity holds exactly at the
/// discrete level (same quadratures as build_rhs, so the divergence-theorem
/// compatibility residual downstream is pure round-off).
///  - sobolev:        int |grad f| + int_bd f   = n int f^{n/(n-1)}
///  - michael_simon:  int sqrt(|grad f|^2 + f^2 |H|^2) + int_bd f = n int f^{n/(n-1)}
///  - log_sobolev:    int f log f - int f^{-1} |grad f|^2 - int f |H|^2 = 0
template <typename Mesh>
NormalizedDensity normalize_density(const Mesh& mesh, const ScalarField& f, NeumannMode mode,
                                    const CurvatureData* curv = nullptr) {
  require(f.size() == mesh.num_vertices(), "normalize_density: field size mismatch");
  require(f.minCoeff() > 0.0, "normalize_density: density must be strictly positive");
  const double n = 2.0;  // intrinsic dimension of all meshed geometries
  ScalarField grad_norm = neumanndetail::gradient_norms(vertex_gradient(mesh, f));

  if (mode == NeumannMode::kLogSobolev) {
    require(curv != nullptr, "normalize_density: log_sobolev mode needs curvature data");
    ScalarField h2 = neumanndetail::curvature_norm_sq(mesh, *curv);
    ScalarField fh2(f.size()), glog(f.size()), gsq(f.size());
    for (int v = 0; v < f.size(); ++v) {
      fh2[v] = f[v] * h2[v];
      glog[v] = f[v] * std::log(f[v]);
      gsq[v] = grad_norm[v] * grad_norm[v] / f[v];
    }
    double mass = integrate(mesh, f);
    require(mass > 0.0, "normalize_density: zero total mass");
    double log_c = (integrate(mesh, fh2) + integrate(mesh, gsq) - integrate(mesh, glog)) / mass;
    NormalizedDensity out;
    out.constant = std::exp(log_c);
    out.f = out.constant * f;
    return out;
  }

  ScalarField lhs_density(f.size());
  if (mode == NeumannMode::kSobolev) {
    lhs_density = grad_norm;
  } else {
    require(curv != nullptr, "normalize_density: michael_simon mode needs curvature data");
    ScalarField h2 = neumanndetail::curvature_norm_sq(mesh, *curv);
    for (int v = 0; v < f.size(); ++v) {
      lhs_density[v] = std::sqrt(sqr(grad_norm[v]) + sqr(f[v]) * h2[v]);
    }
  }
  double lhs1 = integrate(mesh, lhs_density) + integrate_boundary(mesh, f);
  ScalarField fpow(f.size());
  for (int v = 0; v < f.size(); ++v) fpow[v] = std::pow(f[v], n / (n - 1.0));
  double rhs1 = n * integrate(mesh, fpow);
  require(lhs1 > 0.0 && rhs1 > 0.0, "normalize_density: degenerate normalization integrals");
  NormalizedDensity out;
  // lhs is 1-homogeneous in f, rhs is n/(n-1)-homogeneous; equality pins c.
  out.constant = std::pow(lhs1 / rhs1, n - 1.0);
  out.f = out.constant * f;
  return out;
}

/// Elliptic problem div(f grad u) = rhs with weighted Neumann flux
/// f <grad u, eta> = f on the boundary (open case) or no boundary term
/// (closed case).
template <typename Mesh>
struct NeumannProblem {
  const Mesh* geometry = nullptr;
  ScalarField weight;         // normalized density f > 0
  ScalarField rhs;            // vertex field rho
  ScalarField boundary_flux;  // weighted flux values per vertex; empty if closed
  NeumannMode mode = NeumannMode::kSobolev;
  double compatibility_residual = 0.0;
  double compatibility_scale = 0.0;
};

/// Builds the mode's right-hand side from a normalized density, reporting the
/// divergence-theorem compatibility residual |int rho - int_bd flux|.
template <typename Mesh>
NeumannProblem<Mesh> build_rhs(const Mesh& mesh, const ScalarField& f, NeumannMode mode,
                               const CurvatureData* curv = nullptr) {
  require(f.size() == mesh.num_vertices(), "build_rhs: field size mismatch");
  require(f.minCoeff() > 0.0, "build_rhs: density must be strictly positive");
  const double n = 2.0;
  const bool open = !mesh.boundary_loops.empty();
  if (mode != NeumannMode::kSobolev) {
    require(curv != nullptr, "build_rhs: surface modes need curvature data");
  }
  if (mode == NeumannMode::kLogSobolev) {
    require(!open, "build_rhs: log_sobolev mode requires a closed surface");
  }

  ScalarField grad_norm = neumanndetail::gradient_norms(vertex_gradient(mesh, f));
  NeumannProblem<Mesh> problem;
  problem.geometry = &mesh;
  problem.weight = f;
  problem.mode = mode;
  problem.rhs.resize(f.size());
  for (int v = 0; v < f.size(); ++v) {
    switch (mode) {
      case NeumannMode::kSobolev:
        problem.rhs[v] = n * std::pow(f[v], n / (n - 1.0)) - grad_norm[v];
        break;
      case NeumannMode::kMichaelSimon: {
        double h2 = curv->H.row(v).squaredNorm();
        problem.rhs[v] =
            n * std::pow(f[v], n / (n - 1.0)) - std::sqrt(sqr(grad_norm[v]) + sqr(f[v]) * h2);
        break;
      }
      case NeumannMode::kLogSobolev: {
        double h2 = curv->H.row(v).squaredNorm();
        problem.rhs[v] = f[v] * std::log(f[v]) - sqr(grad_norm[v]) / f[v] - f[v] * h2;
        break;
      }
    }
  }
  double flux_total = 0.0;
  if (open) {
    problem.boundary_flux = f;
    flux_total = integrate_boundary(mesh, f);
  }
  ScalarField abs_rhs = problem.rhs.cwiseAbs();
  problem.compatibility_scale = integrate(mesh, abs_rhs) + std::abs(flux_total);
  problem.compatibility_residual = std::abs(integrate(mesh, problem.rhs) - flux_total);
  return problem;
}

/// Solution of the weighted Neumann problem in the mean-zero gauge, with the
/// recovered derivative fields and solver diagnostics.
struct PotentialSolution {
  ScalarField u;
  VectorField grad_u;      // per face
  SymmetricField hess_u;   // per vertex, tangent frame
  double residual_norm = 0.0;
  double compatibility_residual = 0.0;
  int iterations = 0;
  bool renormalized = false;  // rhs was projected to the compatible slice
};

/// P1 finite-element solve. The system is symmetric positive semidefinite
/// with the constants as kernel; conjugate gradients with a Jacobi
/// preconditioner, relative residual 1e-10, then the mean-zero gauge.
template <typename Mesh>
PotentialSolution solve(const NeumannProblem<Mesh>& problem) {
  const Mesh& mesh = *problem.geometry;
  const int nv = mesh.num_vertices();
  require(problem.weight.minCoeff() > 0.0, "solve: nonpositive weight");

  double res = problem.compatibility_residual;
  double scale = std::max(problem.compatibility_scale, 1e-300);
  ScalarField rhs = problem.rhs;
  bool renormalized = false;
  if (res > 1e-8 * scale) {
    require(res <= 1e-4 * scale, "solve: incompatible data, residual ", res, " vs scale ", scale);
    // Project onto the compatible slice: constant shift of rho.
    double total = total_area(mesh);
    double flux_total =
        problem.boundary_flux.size() > 0 ? integrate_boundary(mesh, problem.boundary_flux) : 0.0;
    double shift = (integrate(mesh, rhs) - flux_total) / total;
    for (int v = 0; v < nv; ++v) rhs[v] -= shift;
    renormalized = true;
  }

  // Stiffness: per-element hat gradients against the face-averaged weight.
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<size_t>(mesh.num_faces()) * 9);
  for (int fi = 0; fi < mesh.num_faces(); ++fi) {
    int idx[3] = {mesh.triangles(fi, 0), mesh.triangles(fi, 1), mesh.triangles(fi, 2)};
    double fbar =
        (problem.weight[idx[0]] + problem.weight[idx[1]] + problem.weight[idx[2]]) / 3.0;
    Eigen::MatrixXd grads(3, mesh.vertices.cols());
    for (int a = 0; a < 3; ++a) {
      Eigen::VectorXd e = mesh.vertices.row(idx[(a + 2) % 3]) - mesh.vertices.row(idx[(a + 1) % 3]);
      Eigen::VectorXd w = mesh.vertices.row(idx[a]) - mesh.vertices.row(idx[(a + 1) % 3]);
      Eigen::VectorXd ehat = e.normalized();
      Eigen::VectorXd q = w - w.dot(ehat) * ehat;
      grads.row(a) = (q / q.squaredNorm()).transpose();
    }
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        triplets.emplace_back(idx[a], idx[b],
                              fbar * mesh.face_area[fi] * grads.row(a).dot(grads.row(b)));
      }
    }
  }
  Eigen::SparseMatrix<double> K(nv, nv);
  K.setFromTriplets(triplets.begin(), triplets.end());

  Eigen::VectorXd b = Eigen::VectorXd::Zero(nv);
  for (int v = 0; v < nv; ++v) b[v] -= rhs[v] * mesh.vertex_area[v];
  if (problem.boundary_flux.size() > 0) {
    require(problem.boundary_flux.size() == nv, "solve: boundary flux size mismatch");
    for (int v = 0; v < nv; ++v) b[v] += problem.boundary_flux[v] * mesh.vertex_boundary_length[v];
  }
  // Exact kernel compatibility (constants): remove the mean of b.
  b.array() -= b.mean();

  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>>
      cg;
  cg.setTolerance(1e-10);
  cg.setMaxIterations(std::max(2000, 20 * nv));
  cg.compute(K);
  Eigen::VectorXd u = cg.solve(b);
  require(cg.info() == Eigen::Success, "solve: conjugate gradients did not converge in ",
          cg.iterations(), " iterations (residual ", cg.error(), ")");

  PotentialSolution sol;
  // Mean-zero gauge in the lumped measure.
  double mean = 0.0;
  {
    KahanSum s;
    for (int v = 0; v < nv; ++v) s.add(u[v] * mesh.vertex_area[v]);
    mean = s.value() / total_area(mesh);
  }
  sol.u = u.array() - mean;
  sol.grad_u = gradient(mesh, sol.u);
  sol.hess_u = hessian_recover(mesh, sol.u);
  sol.residual_norm = (K * u - b).norm() / std::max(b.norm(), 1e-300);
  sol.compatibility_residual = res;
  sol.iterations = static_cast<int>(cg.iterations());
  sol.renormalized = renormalized;
  return sol;
}

/// Convenience wrapper: normalize, build the right-hand side, solve.
template <typename Mesh>
PotentialSolution solve_mode(const Mesh& mesh, const ScalarField& density, NeumannMode mode,
                             const CurvatureData* curv = nullptr,
                             NormalizedDensity* normalized_out = nullptr) {
  NormalizedDensity nd = normalize_density(mesh, density, mode, curv);
  NeumannProblem<Mesh> problem = build_rhs(mesh, nd.f, mode, curv);
  if (normalized_out) *normalized_out = nd;
  return solve(problem);
}

}  // namespace abpv
