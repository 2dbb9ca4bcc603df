#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "abpv/common.hpp"
#include "abpv/constants.hpp"
#include "abpv/halton.hpp"
#include "abpv/mesh.hpp"
#include "abpv/neumann.hpp"
#include "abpv/operators.hpp"

namespace abpv {

/// Which transport map is being probed.
///  - sobolev:       planar domain, Phi = grad u, contact matrix D^2 u
///  - fwc:           closed submanifold, u = 0, Phi(x,y) = y, matrix -<II, y>
///  - michael_simon: submanifold with potential, Phi = grad u + y,
///                   matrix D^2 u - <II, y>
///  - log_sobolev:   closed submanifold, same map, Gaussian-weighted bound
enum class ContactMode { kSobolev, kFwc, kMichaelSimon, kLogSobolev };

inline const char* to_string(ContactMode mode) {
  switch (mode) {
    case ContactMode::kSobolev: return "sobolev";
    case ContactMode::kFwc: return "fwc";
    case ContactMode::kMichaelSimon: return "michael_simon";
    case ContactMode::kLogSobolev: return "log_sobolev";
  }
  return "?";
}

/// One probed target vector with its contact point and classification.
struct ContactSample {
  Eigen::VectorXd target;         // xi
  int contact_vertex = -1;
  Eigen::VectorXd contact_point;  // patch-refined position
  Eigen::VectorXd grad_u;         // tangential part at the contact (ambient)
  Eigen::VectorXd y_normal;       // normal part (ambient, zero in planar mode)
  double psd_slack = 0.0;         // smallest eigenvalue of the contact matrix
  double jacobian = 0.0;          // det of the contact matrix
  double identity_defect = 0.0;   // |xi - grad_u - y|
  bool interior = false;
  bool in_ball = false;
  bool fit_valid = false;
};

/// Margins of the mode's Jacobian determinant bound at one contact sample.
struct JacobianMargins {
  double bound = 0.0;
  double det_margin = 0.0;    // bound - det (mode-weighted in the Gaussian case)
  double trace_margin = 0.0;  // trace-step margin of the same chain
};

namespace contactdetail {

inline Eigen::MatrixXd tangent_frame_of(const DomainMesh&, int) {
  return Eigen::MatrixXd::Identity(2, 2);
}
inline Eigen::MatrixXd tangent_frame_of(const SurfaceMesh& mesh, int v) {
  return mesh.tangent_frame[v];
}
inline Eigen::MatrixXd normal_frame_of(const DomainMesh&, int) { return Eigen::MatrixXd(0, 2); }
inline Eigen::MatrixXd normal_frame_of(const SurfaceMesh& mesh, int v) {
  return mesh.normal_frame[v];
}

/// Cached two-ring fit of u and the ambient coordinate functions around one
/// vertex, in the vertex tangent frame. Shared by every sample that lands on
/// the vertex.
struct VertexFit {
  bool valid = false;
  Eigen::Vector2d gu = Eigen::Vector2d::Zero();
  Eigen::Matrix2d Hu = Eigen::Matrix2d::Zero();
  Eigen::MatrixXd gx;                  // 2 x d
  std::vector<Eigen::Matrix2d> Hx;     // d matrices
  double patch_radius = 0.0;
};

}  // namespace contactdetail

/// Exhaustive-scan contact machinery over one solved geometry. Owns no mesh
/// data; precomputes patch fits lazily per contact vertex.
template <typename Mesh>
class ContactMachine {
 public:
  ContactMachine(const Mesh& mesh, ContactMode mode, const ScalarField& density,
                 const PotentialSolution* sol, const CurvatureData* curv)
      : mesh_(mesh), mode_(mode), f_(density), sol_(sol), curv_(curv) {
    constexpr bool planar = std::is_same_v<Mesh, DomainMesh>;
    require(f_.size() == mesh.num_vertices(), "ContactMachine: density size mismatch");
    if (mode == ContactMode::kSobolev) {
      require(planar, "ContactMachine: sobolev mode runs on a planar domain");
      require(sol != nullptr, "ContactMachine: sobolev mode needs a potential");
    } else {
      require(!planar, "ContactMachine: surface modes need a SurfaceMesh");
      require(curv != nullptr, "ContactMachine: surface modes need curvature data");
      require(mode == ContactMode::kFwc || sol != nullptr,
              "ContactMachine: potential required outside fwc mode");
    }
    if (mode == ContactMode::kFwc || mode == ContactMode::kLogSobolev) {
      require(mesh.boundary_loops.empty(), "ContactMachine: mode ", to_string(mode),
              " needs a closed geometry");
    }
    u_ = sol_ ? sol_->u : ScalarField::Zero(mesh.num_vertices());
    fits_.assign(mesh.num_vertices(), std::nullopt);
  }

  const Mesh& mesh() const { return mesh_; }
  ContactMode mode() const { return mode_; }
  const ScalarField& density() const { return f_; }
  const CurvatureData* curvature_data() const { return curv_; }

  int target_dim() const {
    return std::is_same_v<Mesh, DomainMesh> ? 2 : static_cast<int>(mesh_.vertices.cols());
  }

  /// Global minimizer of w(x) = u(x) - <x, xi> over all vertices, then one
  /// quadratic refinement on the two-ring patch.
  ContactSample contact_search(const Eigen::VectorXd& xi) {
    const int nv = mesh_.num_vertices();
    require(xi.size() == target_dim(), "contact_search: target dimension mismatch");

    int best = 0;
    double wbest = std::numeric_limits<double>::infinity();
    Eigen::VectorXd w = u_ - mesh_.vertices * xi;
    for (int v = 0; v < nv; ++v) {
      if (w[v] < wbest) {
        wbest = w[v];
        best = v;
      }
    }

    ContactSample sample;
    sample.target = xi;
    sample.contact_vertex = best;
    sample.contact_point = mesh_.vertices.row(best).transpose();
    sample.interior = !mesh_.is_boundary_vertex.empty() ? !mesh_.is_boundary_vertex[best] : true;

    const contactdetail::VertexFit& fit = vertex_fit(best);
    Eigen::MatrixXd tf = contactdetail::tangent_frame_of(mesh_, best);
    Eigen::MatrixXd nf = contactdetail::normal_frame_of(mesh_, best);
    sample.fit_valid = fit.valid && hess_valid(best) && curv_valid(best);

    Eigen::Vector2d delta = Eigen::Vector2d::Zero();
    if (fit.valid) {
      Eigen::Vector2d gw = fit.gu - fit.gx * xi;
      Eigen::Matrix2d Hw = fit.Hu;
      for (int k = 0; k < xi.size(); ++k) Hw -= xi[k] * fit.Hx[k];
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(Hw);
      if (es.eigenvalues()[0] > 1e-12) {
        delta = -Hw.inverse() * gw;
        double cap = 0.75 * fit.patch_radius;
        if (delta.norm() > cap) delta *= cap / delta.norm();
        Eigen::VectorXd point = mesh_.vertices.row(best).transpose();
        for (int k = 0; k < point.size(); ++k) {
          point[k] += fit.gx.col(k).dot(delta) + 0.5 * delta.dot(fit.Hx[k] * delta);
        }
        sample.contact_point = point;
      }
    }
    // A minimizing vertex on the boundary whose patch minimizer steps
    // strictly inward is an interior contact one layer from the boundary;
    // only a step onto or across the boundary stays flagged.
    if (!sample.interior && fit.valid && delta.norm() > 0.0) {
      Eigen::VectorXd eta = boundary_conormal(best);
      Eigen::VectorXd step = tf.transpose() * delta;
      if (eta.size() > 0 && step.dot(eta) < -1e-12) sample.interior = true;
    }

    // Tangential gradient at the refined point, lifted to ambient coords.
    Eigen::Vector2d gu_local = fit.valid ? Eigen::Vector2d(fit.gu + fit.Hu * delta)
                                         : Eigen::Vector2d::Zero();
    sample.grad_u = tf.transpose() * gu_local;
    if (nf.rows() > 0) {
      Eigen::VectorXd residual = xi - sample.grad_u;
      sample.y_normal = nf.transpose() * (nf * residual);
    } else {
      sample.y_normal = Eigen::VectorXd::Zero(xi.size());
    }
    sample.identity_defect = (xi - sample.grad_u - sample.y_normal).norm();

    Eigen::Matrix2d M = contact_matrix(best, sample.y_normal);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(M);
    sample.psd_slack = es.eigenvalues()[0];
    sample.jacobian = M.determinant();
    sample.in_ball = mode_ == ContactMode::kLogSobolev
                         ? true
                         : sample.grad_u.squaredNorm() + sample.y_normal.squaredNorm() < 1.0;
    return sample;
  }

  /// Contact matrix M = D^2 u - <II, y> at a vertex, in the tangent frame.
  Eigen::Matrix2d contact_matrix(int v, const Eigen::VectorXd& y_ambient) const {
    Eigen::Matrix2d M = Eigen::Matrix2d::Zero();
    if (sol_ && sol_->hess_u.valid[v]) M = sol_->hess_u.mats[v];
    if (curv_) {
      Eigen::MatrixXd nf = contactdetail::normal_frame_of(mesh_, v);
      Eigen::VectorXd y_coef = nf * y_ambient;
      for (int a = 0; a < y_coef.size(); ++a) M -= y_coef[a] * curv_->II[v][a];
    }
    return M;
  }

  /// Margins of the mode's determinant bound. Requires the sample to belong
  /// to the (tolerance-relaxed) contact set.
  JacobianMargins jacobian_bound_check(const ContactSample& sample, double eps_psd) const {
    require(sample.psd_slack >= -eps_psd, "jacobian_bound_check: sample not in the contact set",
            " (psd slack ", sample.psd_slack, " < -", eps_psd, ")");
    const double n = 2.0;
    const int v = sample.contact_vertex;
    JacobianMargins m;
    switch (mode_) {
      case ContactMode::kSobolev:
      case ContactMode::kMichaelSimon: {
        m.bound = std::pow(f_[v], n / (n - 1.0));
        m.det_margin = m.bound - sample.jacobian;
        double trace = trace_of(sample);
        m.trace_margin = n * std::pow(f_[v], 1.0 / (n - 1.0)) - trace;
        break;
      }
      case ContactMode::kFwc: {
        double h_dot_y = curv_->H.row(v).dot(sample.y_normal);
        m.bound = std::pow(pos(-h_dot_y / n), n);
        m.det_margin = m.bound - sample.jacobian;
        m.trace_margin = -h_dot_y - trace_of(sample);
        break;
      }
      case ContactMode::kLogSobolev: {
        Eigen::VectorXd phi = sample.grad_u + sample.y_normal;
        Eigen::VectorXd shifted = 2.0 * curv_->H.row(v).transpose() + sample.y_normal;
        m.bound = f_[v] * std::exp(-0.25 * shifted.squaredNorm() - n);
        m.det_margin = m.bound - std::exp(-0.25 * phi.squaredNorm()) * sample.jacobian;
        double trace_bound =
            std::log(f_[v]) + 0.25 * phi.squaredNorm() - 0.25 * shifted.squaredNorm();
        m.trace_margin = trace_bound - trace_of(sample);
        break;
      }
    }
    return m;
  }

  /// Scale for the PSD acceptance tolerance: 10 h times a measured magnitude
  /// of the second-derivative data entering the contact matrix.
  double default_psd_tolerance() const {
    double c2 = 0.0;
    for (int v = 0; v < mesh_.num_vertices(); ++v) {
      if (!mesh_.is_boundary_vertex.empty() && mesh_.is_boundary_vertex[v]) continue;
      double mag = 0.0;
      if (sol_ && sol_->hess_u.valid[v]) mag += sol_->hess_u.mats[v].norm();
      if (curv_ && curv_->valid[v]) {
        for (const auto& s : curv_->II[v]) mag += s.norm();
      }
      c2 = std::max(c2, mag);
    }
    return 10.0 * mesh_.mean_edge_length * c2;
  }

 private:
  double trace_of(const ContactSample& sample) const {
    return contact_matrix(sample.contact_vertex, sample.y_normal).trace();
  }
  bool hess_valid(int v) const {
    // Boundary-vertex recovery is one-sided and sits on the flux kink of the
    // discrete solution; those vertices are excluded from classification.
    if (!mesh_.is_boundary_vertex.empty() && mesh_.is_boundary_vertex[v]) return false;
    if (mode_ == ContactMode::kFwc) return true;
    return sol_->hess_u.valid[v];
  }
  bool curv_valid(int v) const {
    if (!curv_) return true;
    return curv_->valid[v] != 0;
  }

  /// Averaged outward conormal at a boundary vertex (empty if interior).
  Eigen::VectorXd boundary_conormal(int v) const {
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(mesh_.vertices.cols());
    bool found = false;
    for (const auto& be : mesh_.boundary_edges) {
      if (be.a == v || be.b == v) {
        eta += be.conormal;
        found = true;
      }
    }
    if (!found) return Eigen::VectorXd();
    double norm = eta.norm();
    return norm > 0 ? Eigen::VectorXd(eta / norm) : Eigen::VectorXd();
  }

  const contactdetail::VertexFit& vertex_fit(int v) {
    if (fits_[v].has_value()) return *fits_[v];
    contactdetail::VertexFit fit;
    std::vector<int> patch = meshdetail::fit_patch(mesh_, v);
    const int d = static_cast<int>(mesh_.vertices.cols());
    std::vector<Eigen::Vector2d> coords;
    coords.reserve(patch.size() + 1);
    Eigen::MatrixXd targets(patch.size() + 1, 1 + d);
    coords.push_back(Eigen::Vector2d::Zero());
    targets(0, 0) = u_[v];
    targets.block(0, 1, 1, d) = mesh_.vertices.row(v);
    for (size_t i = 0; i < patch.size(); ++i) {
      coords.push_back(meshdetail::local_coords(mesh_, v, patch[i]));
      targets(i + 1, 0) = u_[patch[i]];
      targets.block(i + 1, 1, 1, d) = mesh_.vertices.row(patch[i]);
    }
    double scale = meshdetail::patch_scale(mesh_, v, patch);
    Eigen::MatrixXd hess, grad;
    if (meshdetail::fit_quadratic(coords, targets, scale, &hess, &grad, nullptr)) {
      fit.valid = true;
      fit.gu = grad.col(0);
      fit.Hu << hess(0, 0), hess(1, 0), hess(1, 0), hess(2, 0);
      fit.gx = grad.rightCols(d);
      fit.Hx.resize(d);
      for (int k = 0; k < d; ++k) {
        fit.Hx[k] << hess(0, k + 1), hess(1, k + 1), hess(1, k + 1), hess(2, k + 1);
      }
      fit.patch_radius = scale;
    }
    fits_[v] = std::move(fit);
    return *fits_[v];
  }

  const Mesh& mesh_;
  ContactMode mode_;
  ScalarField f_;
  const PotentialSolution* sol_;
  const CurvatureData* curv_;
  ScalarField u_;
  std::vector<std::optional<contactdetail::VertexFit>> fits_;
};

/// Aggregated coverage statistics over quasi-random targets.
struct CoverageReport {
  std::string mode;
  int sample_count = 0;
  double eps_psd = 0.0;
  double covered_fraction = 0.0;
  double boundary_contact_fraction = 0.0;
  double negative_margin_fraction = 0.0;  // among accepted samples
  double below_tol_margin_fraction = 0.0; // margins below -eps_margin
  double eps_margin = 0.0;
  double min_det_margin = 0.0;
  double min_trace_margin = 0.0;
  double psd_slack_p01 = 0.0;
  double max_identity_defect = 0.0;
  std::array<int, 16> psd_histogram{};
  std::array<int, 16> margin_histogram{};
  double psd_hist_lo = 0.0, psd_hist_hi = 0.0;
  double margin_hist_lo = 0.0, margin_hist_hi = 0.0;
  struct Worst {
    double det_margin;
    double psd_slack;
    int vertex;
  };
  std::vector<Worst> worst;  // lowest det margins first
  std::vector<double> det_margins;  // accepted samples, sample order
  std::vector<double> psd_slacks;   // all samples, sample order
};

namespace contactdetail {

inline void fill_histogram(const std::vector<double>& xs, std::array<int, 16>& bins, double* lo,
                           double* hi) {
  bins.fill(0);
  if (xs.empty()) return;
  *lo = *std::min_element(xs.begin(), xs.end());
  *hi = *std::max_element(xs.begin(), xs.end());
  double width = (*hi - *lo) > 0 ? (*hi - *lo) : 1.0;
  for (double x : xs) {
    int b = std::min(15, static_cast<int>(16.0 * (x - *lo) / width));
    bins[std::max(0, b)]++;
  }
}

}  // namespace contactdetail

/// Probes `sample_count` quasi-random targets (unit ball for the three ball
/// modes, variance-2 Gaussian for the log-Sobolev mode) and aggregates
/// contact coverage and bound margins. Fully deterministic in the seed.
template <typename Mesh>
CoverageReport coverage_report(ContactMachine<Mesh>& machine, int sample_count, double eps_psd,
                               std::uint64_t seed) {
  require(sample_count > 0, "coverage_report: sample count must be positive");
  const int dim = machine.target_dim();
  BallSampler ball(dim, seed);
  GaussianSampler gauss(dim, seed);
  const bool gaussian_targets = machine.mode() == ContactMode::kLogSobolev;

  CoverageReport report;
  report.mode = to_string(machine.mode());
  report.sample_count = sample_count;
  report.eps_psd = eps_psd;
  report.eps_margin = eps_psd;  // same h-scaled tolerance family

  int accepted = 0, boundary = 0, negative = 0, below_tol = 0;
  double min_det = std::numeric_limits<double>::infinity();
  double min_trace = std::numeric_limits<double>::infinity();
  double max_defect = 0.0;
  std::vector<double> psd_all;
  psd_all.reserve(sample_count);
  for (int i = 0; i < sample_count; ++i) {
    Eigen::VectorXd xi = gaussian_targets ? gauss.next() : ball.next();
    ContactSample sample = machine.contact_search(xi);
    if (!sample.interior) ++boundary;
    bool ok = sample.interior && sample.in_ball && sample.fit_valid &&
              sample.psd_slack >= -eps_psd;
    if (!ok) continue;
    psd_all.push_back(sample.psd_slack);
    report.psd_slacks.push_back(sample.psd_slack);
    ++accepted;
    max_defect = std::max(max_defect, sample.identity_defect);
    JacobianMargins m = machine.jacobian_bound_check(sample, eps_psd);
    report.det_margins.push_back(m.det_margin);
    min_det = std::min(min_det, m.det_margin);
    min_trace = std::min(min_trace, m.trace_margin);
    if (m.det_margin < 0.0) ++negative;
    if (m.det_margin < -report.eps_margin) ++below_tol;
    if (report.worst.size() < 8 || m.det_margin < report.worst.back().det_margin) {
      report.worst.push_back({m.det_margin, sample.psd_slack, sample.contact_vertex});
      std::sort(report.worst.begin(), report.worst.end(),
                [](const auto& a, const auto& b) { return a.det_margin < b.det_margin; });
      if (report.worst.size() > 8) report.worst.pop_back();
    }
  }
  report.covered_fraction = static_cast<double>(accepted) / sample_count;
  report.boundary_contact_fraction = static_cast<double>(boundary) / sample_count;
  report.negative_margin_fraction = accepted ? static_cast<double>(negative) / accepted : 0.0;
  report.below_tol_margin_fraction = accepted ? static_cast<double>(below_tol) / accepted : 0.0;
  report.min_det_margin = accepted ? min_det : 0.0;
  report.min_trace_margin = accepted ? min_trace : 0.0;
  report.max_identity_defect = max_defect;
  if (!psd_all.empty()) {
    std::vector<double> sorted = psd_all;
    std::sort(sorted.begin(), sorted.end());
    report.psd_slack_p01 = sorted[static_cast<size_t>(0.01 * (sorted.size() - 1))];
  }
  contactdetail::fill_histogram(report.psd_slacks, report.psd_histogram, &report.psd_hist_lo,
                                &report.psd_hist_hi);
  contactdetail::fill_histogram(report.det_margins, report.margin_histogram,
                                &report.margin_hist_lo, &report.margin_hist_hi);
  return report;
}

/// Ratio of the mode's integral upper bound to the covered volume (the final
/// display of each chain); the inequality holds when the ratio is >= 1.
template <typename Mesh>
double abp_volume_lower_bound(const ContactMachine<Mesh>& machine) {
  const Mesh& mesh = machine.mesh();
  const ScalarField& f = machine.density();
  const double n = 2.0;
  switch (machine.mode()) {
    case ContactMode::kSobolev: {
      ScalarField fp(f.size());
      for (int v = 0; v < f.size(); ++v) fp[v] = std::pow(f[v], n / (n - 1.0));
      return integrate(mesh, fp) / ball_volume(2);
    }
    case ContactMode::kFwc: {
      const CurvatureData* curv = machine.curvature_data();
      ScalarField hn(f.size());
      for (int v = 0; v < f.size(); ++v) {
        hn[v] = std::pow(curv->H.row(v).norm() / n, n);
      }
      return integrate(mesh, hn) / sphere_area(2);
    }
    case ContactMode::kMichaelSimon: {
      int m = static_cast<int>(mesh.vertices.cols()) - 2;
      require(m >= 2, "abp_volume_lower_bound: michael_simon mode needs codimension >= 2");
      ScalarField fp(f.size());
      for (int v = 0; v < f.size(); ++v) fp[v] = std::pow(f[v], n / (n - 1.0));
      return m * ball_volume(m) * integrate(mesh, fp) / ((n + m) * ball_volume(2 + m));
    }
    case ContactMode::kLogSobolev: {
      return std::pow(4.0 * M_PI, -n / 2.0) * std::exp(-n) * integrate(mesh, f);
    }
  }
  return 0.0;
}

}  // namespace abpv
