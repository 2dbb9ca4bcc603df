#include <catch2/catch_amalgamated.hpp>

#include "abpv/mesh.hpp"
#include "abpv/operators.hpp"
#include "abpv/shapes.hpp"

using namespace abpv;

namespace {

ScalarField eval_on(const DomainMesh& mesh, double (*fn)(double, double)) {
  ScalarField f(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) f[v] = fn(mesh.vertices(v, 0), mesh.vertices(v, 1));
  return f;
}

}  // namespace

TEST_CASE("vertex-lumped quadrature") {
  DomainMesh disk = make_disk(1.0, 5);
  SECTION("constant field gives the mesh area") {
    ScalarField ones = ScalarField::Ones(disk.num_vertices());
    CHECK(integrate(disk, ones) == Catch::Approx(total_area(disk)).epsilon(1e-13));
    CHECK(std::abs(integrate(disk, ones) - M_PI) < 2e-3);
    CHECK(integrate_boundary(disk, ones) == Catch::Approx(boundary_length(disk)).epsilon(1e-13));
  }
  SECTION("x^2 on the unit disk integrates to pi/4") {
    ScalarField f = eval_on(disk, [](double x, double) { return x * x; });
    CHECK(std::abs(integrate(disk, f) - M_PI / 4.0) < 1e-3);
  }
  SECTION("linearity is exact") {
    ScalarField f = eval_on(disk, [](double x, double y) { return std::sin(x) + y; });
    ScalarField g = eval_on(disk, [](double x, double y) { return x * y - 2.0; });
    double sum = integrate(disk, ScalarField(f + g));
    CHECK(sum == Catch::Approx(integrate(disk, f) + integrate(disk, g)).epsilon(1e-12).margin(1e-12));
    CHECK(integrate(disk, ScalarField(3.5 * f)) ==
          Catch::Approx(3.5 * integrate(disk, f)).epsilon(1e-13).margin(1e-13));
  }
  SECTION("mismatched field is rejected") {
    ScalarField bad = ScalarField::Ones(7);
    CHECK_THROWS(integrate(disk, bad));
  }
}

TEST_CASE("P1 gradient is exact on affine fields") {
  DomainMesh disk = make_disk(1.0, 3);
  ScalarField f = eval_on(disk, [](double x, double y) { return 2.0 * x - 3.0 * y + 0.5; });
  VectorField g = gradient(disk, f);
  for (int fi = 0; fi < disk.num_faces(); ++fi) {
    CHECK(g(fi, 0) == Catch::Approx(2.0).epsilon(1e-12));
    CHECK(g(fi, 1) == Catch::Approx(-3.0).epsilon(1e-12));
  }
  ScalarField c = ScalarField::Constant(disk.num_vertices(), 4.0);
  CHECK(gradient(disk, c).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gradient of |x|^2/2 approximates the face barycenter") {
  DomainMesh disk = make_disk(1.0, 4);
  ScalarField f = eval_on(disk, [](double x, double y) { return 0.5 * (x * x + y * y); });
  VectorField g = gradient(disk, f);
  double worst = 0.0;
  for (int fi = 0; fi < disk.num_faces(); ++fi) {
    Eigen::Vector2d bary = (disk.vertices.row(disk.triangles(fi, 0)) +
                            disk.vertices.row(disk.triangles(fi, 1)) +
                            disk.vertices.row(disk.triangles(fi, 2))) /
                           3.0;
    worst = std::max(worst, (g.row(fi).transpose() - bary).norm());
  }
  CHECK(worst < 2.0 * disk.mean_edge_length);
}

TEST_CASE("hessian recovery reproduces quadratics on planar meshes") {
  DomainMesh disk = make_disk(1.0, 3);
  SECTION("|x|^2/2 gives the identity") {
    ScalarField f = eval_on(disk, [](double x, double y) { return 0.5 * (x * x + y * y); });
    SymmetricField h = hessian_recover(disk, f);
    for (int v = 0; v < disk.num_vertices(); ++v) {
      if (!h.valid[v]) continue;
      CHECK((h.mats[v] - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
  SECTION("linear fields give zero") {
    ScalarField f = eval_on(disk, [](double x, double y) { return 1.0 + x - 5.0 * y; });
    SymmetricField h = hessian_recover(disk, f);
    for (int v = 0; v < disk.num_vertices(); ++v) {
      if (!h.valid[v]) continue;
      CHECK(h.mats[v].cwiseAbs().maxCoeff() < 1e-9);
    }
  }
  SECTION("x^2 - 3xy reproduces its coefficient matrix") {
    ScalarField f = eval_on(disk, [](double x, double y) { return x * x - 3.0 * x * y; });
    SymmetricField h = hessian_recover(disk, f);
    Eigen::Matrix2d expected;
    expected << 2.0, -3.0, -3.0, 0.0;
    int checked = 0;
    for (int v = 0; v < disk.num_vertices(); ++v) {
      if (!h.valid[v]) continue;
      CHECK((h.mats[v] - expected).cwiseAbs().maxCoeff() < 1e-9);
      ++checked;
    }
    CHECK(checked > disk.num_vertices() / 2);
  }
}

TEST_CASE("sphere curvature: H = n/R pointing inward") {
  SurfaceMesh sphere = make_icosphere(1.0, 3);
  CurvatureData cd = curvature(sphere);
  double worst = 0.0;
  for (int v = 0; v < sphere.num_vertices(); ++v) {
    Eigen::Vector3d pos = sphere.vertices.row(v);
    Eigen::Vector3d H = cd.H.row(v);
    worst = std::max(worst, (H + 2.0 * pos).norm());
  }
  INFO("max |H - (-2x)| = " << worst);
  CHECK(worst < 2e-2);
}

TEST_CASE("sphere curvature: trace consistency under refinement") {
  double prev = 0.0;
  for (int level : {2, 3}) {
    SurfaceMesh sphere = make_icosphere(1.0, level);
    CurvatureData cd = curvature(sphere);
    double worst = 0.0;
    for (int v = 0; v < sphere.num_vertices(); ++v) {
      if (!cd.valid[v]) continue;
      Eigen::VectorXd traced = Eigen::VectorXd::Zero(sphere.dim());
      for (int a = 0; a < sphere.codim(); ++a) {
        traced += cd.II[v][a].trace() * sphere.normal_frame[v].row(a).transpose();
      }
      worst = std::max(worst, (traced - cd.H.row(v).transpose()).norm());
    }
    INFO("level " << level << " worst " << worst);
    CHECK(worst < 3.0 * sphere.mean_edge_length);
    if (level == 3) CHECK(worst < prev);
    prev = worst;
  }
}

TEST_CASE("flat disk in R4 is totally geodesic") {
  SurfaceMesh disk4 = make_flat_disk4(1.0, 3);
  CurvatureData cd = curvature(disk4);
  CHECK(cd.H.cwiseAbs().maxCoeff() < 1e-10);
  for (int v = 0; v < disk4.num_vertices(); ++v) {
    if (!cd.valid[v]) continue;
    for (int a = 0; a < 2; ++a) CHECK(cd.II[v][a].cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("circle curvature: |H| = 1 and total turning 2 pi") {
  CurveMesh circle = make_circle(1.0, 512);
  CurveCurvature cc = curvature(circle);
  CHECK(cc.total_curvature == Catch::Approx(2.0 * M_PI).margin(1e-6));
  for (int v = 0; v < circle.num_vertices(); ++v) {
    CHECK(cc.H.row(v).norm() == Catch::Approx(1.0).epsilon(1e-3));
    // Points toward the center.
    Eigen::VectorXd pos = circle.vertices.row(v);
    CHECK(cc.H.row(v).dot(pos) < 0.0);
  }
  // Lumped integral of |H| equals the turning-angle sum exactly.
  ScalarField habs(circle.num_vertices());
  for (int v = 0; v < circle.num_vertices(); ++v) habs[v] = cc.H.row(v).norm();
  CHECK(integrate(circle, habs) == Catch::Approx(cc.total_curvature).epsilon(1e-12));
}

TEST_CASE("ellipse total curvature is exactly 2 pi") {
  CurveMesh ellipse = make_ellipse(2.0, 1.0, 512);
  CurveCurvature cc = curvature(ellipse);
  CHECK(cc.total_curvature == Catch::Approx(2.0 * M_PI).epsilon(1e-12));
}

TEST_CASE("trefoil total curvature exceeds 4 pi") {
  CurveMesh knot = make_torus_knot(2, 3, 2.0, 1.0, 1024);
  CurveCurvature cc = curvature(knot);
  INFO("total curvature / pi = " << cc.total_curvature / M_PI);
  CHECK(cc.total_curvature > 4.0 * M_PI);
}
