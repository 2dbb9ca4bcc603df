#include <catch2/catch_amalgamated.hpp>
#include <cstdio>
#include <fstream>

#include "abpv/mesh.hpp"
#include "abpv/mesh_io.hpp"
#include "abpv/operators.hpp"
#include "abpv/shapes.hpp"

using namespace abpv;

TEST_CASE("disk generator: perimeter and area converge") {
  DomainMesh disk = make_disk(1.0, 4);
  INFO("vertices " << disk.num_vertices() << " faces " << disk.num_faces());
  CHECK(disk.boundary_loops.size() == 1);
  CHECK(std::abs(boundary_length(disk) - 2.0 * M_PI) < 1e-3);
  // Triangulated polygon area equals the inscribed N-gon area.
  int nseg = static_cast<int>(disk.boundary_loops[0].size());
  double ngon = 0.5 * nseg * std::sin(2.0 * M_PI / nseg);
  CHECK(total_area(disk) == Catch::Approx(ngon).epsilon(1e-12));
}

TEST_CASE("disk conormals point outward and perpendicular to the edge") {
  DomainMesh disk = make_disk(1.0, 2);
  for (const auto& be : disk.boundary_edges) {
    Eigen::Vector2d edge = disk.vertices.row(be.b) - disk.vertices.row(be.a);
    CHECK(std::abs(be.conormal.dot(edge.normalized())) < 1e-12);
    Eigen::Vector2d mid = 0.5 * (disk.vertices.row(be.a) + disk.vertices.row(be.b));
    CHECK(be.conormal.dot(mid) > 0.0);  // outward for a star-shaped domain
    CHECK(be.conormal.norm() == Catch::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("square generator is exact") {
  DomainMesh sq = make_square(1.0, 2);
  CHECK(total_area(sq) == Catch::Approx(1.0).epsilon(1e-13));
  CHECK(boundary_length(sq) == Catch::Approx(4.0).epsilon(1e-13));
  CHECK(sq.boundary_loops.size() == 1);
}

TEST_CASE("annulus has two boundary loops and closed-form measures") {
  DomainMesh an = make_annulus(0.5, 1.0, 3);
  CHECK(an.boundary_loops.size() == 2);
  CHECK(std::abs(boundary_length(an) - 3.0 * M_PI) < 3e-3);
  CHECK(std::abs(total_area(an) - 0.75 * M_PI) < 3e-3);
}

TEST_CASE("icosphere area approaches the round sphere") {
  SurfaceMesh s3 = make_icosphere(1.0, 3);
  INFO("area " << total_area(s3));
  CHECK(s3.closed());
  CHECK(std::abs(total_area(s3) - 4.0 * M_PI) / (4.0 * M_PI) < 1e-2);
  SurfaceMesh s4 = make_icosphere(1.0, 4);
  double d3 = std::abs(total_area(s3) - 4.0 * M_PI);
  double d4 = std::abs(total_area(s4) - 4.0 * M_PI);
  CHECK(d4 < 0.3 * d3);
}

TEST_CASE("surface frames are orthonormal with tangent perpendicular to normal") {
  for (const SurfaceMesh& mesh : {make_icosphere(1.0, 2), make_flat_disk4(1.0, 2)}) {
    const int d = mesh.dim();
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      Eigen::MatrixXd frame(d, d);
      frame.topRows(2) = mesh.tangent_frame[v];
      frame.bottomRows(d - 2) = mesh.normal_frame[v];
      Eigen::MatrixXd gram = frame * frame.transpose();
      CHECK((gram - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("icosphere tangent planes are perpendicular to the radial direction") {
  SurfaceMesh sphere = make_icosphere(1.0, 3);
  double worst = 0.0;
  for (int v = 0; v < sphere.num_vertices(); ++v) {
    Eigen::VectorXd radial = sphere.vertices.row(v).normalized();
    worst = std::max(worst, (sphere.tangent_frame[v] * radial).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 2e-2);
}

TEST_CASE("circle generator: closed curve with inscribed-polygon length") {
  CurveMesh circle = make_circle(1.0, 256);
  CHECK(circle.closed);
  double expected = 2.0 * 256 * std::sin(M_PI / 256);
  CHECK(curve_length(circle) == Catch::Approx(expected).epsilon(1e-13));
  CHECK(std::abs(curve_length(circle) - 2.0 * M_PI) < 1e-3);
}

TEST_CASE("mesh io round-trips and reports malformed input") {
  std::string dir = std::string(ABPV_SOURCE_DIR) + "/build";
  SECTION("off round-trip for the disk") {
    DomainMesh disk = make_disk(1.0, 2);
    std::string path = std::tmpnam(nullptr) + std::string(".off");
    save_off(disk, path);
    AnyMesh loaded = load_mesh(path, MeshFormat::kOff);
    REQUIRE(std::holds_alternative<DomainMesh>(loaded));
    const auto& back = std::get<DomainMesh>(loaded);
    CHECK(back.num_vertices() == disk.num_vertices());
    CHECK(back.boundary_loops.size() == 1);
    CHECK(total_area(back) == Catch::Approx(total_area(disk)).epsilon(1e-14));
    std::remove(path.c_str());
  }
  SECTION("obj round-trip for the icosphere") {
    SurfaceMesh sphere = make_icosphere(1.0, 2);
    std::string path = std::tmpnam(nullptr) + std::string(".off");
    save_off(sphere, path);
    AnyMesh loaded = load_mesh(path);
    REQUIRE(std::holds_alternative<SurfaceMesh>(loaded));
    CHECK(std::get<SurfaceMesh>(loaded).closed());
    std::remove(path.c_str());
  }
  SECTION("malformed index names the line") {
    std::string path = std::tmpnam(nullptr) + std::string(".off");
    {
      std::ofstream out(path);
      out << "OFF\n3 1 0\n0 0\n1 0\n0 1\n3 0 1 9\n";
    }
    try {
      load_mesh(path, MeshFormat::kOff);
      FAIL("expected a parse error");
    } catch (const std::exception& e) {
      std::string msg = e.what();
      CHECK(msg.find(":6") != std::string::npos);  // line number
      CHECK(msg.find("9") != std::string::npos);
    }
    std::remove(path.c_str());
  }
  SECTION("non-manifold connectivity is rejected") {
    DomainMesh mesh;
    mesh.vertices.resize(4, 2);
    mesh.vertices << 0, 0, 1, 0, 0, 1, 1, 1;
    mesh.triangles.resize(2, 3);
    mesh.triangles << 0, 1, 2, 0, 1, 3;  // directed edge (0,1) twice
    CHECK_THROWS(finalize_domain_mesh(mesh));
  }
  SECTION("degenerate elements are rejected") {
    DomainMesh mesh;
    mesh.vertices.resize(3, 2);
    mesh.vertices << 0, 0, 1, 0, 2, 0;  // collinear
    mesh.triangles.resize(1, 3);
    mesh.triangles << 0, 1, 2;
    CHECK_THROWS(finalize_domain_mesh(mesh));
  }
}
