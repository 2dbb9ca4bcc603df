#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "abpv/common.hpp"
#include "abpv/mesh.hpp"
#include "abpv/shapes.hpp"

namespace abpv {

enum class MeshFormat { kOff, kObj };

inline MeshFormat format_from_path(const std::string& path) {
  auto dot = path.find_last_of('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  for (auto& c : ext) c = static_cast<char>(std::tolower(c));
  if (ext == "off") return MeshFormat::kOff;
  if (ext == "obj") return MeshFormat::kObj;
  fail("mesh_io: cannot infer format from path '", path, "' (expected .off or .obj)");
}

namespace iodetail {

struct RawMesh {
  Eigen::MatrixXd vertices;   // V x d, d in {2, 3, 4}
  Eigen::MatrixXi triangles;  // may be empty
  std::vector<std::vector<int>> polylines;
};

inline std::vector<std::string> tokens_of(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> toks;
  std::string t;
  while (is >> t) {
    if (t[0] == '#') break;
    toks.push_back(t);
  }
  return toks;
}

inline double parse_double(const std::string& t, int lineno, const std::string& path) {
  try {
    size_t used = 0;
    double v = std::stod(t, &used);
    require(used == t.size(), "");
    return v;
  } catch (...) {
    fail(path, ":", lineno, ": expected a number, got '", t, "'");
  }
}

inline int parse_index(const std::string& t, int lineno, const std::string& path, int nv,
                       int base) {
  try {
    size_t used = 0;
    long v = std::stol(t, &used) - base;
    require(used == t.size() || t[used] == '/', "");
    require(v >= 0 && v < nv, "");
    return static_cast<int>(v);
  } catch (...) {
    fail(path, ":", lineno, ": vertex index '", t, "' is malformed or out of range");
  }
}

inline RawMesh read_off(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "mesh_io: cannot open '", path, "'");
  RawMesh raw;
  std::string line;
  int lineno = 0;
  auto next_tokens = [&](std::vector<std::string>& toks) {
    while (std::getline(in, line)) {
      ++lineno;
      toks = tokens_of(line);
      if (!toks.empty()) return true;
    }
    return false;
  };
  std::vector<std::string> toks;
  require(next_tokens(toks) && toks[0] == "OFF", path, ":", lineno, ": missing OFF header");
  require(next_tokens(toks) && toks.size() >= 2, path, ":", lineno, ": missing element counts");
  int nv = static_cast<int>(parse_double(toks[0], lineno, path));
  int nf = static_cast<int>(parse_double(toks[1], lineno, path));
  require(nv > 0 && nf >= 0, path, ":", lineno, ": bad element counts");

  int dim = 0;
  std::vector<double> coords;
  for (int v = 0; v < nv; ++v) {
    require(next_tokens(toks), path, ":", lineno, ": unexpected end of file in vertex list");
    if (dim == 0) {
      dim = static_cast<int>(toks.size());
      require(dim >= 2 && dim <= 4, path, ":", lineno, ": unsupported vertex dimension ", dim);
    }
    require(static_cast<int>(toks.size()) == dim, path, ":", lineno,
            ": inconsistent coordinate count");
    for (int k = 0; k < dim; ++k) coords.push_back(parse_double(toks[k], lineno, path));
  }
  raw.vertices.resize(nv, dim);
  for (int v = 0; v < nv; ++v) {
    for (int k = 0; k < dim; ++k) raw.vertices(v, k) = coords[v * dim + k];
  }
  std::vector<Eigen::Vector3i> tris;
  for (int f = 0; f < nf; ++f) {
    require(next_tokens(toks), path, ":", lineno, ": unexpected end of file in face list");
    int arity = parse_index(toks[0], lineno, path, 16, 0);
    require(arity == 3 && static_cast<int>(toks.size()) >= 4, path, ":", lineno,
            ": only triangles are supported");
    tris.emplace_back(parse_index(toks[1], lineno, path, nv, 0),
                      parse_index(toks[2], lineno, path, nv, 0),
                      parse_index(toks[3], lineno, path, nv, 0));
  }
  raw.triangles.resize(tris.size(), 3);
  for (size_t i = 0; i < tris.size(); ++i) raw.triangles.row(i) = tris[i].transpose();
  return raw;
}

inline RawMesh read_obj(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "mesh_io: cannot open '", path, "'");
  RawMesh raw;
  std::vector<std::vector<double>> verts;
  std::vector<Eigen::Vector3i> tris;
  std::string line;
  int lineno = 0;
  int dim = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = tokens_of(line);
    if (toks.empty()) continue;
    if (toks[0] == "v") {
      int d = static_cast<int>(toks.size()) - 1;
      require(d >= 2 && d <= 4, path, ":", lineno, ": unsupported vertex dimension ", d);
      if (dim == 0) dim = d;
      require(d == dim, path, ":", lineno, ": inconsistent coordinate count");
      std::vector<double> c;
      for (int k = 0; k < d; ++k) c.push_back(parse_double(toks[k + 1], lineno, path));
      verts.push_back(std::move(c));
    } else if (toks[0] == "f") {
      require(toks.size() == 4, path, ":", lineno, ": only triangle faces are supported");
      int nv = static_cast<int>(verts.size());
      tris.emplace_back(parse_index(toks[1], lineno, path, nv, 1),
                        parse_index(toks[2], lineno, path, nv, 1),
                        parse_index(toks[3], lineno, path, nv, 1));
    } else if (toks[0] == "l") {
      require(toks.size() >= 3, path, ":", lineno, ": polyline needs at least 2 vertices");
      std::vector<int> pl;
      int nv = static_cast<int>(verts.size());
      for (size_t k = 1; k < toks.size(); ++k) {
        pl.push_back(parse_index(toks[k], lineno, path, nv, 1));
      }
      raw.polylines.push_back(std::move(pl));
    }
  }
  require(!verts.empty(), path, ": no vertices found");
  raw.vertices.resize(verts.size(), dim);
  for (size_t v = 0; v < verts.size(); ++v) {
    for (int k = 0; k < dim; ++k) raw.vertices(v, k) = verts[v][k];
  }
  raw.triangles.resize(tris.size(), 3);
  for (size_t i = 0; i < tris.size(); ++i) raw.triangles.row(i) = tris[i].transpose();
  return raw;
}

}  // namespace iodetail

/// Loads an ASCII OFF or OBJ file. The mesh kind is inferred from the
/// content: 2D vertices with triangles give a DomainMesh, 3D/4D vertices with
/// triangles a SurfaceMesh, polyline-only content a CurveMesh.
inline AnyMesh load_mesh(const std::string& path, MeshFormat format) {
  iodetail::RawMesh raw =
      format == MeshFormat::kOff ? iodetail::read_off(path) : iodetail::read_obj(path);
  if (raw.triangles.rows() == 0 && !raw.polylines.empty()) {
    require(raw.polylines.size() == 1, "mesh_io: '", path, "': expected a single polyline");
    const auto& pl = raw.polylines[0];
    CurveMesh curve;
    bool closed = pl.front() == pl.back();
    int n = closed ? static_cast<int>(pl.size()) - 1 : static_cast<int>(pl.size());
    curve.closed = closed;
    curve.vertices.resize(n, raw.vertices.cols());
    for (int i = 0; i < n; ++i) curve.vertices.row(i) = raw.vertices.row(pl[i]);
    finalize_curve_mesh(curve);
    return curve;
  }
  require(raw.triangles.rows() > 0, "mesh_io: '", path, "': no usable elements");
  if (raw.vertices.cols() == 2) {
    DomainMesh mesh;
    mesh.vertices = raw.vertices;
    mesh.triangles = raw.triangles;
    finalize_domain_mesh(mesh);
    return mesh;
  }
  SurfaceMesh mesh;
  mesh.vertices = raw.vertices;
  mesh.triangles = raw.triangles;
  finalize_surface_mesh(mesh);
  return mesh;
}

inline AnyMesh load_mesh(const std::string& path) { return load_mesh(path, format_from_path(path)); }

namespace iodetail {

inline void write_off_impl(std::ostream& out, const Eigen::MatrixXd& V, const Eigen::MatrixXi& F) {
  out << "OFF\n" << V.rows() << " " << F.rows() << " 0\n";
  out.precision(17);
  for (int v = 0; v < V.rows(); ++v) {
    for (int k = 0; k < V.cols(); ++k) out << (k ? " " : "") << V(v, k);
    out << "\n";
  }
  for (int f = 0; f < F.rows(); ++f) {
    out << "3 " << F(f, 0) << " " << F(f, 1) << " " << F(f, 2) << "\n";
  }
}

}  // namespace iodetail

template <typename Mesh>
void save_off(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), "mesh_io: cannot write '", path, "'");
  iodetail::write_off_impl(out, mesh.vertices, mesh.triangles);
}

inline void save_obj(const CurveMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), "mesh_io: cannot write '", path, "'");
  out.precision(17);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    out << "v";
    for (int k = 0; k < mesh.dim(); ++k) out << " " << mesh.vertices(v, k);
    out << "\n";
  }
  out << "l";
  for (int v = 0; v < mesh.num_vertices(); ++v) out << " " << v + 1;
  if (mesh.closed) out << " 1";
  out << "\n";
}

}  // namespace abpv
