#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "geotess/errors.hpp"
#include "geotess/mesh.hpp"

namespace geotess {

namespace {

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r\n") == std::string::npos; }

}  // namespace

Mesh parse_mesh(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  long nv = -1, nt = -1;
  std::vector<Point2> vertices;
  std::vector<Triangle> triangles;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = strip_comment(line);
    if (blank(body)) continue;
    std::istringstream ls(body);
    if (nv < 0) {
      std::string magic, version;
      if (!(ls >> magic >> version >> nv >> nt) || magic != "geomesh" || version != "v1" || nv < 0 || nt < 0)
        throw LoadError("expected header 'geomesh v1 <n_vertices> <n_triangles>'", lineno);
      vertices.reserve(nv);
      triangles.reserve(nt);
    } else if (static_cast<long>(vertices.size()) < nv) {
      Point2 p;
      if (!(ls >> p.x >> p.y) || !std::isfinite(p.x) || !std::isfinite(p.y))
        throw LoadError("expected vertex 'x y'", lineno);
      vertices.push_back(p);
    } else if (static_cast<long>(triangles.size()) < nt) {
      long a, b, c;
      if (!(ls >> a >> b >> c)) throw LoadError("expected triangle 'i j k'", lineno);
      for (long v : {a, b, c})
        if (v < 0 || v >= nv) throw LoadError("vertex index " + std::to_string(v) + " out of range", lineno);
      const Triangle t{static_cast<int>(a), static_cast<int>(b), static_cast<int>(c)};
      if (orient2d(vertices[t[0]], vertices[t[1]], vertices[t[2]]) == 0.0)
        throw LoadError("degenerate triangle", lineno);
      triangles.push_back(t);
    } else {
      throw LoadError("unexpected trailing data", lineno);
    }
    std::string extra;
    if (ls >> extra) throw LoadError("unexpected token '" + extra + "'", lineno);
  }
  if (nv < 0) throw LoadError("missing header", 0);
  if (static_cast<long>(vertices.size()) != nv || static_cast<long>(triangles.size()) != nt)
    throw LoadError("file ends before all vertices/triangles were read", lineno);
  try {
    return Mesh::from_triangles(std::move(vertices), std::move(triangles));
  } catch (const InvalidArgument& e) {
    throw LoadError(e.what(), 0);
  }
}

Mesh load_mesh(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw LoadError("cannot open '" + path + "'", 0);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_mesh(ss.str());
}

std::string format_mesh(const Mesh& mesh) {
  std::string out = "geomesh v1 " + std::to_string(mesh.vertices().size()) + " " +
                    std::to_string(mesh.triangles().size()) + "\n";
  char buf[64];
  for (const auto& p : mesh.vertices()) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.x, p.y);
    out += buf;
  }
  for (const auto& t : mesh.triangles()) {
    std::snprintf(buf, sizeof buf, "%d %d %d\n", t[0], t[1], t[2]);
    out += buf;
  }
  return out;
}

void save_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write '" + path + "'");
  f << format_mesh(mesh);
}

}  // namespace geotess
