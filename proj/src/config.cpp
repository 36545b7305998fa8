#include "geotess/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace geotess {

namespace {

using boost::property_tree::ptree;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s;
}

std::string fmt_points(const std::vector<Point2>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "; " : "") + fmt(v[i].x) + " " + fmt(v[i].y);
  return s;
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size() || std::isnan(v))
    throw ConfigError(key, "expected a number, got '" + t + "'");
  return v;
}

long long to_integer(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  long long v = 0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size()) throw ConfigError(key, "expected an integer, got '" + t + "'");
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  const std::string t = lower(trim(text));
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError(key, "expected true or false, got '" + t + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::string t = text;
  std::replace(t.begin(), t.end(), ',', ' ');
  std::istringstream in(t);
  std::vector<double> out;
  std::string item;
  while (in >> item) out.push_back(to_double(key, item));
  return out;
}

std::vector<Point2> to_points(const std::string& key, const std::string& text) {
  std::vector<Point2> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ';')) {
    if (trim(item).empty()) continue;
    const auto v = to_list(key, item);
    if (v.size() != 2) throw ConfigError(key, "expected 'x y' pairs separated by ';', got '" + trim(item) + "'");
    out.push_back({v[0], v[1]});
  }
  return out;
}

Point2 to_point(const std::string& key, const std::string& text) {
  const auto v = to_list(key, text);
  if (v.size() != 2) throw ConfigError(key, "expected 'x, y'");
  return {v[0], v[1]};
}

// One INI section with key bookkeeping so that unknown keys are reported.
class Section {
 public:
  Section(std::string name, const ptree* tree) : name_(std::move(name)), tree_(tree) {}

  const std::string* raw(const std::string& key) {
    used_.insert(key);
    if (!tree_) return nullptr;
    const auto it = tree_->find(key);
    if (it == tree_->not_found()) return nullptr;
    return &it->second.data();
  }
  std::string key(const std::string& k) const { return name_ + "." + k; }

  void text(const std::string& k, std::string& out) {
    if (auto r = raw(k)) out = trim(*r);
  }
  void number(const std::string& k, double& out) {
    if (auto r = raw(k)) out = to_double(key(k), *r);
  }
  void integer(const std::string& k, int& out) {
    if (auto r = raw(k)) out = static_cast<int>(to_integer(key(k), *r));
  }
  void flag(const std::string& k, bool& out) {
    if (auto r = raw(k)) out = to_bool(key(k), *r);
  }
  void point(const std::string& k, Point2& out) {
    if (auto r = raw(k)) out = to_point(key(k), *r);
  }
  bool has(const std::string& k) const { return tree_ && tree_->find(k) != tree_->not_found(); }

  void check_unknown() const {
    if (!tree_) return;
    for (const auto& [k, v] : *tree_)
      if (!used_.count(k)) throw ConfigError(key(k), "unknown key");
  }

 private:
  std::string name_;
  const ptree* tree_;
  std::set<std::string> used_;
};

MetricConfig read_metric(const ptree& root, const std::string& name, std::set<std::string>& seen, int depth) {
  if (depth > 8) throw ConfigError(name, "maxof members nest too deeply");
  const auto it = root.find(name);
  if (it == root.not_found()) throw ConfigError(name, "missing metric section");
  seen.insert(name);
  Section s(name, &it->second);
  MetricConfig m;
  m.name = name;
  s.text("kind", m.kind);
  m.kind = lower(m.kind);
  s.number("s", m.s);
  s.text("a_expr", m.a_expr);
  s.text("A_expr", m.A_expr);
  s.number("delta", m.delta);
  std::string members;
  s.text("members", members);
  if (m.kind == "maxof") {
    std::string list = members;
    std::replace(list.begin(), list.end(), ',', ' ');
    std::istringstream in(list);
    std::string member;
    while (in >> member) m.members.push_back(read_metric(root, member, seen, depth + 1));
    if (m.members.empty()) throw ConfigError(s.key("members"), "maxof needs at least one member section");
  } else if (!members.empty()) {
    throw ConfigError(s.key("members"), "only valid for kind = maxof");
  }
  static const std::set<std::string> kinds{"euclidean", "isotropic", "minkowski", "riemannian", "maxof"};
  if (!kinds.count(m.kind)) throw ConfigError(s.key("kind"), "unknown metric '" + m.kind + "'");
  s.check_unknown();
  return m;
}

void format_metric(std::ostringstream& os, const MetricConfig& m) {
  os << "\n[" << m.name << "]\n";
  os << "kind = " << m.kind << "\n";
  if (m.kind == "minkowski") os << "s = " << fmt(m.s) << "\n";
  if (m.kind == "isotropic") os << "a_expr = " << m.a_expr << "\ndelta = " << fmt(m.delta) << "\n";
  if (m.kind == "riemannian") os << "A_expr = " << m.A_expr << "\ndelta = " << fmt(m.delta) << "\n";
  if (m.kind == "maxof") {
    os << "members = ";
    for (std::size_t i = 0; i < m.members.size(); ++i) os << (i ? ", " : "") << m.members[i].name;
    os << "\n";
    for (const auto& member : m.members) format_metric(os, member);
  }
}

}  // namespace

RunMode parse_run_mode(const std::string& name) {
  const std::string n = lower(trim(name));
  if (n == "solve") return RunMode::Solve;
  if (n == "cvt") return RunMode::Cvt;
  if (n == "power") return RunMode::Power;
  throw ConfigError("run.mode", "expected solve, cvt or power, got '" + name + "'");
}

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::Solve: return "solve";
    case RunMode::Cvt: return "cvt";
    case RunMode::Power: return "power";
  }
  return "cvt";
}

RunConfig parse_config(const std::string& text) {
  ptree root;
  try {
    std::istringstream in(text);
    boost::property_tree::ini_parser::read_ini(in, root);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("config", std::string("line ") + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [k, v] : root)
    if (v.empty() && !v.data().empty()) throw ConfigError(k, "keys must be inside a section");

  auto section = [&](const std::string& name) {
    const auto it = root.find(name);
    return Section(name, it == root.not_found() ? nullptr : &it->second);
  };
  RunConfig c;

  Section run = section("run");
  if (!run.has("mode")) throw ConfigError("run.mode", "required");
  std::string mode;
  run.text("mode", mode);
  c.mode = parse_run_mode(mode);
  run.integer("threads", c.threads);
  if (auto r = run.raw("seed")) {
    const long long s = to_integer("run.seed", *r);
    if (s < 0) throw ConfigError("run.seed", "must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  run.text("output", c.output);
  if (c.threads < 1) throw ConfigError("run.threads", "must be at least 1");
  run.check_unknown();

  Section dom = section("domain");
  dom.text("kind", c.domain.kind);
  c.domain.kind = lower(c.domain.kind);
  dom.number("max_area", c.domain.max_area);
  if (auto r = dom.raw("bounds")) {
    const auto b = to_list("domain.bounds", *r);
    if (b.size() != 4) throw ConfigError("domain.bounds", "expected 'xmin, xmax, ymin, ymax'");
    c.domain.xmin = b[0];
    c.domain.xmax = b[1];
    c.domain.ymin = b[2];
    c.domain.ymax = b[3];
  }
  dom.point("center", c.domain.center);
  dom.number("radius", c.domain.radius);
  dom.text("name", c.domain.name);
  dom.text("path", c.domain.path);
  static const std::set<std::string> domain_kinds{"rect", "disk", "composite", "file"};
  if (!domain_kinds.count(c.domain.kind)) throw ConfigError("domain.kind", "expected rect, disk, composite or file");
  if (c.domain.kind != "file" && !(c.domain.max_area > 0.0)) throw ConfigError("domain.max_area", "must be positive");
  if (c.domain.kind == "file" && c.domain.path.empty()) throw ConfigError("domain.path", "required for kind = file");
  if (c.domain.kind == "composite") parse_composite_domain(c.domain.name);
  dom.check_unknown();

  Section den = section("density");
  den.text("kind", c.density.kind);
  c.density.kind = lower(c.density.kind);
  den.point("center", c.density.center);
  if (auto r = den.raw("covariance")) {
    const auto v = to_list("density.covariance", *r);
    if (v.size() != 3) throw ConfigError("density.covariance", "expected 'xx, xy, yy'");
    c.density.covariance = {v[0], v[1], v[2]};
  }
  den.text("path", c.density.path);
  if (c.density.kind != "uniform" && c.density.kind != "gaussian" && c.density.kind != "table")
    throw ConfigError("density.kind", "expected uniform, gaussian or table");
  if (c.density.kind == "table" && c.density.path.empty()) throw ConfigError("density.path", "required for kind = table");
  den.check_unknown();

  std::set<std::string> metric_sections;
  if (root.find("metric") != root.not_found()) c.metric = read_metric(root, "metric", metric_sections, 0);

  Section eik = section("eikonal");
  if (auto r = eik.raw("solver")) {
    try {
      c.solver = parse_solver_kind(trim(*r));
    } catch (const InvalidArgument& e) {
      throw ConfigError("eikonal.solver", e.what());
    }
  }
  eik.number("tol", c.eikonal.tol);
  eik.number("h", c.eikonal.h);
  eik.integer("controls", c.eikonal.controls);
  eik.integer("refine_iters", c.eikonal.refine_iters);
  eik.integer("max_sweeps", c.eikonal.max_sweeps);
  eik.number("source_radius", c.eikonal.source_radius);
  if (!(c.eikonal.tol > 0.0)) throw ConfigError("eikonal.tol", "must be positive");
  if (c.eikonal.controls < 4) throw ConfigError("eikonal.controls", "must be at least 4");
  eik.check_unknown();

  Section src = section("source");
  if (auto r = src.raw("point")) {
    c.source = to_point("source.point", *r);
    c.has_source = true;
  }
  src.check_unknown();

  Section cvt = section("cvt");
  cvt.integer("K", c.K);
  if (auto r = cvt.raw("mu0")) c.mu0 = to_points("cvt.mu0", *r);
  cvt.number("eps", c.eps);
  cvt.number("eps_c", c.eps_c);
  cvt.integer("max_outer", c.max_outer);
  if (auto r = cvt.raw("energy_mode")) {
    try {
      c.energy_mode = parse_energy_mode(lower(trim(*r)));
    } catch (const InvalidArgument& e) {
      throw ConfigError("cvt.energy_mode", e.what());
    }
  }
  cvt.flag("point_sources", c.point_sources);
  cvt.flag("monotone_update", c.monotone_update);
  cvt.check_unknown();

  Section pow = section("power");
  if (auto r = pow.raw("capacities")) c.capacities = to_list("power.capacities", *r);
  if (auto r = pow.raw("w0")) c.w0 = to_list("power.w0", *r);
  pow.number("tol_cap", c.tol_cap);
  pow.integer("max_ascent", c.max_ascent);
  pow.check_unknown();

  static const std::set<std::string> known{"run", "domain", "density", "eikonal", "source", "cvt", "power"};
  for (const auto& [k, v] : root)
    if (!known.count(k) && !metric_sections.count(k)) throw ConfigError(k, "unknown section");

  // Mode requirements.
  if (c.mode == RunMode::Solve) {
    if (!c.has_source) throw ConfigError("source.point", "required in solve mode");
  } else {
    if (c.has_source) throw ConfigError("source.point", "only valid in solve mode");
    if (c.K < 0) throw ConfigError("cvt.K", "must be positive");
    if (c.mu0.empty() && c.K == 0) throw ConfigError("cvt.mu0", "give mu0 or K");
    if (!c.mu0.empty() && c.K != 0 && c.K != static_cast<int>(c.mu0.size()))
      throw ConfigError("cvt.K", "does not match the number of mu0 points");
    if (c.K == 0) c.K = static_cast<int>(c.mu0.size());
    if (c.max_outer < 1) throw ConfigError("cvt.max_outer", "must be at least 1");
  }
  if (c.mode == RunMode::Power) {
    if (c.capacities.empty()) throw ConfigError("power.capacities", "required in power mode");
    try {
      validate_capacities(c.capacities, c.K);
    } catch (const InvalidArgument& e) {
      throw ConfigError("power.capacities", e.what());
    }
    if (!c.w0.empty() && static_cast<int>(c.w0.size()) != c.K) throw ConfigError("power.w0", "needs one weight per cell");
    if (c.max_ascent < 1) throw ConfigError("power.max_ascent", "must be at least 1");
  } else if (!c.capacities.empty() || !c.w0.empty()) {
    throw ConfigError("power.capacities", "only valid in power mode");
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const RunConfig& c) {
  std::ostringstream os;
  os << "[run]\nmode = " << to_string(c.mode) << "\nthreads = " << c.threads << "\nseed = " << c.seed
     << "\noutput = " << c.output << "\n";

  os << "\n[domain]\nkind = " << c.domain.kind << "\n";
  if (c.domain.kind != "file") os << "max_area = " << fmt(c.domain.max_area) << "\n";
  if (c.domain.kind == "rect")
    os << "bounds = " << fmt_list({c.domain.xmin, c.domain.xmax, c.domain.ymin, c.domain.ymax}) << "\n";
  if (c.domain.kind == "disk")
    os << "center = " << fmt(c.domain.center.x) << ", " << fmt(c.domain.center.y) << "\nradius = " << fmt(c.domain.radius)
       << "\n";
  if (c.domain.kind == "composite") os << "name = " << c.domain.name << "\n";
  if (c.domain.kind == "file") os << "path = " << c.domain.path << "\n";

  os << "\n[density]\nkind = " << c.density.kind << "\n";
  if (c.density.kind == "gaussian")
    os << "center = " << fmt(c.density.center.x) << ", " << fmt(c.density.center.y) << "\ncovariance = "
       << fmt_list({c.density.covariance.xx, c.density.covariance.xy, c.density.covariance.yy}) << "\n";
  if (c.density.kind == "table") os << "path = " << c.density.path << "\n";

  format_metric(os, c.metric);

  os << "\n[eikonal]\nsolver = " << to_string(c.solver) << "\ntol = " << fmt(c.eikonal.tol) << "\nh = " << fmt(c.eikonal.h)
     << "\ncontrols = " << c.eikonal.controls << "\nrefine_iters = " << c.eikonal.refine_iters
     << "\nmax_sweeps = " << c.eikonal.max_sweeps << "\nsource_radius = " << fmt(c.eikonal.source_radius) << "\n";

  if (c.mode == RunMode::Solve) {
    os << "\n[source]\npoint = " << fmt(c.source.x) << ", " << fmt(c.source.y) << "\n";
    return os.str();
  }
  os << "\n[cvt]\nK = " << c.K << "\n";
  if (!c.mu0.empty()) os << "mu0 = " << fmt_points(c.mu0) << "\n";
  os << "eps = " << fmt(c.eps) << "\neps_c = " << fmt(c.eps_c) << "\nmax_outer = " << c.max_outer
     << "\nenergy_mode = " << to_string(c.energy_mode) << "\npoint_sources = " << (c.point_sources ? "true" : "false")
     << "\nmonotone_update = " << (c.monotone_update ? "true" : "false") << "\n";
  if (c.mode == RunMode::Power) {
    os << "\n[power]\ncapacities = " << fmt_list(c.capacities) << "\n";
    if (!c.w0.empty()) os << "w0 = " << fmt_list(c.w0) << "\n";
    os << "tol_cap = " << fmt(c.tol_cap) << "\nmax_ascent = " << c.max_ascent << "\n";
  }
  return os.str();
}

Mesh build_mesh(const RunConfig& c) {
  const auto& d = c.domain;
  if (d.kind == "rect") return generate_rect_mesh(d.xmin, d.xmax, d.ymin, d.ymax, d.max_area);
  if (d.kind == "disk") return generate_disk_mesh(d.center, d.radius, d.max_area);
  if (d.kind == "composite") return generate_composite_mesh(parse_composite_domain(d.name), d.max_area);
  return load_mesh(d.path);
}

DensityField build_density(const Mesh& mesh, const RunConfig& c) {
  if (c.density.kind == "gaussian") return build_density(mesh, DensitySpec::gaussian(c.density.center, c.density.covariance));
  if (c.density.kind == "table") {
    std::ifstream in(c.density.path);
    if (!in) throw ConfigError("density.path", "cannot open " + c.density.path);
    std::vector<double> values;
    std::string item;
    while (in >> item) values.push_back(to_double("density.path", item));
    return build_density(mesh, DensitySpec::from_table(std::move(values)));
  }
  return build_density(mesh, DensitySpec::uniform());
}

MetricSpec build_metric(const MetricConfig& m) {
  try {
    if (m.kind == "isotropic") return MetricSpec::isotropic(ScalarField::expression(m.a_expr), m.delta);
    if (m.kind == "minkowski") return MetricSpec::minkowski(m.s);
    if (m.kind == "riemannian") return MetricSpec::riemannian(MatrixField::expression(m.A_expr), m.delta);
    if (m.kind == "maxof") {
      std::vector<MetricSpec> members;
      for (const auto& member : m.members) members.push_back(build_metric(member));
      return MetricSpec::max_of(std::move(members));
    }
    return MetricSpec::euclidean();
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError(m.name, e.what());
  }
}

std::vector<Point2> resolve_generators(const RunConfig& c, const Mesh& mesh) {
  if (c.K > mesh.size())
    throw ConfigError("cvt.K", std::to_string(c.K) + " generators exceed " + std::to_string(mesh.size()) + " triangles");
  if (!c.mu0.empty()) {
    for (std::size_t k = 0; k < c.mu0.size(); ++k)
      if (!mesh.contains(c.mu0[k])) throw ConfigError("cvt.mu0", "point " + std::to_string(k) + " lies outside the domain");
    return c.mu0;
  }
  std::mt19937_64 rng(c.seed);
  const Point2 lo = mesh.bbox_min(), hi = mesh.bbox_max();
  std::vector<Point2> out;
  for (long attempts = 0; static_cast<int>(out.size()) < c.K; ++attempts) {
    if (attempts > 1000000L * c.K) throw ConfigError("cvt.K", "could not place random generators in the domain");
    // Two raw draws per point; avoids distribution implementation differences.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const double v = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const Point2 p{lo.x + u * (hi.x - lo.x), lo.y + v * (hi.y - lo.y)};
    if (!mesh.contains(p)) continue;
    if (std::find_if(out.begin(), out.end(), [&](const Point2& q) { return q.x == p.x && q.y == p.y; }) != out.end())
      continue;
    out.push_back(p);
  }
  return out;
}

LloydConfig lloyd_config(const RunConfig& c) {
  LloydConfig l;
  l.eps = c.eps;
  l.eps_c = c.eps_c;
  l.max_outer = c.max_outer;
  l.solver = c.solver;
  l.energy_mode = c.energy_mode;
  l.eikonal = c.eikonal;
  l.threads = c.threads;
  l.point_sources = c.point_sources;
  l.monotone_update = c.monotone_update;
  return l;
}

PowerConfig power_config(const RunConfig& c) {
  PowerConfig p;
  p.lloyd = lloyd_config(c);
  p.weights.tol_cap = c.tol_cap;
  p.weights.max_ascent = c.max_ascent;
  p.w0 = c.w0;
  return p;
}

}  // namespace geotess
