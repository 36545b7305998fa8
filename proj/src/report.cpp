#include "geotess/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include "json.hpp"
#include <sstream>

namespace geotess {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

// Fixed precision keeps SVG output short and stable.
std::string px(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, std::round(v * 100.0) / 100.0, std::chars_format::fixed, 2);
  return std::string(buf, r.ptr);
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json points(std::span<const Point2> p) {
  json a = json::array();
  for (const auto& q : p) a.push_back({q.x, q.y});
  return a;
}

json mesh_stats(const Mesh& mesh) {
  return {{"triangles", mesh.size()},
          {"vertices", mesh.vertices().size()},
          {"total_area", mesh.total_area()},
          {"max_area", mesh.max_area()},
          {"mean_area", mesh.mean_area()}};
}

constexpr const char* kPalette[20] = {"#1f77b4", "#aec7e8", "#ff7f0e", "#ffbb78", "#2ca02c", "#98df8a", "#d62728",
                                      "#ff9896", "#9467bd", "#c5b0d5", "#8c564b", "#c49c94", "#e377c2", "#f7b6d2",
                                      "#7f7f7f", "#c7c7c7", "#bcbd22", "#dbdb8d", "#17becf", "#9edae5"};

struct Frame {
  Point2 lo, hi;
  double scale;
  double width, height;
  double pad = 10.0;

  explicit Frame(const Mesh& mesh) : lo(mesh.bbox_min()), hi(mesh.bbox_max()) {
    const double w = std::max(hi.x - lo.x, 1e-12), h = std::max(hi.y - lo.y, 1e-12);
    scale = 800.0 / std::max(w, h);
    width = w * scale + 2 * pad;
    height = h * scale + 2 * pad;
  }
  std::string x(double v) const { return px(pad + (v - lo.x) * scale); }
  std::string y(double v) const { return px(pad + (hi.y - v) * scale); }
};

std::string svg_open(const Frame& f) {
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<!-- geotess " << kVersion << " -->\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(f.width) << "\" height=\"" << px(f.height)
     << "\" viewBox=\"0 0 " << px(f.width) << " " << px(f.height) << "\">\n";
  return os.str();
}

std::string polygon(const Mesh& mesh, const Frame& f, int i) {
  const auto& t = mesh.triangles()[i];
  std::string s = "<polygon points=\"";
  for (int a = 0; a < 3; ++a) {
    const Point2& p = mesh.vertices()[t[a]];
    s += (a ? " " : "") + f.x(p.x) + "," + f.y(p.y);
  }
  return s + "\"/>\n";
}

}  // namespace

std::string field_csv(const Mesh& mesh, const DistanceField& field) {
  std::ostringstream os;
  os << "triangle_index,x,y,value\n";
  for (int i = 0; i < mesh.size(); ++i)
    os << i << "," << fmt(mesh.centroid(i).x) << "," << fmt(mesh.centroid(i).y) << "," << fmt(field.values[i]) << "\n";
  return os.str();
}

std::string field_json(const RunConfig& config, const Mesh& mesh, const DistanceField& field) {
  json j;
  j["version"] = kVersion;
  j["config"] = format_config(config);
  j["mesh"] = mesh_stats(mesh);
  j["metric"] = field.metric_id;
  j["source_point"] = {field.source_point.x, field.source_point.y};
  j["source_index"] = field.source_index;
  j["residual"] = field.residual;
  j["sweeps"] = field.sweeps;
  json values = json::array();
  for (double v : field.values) values.push_back(number(v));
  j["values"] = std::move(values);
  return j.dump(1) + "\n";
}

std::string labels_csv(const Tessellation& t) {
  std::ostringstream os;
  os << "triangle_index,label\n";
  for (std::size_t i = 0; i < t.labels.size(); ++i) os << i << "," << t.labels[i] << "\n";
  return os.str();
}

std::string capacities_csv(const Tessellation& t, std::span<const double> targets) {
  std::ostringstream os;
  os << "iteration,cell,capacity,target\n";
  for (std::size_t n = 0; n < t.history.size(); ++n)
    for (std::size_t k = 0; k < t.history[n].capacities.size(); ++k)
      os << n << "," << k << "," << fmt(t.history[n].capacities[k]) << ","
         << (k < targets.size() ? fmt(targets[k]) : std::string()) << "\n";
  return os.str();
}

std::string tessellation_json(const RunConfig& config, const Mesh& mesh, const Tessellation& t) {
  json j;
  j["version"] = kVersion;
  j["config"] = format_config(config);
  j["mode"] = to_string(config.mode);
  j["mesh"] = mesh_stats(mesh);
  j["K"] = t.K;
  j["converged"] = t.converged;
  j["infeasible"] = t.infeasible;
  json iters = json::array();
  for (const auto& r : t.history) {
    json it{{"mu", points(r.mu)},
            {"energy_squared", r.energy_squared},
            {"energy_unsquared", r.energy_unsquared},
            {"displacement", r.displacement},
            {"capacities", r.capacities},
            {"empty_cells", r.empty_cells}};
    if (config.mode == RunMode::Power) {
      it["weights"] = r.weights;
      it["weight_change"] = r.weight_change;
    }
    iters.push_back(std::move(it));
  }
  j["iterations"] = std::move(iters);
  json fin{{"mu", points(t.mu)}, {"weights", t.weights}, {"capacities", t.capacities}};
  if (config.mode == RunMode::Power) {
    double gap = 0.0;
    for (std::size_t k = 0; k < t.capacities.size() && k < config.capacities.size(); ++k)
      gap = std::max(gap, std::abs(t.capacities[k] - config.capacities[k]));
    fin["targets"] = config.capacities;
    fin["max_capacity_gap"] = gap;
  }
  if (!t.history.empty()) {
    fin["energy_squared"] = t.history.back().energy_squared;
    fin["energy_unsquared"] = t.history.back().energy_unsquared;
  }
  j["final"] = std::move(fin);
  j["log"] = t.log;
  return j.dump(1) + "\n";
}

std::string tessellation_svg(const Mesh& mesh, const Tessellation& t) {
  const Frame f(mesh);
  std::ostringstream os;
  os << svg_open(f);
  for (int k = 0; k < t.K; ++k) {
    const char* color = kPalette[k % 20];
    os << "<g class=\"cell\" data-cell=\"" << k << "\" fill=\"" << color << "\" stroke=\"" << color
       << "\" stroke-width=\"0.5\">\n";
    for (int i = 0; i < mesh.size(); ++i)
      if (t.labels[i] == k) os << polygon(mesh, f, i);
    os << "</g>\n";
  }
  // Trajectories: recorded iterates followed by the final generators.
  for (int k = 0; k < t.K; ++k) {
    std::vector<Point2> path;
    for (const auto& r : t.history) path.push_back(r.mu[k]);
    if (path.empty() || path.back().x != t.mu[k].x || path.back().y != t.mu[k].y) path.push_back(t.mu[k]);
    os << "<g class=\"trajectory\" data-cell=\"" << k << "\">\n<polyline fill=\"none\" stroke=\"#cc0000\" "
       << "stroke-width=\"1.5\" points=\"";
    for (std::size_t n = 0; n < path.size(); ++n) os << (n ? " " : "") << f.x(path[n].x) << "," << f.y(path[n].y);
    os << "\"/>\n";
    for (std::size_t n = 0; n < path.size(); ++n) {
      os << "<circle cx=\"" << f.x(path[n].x) << "\" cy=\"" << f.y(path[n].y) << "\" r=\"2.5\" fill=\"#cc0000\"/>";
      os << "<text x=\"" << f.x(path[n].x) << "\" y=\"" << f.y(path[n].y) << "\" dx=\"4\" dy=\"-4\" font-size=\"11\" "
         << "fill=\"#cc0000\">" << n << "</text>\n";
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string mesh_svg(const Mesh& mesh) {
  const Frame f(mesh);
  std::ostringstream os;
  os << svg_open(f);
  os << "<g fill=\"none\" stroke=\"#333333\" stroke-width=\"0.5\">\n";
  for (int i = 0; i < mesh.size(); ++i) os << polygon(mesh, f, i);
  os << "</g>\n</svg>\n";
  return os.str();
}

}  // namespace geotess
