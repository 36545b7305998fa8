#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "geotess/config.hpp"
#include "geotess/power.hpp"
#include "geotess/report.hpp"
#include "geotess/tessellation.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace geotess;

namespace {

enum Exit { kOk = 0, kValidation = 2, kSolver = 3, kInfeasible = 4 };

struct Options {
  std::string config;
  std::string out;
  int threads = 0;
  long long seed = -1;
  std::string format = "all";
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << text;
}

bool wants(const Options& o, const std::string& kind) { return o.format == "all" || o.format == kind; }

RunConfig load(const Options& o, RunMode expected) {
  RunConfig c = load_config(o.config);
  if (c.mode != expected)
    throw ConfigError("run.mode", "config is for '" + to_string(c.mode) + "', command is '" + to_string(expected) + "'");
  if (o.threads > 0) c.threads = o.threads;
  if (o.seed >= 0) c.seed = static_cast<std::uint64_t>(o.seed);
  if (!o.out.empty()) c.output = o.out;
  return c;
}

void write_timing(const fs::path& dir, double mesh_s, double run_s, double total_s) {
  nlohmann::json j{{"mesh_seconds", mesh_s}, {"run_seconds", run_s}, {"total_seconds", total_s}};
  write_file(dir / "timing.json", j.dump(1) + "\n");
}

int cmd_solve(const Options& o) {
  const auto t0 = Clock::now();
  const RunConfig c = load(o, RunMode::Solve);
  const Mesh mesh = build_mesh(c);
  const double mesh_s = seconds_since(t0);
  const MetricSpec metric = build_metric(c.metric);
  if (!mesh.contains(c.source)) throw ConfigError("source.point", "lies outside the domain");
  const auto t1 = Clock::now();
  const EikonalSolver solver(mesh, metric, c.eikonal);
  const DistanceField field = solver.solve_from_point(c.source, c.solver);
  const double run_s = seconds_since(t1);

  const fs::path dir(c.output);
  fs::create_directories(dir);
  if (wants(o, "csv")) write_file(dir / "field.csv", field_csv(mesh, field));
  if (wants(o, "json")) write_file(dir / "field.json", field_json(c, mesh, field));
  write_file(dir / "config.ini", format_config(c));
  write_timing(dir, mesh_s, run_s, seconds_since(t0));

  std::cout << "triangles " << mesh.size() << "\n";
  std::cout << "residual " << field.residual << "\n";
  std::cout << "sweeps " << field.sweeps << "\n";
  const bool convex = c.domain.kind == "rect" || c.domain.kind == "disk";
  if (metric.is_euclidean() && convex) {
    double err = 0.0;
    for (int i = 0; i < mesh.size(); ++i)
      if (std::isfinite(field.values[i]))
        err = std::max(err, std::abs(field.values[i] - distance(mesh.centroid(i), c.source)));
    std::cout << "euclidean_max_error " << err << "\n";
  }
  std::cout << "output " << dir.string() << "\n";
  return kOk;
}

void print_generators(const Tessellation& t) {
  for (int k = 0; k < t.K; ++k) std::cout << "mu[" << k << "] " << t.mu[k].x << " " << t.mu[k].y << "\n";
}

int write_tessellation(const Options& o, const RunConfig& c, const Mesh& mesh, const Tessellation& t, double mesh_s,
                       double run_s, Clock::time_point t0) {
  const fs::path dir(c.output);
  fs::create_directories(dir);
  if (wants(o, "csv")) {
    write_file(dir / "labels.csv", labels_csv(t));
    if (c.mode == RunMode::Power) write_file(dir / "capacities.csv", capacities_csv(t, c.capacities));
  }
  if (wants(o, "json")) write_file(dir / "report.json", tessellation_json(c, mesh, t));
  if (wants(o, "svg")) write_file(dir / "tessellation.svg", tessellation_svg(mesh, t));
  write_file(dir / "config.ini", format_config(c));
  write_timing(dir, mesh_s, run_s, seconds_since(t0));
  for (const auto& line : t.log) std::cerr << "note: " << line << "\n";
  std::cout << "output " << dir.string() << "\n";
  return kOk;
}

int cmd_cvt(const Options& o) {
  const auto t0 = Clock::now();
  const RunConfig c = load(o, RunMode::Cvt);
  const Mesh mesh = build_mesh(c);
  const double mesh_s = seconds_since(t0);
  const DensityField density = build_density(mesh, c);
  const MetricSpec metric = build_metric(c.metric);
  const std::vector<Point2> mu0 = resolve_generators(c, mesh);
  const auto t1 = Clock::now();
  const Tessellation t = run_cvt(mesh, metric, density, mu0, lloyd_config(c));
  const double run_s = seconds_since(t1);

  std::cout << "triangles " << mesh.size() << "\n";
  std::cout << "iterations " << t.history.size() << "\n";
  std::cout << "converged " << (t.converged ? "true" : "false") << "\n";
  std::cout << "energy " << t.history.back().energy_unsquared << "\n";
  print_generators(t);
  return write_tessellation(o, c, mesh, t, mesh_s, run_s, t0);
}

int cmd_power(const Options& o) {
  const auto t0 = Clock::now();
  const RunConfig c = load(o, RunMode::Power);
  const Mesh mesh = build_mesh(c);
  const double mesh_s = seconds_since(t0);
  const DensityField density = build_density(mesh, c);
  const MetricSpec metric = build_metric(c.metric);
  const std::vector<Point2> mu0 = resolve_generators(c, mesh);
  const auto t1 = Clock::now();
  const Tessellation t = run_capacity_cvt(mesh, metric, density, mu0, c.capacities, power_config(c));
  const double run_s = seconds_since(t1);

  std::cout << "triangles " << mesh.size() << "\n";
  std::cout << "iterations " << t.history.size() << "\n";
  std::cout << "converged " << (t.converged ? "true" : "false") << "\n";
  print_generators(t);
  double gap = 0.0;
  std::cout << "cell capacity target weight\n";
  for (int k = 0; k < t.K; ++k) {
    gap = std::max(gap, std::abs(t.capacities[k] - c.capacities[k]));
    std::cout << k << " " << t.capacities[k] << " " << c.capacities[k] << " " << t.weights[k] << "\n";
  }
  std::cout << "max_capacity_gap " << gap << "\n";
  write_tessellation(o, c, mesh, t, mesh_s, run_s, t0);
  if (t.infeasible) {
    std::cerr << "error: capacities not met\n";
    return kInfeasible;
  }
  return kOk;
}

int cmd_mesh_generate(const Options& o) {
  RunConfig c = load_config(o.config);
  if (!o.out.empty()) c.output = o.out;
  const Mesh mesh = build_mesh(c);
  const fs::path dir(c.output);
  fs::create_directories(dir);
  save_mesh(mesh, (dir / "mesh.txt").string());
  if (wants(o, "svg")) write_file(dir / "mesh.svg", mesh_svg(mesh));
  std::cout << "triangles " << mesh.size() << "\noutput " << dir.string() << "\n";
  return kOk;
}

int cmd_mesh_inspect(const std::string& path) {
  const Mesh mesh = load_mesh(path);
  std::cout << "vertices " << mesh.vertices().size() << "\n";
  std::cout << "triangles " << mesh.size() << "\n";
  std::cout << "total_area " << mesh.total_area() << "\n";
  std::cout << "max_area " << mesh.max_area() << "\n";
  std::cout << "mean_area " << mesh.mean_area() << "\n";
  std::cout << "diameter " << mesh.diameter() << "\n";
  std::cout << "bbox " << mesh.bbox_min().x << " " << mesh.bbox_min().y << " " << mesh.bbox_max().x << " "
            << mesh.bbox_max().y << "\n";
  return kOk;
}

int cmd_mesh_convert(const std::string& in, const std::string& out) {
  const Mesh mesh = load_mesh(in);
  if (fs::path(out).extension() == ".svg") write_file(out, mesh_svg(mesh));
  else save_mesh(mesh, out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geodesic centroidal Voronoi tessellations and capacity-constrained power diagrams"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "INI run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory (default: run.output)");
    sub->add_option("--threads", o.threads, "workers for the per-generator solves (default: run.threads)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "seed for random generators (default: run.seed)")->check(CLI::NonNegativeNumber);
    sub->add_option("--format", o.format, "artifacts to write")
        ->check(CLI::IsMember({"csv", "json", "svg", "all"}))
        ->default_val("all");
  };
  const std::string defaults =
      "\nConfig sections and defaults (h = 0: 2 sqrt(mean area); source_radius < 0: 2h; eps, eps_c = 0: max_area/10,\n"
      "0.25 sqrt(mean area); max_sweeps = 0: max(200, 10 sqrt(N)); K = 0: number of mu0 points; [source] point = x, y\n"
      "for solve; [power] capacities, w0, tol_cap = 0: 0.01 min c, max_ascent = 500):\n\n" +
      format_config(RunConfig{});
  app.footer(defaults);
  auto* solve = app.add_subcommand("solve", "one eikonal solve from [source] point; writes field.csv and field.json");
  add_common(solve);
  auto* cvt = app.add_subcommand("cvt", "Lloyd iteration; writes labels.csv, report.json, tessellation.svg");
  add_common(cvt);
  auto* power = app.add_subcommand("power", "capacity-constrained Lloyd iteration; adds capacities.csv");
  add_common(power);
  for (auto* sub : {solve, cvt, power}) sub->footer(defaults);

  auto* mesh = app.add_subcommand("mesh", "generate, inspect or convert meshes");
  mesh->require_subcommand(1);
  auto* gen = mesh->add_subcommand("generate", "mesh from the [domain] section; writes mesh.txt and mesh.svg");
  gen->add_option("--config", o.config, "INI configuration")->required()->check(CLI::ExistingFile);
  gen->add_option("--out", o.out, "output directory");
  gen->add_option("--format", o.format, "also write mesh.svg unless 'csv' or 'json'")->default_val("all");
  std::string inspect_path, convert_in, convert_out;
  auto* inspect = mesh->add_subcommand("inspect", "print mesh statistics");
  inspect->add_option("path", inspect_path, "mesh file")->required()->check(CLI::ExistingFile);
  auto* convert = mesh->add_subcommand("convert", "rewrite a mesh file, or render it when the target ends in .svg");
  convert->add_option("input", convert_in, "mesh file")->required()->check(CLI::ExistingFile);
  convert->add_option("output", convert_out, "target path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*solve) return cmd_solve(o);
    if (*cvt) return cmd_cvt(o);
    if (*power) return cmd_power(o);
    if (*gen) return cmd_mesh_generate(o);
    if (*inspect) return cmd_mesh_inspect(inspect_path);
    if (*convert) return cmd_mesh_convert(convert_in, convert_out);
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolver;
  } catch (const UnreachableNode& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolver;
  } catch (const BacktrackError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolver;
  } catch (const EmptyCell& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolver;
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInfeasible;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  }
  return kOk;
}
