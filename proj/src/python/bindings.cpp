#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>
#include <string>
#include <vector>

#include "geotess/config.hpp"
#include "geotess/eikonal.hpp"
#include "geotess/power.hpp"
#include "geotess/report.hpp"
#include "geotess/tessellation.hpp"

namespace py = pybind11;
using namespace geotess;

namespace {

py::array_t<double> points_array(const std::vector<Point2>& pts) {
  py::array_t<double> a({static_cast<py::ssize_t>(pts.size()), py::ssize_t{2}});
  auto r = a.mutable_unchecked<2>();
  for (py::ssize_t i = 0; i < r.shape(0); ++i) {
    r(i, 0) = pts[i].x;
    r(i, 1) = pts[i].y;
  }
  return a;
}

std::vector<Point2> to_points(const std::vector<std::pair<double, double>>& v) {
  std::vector<Point2> out;
  out.reserve(v.size());
  for (const auto& [x, y] : v) out.push_back({x, y});
  return out;
}

Point2 to_point(const std::pair<double, double>& p) { return {p.first, p.second}; }

py::array_t<double> vector_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

py::array_t<int> labels_array(const std::vector<int>& v) { return py::array_t<int>(v.size(), v.data()); }

}  // namespace

PYBIND11_MODULE(_geotess, m) {
  m.doc() = "Geodesic centroidal Voronoi tessellations and capacity-constrained power diagrams";
  m.attr("__version__") = kVersion;

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", error.ptr());
  py::register_exception<InvalidDensity>(m, "InvalidDensity", error.ptr());
  py::register_exception<LoadError>(m, "LoadError", error.ptr());
  py::register_exception<UnsupportedMetric>(m, "UnsupportedMetric", error.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", error.ptr());
  py::register_exception<UnreachableNode>(m, "UnreachableNode", error.ptr());
  py::register_exception<BacktrackError>(m, "BacktrackError", error.ptr());
  py::register_exception<EmptyCell>(m, "EmptyCell", error.ptr());
  py::register_exception<CapacityError>(m, "CapacityError", error.ptr());

  py::class_<Mesh>(m, "Mesh")
      .def_static(
          "from_triangles",
          [](const std::vector<std::pair<double, double>>& v, const std::vector<Triangle>& t) {
            return Mesh::from_triangles(to_points(v), t);
          },
          py::arg("vertices"), py::arg("triangles"))
      .def_static("rect", &generate_rect_mesh, py::arg("xmin"), py::arg("xmax"), py::arg("ymin"), py::arg("ymax"),
                  py::arg("max_area"))
      .def_static(
          "disk",
          [](std::pair<double, double> c, double r, double a) { return generate_disk_mesh(to_point(c), r, a); },
          py::arg("center"), py::arg("radius"), py::arg("max_area"))
      .def_static(
          "composite",
          [](const std::string& name, double a) { return generate_composite_mesh(parse_composite_domain(name), a); },
          py::arg("name"), py::arg("max_area"))
      .def_static("load", &load_mesh, py::arg("path"))
      .def_static("parse", &parse_mesh, py::arg("text"))
      .def("save", [](const Mesh& mesh, const std::string& path) { save_mesh(mesh, path); }, py::arg("path"))
      .def("format", [](const Mesh& mesh) { return format_mesh(mesh); })
      .def("__len__", &Mesh::size)
      .def_property_readonly("vertices", [](const Mesh& mesh) { return points_array(mesh.vertices()); })
      .def_property_readonly("triangles", [](const Mesh& mesh) { return mesh.triangles(); })
      .def_property_readonly("centroids", [](const Mesh& mesh) { return points_array(mesh.centroids()); })
      .def_property_readonly("areas", [](const Mesh& mesh) { return vector_array(mesh.areas()); })
      .def_property_readonly("total_area", &Mesh::total_area)
      .def_property_readonly("max_area", &Mesh::max_area)
      .def_property_readonly("mean_area", &Mesh::mean_area)
      .def("contains", [](const Mesh& mesh, std::pair<double, double> p) { return mesh.contains(to_point(p)); })
      .def("nearest_node", [](const Mesh& mesh, std::pair<double, double> p) { return mesh.nearest_node(to_point(p)); });

  py::class_<MetricSpec>(m, "Metric")
      .def_static("euclidean", &MetricSpec::euclidean)
      .def_static(
          "isotropic", [](const std::string& a, double delta) { return MetricSpec::isotropic(ScalarField::expression(a), delta); },
          py::arg("a"), py::arg("delta"))
      .def_static("minkowski", &MetricSpec::minkowski, py::arg("s"))
      .def_static("chebyshev", [] { return MetricSpec::minkowski(std::numeric_limits<double>::infinity()); })
      .def_static(
          "riemannian",
          [](const std::string& A, double delta) { return MetricSpec::riemannian(MatrixField::expression(A), delta); },
          py::arg("A"), py::arg("delta"))
      .def_static("max_of", &MetricSpec::max_of, py::arg("members"))
      .def_property_readonly("delta", &MetricSpec::delta)
      .def("hamiltonian",
           [](const MetricSpec& s, std::pair<double, double> x, std::pair<double, double> p) {
             return hamiltonian(s, to_point(x), to_point(p));
           })
      .def("gauge",
           [](const MetricSpec& s, std::pair<double, double> x, std::pair<double, double> v) {
             return gauge(s, to_point(x), to_point(v));
           })
      .def(
          "control_boundary",
          [](const MetricSpec& s, std::pair<double, double> x, int n) { return points_array(control_boundary(s, to_point(x), n)); },
          py::arg("x"), py::arg("n"))
      .def("__repr__", &MetricSpec::describe);

  py::class_<DensityField>(m, "Density")
      .def_static("uniform", [](const Mesh& mesh) { return build_density(mesh, DensitySpec::uniform()); })
      .def_static(
          "gaussian",
          [](const Mesh& mesh, std::pair<double, double> c, std::tuple<double, double, double> cov) {
            const auto [xx, xy, yy] = cov;
            return build_density(mesh, DensitySpec::gaussian(to_point(c), {xx, xy, yy}));
          },
          py::arg("mesh"), py::arg("center"), py::arg("covariance"))
      .def_static(
          "table", [](const Mesh& mesh, std::vector<double> v) { return build_density(mesh, DensitySpec::from_table(std::move(v))); },
          py::arg("mesh"), py::arg("values"))
      .def_property_readonly("rho", [](const DensityField& d) { return vector_array(d.rho); });

  py::class_<EikonalOptions>(m, "EikonalOptions")
      .def(py::init<>())
      .def_readwrite("tol", &EikonalOptions::tol)
      .def_readwrite("h", &EikonalOptions::h)
      .def_readwrite("controls", &EikonalOptions::controls)
      .def_readwrite("refine_iters", &EikonalOptions::refine_iters)
      .def_readwrite("max_sweeps", &EikonalOptions::max_sweeps)
      .def_readwrite("source_radius", &EikonalOptions::source_radius);

  py::class_<DistanceField>(m, "DistanceField")
      .def_property_readonly("values", [](const DistanceField& f) { return vector_array(f.values); })
      .def_readonly("source_index", &DistanceField::source_index)
      .def_readonly("source_value", &DistanceField::source_value)
      .def_readonly("residual", &DistanceField::residual)
      .def_readonly("sweeps", &DistanceField::sweeps);

  // The solver keeps a reference to the mesh, so the Python object holds it alive.
  py::class_<EikonalSolver>(m, "EikonalSolver")
      .def(py::init<const Mesh&, const MetricSpec&, EikonalOptions>(), py::arg("mesh"), py::arg("metric"),
           py::arg("options") = EikonalOptions{}, py::keep_alive<1, 2>())
      .def_property_readonly("h", &EikonalSolver::h)
      .def(
          "solve",
          [](const EikonalSolver& s, int source, double value, const std::string& solver) {
            py::gil_scoped_release release;
            return s.solve(source, value, parse_solver_kind(solver));
          },
          py::arg("source_index"), py::arg("source_value") = 0.0, py::arg("solver") = "value-iteration")
      .def(
          "solve_from_point",
          [](const EikonalSolver& s, std::pair<double, double> y, const std::string& solver) {
            py::gil_scoped_release release;
            return s.solve_from_point(to_point(y), parse_solver_kind(solver));
          },
          py::arg("point"), py::arg("solver") = "value-iteration");

  py::class_<LloydConfig>(m, "LloydConfig")
      .def(py::init<>())
      .def_readwrite("eps", &LloydConfig::eps)
      .def_readwrite("eps_c", &LloydConfig::eps_c)
      .def_readwrite("max_outer", &LloydConfig::max_outer)
      .def_readwrite("threads", &LloydConfig::threads)
      .def_readwrite("eikonal", &LloydConfig::eikonal)
      .def_property(
          "energy_mode", [](const LloydConfig& c) { return to_string(c.energy_mode); },
          [](LloydConfig& c, const std::string& s) { c.energy_mode = parse_energy_mode(s); })
      .def_property(
          "solver", [](const LloydConfig& c) { return to_string(c.solver); },
          [](LloydConfig& c, const std::string& s) { c.solver = parse_solver_kind(s); });

  py::class_<IterationRecord>(m, "IterationRecord")
      .def_property_readonly("mu", [](const IterationRecord& r) { return points_array(r.mu); })
      .def_readonly("energy_squared", &IterationRecord::energy_squared)
      .def_readonly("energy_unsquared", &IterationRecord::energy_unsquared)
      .def_readonly("displacement", &IterationRecord::displacement)
      .def_readonly("weights", &IterationRecord::weights)
      .def_readonly("capacities", &IterationRecord::capacities)
      .def_readonly("empty_cells", &IterationRecord::empty_cells);

  py::class_<Tessellation>(m, "Tessellation")
      .def_readonly("K", &Tessellation::K)
      .def_property_readonly("mu", [](const Tessellation& t) { return points_array(t.mu); })
      .def_property_readonly("labels", [](const Tessellation& t) { return labels_array(t.labels); })
      .def_property_readonly("weights", [](const Tessellation& t) { return vector_array(t.weights); })
      .def_property_readonly("capacities", [](const Tessellation& t) { return vector_array(t.capacities); })
      .def_readonly("fields", &Tessellation::fields)
      .def_readonly("history", &Tessellation::history)
      .def_readonly("converged", &Tessellation::converged)
      .def_readonly("infeasible", &Tessellation::infeasible)
      .def_readonly("log", &Tessellation::log)
      .def("labels_csv", [](const Tessellation& t) { return labels_csv(t); })
      .def("svg", [](const Tessellation& t, const Mesh& mesh) { return tessellation_svg(mesh, t); }, py::arg("mesh"));

  m.def(
      "run_cvt",
      [](const Mesh& mesh, const MetricSpec& metric, const DensityField& density,
         const std::vector<std::pair<double, double>>& mu0, const LloydConfig& config) {
        const auto mu = to_points(mu0);
        py::gil_scoped_release release;
        return run_cvt(mesh, metric, density, mu, config);
      },
      py::arg("mesh"), py::arg("metric"), py::arg("density"), py::arg("mu0"), py::arg("config") = LloydConfig{});

  m.def(
      "run_capacity_cvt",
      [](const Mesh& mesh, const MetricSpec& metric, const DensityField& density,
         const std::vector<std::pair<double, double>>& mu0, const std::vector<double>& c, const LloydConfig& lloyd,
         double tol_cap, int max_ascent) {
        const auto mu = to_points(mu0);
        PowerConfig config;
        config.lloyd = lloyd;
        config.weights.tol_cap = tol_cap;
        config.weights.max_ascent = max_ascent;
        py::gil_scoped_release release;
        return run_capacity_cvt(mesh, metric, density, mu, c, config);
      },
      py::arg("mesh"), py::arg("metric"), py::arg("density"), py::arg("mu0"), py::arg("capacities"),
      py::arg("config") = LloydConfig{}, py::arg("tol_cap") = 0.0, py::arg("max_ascent") = 500);

  m.def(
      "assign_cells", [](const std::vector<DistanceField>& fields) { return labels_array(assign_cells(fields)); },
      py::arg("fields"));

  m.def(
      "run_config",
      [](const std::string& text) {
        const RunConfig c = parse_config(text);
        if (c.mode == RunMode::Solve) throw InvalidArgument("run_config handles cvt and power modes");
        const Mesh mesh = build_mesh(c);
        const DensityField density = build_density(mesh, c);
        const MetricSpec metric = build_metric(c.metric);
        const auto mu0 = resolve_generators(c, mesh);
        Tessellation t;
        {
          py::gil_scoped_release release;
          t = c.mode == RunMode::Power ? run_capacity_cvt(mesh, metric, density, mu0, c.capacities, power_config(c))
                                       : run_cvt(mesh, metric, density, mu0, lloyd_config(c));
        }
        return py::make_tuple(t, tessellation_json(c, mesh, t));
      },
      py::arg("config_text"), "Runs a cvt or power INI configuration; returns (tessellation, report_json).");

  m.def(
      "format_config", [](const std::string& text) { return format_config(parse_config(text)); }, py::arg("config_text"),
      "Canonical form of an INI configuration.");
}
