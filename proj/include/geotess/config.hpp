#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geotess/density.hpp"
#include "geotess/eikonal.hpp"
#include "geotess/errors.hpp"
#include "geotess/mesh.hpp"
#include "geotess/metric.hpp"
#include "geotess/power.hpp"
#include "geotess/tessellation.hpp"

namespace geotess {

/// Config validation failure; the message starts with the offending key.
class ConfigError : public InvalidArgument {
 public:
  ConfigError(const std::string& key, const std::string& what) : InvalidArgument(key + ": " + what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class RunMode { Solve, Cvt, Power };

RunMode parse_run_mode(const std::string& name);
std::string to_string(RunMode mode);

struct DomainConfig {
  std::string kind = "rect";  ///< rect | disk | composite | file
  double max_area = 0.01;
  double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  Point2 center{};
  double radius = 1.0;
  std::string name = "lshape";  ///< composite domain name
  std::string path;             ///< mesh file
};

struct DensityConfig {
  std::string kind = "uniform";  ///< uniform | gaussian | table
  Point2 center{};
  Sym2 covariance{1.0, 0.0, 1.0};
  std::string path;  ///< table: one value per triangle, whitespace separated
};

struct MetricConfig {
  std::string name = "metric";     ///< section the entry was read from
  std::string kind = "euclidean";  ///< euclidean | isotropic | minkowski | riemannian | maxof
  double s = 2.0;
  std::string a_expr = "1";
  std::string A_expr = "1, 0, 1";
  double delta = 1.0;
  std::vector<MetricConfig> members;  ///< maxof only
};

struct RunConfig {
  RunMode mode = RunMode::Cvt;
  int threads = 1;
  std::uint64_t seed = 1;
  std::string output = "out";

  DomainConfig domain;
  DensityConfig density;
  MetricConfig metric;

  SolverKind solver = SolverKind::ValueIteration;
  EikonalOptions eikonal;

  bool has_source = false;
  Point2 source{};

  int K = 0;                 ///< 0 means the length of mu0
  std::vector<Point2> mu0;   ///< empty: K seeded uniform points in the domain
  double eps = 0.0;
  double eps_c = 0.0;
  int max_outer = 100;
  EnergyMode energy_mode = EnergyMode::Unsquared;
  bool point_sources = true;
  bool monotone_update = true;

  std::vector<double> capacities;
  std::vector<double> w0;
  double tol_cap = 0.0;
  int max_ascent = 500;
};

/// INI text: sections run, domain, density, metric (plus one per maxof
/// member), eikonal, source, cvt, power. Unknown sections or keys, missing
/// mode-required keys and malformed values throw ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical INI text with every key; parse_config(format_config(c)) formats
/// back to the same text.
std::string format_config(const RunConfig& config);

Mesh build_mesh(const RunConfig& config);
DensityField build_density(const Mesh& mesh, const RunConfig& config);
MetricSpec build_metric(const MetricConfig& config);

/// Explicit mu0, or K points drawn uniformly from the mesh bounding box with
/// a seeded generator and kept when inside the mesh. Checks K <= triangles
/// and that every point lies in the domain.
std::vector<Point2> resolve_generators(const RunConfig& config, const Mesh& mesh);

LloydConfig lloyd_config(const RunConfig& config);
PowerConfig power_config(const RunConfig& config);

}  // namespace geotess
