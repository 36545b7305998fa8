#include <string>

#include "doctest.h"
#include "geotess/config.hpp"
#include "geotess/report.hpp"

using namespace geotess;

namespace {

const char* kPower = R"([run]
mode = power
seed = 5

[domain]
kind = rect
bounds = 0, 1, 0, 1
max_area = 0.02

[metric]
kind = maxof
members = m1, m2

[m1]
kind = isotropic
a_expr = 1 + 0.1*x
delta = 1

[m2]
kind = minkowski
s = 1

[cvt]
mu0 = 0.3 0.3; 0.7 0.7

[power]
capacities = 0.6, 0.4
)";

std::string key_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

}  // namespace

TEST_CASE("config: canonical text round-trips") {
  const RunConfig c = parse_config(kPower);
  CHECK(c.mode == RunMode::Power);
  CHECK(c.K == 2);
  REQUIRE(c.metric.members.size() == 2);
  CHECK(c.metric.members[1].s == 1.0);
  const std::string text = format_config(c);
  CHECK(format_config(parse_config(text)) == text);
}

TEST_CASE("config: validation names the offending key") {
  CHECK(key_of("[run]\nmode = solve\n") == "source.point");
  CHECK(key_of("[run]\nmode = cvt\n[cvt]\nmu0 = 0.5 0.5\n[bogus]\nx = 1\n") == "bogus");
  CHECK(key_of("[run]\nmode = cvt\ncolour = red\n[cvt]\nmu0 = 0.5 0.5\n") == "run.colour");
  CHECK(key_of("[run]\nmode = cvt\n[cvt]\nmu0 = 0.5 0.5\n[power]\ncapacities = 1\n") == "power.capacities");
  CHECK(key_of("[run]\nmode = power\n[cvt]\nmu0 = 0.2 0.2; 0.8 0.8\n[power]\ncapacities = 0.5, 0.6\n") ==
        "power.capacities");
  CHECK(key_of("[run]\nmode = cvt\n[cvt]\nmu0 = 0.5 0.5\neps = abc\n") == "cvt.eps");
  CHECK(key_of("[run]\nmode = fly\n") == "run.mode");
  CHECK(key_of("[run]\nmode = cvt\n[cvt]\nmu0 = 0.5 0.5\n[metric]\nkind = warp\n") == "metric.kind");
}

TEST_CASE("config: generators are validated against the mesh") {
  RunConfig c = parse_config("[run]\nmode = cvt\n[domain]\nmax_area = 0.1\n[cvt]\nmu0 = 1.5 0.5\n");
  const Mesh m = build_mesh(c);
  CHECK_THROWS_AS(resolve_generators(c, m), ConfigError);
  c.mu0.clear();
  c.K = m.size() + 1;
  CHECK_THROWS_AS(resolve_generators(c, m), ConfigError);
  c.K = 4;
  const auto a = resolve_generators(c, m), b = resolve_generators(c, m);
  CHECK(a == b);
  for (const auto& p : a) CHECK(m.contains(p));
  c.seed = 99;
  CHECK(resolve_generators(c, m) != a);
}

TEST_CASE("report: formats") {
  const RunConfig c = parse_config(kPower);
  const Mesh m = build_mesh(c);
  const DensityField d = build_density(m, c);
  const auto mu = resolve_generators(c, m);
  const Tessellation t = run_capacity_cvt(m, build_metric(c.metric), d, mu, c.capacities, power_config(c));
  const std::string labels = labels_csv(t);
  CHECK(labels.rfind("triangle_index,label\n0,", 0) == 0);
  CHECK(capacities_csv(t, c.capacities).rfind("iteration,cell,capacity,target\n", 0) == 0);
  const std::string json = tessellation_json(c, m, t);
  CHECK(json.find("\"max_capacity_gap\"") != std::string::npos);
  CHECK(json.find(std::string("\"version\": \"") + kVersion) != std::string::npos);
  CHECK(json == tessellation_json(c, m, t));
  const std::string svg = tessellation_svg(m, t);
  CHECK(svg.substr(svg.find('\n') + 1).rfind(std::string("<!-- geotess ") + kVersion + " -->", 0) == 0);
  CHECK(svg.find("data-cell=\"1\"") != std::string::npos);
  CHECK(svg.find("data-cell=\"2\"") == std::string::npos);
}
