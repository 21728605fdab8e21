#pragma once

#include "tropskel/newton_core.hpp"
#include "tropskel/polyhedron.hpp"
#include "tropskel/potential.hpp"

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace tropskel {

inline constexpr int kSchemaVersion = 1;

struct InstanceConfig {
  int dim = 2;
  std::vector<LatticeVector> points;
  std::vector<Rational> heights;
  std::vector<double> phases;
  double beta = 100.0;
  std::vector<double> beta_list;  // used by the rate checks when non-empty
};

struct PotentialConfig {
  enum class Mode { Gauge, Quadratic };
  Mode mode = Mode::Gauge;
  double delta = 0.1;
  int p = 8;
  double epsilon = 0.05;
  std::vector<std::vector<double>> matrix;  // Quadratic mode; identity when empty
};

struct ToleranceConfig {
  double flow_seed = 1e-2;  // seed offset times beta
  double flow_stop = 1e-4;
  double floor_tol = 1e-3;
  double cover = 0.05;
};

struct SamplingConfig {
  int scan_grid = 200;
  int positive_locus_directions = 400;
  int surface_samples = 100;
  int boundary_directions = 2000;
  int closeness_directions = 1000;
  int legendre_samples = 1000;
};

struct OutputConfig {
  std::string directory = "out";
  bool plots = true;
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  std::string name = "instance";
  InstanceConfig instance;
  PotentialConfig potential;
  ToleranceConfig tolerances;
  SamplingConfig sampling;
  OutputConfig output;
  std::uint64_t seed = 1;
};

// Throws ParseError on malformed JSON and SchemaError naming the field otherwise.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& c);

NewtonData make_data(const RunConfig& c, double beta);
NewtonData make_data(const RunConfig& c);

// The configured potential for P; Gauge mode builds and verifies an adapted one.
std::shared_ptr<Potential> make_potential(const RunConfig& c, const Polyhedron& p);

}  // namespace tropskel
