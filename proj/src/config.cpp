#include "tropskel/config.hpp"

#include "tropskel/errors.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace tropskel {

namespace {

using nlohmann::json;

[[noreturn]] void schema(const std::string& field, const std::string& reason) {
  fail(ErrorKind::SchemaError, field + ": " + reason);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) schema(path + key, "missing");
  return obj.at(key);
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) schema(field, "expected a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& field) {
  if (!v.is_number_integer()) schema(field, "expected an integer");
  return v.get<int>();
}

template <typename T, typename F>
void optional_field(const json& obj, const std::string& key, T& out, F&& convert) {
  if (obj.is_object() && obj.contains(key)) out = convert(obj.at(key), key);
}

Rational rational(const json& v, const std::string& field) {
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_string()) {
    try {
      return parse_rational(v.get<std::string>());
    } catch (const std::exception&) {
      schema(field, "not a rational number");
    }
  }
  schema(field, "expected an integer or a \"p/q\" string");
}

}  // namespace

RunConfig parse_config(const json& j) {
  if (!j.is_object()) schema("config", "expected an object");
  RunConfig c;
  c.schema_version = integer(require(j, "schema_version", ""), "schema_version");
  if (c.schema_version != kSchemaVersion) schema("schema_version", "unsupported version");
  optional_field(j, "name", c.name, [](const json& v, const std::string& f) {
    if (!v.is_string()) schema(f, "expected a string");
    return v.get<std::string>();
  });
  optional_field(j, "seed", c.seed, [](const json& v, const std::string& f) {
    if (!v.is_number_unsigned()) schema(f, "expected a nonnegative integer");
    return v.get<std::uint64_t>();
  });

  const json& inst = require(j, "instance", "");
  auto& in = c.instance;
  in.dim = integer(require(inst, "dim", "instance."), "instance.dim");
  if (in.dim < 1 || in.dim > 3) schema("instance.dim", "must be 1, 2 or 3");
  const json& pts = require(inst, "vertices", "instance.");
  if (!pts.is_array() || pts.empty()) schema("instance.vertices", "expected a nonempty array");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::string f = "instance.vertices[" + std::to_string(i) + "]";
    if (!pts[i].is_array() || static_cast<int>(pts[i].size()) != in.dim) schema(f, "expected dim integers");
    std::vector<std::int64_t> coords;
    for (const auto& x : pts[i]) {
      if (!x.is_number_integer()) schema(f, "vertices must be integer");
      coords.push_back(x.get<std::int64_t>());
    }
    in.points.emplace_back(std::move(coords));
  }
  const json& hs = require(inst, "heights", "instance.");
  if (!hs.is_array() || hs.size() != pts.size()) schema("instance.heights", "expected one height per vertex");
  for (std::size_t i = 0; i < hs.size(); ++i) in.heights.push_back(rational(hs[i], "instance.heights"));
  if (inst.contains("phases")) {
    const json& ph = inst.at("phases");
    if (!ph.is_array() || ph.size() != pts.size()) schema("instance.phases", "expected one phase per vertex");
    for (const auto& x : ph) {
      const double v = number(x, "instance.phases");
      if (!(v >= 0.0 && v < 2 * std::numbers::pi)) schema("instance.phases", "phases must lie in [0, 2pi)");
      in.phases.push_back(v);
    }
  } else {
    for (const auto& p : in.points) in.phases.push_back(p.is_zero() ? std::numbers::pi : 0.0);
  }
  optional_field(inst, "beta", in.beta, [](const json& v, const std::string&) { return number(v, "instance.beta"); });
  if (!(in.beta > 0)) schema("instance.beta", "must be positive");
  if (inst.contains("beta_list")) {
    const json& bl = inst.at("beta_list");
    if (!bl.is_array()) schema("instance.beta_list", "expected an array");
    for (const auto& x : bl) {
      const double b = number(x, "instance.beta_list");
      if (!(b > 0)) schema("instance.beta_list", "must be positive");
      in.beta_list.push_back(b);
    }
  }

  if (j.contains("potential")) {
    const json& pj = j.at("potential");
    auto& p = c.potential;
    if (pj.contains("mode")) {
      const std::string mode = pj.at("mode").is_string() ? pj.at("mode").get<std::string>() : "";
      if (mode == "gauge") p.mode = PotentialConfig::Mode::Gauge;
      else if (mode == "quadratic") p.mode = PotentialConfig::Mode::Quadratic;
      else schema("potential.mode", "expected \"gauge\" or \"quadratic\"");
    }
    optional_field(pj, "delta", p.delta, [](const json& v, const std::string&) { return number(v, "potential.delta"); });
    optional_field(pj, "p", p.p, [](const json& v, const std::string&) { return integer(v, "potential.p"); });
    optional_field(pj, "epsilon", p.epsilon,
                   [](const json& v, const std::string&) { return number(v, "potential.epsilon"); });
    if (p.p < 4 || p.p % 2 != 0) schema("potential.p", "must be an even integer >= 4");
    if (!(p.delta > 0)) schema("potential.delta", "must be positive");
    if (!(p.epsilon > 0)) schema("potential.epsilon", "must be positive");
    if (pj.contains("matrix")) {
      const json& m = pj.at("matrix");
      if (!m.is_array() || static_cast<int>(m.size()) != in.dim) schema("potential.matrix", "expected dim rows");
      for (const auto& row : m) {
        if (!row.is_array() || static_cast<int>(row.size()) != in.dim) schema("potential.matrix", "expected dim columns");
        std::vector<double> r;
        for (const auto& x : row) r.push_back(number(x, "potential.matrix"));
        p.matrix.push_back(r);
      }
    }
  }

  if (j.contains("tolerances")) {
    const json& tj = j.at("tolerances");
    auto num = [](const json& v, const std::string& f) { return number(v, "tolerances." + f); };
    optional_field(tj, "flow_seed", c.tolerances.flow_seed, num);
    optional_field(tj, "flow_stop", c.tolerances.flow_stop, num);
    optional_field(tj, "floor_tol", c.tolerances.floor_tol, num);
    optional_field(tj, "cover", c.tolerances.cover, num);
  }
  if (j.contains("sampling")) {
    const json& sj = j.at("sampling");
    auto count = [](const json& v, const std::string& f) {
      const int n = integer(v, "sampling." + f);
      if (n < 1) schema("sampling." + f, "must be positive");
      return n;
    };
    auto& s = c.sampling;
    optional_field(sj, "scan_grid", s.scan_grid, count);
    optional_field(sj, "positive_locus_directions", s.positive_locus_directions, count);
    optional_field(sj, "surface_samples", s.surface_samples, count);
    optional_field(sj, "boundary_directions", s.boundary_directions, count);
    optional_field(sj, "closeness_directions", s.closeness_directions, count);
    optional_field(sj, "legendre_samples", s.legendre_samples, count);
  }
  if (j.contains("output")) {
    const json& oj = j.at("output");
    optional_field(oj, "directory", c.output.directory, [](const json& v, const std::string&) {
      if (!v.is_string()) schema("output.directory", "expected a string");
      return v.get<std::string>();
    });
    optional_field(oj, "plots", c.output.plots, [](const json& v, const std::string&) {
      if (!v.is_boolean()) schema("output.plots", "expected a boolean");
      return v.get<bool>();
    });
  }
  // Surface instance-level problems (star, genericity) as schema errors too.
  try {
    make_data(c);
  } catch (const Error& e) {
    schema("instance", e.what());
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ParseError, "cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::ParseError, path + ": " + e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["name"] = c.name;
  j["seed"] = c.seed;
  json inst;
  inst["dim"] = c.instance.dim;
  inst["vertices"] = json::array();
  for (const auto& p : c.instance.points) inst["vertices"].push_back(p.coords());
  inst["heights"] = json::array();
  for (const auto& h : c.instance.heights) {
    if (denominator(h) == 1) inst["heights"].push_back(static_cast<long long>(numerator(h)));
    else inst["heights"].push_back(to_string(h));
  }
  inst["phases"] = c.instance.phases;
  inst["beta"] = c.instance.beta;
  if (!c.instance.beta_list.empty()) inst["beta_list"] = c.instance.beta_list;
  j["instance"] = inst;
  json pot;
  pot["mode"] = c.potential.mode == PotentialConfig::Mode::Gauge ? "gauge" : "quadratic";
  pot["delta"] = c.potential.delta;
  pot["p"] = c.potential.p;
  pot["epsilon"] = c.potential.epsilon;
  if (!c.potential.matrix.empty()) pot["matrix"] = c.potential.matrix;
  j["potential"] = pot;
  j["tolerances"] = {{"flow_seed", c.tolerances.flow_seed},
                     {"flow_stop", c.tolerances.flow_stop},
                     {"floor_tol", c.tolerances.floor_tol},
                     {"cover", c.tolerances.cover}};
  const auto& s = c.sampling;
  j["sampling"] = {{"scan_grid", s.scan_grid},
                   {"positive_locus_directions", s.positive_locus_directions},
                   {"surface_samples", s.surface_samples},
                   {"boundary_directions", s.boundary_directions},
                   {"closeness_directions", s.closeness_directions},
                   {"legendre_samples", s.legendre_samples}};
  j["output"] = {{"directory", c.output.directory}, {"plots", c.output.plots}};
  return j;
}

NewtonData make_data(const RunConfig& c, double beta) {
  return NewtonData::create(c.instance.points, c.instance.heights, c.instance.phases, beta);
}

NewtonData make_data(const RunConfig& c) { return make_data(c, c.instance.beta); }

std::shared_ptr<Potential> make_potential(const RunConfig& c, const Polyhedron& p) {
  const auto& pc = c.potential;
  if (pc.mode == PotentialConfig::Mode::Quadratic) {
    const int n = c.instance.dim;
    Eigen::MatrixXd g = Eigen::MatrixXd::Identity(n, n);
    if (!pc.matrix.empty()) {
      for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) g(i, k) = pc.matrix[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
      }
    }
    return std::make_shared<GaugePotential>(GaugePotential::quadratic(g));
  }
  return build_adapted_potential(p, pc.delta, pc.p, pc.epsilon).potential;
}

}  // namespace tropskel
