#include "tropskel/report.hpp"

#include "tropskel/errors.hpp"

#include <filesystem>
#include <fstream>

namespace tropskel {

using nlohmann::json;

Check make_check(std::string name, double measured, std::string relation, double threshold, std::string detail) {
  Check c;
  c.name = std::move(name);
  c.measured = measured;
  c.threshold = threshold;
  c.relation = std::move(relation);
  c.detail = std::move(detail);
  if (c.relation == "<") c.pass = measured < threshold;
  else if (c.relation == "<=") c.pass = measured <= threshold;
  else if (c.relation == ">") c.pass = measured > threshold;
  else if (c.relation == ">=") c.pass = measured >= threshold;
  else if (c.relation == "==") c.pass = measured == threshold;
  else fail(ErrorKind::InvalidArgument, "unknown relation " + c.relation);
  return c;
}

bool RunReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

json to_json(const RunReport& r) {
  json j;
  j["schema_version"] = r.schema_version;
  j["command"] = r.command;
  j["instance"] = r.instance;
  j["stages"] = r.stages;
  j["checks"] = json::array();
  for (const auto& c : r.checks) {
    j["checks"].push_back({{"name", c.name},
                           {"pass", c.pass},
                           {"measured", c.measured},
                           {"relation", c.relation},
                           {"threshold", c.threshold},
                           {"detail", c.detail}});
  }
  j["verdict"] = r.pass() ? "PASS" : "FAIL";
  return j;
}

RunReport report_from_json(const json& j) {
  try {
    RunReport r;
    r.schema_version = j.at("schema_version").get<int>();
    r.command = j.at("command").get<std::string>();
    r.instance = j.at("instance").get<std::string>();
    r.stages = j.at("stages");
    for (const auto& c : j.at("checks")) {
      Check k;
      k.name = c.at("name").get<std::string>();
      k.pass = c.at("pass").get<bool>();
      k.measured = c.at("measured").get<double>();
      k.relation = c.at("relation").get<std::string>();
      k.threshold = c.at("threshold").get<double>();
      k.detail = c.at("detail").get<std::string>();
      r.checks.push_back(std::move(k));
    }
    return r;
  } catch (const json::exception& e) {
    fail(ErrorKind::SchemaError, std::string("report: ") + e.what());
  }
}

std::string write_report(const RunReport& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::string path = (std::filesystem::path(dir) / "report.json").string();
  std::ofstream out(path);
  out << to_json(r).dump(2) << "\n";
  return path;
}

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json triangulation_json(const NewtonData& data, const StarTriangulation& t) {
  json j;
  j["maximal_simplices"] = json::array();
  Rational volume = 0;
  for (const auto& s : t.maximal_simplices()) {
    j["maximal_simplices"].push_back(s.to_string(data));
    volume += simplex_volume(data, s);
  }
  j["boundary_f_vector"] = t.boundary_f_vector();
  j["volume_Q"] = to_string(volume);
  return j;
}

json polyhedron_json(const Polyhedron& p) {
  json j;
  j["bounded"] = p.bounded();
  auto rv = [](const RationalVector& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(to_string(x));
    return a;
  };
  j["vertices"] = json::array();
  for (const auto& v : p.vertices()) j["vertices"].push_back(rv(v));
  j["rays"] = json::array();
  for (const auto& r : p.rays()) j["rays"].push_back(rv(r));
  j["inequalities"] = json::array();
  for (const auto& c : p.inequalities()) j["inequalities"].push_back({{"normal", rv(c.normal)}, {"bound", to_string(c.bound)}});
  j["faces"] = p.faces().size();
  return j;
}

json adaptedness_json(const AdaptednessReport& r) {
  json j;
  j["pass"] = r.pass;
  j["rows"] = json::array();
  for (const auto& row : r.rows) {
    j["rows"].push_back({{"face", row.label},
                         {"dim", row.dim},
                         {"minimizer", vector_json(row.minimizer)},
                         {"minimizer_is_vertex", row.minimizer_vertex >= 0},
                         {"margin", row.margin},
                         {"normal_cone", row.normal_cone.in_relative_interior},
                         {"informational", row.informational},
                         {"pass", row.pass}});
  }
  if (const auto* bad = r.first_failure()) j["first_failure"] = bad->label;
  return j;
}

json critical_json(const NewtonData& data, const std::vector<CriticalDatum>& crits) {
  json j = json::array();
  for (const auto& c : crits) {
    j.push_back({{"simplex", c.simplex.to_string(data)},
                 {"location", vector_json(c.location)},
                 {"pl_limit", vector_json(c.pl_limit)},
                 {"drift", (c.location - c.pl_limit).norm()},
                 {"multiplier", c.multiplier},
                 {"morse_index", c.morse_index},
                 {"value", c.value}});
  }
  return j;
}

json flows_json(const std::vector<std::vector<FlowTrajectory>>& flows) {
  json j = json::array();
  for (const auto& per : flows) {
    for (const auto& f : per) {
      j.push_back({{"origin", f.origin},
                   {"limit", f.limit},
                   {"divergent", f.divergent},
                   {"visited", f.visited},
                   {"samples", f.samples.size()},
                   {"duration", f.times.empty() ? 0.0 : f.times.back()}});
    }
  }
  return j;
}

json complex_json(const NewtonData& data, const SkeletonComplex& s) {
  json j;
  j["cells"] = json::array();
  for (const auto& c : s.cells) {
    j["cells"].push_back({{"simplex", c.simplex.to_string(data)},
                          {"component", c.component},
                          {"dim", c.dim},
                          {"torus_dim", c.torus_dim},
                          {"representative", vector_json(c.representative)}});
  }
  j["incidence"] = json::array();
  for (const auto& [lo, hi] : s.incidence) j["incidence"].push_back({lo, hi});
  j["euler"] = s.euler;
  const auto [tori, points] = s.census();
  j["census"] = {{"torus_cells", tori}, {"point_fibre_cells", points}};
  return j;
}

}  // namespace tropskel
