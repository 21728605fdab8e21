#pragma once

#include "tropskel/morse_skeleton.hpp"
#include "tropskel/newton_core.hpp"
#include "tropskel/polyhedron.hpp"
#include "tropskel/potential.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace tropskel {

// One verified property with the measured value it was decided on.
struct Check {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string relation;  // how measured is compared with threshold
  std::string detail;    // offending object or extra context

  bool operator==(const Check&) const = default;
};

Check make_check(std::string name, double measured, std::string relation, double threshold, std::string detail = {});

struct RunReport {
  int schema_version = 1;
  std::string command;
  std::string instance;
  nlohmann::json stages = nlohmann::json::object();
  std::vector<Check> checks;

  bool pass() const;
  bool operator==(const RunReport&) const = default;
};

nlohmann::json to_json(const RunReport& r);
RunReport report_from_json(const nlohmann::json& j);

// Writes report.json into dir and returns its path.
std::string write_report(const RunReport& r, const std::string& dir);

nlohmann::json vector_json(const Eigen::VectorXd& v);
nlohmann::json triangulation_json(const NewtonData& data, const StarTriangulation& t);
nlohmann::json polyhedron_json(const Polyhedron& p);
nlohmann::json adaptedness_json(const AdaptednessReport& r);
nlohmann::json critical_json(const NewtonData& data, const std::vector<CriticalDatum>& crits);
nlohmann::json flows_json(const std::vector<std::vector<FlowTrajectory>>& flows);
nlohmann::json complex_json(const NewtonData& data, const SkeletonComplex& s);

}  // namespace tropskel
