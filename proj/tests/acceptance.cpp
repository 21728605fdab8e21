// One line per acceptance criterion, followed by the measured sub-checks.
// Exit status is nonzero when any criterion fails.

#include "instances.hpp"
#include "oracles.hpp"
#include "tropskel/errors.hpp"
#include "tropskel/morse_skeleton.hpp"
#include "tropskel/tropical_dual.hpp"
#include "tropskel/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace tropskel;
using namespace tropskel::testing;

namespace {

// Pinned tolerances.
constexpr double kE1Seconds = 10.0;
constexpr double kE2Seconds = 30.0;
constexpr int kCutoffPoints = 10000;
constexpr double kCutoffConvexity = 1e-9;
constexpr double kCutoffRatio = 8.0;
constexpr double kCutoffRatioTol = 1e-6;
constexpr double kClosenessSpread = 10.0;
constexpr double kRateSpread = 3.0;
constexpr int kMinLocusSamples = 100;
constexpr double kThetaTol = 1e-6;
constexpr int kSurfaceSamples = 100;
constexpr double kDbarRatio = 0.1;
constexpr int kLegendreSamples = 1000;
constexpr int kScanGrid = 200;
const std::vector<double> kBetas{25.0, 100.0, 400.0};

struct Outcome {
  std::string summary;
  std::vector<Check> checks;
};

int failures = 0;

void criterion(int number, const std::string& title, const std::function<Outcome()>& body) {
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out.checks.push_back(make_check("completed without error", 0, "==", 1, e.what()));
  }
  const bool pass = std::all_of(out.checks.begin(), out.checks.end(), [](const Check& c) { return c.pass; });
  failures += !pass;
  std::printf("CRITERION %2d %s  %s", number, pass ? "PASS" : "FAIL", title.c_str());
  if (!out.summary.empty()) std::printf("  (%s)", out.summary.c_str());
  std::printf("\n");
  for (const auto& c : out.checks) {
    std::printf("      %s  %s: %.6g %s %.6g", c.pass ? "ok  " : "FAIL", c.name.c_str(), c.measured, c.relation.c_str(),
                c.threshold);
    if (!c.detail.empty()) std::printf("  [%s]", c.detail.c_str());
    std::printf("\n");
  }
  std::fflush(stdout);
}

Polyhedron polytope_of(const NewtonData& d) {
  return complement_polytope(d, build_coherent_triangulation(d)).polytope;
}

Polyhedron square() {
  std::vector<LinearConstraint> c;
  for (int s : {1, -1}) {
    c.push_back({{Rational(s), Rational(0)}, Rational(1)});
    c.push_back({{Rational(0), Rational(s)}, Rational(1)});
  }
  return Polyhedron(2, c);
}

std::shared_ptr<GaugePotential> quadratic() {
  return std::make_shared<GaugePotential>(GaugePotential::quadratic(Eigen::MatrixXd::Identity(2, 2)));
}

std::shared_ptr<GaugePotential> adapted(const NewtonData& d) {
  return build_adapted_potential(polytope_of(d)).potential;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string indices_of(const std::vector<CriticalDatum>& crits, std::vector<int>& sorted) {
  sorted.clear();
  for (const auto& c : crits) sorted.push_back(c.morse_index);
  std::sort(sorted.begin(), sorted.end());
  std::ostringstream s;
  for (int i : sorted) s << i << " ";
  return s.str();
}

// Full pipeline on one instance: triangulation, P, adaptedness, critical
// points, flows, assembly and comparison with the combinatorial complex.
Outcome skeleton_criterion(const NewtonData& d, const std::shared_ptr<Potential>& phi_in, bool build_gauge,
                           int expected_count, const std::vector<int>& expected_indices, int expected_euler,
                           std::pair<int, int> expected_census, double max_seconds) {
  const auto start = std::chrono::steady_clock::now();
  const auto t = build_coherent_triangulation(d);
  const auto p = complement_polytope(d, t).polytope;
  const std::shared_ptr<Potential> phi = build_gauge ? build_adapted_potential(p).potential : phi_in;
  const auto adapted_report = check_adapted(*phi, p);
  const auto run = run_skeleton(d, t, *phi);
  const auto cmp = compare_complexes(run.complex, rstz_complex(d, t));
  const double elapsed = seconds_since(start);

  Outcome out;
  std::vector<int> sorted;
  const std::string idx = indices_of(run.critical, sorted);
  const auto census = run.complex.census();
  out.checks.push_back(make_check("potential adapted to P", adapted_report.pass, "==", 1));
  out.checks.push_back(make_check("critical points", static_cast<double>(run.critical.size()), "==", expected_count));
  out.checks.push_back(make_check("indices as expected", sorted == expected_indices, "==", 1, "indices " + idx));
  out.checks.push_back(make_check("circle cells", census.first, "==", expected_census.first));
  out.checks.push_back(make_check("interval cells", census.second, "==", expected_census.second));
  out.checks.push_back(make_check("Euler characteristic", run.complex.euler, "==", expected_euler));
  out.checks.push_back(make_check("isomorphic to the combinatorial complex", cmp.isomorphic, "==", 1,
                                  cmp.first_disagreement));
  int cone_failures = 0;
  for (const auto& c : run.cones) cone_failures += !c.pass;
  out.checks.push_back(make_check("cone correspondence failures", cone_failures, "==", 0));
  out.checks.push_back(make_check("runtime [s]", elapsed, "<", max_seconds));
  std::ostringstream s;
  s << run.critical.size() << " critical points, indices " << idx << "chi " << run.complex.euler << ", "
    << elapsed << " s";
  out.summary = s.str();
  return out;
}

}  // namespace

int main() {
  criterion(1, "pair-of-pants skeleton", [] {
    return skeleton_criterion(e1(), quadratic(), false, 3, {0, 0, 1}, -1, {2, 1}, kE1Seconds);
  });

  criterion(2, "mirror-P2 skeleton", [] {
    const auto d = e2();
    const auto t = build_coherent_triangulation(d);
    Rational vol = 0;
    for (const auto& s : t.maximal_simplices()) vol += simplex_volume(d, s);
    auto out = skeleton_criterion(d, nullptr, true, 6, {0, 0, 0, 1, 1, 1}, -3, {3, 3}, kE2Seconds);
    out.checks.push_back(make_check("-2 vol(Q)", -2 * to_double(vol), "==", -3));
    return out;
  });

  criterion(3, "adaptedness discrimination", [] {
    Outcome out;
    const auto phi = quadratic();
    out.checks.push_back(make_check("|u|^2 adapted on E2", check_adapted(*phi, polytope_of(e2())).pass, "==", 1));
    const auto p3 = polytope_of(e3());
    const auto r3 = check_adapted(*phi, p3);
    int failing = 0;
    for (const auto& row : r3.rows) failing += !row.informational && !row.pass;
    out.checks.push_back(make_check("|u|^2 failing faces on E3", failing, "==", 1));
    const auto* bad = r3.first_failure();
    out.checks.push_back(make_check("failure on the top edge", bad && bad->label == "conv{(0,1),(-3,1)}", "==", 1,
                                    bad ? bad->label : "no failure"));
    Eigen::Vector2d endpoint(0, 1);
    out.checks.push_back(make_check("minimizer distance to endpoint (0,1)",
                                    bad ? (bad->minimizer - endpoint).norm() : 1e300, "<", 1e-9));
    const auto built = build_adapted_potential(p3);
    double margin = 1e300;
    for (const auto& row : built.report.rows) {
      if (!row.informational) margin = std::min(margin, row.margin);
    }
    out.checks.push_back(make_check("constructed potential passes on E3", built.report.pass, "==", 1));
    out.checks.push_back(make_check("constructed potential minimum margin", margin, ">", 0));
    out.summary = "E3 fails on " + (bad ? bad->label : std::string("nothing"));
    return out;
  });

  criterion(4, "cutoff certificate", [] {
    return Outcome{"", cutoff_checks(kCutoffPoints, kCutoffConvexity, kCutoffRatio, kCutoffRatioTol)};
  });

  criterion(5, "localization bounds on E2", [] {
    return Outcome{"beta 25, 100, 400", closeness_checks([](double b) { return e2(b); }, kBetas, 1000, kClosenessSpread)};
  });

  criterion(6, "convergence rates on E2", [] {
    return Outcome{"beta 25, 100, 400", convergence_checks([](double b) { return e2(b); }, kBetas, 2000, kRateSpread)};
  });

  criterion(7, "critical-point drift", [] {
    Outcome out;
    for (auto c : drift_checks([](double b) { return e1(b); }, *quadratic(), kBetas, kRateSpread)) {
      c.name = "E1 " + c.name;
      out.checks.push_back(c);
    }
    const auto gauge = adapted(e2());
    for (auto c : drift_checks([](double b) { return e2(b); }, *gauge, kBetas, kRateSpread)) {
      c.name = "E2 " + c.name;
      out.checks.push_back(c);
    }
    return out;
  });

  criterion(8, "Liouville identities", [] {
    Outcome out;
    const auto d1 = e1();
    for (auto c : liouville_checks(d1, build_coherent_triangulation(d1), *quadratic(), 400, kMinLocusSamples,
                                   kThetaTol)) {
      c.name = "E1 " + c.name;
      out.checks.push_back(c);
    }
    const auto d2 = e2();
    for (auto c : liouville_checks(d2, build_coherent_triangulation(d2), *adapted(d2), 400, kMinLocusSamples,
                                   kThetaTol)) {
      c.name = "E2 " + c.name;
      out.checks.push_back(c);
    }
    return out;
  });

  criterion(9, "symplecticity margin on E2", [] {
    const auto d = e2();
    std::mt19937_64 rng(1);
    return Outcome{"", symplecticity_checks(d, build_coherent_triangulation(d), kSurfaceSamples, rng, kDbarRatio)};
  });

  criterion(10, "Legendre suite", [] {
    Outcome out;
    std::mt19937_64 rng(1);
    for (auto c : legendre_checks(adapted(e2()), kLegendreSamples, rng, LegendreTolerances{})) {
      c.name = "E2 gauge " + c.name;
      out.checks.push_back(c);
    }
    for (auto c : legendre_checks(quadratic(), kLegendreSamples, rng, LegendreTolerances{})) {
      c.name = "|u|^2 " + c.name;
      out.checks.push_back(c);
    }
    out.checks.push_back(dual_verdict_check("E2, |u|^2", quadratic(), polytope_of(e2())));
    out.checks.push_back(dual_verdict_check("E3, |u|^2", quadratic(), polytope_of(e3())));
    out.checks.push_back(dual_verdict_check("square, |u|^2", quadratic(), square()));
    out.checks.push_back(dual_verdict_check("E3, constructed", adapted(e3()), polytope_of(e3())));
    return out;
  });

  criterion(11, "subtorus arithmetic", [] {
    struct Case {
      IntMatrix rows;
      int n;
    };
    const std::vector<Case> cases{{{{1, 0}}, 2},
                                  {{{1, 0}, {0, 1}}, 2},
                                  {{{1, 1}, {1, -1}}, 2},
                                  {{{1, 2}, {3, -1}}, 2},
                                  {{{1, 1, 0}, {1, -1, 0}}, 3}};
    Outcome out;
    for (const auto& c : cases) {
      const SubtorusDescription torus(c.rows, std::vector<double>(c.rows.size(), 0.0), c.n);
      std::int64_t det = 1;
      for (auto x : torus.elementary_divisors()) det *= x;
      const int brute = brute_force_components(c.rows, c.n, static_cast<int>(2 * det));
      std::ostringstream name;
      name << "components of {";
      for (std::size_t i = 0; i < c.rows.size(); ++i) {
        name << (i ? "," : "") << "(";
        for (std::size_t k = 0; k < c.rows[i].size(); ++k) name << (k ? "," : "") << c.rows[i][k];
        name << ")";
      }
      name << "}";
      out.checks.push_back(make_check(name.str(), torus.components(), "==", brute, "brute force " + std::to_string(brute)));
    }
    return out;
  });

  criterion(12, "extraneous-critical scan", [] {
    Outcome out;
    ScanGrid grid;
    grid.size = kScanGrid;
    const auto d1 = e1();
    auto c1 = scan_check(d1, build_coherent_triangulation(d1), *quadratic(), grid);
    c1.name = "E1 " + c1.name;
    const auto d2 = e2();
    auto c2 = scan_check(d2, build_coherent_triangulation(d2), *adapted(d2), grid);
    c2.name = "E2 " + c2.name;
    out.checks = {c1, c2};
    return out;
  });

  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
