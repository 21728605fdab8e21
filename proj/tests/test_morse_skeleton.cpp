#include "doctest.h"
#include "instances.hpp"
#include "oracles.hpp"
#include "tropskel/errors.hpp"
#include "tropskel/morse_skeleton.hpp"
#include "tropskel/tropical_dual.hpp"

#include <Eigen/Dense>

#include <numeric>
#include <set>

using namespace tropskel;
using namespace tropskel::testing;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

std::shared_ptr<GaugePotential> identity_quadratic() {
  return std::make_shared<GaugePotential>(GaugePotential::quadratic(Eigen::MatrixXd::Identity(2, 2)));
}

std::shared_ptr<GaugePotential> adapted(const NewtonData& d) {
  return build_adapted_potential(complement_polytope(d, build_coherent_triangulation(d)).polytope).potential;
}

}  // namespace

TEST_CASE("Smith normal form") {
  const std::vector<IntMatrix> cases{
      {{1, 0}}, {{1, 0}, {0, 1}}, {{1, 1}, {1, -1}}, {{2, 4}, {6, 8}}, {{1, 2}, {3, -1}}, {{2, 4, 4}, {-6, 6, 12}}};
  for (const auto& a : cases) {
    const auto s = smith_normal_form(a);
    const IntMatrix d = multiply(multiply(s.u, a), s.w);
    for (std::size_t i = 0; i < d.size(); ++i) {
      for (std::size_t j = 0; j < d[i].size(); ++j) CHECK(d[i][j] == (i == j ? s.diag[i] : 0));
    }
    CHECK(multiply(s.w, s.w_inv) == identity_matrix(static_cast<int>(s.w.size())));
    for (std::size_t i = 0; i + 1 < s.diag.size(); ++i) CHECK(s.diag[i + 1] % s.diag[i] == 0);
  }
  CHECK(smith_normal_form({{2, 4}, {6, 8}}).diag == std::vector<std::int64_t>{2, 4});
  CHECK(smith_normal_form({{1, 1}, {1, -1}}).diag == std::vector<std::int64_t>{1, 2});
}

TEST_CASE("subtorus components match brute-force congruence counts") {
  struct Case {
    IntMatrix rows;
    int n;
    int expected;
  };
  const std::vector<Case> cases{{{{1, 0}}, 2, 1},
                                {{{1, 0}, {0, 1}}, 2, 1},
                                {{{1, 1}, {1, -1}}, 2, 2},
                                {{{1, 2}, {3, -1}}, 2, 7},
                                {{{1, 1, 0}, {1, -1, 0}}, 3, 2},
                                {{{2, 0}}, 2, 2}};
  for (const auto& c : cases) {
    SubtorusDescription torus(c.rows, std::vector<double>(c.rows.size(), 0.0), c.n);
    CHECK(torus.components() == c.expected);
    CHECK(torus.dimension() == c.n - static_cast<int>(c.rows.size()));
    CHECK(static_cast<int>(torus.basis().size()) == torus.dimension());
    std::int64_t det = 1;
    for (auto d : torus.elementary_divisors()) det *= d;
    CHECK(brute_force_components(c.rows, c.n, static_cast<int>(2 * det)) == c.expected);
  }
}

TEST_CASE("subtorus representatives and component lookup") {
  SubtorusDescription pair({{1, 1}, {1, -1}}, {0.0, 0.0}, 2);
  REQUIRE(pair.representatives().size() == 2);
  std::vector<Eigen::VectorXd> expected{Eigen::Vector2d(0, 0), Eigen::Vector2d(std::numbers::pi, std::numbers::pi)};
  for (const auto& e : expected) {
    CHECK(pair.residual(e) < 1e-12);
    bool found = false;
    for (const auto& r : pair.representatives()) {
      Eigen::VectorXd diff = r - e;
      for (Eigen::Index i = 0; i < 2; ++i) diff[i] = std::remainder(diff[i], kTwoPi);
      found = found || diff.norm() < 1e-12;
    }
    CHECK(found);
  }
  CHECK(pair.component_of(expected[0]) != pair.component_of(expected[1]));

  SubtorusDescription skew({{1, 2}, {3, -1}}, {0.3, -1.1}, 2);
  for (int c = 0; c < skew.components(); ++c) {
    const Eigen::VectorXd r = skew.representatives()[static_cast<std::size_t>(c)];
    CHECK(skew.residual(r) < 1e-12);
    CHECK(skew.component_of(r) == c);
    CHECK(skew.component_of(r + Eigen::Vector2d(kTwoPi, -2 * kTwoPi)) == c);
  }

  SubtorusDescription circle({{1, 0}}, {0.0}, 2);
  CHECK(circle.dimension() == 1);
  CHECK(circle.components() == 1);
  CHECK(std::abs(circle.representatives()[0][0]) < 1e-12);
  // Moving along the tangent basis stays on the same component.
  SubtorusDescription tilted({{2, 1, 0}}, {0.7}, 3);
  const Eigen::VectorXd r = tilted.representatives()[0];
  for (const auto& b : tilted.basis()) {
    Eigen::VectorXd v(3);
    for (int i = 0; i < 3; ++i) v[i] = static_cast<double>(b[static_cast<std::size_t>(i)]);
    CHECK(tilted.residual(r + 0.37 * v) < 1e-12);
    CHECK(tilted.component_of(r + 0.37 * v) == tilted.component_of(r));
  }
}

TEST_CASE("critical points of the pair of pants") {
  const auto d = e1();
  const auto t = build_coherent_triangulation(d);
  auto phi = identity_quadratic();
  const auto crits = find_critical_points(d, t, *phi);
  REQUIRE(crits.size() == 3);
  std::map<std::vector<int>, Eigen::VectorXd> expected{
      {{1}, Eigen::Vector2d(1, 0)}, {{2}, Eigen::Vector2d(0, 1)}, {{1, 2}, Eigen::Vector2d(1, 1)}};
  std::vector<int> indices;
  for (const auto& c : crits) {
    indices.push_back(c.morse_index);
    CHECK(c.morse_index == c.simplex.dim());
    CHECK(c.multiplier > 0);
    CHECK((c.location - expected.at(c.simplex.vertices)).norm() < 0.15);
    CHECK(std::abs(eval_model(d, t, Model::Fhat, c.location, 0).value) < 1e-10);
  }
  std::sort(indices.begin(), indices.end());
  CHECK(indices == std::vector<int>{0, 0, 1});

  // The F~ refinement moves the points by an exponentially small amount.
  const auto refined = find_critical_points(d, t, *phi, Model::Ftilde);
  for (std::size_t i = 0; i < crits.size(); ++i) {
    CHECK((refined[i].location - crits[i].location).norm() < 1e-6);
    CHECK(std::abs(eval_model(d, t, Model::Ftilde, refined[i].location, 0).value) < 1e-10);
  }
}

TEST_CASE("critical points agree with a dense search along the boundary curve") {
  const auto d = e2();
  const auto t = build_coherent_triangulation(d);
  auto phi = adapted(d);
  const auto crits = find_critical_points(d, t, *phi);
  REQUIRE(crits.size() == 6);
  const auto curve = boundary_polyline(d, t, Model::Fhat, 4000, 0.005, 5e-4);
  const std::size_t m = curve.size();
  std::vector<Eigen::VectorXd> extrema;
  for (std::size_t i = 0; i < m; ++i) {
    const double prev = phi->value(curve[(i + m - 1) % m].u);
    const double here = phi->value(curve[i].u);
    const double next = phi->value(curve[(i + 1) % m].u);
    if ((here < prev && here <= next) || (here > prev && here >= next)) extrema.push_back(curve[i].u);
  }
  CHECK(extrema.size() == 6);
  for (const auto& c : crits) {
    double best = 1e300;
    for (const auto& e : extrema) best = std::min(best, (e - c.location).norm());
    CHECK(best < 2e-3);
  }
  std::vector<int> hist(2, 0);
  for (const auto& c : crits) hist[static_cast<std::size_t>(c.morse_index)]++;
  CHECK(hist == std::vector<int>{3, 3});
}

TEST_CASE("critical points approach their tropical limits") {
  auto phi = identity_quadratic();
  double previous = 1e300;
  for (double beta : {25.0, 100.0, 400.0}) {
    const auto d = e1(beta);
    const auto crits = find_critical_points(d, build_coherent_triangulation(d), *phi);
    double drift = 0;
    for (const auto& c : crits) drift = std::max(drift, (c.location - c.pl_limit).norm());
    CHECK(drift < previous);
    previous = drift;
  }
}

TEST_CASE("unstable flows connect critical points along faces") {
  const auto d = e1();
  const auto t = build_coherent_triangulation(d);
  auto phi = identity_quadratic();
  const auto crits = find_critical_points(d, t, *phi);
  for (std::size_t i = 0; i < crits.size(); ++i) {
    const auto flows = flow_unstable(d, t, *phi, crits, static_cast<int>(i), Model::Fhat);
    if (crits[i].morse_index == 0) {
      REQUIRE(flows.size() == 1);
      CHECK(flows[0].samples.size() == 1);
      CHECK(flows[0].limit == static_cast<int>(i));
      continue;
    }
    REQUIRE(flows.size() == 2);
    std::set<int> limits;
    for (const auto& f : flows) {
      CHECK_FALSE(f.divergent);
      limits.insert(f.limit);
      CHECK(crits[static_cast<std::size_t>(f.limit)].simplex.is_face_of(crits[i].simplex));
      double worst_level = 0;
      bool decreasing = true;
      for (std::size_t k = 0; k < f.samples.size(); ++k) {
        worst_level = std::max(worst_level, std::abs(eval_model(d, t, Model::Fhat, f.samples[k], 0).value));
        if (k > 0 && phi->value(f.samples[k]) >= phi->value(f.samples[k - 1])) decreasing = false;
      }
      CHECK(worst_level < 1e-12);
      CHECK(decreasing);

      // Fine fixed-step RK4 with projection from the same seed.
      auto rhs = [&](const Eigen::VectorXd& u) {
        const auto jet = eval_model(d, t, Model::Fhat, u, 1);
        const Eigen::VectorXd v = phi->hessian(u).ldlt().solve(jet.grad);
        return Eigen::VectorXd(-(u - jet.grad.dot(u) / jet.grad.dot(v) * v));
      };
      auto project = [&](Eigen::VectorXd u) {
        for (int it = 0; it < 8; ++it) {
          const auto jet = eval_model(d, t, Model::Fhat, u, 1);
          u -= jet.value / jet.grad.squaredNorm() * jet.grad;
        }
        return u;
      };
      const std::size_t mid = f.samples.size() / 2;
      Eigen::VectorXd u = f.samples[0];
      const double h = 1e-4;
      const int steps = static_cast<int>(std::round(f.times[mid] / h));
      const double hh = f.times[mid] / steps;
      for (int s = 0; s < steps; ++s) {
        const Eigen::VectorXd k1 = rhs(u), k2 = rhs(u + hh / 2 * k1), k3 = rhs(u + hh / 2 * k2), k4 = rhs(u + hh * k3);
        u = project(u + hh / 6 * (k1 + 2 * k2 + 2 * k3 + k4));
      }
      // Compare orbits, not parametrizations: the unstable start turns
      // rounding into a time shift.
      double orbit_gap = 1e300;
      for (std::size_t k = 0; k + 1 < f.samples.size(); ++k) {
        const Eigen::VectorXd a = f.samples[k], b = f.samples[k + 1];
        const double s = std::clamp((u - a).dot(b - a) / std::max((b - a).squaredNorm(), 1e-300), 0.0, 1.0);
        orbit_gap = std::min(orbit_gap, (u - a - s * (b - a)).norm());
      }
      CHECK(orbit_gap < 1e-6);
    }
    CHECK(limits.size() == 2);

    const auto cone = cone_correspondence_check(d, *phi, crits[i], flows);
    CHECK(cone.pass);
    CHECK(cone.min_margin > 0);
  }
}

TEST_CASE("stable flows climb from saddles into the simplices containing them") {
  const auto d = make_instance({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {-1, -1, -1}}, {0, 1, 1, 1, 1});
  const auto t = build_coherent_triangulation(d);
  const auto phi = adapted(d);
  const auto crits = find_critical_points(d, t, *phi);
  int saddle = -1;
  for (std::size_t i = 0; i < crits.size(); ++i) {
    if (crits[i].morse_index == 1 && saddle < 0) saddle = static_cast<int>(i);
  }
  REQUIRE(saddle >= 0);
  const auto up = flow_stable(d, t, *phi, crits, saddle, Model::Fhat);
  REQUIRE(up.size() == 2);
  std::set<int> limits;
  for (const auto& f : up) {
    REQUIRE_FALSE(f.divergent);
    limits.insert(f.limit);
    const auto& top = crits[static_cast<std::size_t>(f.limit)];
    CHECK(top.morse_index == 2);
    CHECK(crits[static_cast<std::size_t>(saddle)].simplex.is_face_of(top.simplex));
    for (std::size_t k = 1; k < f.samples.size(); ++k) CHECK(phi->value(f.samples[k]) > phi->value(f.samples[k - 1]));
  }
  // Each edge of the boundary sphere lies in exactly two triangles.
  CHECK(limits.size() == 2);
  CHECK(flow_stable(d, t, *phi, crits, 0, Model::Fhat).empty());

  const auto e = e1();
  const auto te = build_coherent_triangulation(e);
  auto quad = identity_quadratic();
  const auto ce = find_critical_points(e, te, *quad);
  for (std::size_t i = 0; i < ce.size(); ++i) CHECK(flow_stable(e, te, *quad, ce, static_cast<int>(i), Model::Fhat).empty());
}

TEST_CASE("critical tori are normally nondegenerate") {
  for (const auto& d : {e1(), e2()}) {
    const auto t = build_coherent_triangulation(d);
    const auto phi = d.size() == 3 ? std::shared_ptr<Potential>(identity_quadratic()) : adapted(d);
    for (const auto& c : find_critical_points(d, t, *phi, Model::Ftilde)) {
      const auto r = normal_nondegeneracy(d, t, *phi, c);
      CAPTURE(c.simplex.to_string(d));
      CHECK(r.torus_dim == d.dim - static_cast<int>(c.simplex.vertices.size()));
      CHECK(r.transverse_dim == 2 * d.dim - 2 - r.torus_dim);
      CHECK(r.negative == c.morse_index);
      CHECK(r.nondegenerate);
      CHECK(r.along_torus < 1e-8);
      CHECK(r.surface_residual < 1e-12);
    }
  }
}

TEST_CASE("Liouville field on the positive locus") {
  for (const auto& d : {e1(), e2()}) {
    const auto t = build_coherent_triangulation(d);
    auto phi = d.size() == 3 ? identity_quadratic() : adapted(d);
    const auto points = positive_locus_samples(d, t, 400);
    CHECK(points.size() >= 100);
    for (const auto& z : points) {
      const auto s = liouville_field(d, t, *phi, z);
      CHECK(s.theta_component < 1e-6);
      CHECK(s.c1 > 0);
      CHECK(s.pairing > 0);
    }
    LogPoint off = points.front();
    off.theta = off.theta.array() + 0.5;
    CHECK_THROWS_AS(liouville_field(d, t, *phi, off), Error);
  }
}

TEST_CASE("extraneous critical scan") {
  const auto d = e1();
  const auto t = build_coherent_triangulation(d);
  ScanGrid grid;
  grid.size = 80;
  const auto scan = scan_extraneous_critical(d, t, *identity_quadratic(), grid);
  CHECK(scan.evaluated > 1000);
  CHECK(scan.pass);
  CHECK(scan.near_locus_min < scan.floor);
}

TEST_CASE("skeleton complexes") {
  {
    const auto d = e1();
    const auto t = build_coherent_triangulation(d);
    const auto run = run_skeleton(d, t, *identity_quadratic());
    CHECK(run.complex.census() == std::pair<int, int>{2, 1});
    CHECK(run.complex.euler == -1);
    for (const auto& c : run.complex.cells) CHECK(c.dim == 1);
    const auto rstz = rstz_complex(d, t);
    CHECK(compare_complexes(run.complex, rstz).isomorphic);

    SkeletonComplex broken = rstz;
    broken.incidence.erase(broken.incidence.begin());
    const auto cmp = compare_complexes(broken, rstz);
    CHECK_FALSE(cmp.isomorphic);
    CHECK_FALSE(cmp.first_disagreement.empty());
  }
  {
    const auto d = e2();
    const auto t = build_coherent_triangulation(d);
    const auto run = run_skeleton(d, t, *adapted(d));
    CHECK(run.complex.census() == std::pair<int, int>{3, 3});
    CHECK(run.complex.euler == -3);
    CHECK(run.complex.incidence.size() == 6);
    CHECK(compare_complexes(run.complex, rstz_complex(d, t)).isomorphic);
  }
  {
    // Generic phases leave the cell structure unchanged.
    auto d = e2();
    d.phases = {std::numbers::pi, 0.4, 4.9, 2.2};
    const auto t = build_coherent_triangulation(d);
    const auto run = run_skeleton(d, t, *adapted(d));
    CHECK(compare_complexes(run.complex, rstz_complex(d, t)).isomorphic);
  }
  {
    const auto d = two_component_instance();
    const auto t = build_coherent_triangulation(d);
    const auto rstz = rstz_complex(d, t);
    int edge_cells = 0;
    for (const auto& c : rstz.cells) edge_cells += c.simplex == Simplex({1, 2});
    CHECK(edge_cells == 2);
    CHECK(rstz.euler == -4);
    const auto run = run_skeleton(d, t, *identity_quadratic());
    CHECK(compare_complexes(run.complex, rstz).isomorphic);
  }
}
