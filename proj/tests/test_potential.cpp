#include "doctest.h"
#include "instances.hpp"
#include "tropskel/errors.hpp"
#include "tropskel/potential.hpp"
#include "tropskel/tropical_dual.hpp"

#include <Eigen/Eigenvalues>

#include <random>

using namespace tropskel;
using namespace tropskel::testing;

namespace {

Eigen::VectorXd vec(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

Polyhedron amoeba_polytope(const NewtonData& d) {
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

std::shared_ptr<GaugePotential> identity_quadratic(int n = 2) {
  return std::make_shared<GaugePotential>(GaugePotential::quadratic(Eigen::MatrixXd::Identity(n, n)));
}

std::shared_ptr<GaugePotential> e2_gauge() { return build_adapted_potential(amoeba_polytope(e2())).potential; }

const AdaptednessRow* row_with_label(const AdaptednessReport& r, const std::string& label) {
  for (const auto& row : r.rows) {
    if (row.label == label) return &row;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("quadratic potential values") {
  auto phi = identity_quadratic();
  CHECK(phi->value(vec(3, 4)) == doctest::Approx(25.0));
  auto j = phi_eval(*phi, vec(3, 4), DerivativeOrder::Hessian);
  CHECK(j.gradient[0] == doctest::Approx(6.0));
  CHECK(j.gradient[1] == doctest::Approx(8.0));
  CHECK(j.hessian(0, 0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(phi->hessian(vec(0, 0)), Error);
  CHECK_THROWS_AS(GaugePotential::quadratic(Eigen::MatrixXd::Zero(2, 2)), Error);
  CHECK_THROWS_AS(GaugePotential::gauge({{Rational(1), Rational(0)}}, 5, 0.1), Error);
}

TEST_CASE("gauge potential is homogeneous and has correct derivatives") {
  auto phi = e2_gauge();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0), lam(0.1, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const Eigen::VectorXd x = vec(u(rng), u(rng));
    CHECK(std::abs(phi->value(2 * x) - 4 * phi->value(x)) <= 1e-12 * phi->value(2 * x));
    const double l = lam(rng);
    CHECK((phi->gradient(l * x) - l * phi->gradient(x)).norm() <= 1e-12 * l * phi->gradient(x).norm());
  }
  double worst_grad = 0, worst_hess = 0;
  for (int i = 0; i < 100; ++i) {
    const Eigen::VectorXd x = vec(u(rng), u(rng));
    const double h = 1e-6 * x.norm();
    Eigen::VectorXd fd(2);
    Eigen::MatrixXd fh(2, 2);
    for (int k = 0; k < 2; ++k) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(2);
      e[k] = h;
      fd[k] = (phi->value(x + e) - phi->value(x - e)) / (2 * h);
      fh.col(k) = (phi->gradient(x + e) - phi->gradient(x - e)) / (2 * h);
    }
    worst_grad = std::max(worst_grad, (fd - phi->gradient(x)).norm() / phi->gradient(x).norm());
    worst_hess = std::max(worst_hess, (fh - phi->hessian(x)).norm() / phi->hessian(x).norm());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(phi->hessian(x));
    CHECK(es.eigenvalues().minCoeff() >= phi->epsilon());
  }
  CHECK(worst_grad < 1e-6);
  CHECK(worst_hess < 1e-5);
}

TEST_CASE("Legendre transform of a quadratic") {
  auto phi = identity_quadratic();
  const Eigen::VectorXd p = vec(1.5, -2.0);
  CHECK((legendre_inverse(*phi, p) - p / 2).norm() < 1e-12);
  CHECK(legendre_dual_eval(*phi, p) == doctest::Approx(p.squaredNorm() / 4));
  const Eigen::VectorXd y = projective_legendre(*phi, vec(3, 4));
  CHECK(y[0] == doctest::Approx(0.6));
  CHECK(y[1] == doctest::Approx(0.8));
  auto aniso = GaugePotential::quadratic(Eigen::Vector2d(1, 4).asDiagonal().toDenseMatrix());
  CHECK(gradient_ray_residual(aniso, vec(1, 1)) < 1e-14);
  CHECK(gradient_ray_residual(*phi, vec(-2, 5)) < 1e-14);
}

TEST_CASE("Legendre suite on a gauge potential") {
  auto phi = e2_gauge();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double roundtrip = 0, ray = 0, scale = 0;
  for (int i = 0; i < 1000; ++i) {
    const Eigen::VectorXd x = vec(u(rng), u(rng));
    roundtrip = std::max(roundtrip, (legendre_inverse(*phi, legendre_forward(*phi, x)) - x).norm() / x.norm());
    if (i < 100) ray = std::max(ray, gradient_ray_residual(*phi, x));
    scale = std::max(scale, (projective_legendre(*phi, 7 * x) - projective_legendre(*phi, x)).norm());
    CHECK((legendre_forward(*phi, 3 * x) - 3 * legendre_forward(*phi, x)).norm() <=
          1e-12 * legendre_forward(*phi, 3 * x).norm());
  }
  CHECK(roundtrip < 1e-8);
  CHECK(ray < 1e-6);
  CHECK(scale < 1e-12);
  CHECK(projective_winding_number(*phi) == 1);
  CHECK(projective_winding_number(*identity_quadratic()) == 1);

  // The dual of the dual gives back phi.
  auto psi = std::make_shared<LegendreDual>(phi);
  LegendreDual psi_star(psi);
  double worst = 0;
  for (int i = 0; i < 200; ++i) {
    const Eigen::VectorXd x = vec(u(rng), u(rng));
    worst = std::max(worst, std::abs(psi_star.value(x) - phi->value(x)) / phi->value(x));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("normal cone membership") {
  std::vector<Eigen::VectorXd> normals{vec(1, 0), vec(0, 1)};
  CHECK(normal_cone_membership(vec(1, 2), normals).in_relative_interior);
  CHECK_FALSE(normal_cone_membership(vec(1, 0), normals).in_relative_interior);
  CHECK_FALSE(normal_cone_membership(vec(-1, 2), normals).in_relative_interior);
  CHECK(normal_cone_membership(vec(2, 0), {vec(1, 0)}).in_relative_interior);
  CHECK_FALSE(normal_cone_membership(vec(2, 1), {vec(1, 0)}).in_relative_interior);
  // Dependent normals go through the NNLS branch.
  std::vector<Eigen::VectorXd> three{vec(1, 0), vec(0, 1), vec(1, 1)};
  CHECK(normal_cone_membership(vec(1, 2), three).in_relative_interior);
  CHECK_FALSE(normal_cone_membership(vec(0, 1), three).in_relative_interior);
}

TEST_CASE("adaptedness of the quadratic potential") {
  auto phi = identity_quadratic();
  auto r2 = check_adapted(*phi, amoeba_polytope(e2()));
  CHECK(r2.pass);
  CHECK(r2.rows.size() == 6);

  const Polyhedron p3 = amoeba_polytope(e3());
  auto r3 = check_adapted(*phi, p3);
  CHECK_FALSE(r3.pass);
  int failures = 0;
  for (const auto& row : r3.rows) {
    if (!row.informational && !row.pass) ++failures;
  }
  CHECK(failures == 1);
  const auto* bad = r3.first_failure();
  REQUIRE(bad != nullptr);
  CHECK(bad->label == "conv{(0,1),(-3,1)}");
  REQUIRE(bad->minimizer_vertex >= 0);
  CHECK(p3.vertices()[static_cast<std::size_t>(bad->minimizer_vertex)] == RationalVector{Rational(0), Rational(1)});

  // Dense grid minimization along each edge agrees with the verdict.
  for (const auto& row : r3.rows) {
    if (row.dim != 1) continue;
    const auto& f = p3.faces()[static_cast<std::size_t>(row.face)];
    const Eigen::VectorXd a = exact::to_eigen(p3.vertices()[static_cast<std::size_t>(f.vertices[0])]);
    const Eigen::VectorXd b = exact::to_eigen(p3.vertices()[static_cast<std::size_t>(f.vertices[1])]);
    int best = 0;
    double best_value = 1e300;
    const int k = 10000;
    for (int i = 0; i <= k; ++i) {
      const double v = phi->value(a + (b - a) * (double(i) / k));
      if (v < best_value) {
        best_value = v;
        best = i;
      }
    }
    const bool interior = best > 0 && best < k;
    CHECK(interior == row.pass);
  }

  CHECK(check_adapted(*phi, square()).pass);
}

TEST_CASE("constructed potentials are adapted") {
  for (const auto& d : {e1(), e2(), e3()}) {
    const Polyhedron p = amoeba_polytope(d);
    AdaptedConstruction c = build_adapted_potential(p);
    CHECK(c.report.pass);
    for (const auto& row : c.report.rows) {
      if (!row.informational) CHECK(row.margin > 0);
    }
    CHECK(check_adapted(*c.potential, p).pass);
  }
  auto sq = build_adapted_potential(square());
  CHECK(sq.report.pass);
  CHECK(sq.report.rows.size() == 8);
}

TEST_CASE("dual adaptedness") {
  auto phi = identity_quadratic();
  CHECK(dual_adaptedness_check(phi, amoeba_polytope(e2())).pass);
  CHECK(dual_adaptedness_check(phi, square()).pass);
  auto r3 = dual_adaptedness_check(phi, amoeba_polytope(e3()));
  CHECK_FALSE(r3.pass);
  REQUIRE(r3.first_failure() != nullptr);
  CHECK(r3.first_failure()->label == "conv{(0,1),(1,1)}");

  auto built = build_adapted_potential(amoeba_polytope(e3())).potential;
  CHECK(dual_adaptedness_check(built, amoeba_polytope(e3())).pass);
  CHECK_THROWS_AS(dual_adaptedness_check(phi, amoeba_polytope(e1())), Error);
}
