#include "doctest.h"
#include "instances.hpp"
#include "tropskel/errors.hpp"
#include "tropskel/localization.hpp"
#include "tropskel/tropical_dual.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <random>

using namespace tropskel;
using namespace tropskel::testing;

namespace {

Eigen::VectorXd vec(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

// Direct transcription of F~ + 1 with plain products, as an independent oracle.
double ftilde_plus_one_oracle(const NewtonData& d, const StarTriangulation& t, const Eigen::VectorXd& u) {
  double sum = 0.0;
  for (int a = 0; a < d.size(); ++a) {
    if (a == d.origin_index()) continue;
    double c = 1.0;
    for (int nb : t.adjacent(a)) c *= chi(d.beta * (d.linear_form(a, u) - d.linear_form(nb, u)) + std::sqrt(d.beta));
    sum += std::exp(d.beta * d.linear_form(a, u)) * c;
  }
  return sum;
}

double bisect_root(const std::function<double(double)>& g, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (g(mid) > 0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("cutoff values") {
  CHECK(chi(0.0) == 1.0);
  CHECK(chi(5.0) == 1.0);
  CHECK(chi(-2.0) == 0.0);
  CHECK(chi(-3.0) == 0.0);
  CHECK(chi(-1.0) == doctest::Approx(std::exp(-0.125)).epsilon(1e-12));
  CHECK(chi(-1.0) == doctest::Approx(0.882497).epsilon(1e-6));
}

TEST_CASE("cutoff derivatives match finite differences") {
  for (double x = -1.95; x < -0.05; x += 0.1) {
    const double h = 1e-6;
    CHECK(chi_d1(x) == doctest::Approx((chi(x + h) - chi(x - h)) / (2 * h)).epsilon(1e-6));
    CHECK(chi_d2(x) == doctest::Approx((chi_d1(x + h) - chi_d1(x - h)) / (2 * h)).epsilon(1e-6));
  }
  // C^2 across x = 0.
  CHECK(std::abs(chi_d1(-1e-9)) < 1e-8);
  CHECK(std::abs(chi_d2(-1e-9)) < 1e-7);
}

TEST_CASE("cutoff is monotone, bounded and e^x chi is convex") {
  double prev = 0.0;
  for (int k = 0; k <= 10000; ++k) {
    const double x = -2.0 + 2.0 * k / 10000;
    const double c = chi(x);
    CHECK(c >= 0.0);
    CHECK(c <= 1.0);
    CHECK(c >= prev);
    prev = c;
  }
  const double h = 2.0 / 10000;
  auto f = [](double x) { return std::exp(x) * chi(x); };
  double worst = 0.0;
  for (int k = 1; k < 10000; ++k) {
    const double x = -2.0 + h * k;
    worst = std::min(worst, f(x + h) - 2 * f(x) + f(x - h));
  }
  CHECK(worst >= -1e-9);
}

TEST_CASE("the printed polynomial is the ratio times 16 (x+2)^4") {
  for (double x = -1.9; x < 0; x += 0.1) {
    CHECK(exp_chi_ratio(x) * 16 * std::pow(x + 2, 4) == doctest::Approx(cutoff_polynomial(x)).epsilon(1e-10));
  }
  CHECK(cutoff_polynomial(-1.0) == doctest::Approx(8.0));
  CHECK(exp_chi_ratio(-1.0) == doctest::Approx(0.5));
}

TEST_CASE("monomial cutoff plateaus") {
  auto d = e2();
  auto t = build_coherent_triangulation(d);
  const double lo = 1 / std::sqrt(d.beta), hi = lo + 2 / d.beta;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-3, 3);
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    Eigen::VectorXd u = vec(U(rng), U(rng));
    for (int a = 0; a < d.size(); ++a) {
      const double r = r_alpha(d, a, u);
      if (r < lo) CHECK(monomial_cutoff(d, t, a, u) == 1.0);
      if (r > hi) CHECK(monomial_cutoff(d, t, a, u) == 0.0);
      ++checked;
    }
  }
  CHECK(checked == 4000);
  auto d1 = e1();
  CHECK(monomial_cutoff(d1, build_coherent_triangulation(d1), 1, vec(1.005, 0)) == 1.0);
}

TEST_CASE("region labels") {
  auto d = e1();
  auto t = build_coherent_triangulation(d);
  auto g = classify_region(d, t, vec(0, 0));
  CHECK(g.good());
  CHECK(g.tau == Simplex({0}));
  auto b = classify_region(d, t, vec(1.105, 0));
  CHECK(!b.good());
  // Every l_a is within 1/sqrt(beta) of the max at (1.05, 1.05), so all three
  // cutoffs are 1 and the label is the full triangle.
  auto corner = classify_region(d, t, vec(1.05, 1.05));
  CHECK(corner.good());
  CHECK(corner.tau == Simplex({0, 1, 2}));
}

TEST_CASE("good labels are simplices of T") {
  auto d = e2();
  auto t = build_coherent_triangulation(d);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-3, 3);
  for (int i = 0; i < 1000; ++i) {
    auto label = classify_region(d, t, vec(U(rng), U(rng)));
    if (label.good()) CHECK(t.contains(label.tau));
  }
}

TEST_CASE("defining function values") {
  auto d = e1();
  auto t = build_coherent_triangulation(d);
  auto z = LogPoint::from_u(vec(0, 0), vec(0, 0), d.beta);
  auto f0 = eval_fs(d, t, z, 0.0);
  CHECK(f0.real() == doctest::Approx(-1.0 + 2 * std::exp(-100.0)));
  CHECK(std::abs(f0.imag()) < 1e-12);
  for (double s : {0.0, 0.3, 1.0}) {
    auto f = eval_fs(d, t, z, s);
    CHECK(std::abs(f + 1.0) <= 2 * std::exp(-100.0) + 1e-15);
  }
  // Near the corner both non-constant terms survive with equal size.
  const double x = 1.0 - 1.0 / d.beta;
  auto zc = LogPoint::from_u(vec(x, x), vec(0.3, -0.3), d.beta);
  auto jet = surface_jet(d, t, SurfaceKind{1.0, false}, zc);
  CHECK(std::abs(jet.f) > 0);
  CHECK(monomial_cutoff(d, t, 1, zc.u()) == 1.0);
  CHECK(monomial_cutoff(d, t, 2, zc.u()) == 1.0);
}

TEST_CASE("localized boundary function and its convex model") {
  auto d = e1();
  auto t = build_coherent_triangulation(d);
  CHECK(eval_Ftilde(d, t, vec(0, 0)).value == doctest::Approx(-1.0 + 2 * std::exp(-100.0)));
  CHECK(eval_Ftilde(d, t, vec(2, 0)).value > 1e30);
  auto hat = eval_Fhat(d, t, vec(1, 0));
  CHECK(hat.value == doctest::Approx(1.0).epsilon(1e-14));

  auto d2 = e2();
  auto t2 = build_coherent_triangulation(d2);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(-2, 1);
  for (int i = 0; i < 500; ++i) {
    Eigen::VectorXd u = vec(U(rng), U(rng));
    CHECK(eval_Ftilde(d2, t2, u).value + 1 == doctest::Approx(ftilde_plus_one_oracle(d2, t2, u)).epsilon(1e-10));
    // Gradients against central differences.
    auto g = eval_Fhat(d2, t2, u);
    const double h = 1e-7;
    for (int k = 0; k < 2; ++k) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(2);
      e[k] = h;
      const double fd = (eval_Fhat(d2, t2, u + e).value - eval_Fhat(d2, t2, u - e).value) / (2 * h);
      CHECK(g.gradient[k] == doctest::Approx(fd).epsilon(1e-5).scale(1e-12));
    }
  }
}

TEST_CASE("convex model Hessian is PSD near dP") {
  auto d = e2();
  auto t = build_coherent_triangulation(d);
  auto p = complement_polytope(d, t).polytope;
  int count = 0;
  for (const auto& u : collar_samples(p, d.beta, 60, 0.3)) {
    auto jet = eval_Fhat(d, t, u);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jet.hessian);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8 * std::max(1.0, jet.hessian.norm()));
    ++count;
  }
  CHECK(count >= 1000);
}

TEST_CASE("radial boundary solve") {
  auto d1 = e1();
  auto t1 = build_coherent_triangulation(d1);
  auto u = boundary_solve(d1, t1, vec(1, 0), Model::Ftilde);
  auto g = [&](double s) { return ftilde_plus_one_oracle(d1, t1, vec(s, 0)) - 1.0; };
  CHECK(u[0] == doctest::Approx(bisect_root(g, 0.0, 2.0)).epsilon(1e-10));
  CHECK(u[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(u[1]) < 1e-15);
  CHECK_THROWS_AS(boundary_solve(d1, t1, vec(-1, 0), Model::Ftilde), Error);

  auto d2 = e2();
  auto t2 = build_coherent_triangulation(d2);
  auto c = boundary_solve(d2, t2, vec(1, 1), Model::Ftilde);
  const double x = 1.0 - std::log(2.0) / d2.beta;
  CHECK(c[0] == doctest::Approx(x).epsilon(1e-9));
  CHECK(c.norm() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-2));
  auto h = boundary_solve(d2, t2, vec(1, 1), Model::Fhat);
  CHECK(eval_Fhat(d2, t2, h).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(eval_Ftilde(d2, t2, c).value) < 1e-12);
}

TEST_CASE("symplecticity margins on sampled hypersurface points") {
  auto d = e2();
  auto t = build_coherent_triangulation(d);
  std::mt19937_64 rng(17);
  for (double s : {0.0, 0.5, 1.0}) {
    auto bad = sample_surface(d, t, SurfaceKind{s, false}, 30, -2.5, 2.5, rng,
                              [&](const LogPoint& z) { return !classify_region(d, t, z.u()).good(); });
    CHECK(bad.size() == 30);
    for (const auto& z : bad) {
      auto m = symplecticity_margin(d, t, z, s);
      CHECK(m.norm_dbar < 0.1 * m.norm_d);
      if (s == 0.0) CHECK(m.norm_dbar == 0.0);
    }
    auto good = sample_surface(d, t, SurfaceKind{s, false}, 30, -2.5, 2.5, rng,
                               [&](const LogPoint& z) { return classify_region(d, t, z.u()).good(); });
    for (const auto& z : good) CHECK(symplecticity_margin(d, t, z, s).norm_dbar == 0.0);
  }
  auto off = LogPoint::from_u(vec(0, 0), vec(0, 0), d.beta);
  CHECK_THROWS_AS(symplecticity_margin(d, t, off, 1.0), Error);
}

TEST_CASE("boundary converges to dP as beta grows") {
  auto d = e2();
  auto t = build_coherent_triangulation(d);
  auto p = complement_polytope(d, t).polytope;
  auto rows = convergence_report(d, t, p, {25, 100, 400}, 800);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].point_distance > rows[1].point_distance);
  CHECK(rows[1].point_distance > rows[2].point_distance);
  CHECK(rows[0].lift_distance > rows[2].lift_distance);
}

TEST_CASE("convex model dominates and is exponentially close") {
  auto d = e2();
  auto t = build_coherent_triangulation(d);
  auto p = complement_polytope(d, t).polytope;
  for (double beta : {25.0, 100.0}) {
    d.beta = beta;
    auto b = localization_closeness(d, t, p, 400);
    CHECK(b.min_gap >= 0.0);
    CHECK(b.c_value < 10.0);
  }
}
