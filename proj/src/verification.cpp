#include "tropskel/verification.hpp"

#include "tropskel/errors.hpp"
#include "tropskel/localization.hpp"
#include "tropskel/tropical_dual.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tropskel {

namespace {

std::string list(const std::vector<double>& v) {
  std::ostringstream s;
  s.precision(4);
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? ", " : "") << v[i];
  return s.str();
}

}  // namespace

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi / *lo;
}

std::vector<Check> cutoff_checks(int points, double convexity_tol, double expected_ratio, double ratio_tol) {
  auto f = [](double x) { return std::exp(x) * chi(x); };
  const double h = 2.0 / (points - 1);
  double worst = std::numeric_limits<double>::infinity();
  double at = 0.0;
  for (int i = 1; i + 1 < points; ++i) {
    const double x = -2.0 + h * i;
    const double d2 = f(x - h) - 2 * f(x) + f(x + h);
    if (d2 < worst) {
      worst = d2;
      at = x;
    }
  }
  const double ratio = exp_chi_ratio(-1.0);
  std::ostringstream detail;
  detail << "ratio(-1) = " << ratio << "; degree-6 polynomial(-1) = " << cutoff_polynomial(-1.0)
         << "; ratio = polynomial / (16 (x+2)^4)";
  return {make_check("cutoff convexity: min second difference", worst, ">=", -convexity_tol,
                     "worst at x = " + std::to_string(at)),
          make_check("cutoff ratio at -1: |ratio - expected|", std::abs(ratio - expected_ratio), "<", ratio_tol,
                     detail.str())};
}

std::vector<Check> closeness_checks(const InstanceAt& at, const std::vector<double>& betas, int directions,
                                    double max_spread) {
  std::vector<double> c;
  double gap = std::numeric_limits<double>::infinity();
  for (double b : betas) {
    const NewtonData d = at(b);
    const auto t = build_coherent_triangulation(d);
    const auto bound = localization_closeness(d, t, complement_polytope(d, t).polytope, directions);
    c.push_back(bound.c_value);
    gap = std::min(gap, bound.min_gap);
  }
  return {make_check("closeness constant spread over beta", spread(c), "<", max_spread, "c = " + list(c)),
          make_check("convex model dominates: min (F^ - F~ - 1)", gap, ">=", 0.0)};
}

std::vector<Check> convergence_checks(const InstanceAt& at, const std::vector<double>& betas, int directions,
                                      double max_spread) {
  const NewtonData d = at(betas.front());
  const auto t = build_coherent_triangulation(d);
  const auto rows = convergence_report(d, t, complement_polytope(d, t).polytope, betas, directions);
  std::vector<double> point, lift;
  for (const auto& r : rows) {
    point.push_back(r.point_distance * std::sqrt(r.beta));
    lift.push_back(r.lift_distance * std::sqrt(r.beta));
  }
  return {make_check("boundary distance * sqrt(beta) spread", spread(point), "<=", max_spread, "d*sqrt(b) = " + list(point)),
          make_check("normal-lift distance * sqrt(beta) spread", spread(lift), "<=", max_spread, "d*sqrt(b) = " + list(lift))};
}

std::vector<Check> drift_checks(const InstanceAt& at, const Potential& phi, const std::vector<double>& betas,
                                double max_spread) {
  std::vector<double> drift, scaled;
  for (double b : betas) {
    const NewtonData d = at(b);
    const auto crits = find_critical_points(d, build_coherent_triangulation(d), phi);
    double m = 0.0;
    for (const auto& c : crits) m = std::max(m, (c.location - c.pl_limit).norm());
    drift.push_back(m);
    scaled.push_back(m * std::sqrt(b));
  }
  int increases = 0;
  for (std::size_t i = 1; i < drift.size(); ++i) increases += drift[i] >= drift[i - 1];
  return {make_check("critical drift: non-decreasing steps", increases, "==", 0, "drift = " + list(drift)),
          make_check("critical drift * sqrt(beta) spread", spread(scaled), "<=", max_spread,
                     "d*sqrt(b) = " + list(scaled))};
}

std::vector<Check> liouville_checks(const NewtonData& data, const StarTriangulation& t, const Potential& phi,
                                    int directions, int min_samples, double theta_tol) {
  const auto points = positive_locus_samples(data, t, directions);
  double theta = 0.0, c1 = std::numeric_limits<double>::infinity(), pairing = c1;
  for (const auto& z : points) {
    const auto s = liouville_field(data, t, phi, z);
    theta = std::max(theta, s.theta_component);
    c1 = std::min(c1, s.c1);
    pairing = std::min(pairing, s.pairing);
  }
  return {make_check("positive-locus samples", static_cast<double>(points.size()), ">=", min_samples),
          make_check("max |d theta(X_lambda parallel)|", theta, "<", theta_tol),
          make_check("min c1", c1, ">", 0.0),
          make_check("min <df, X_Im f>", pairing, ">", 0.0)};
}

std::vector<Check> symplecticity_checks(const NewtonData& data, const StarTriangulation& t, int samples,
                                        std::mt19937_64& rng, double ratio_tol) {
  std::vector<Check> out;
  for (double s : {0.0, 0.5, 1.0}) {
    const auto points =
        sample_surface(data, t, SurfaceKind{s, false}, samples, -2.5, 2.5, rng, [](const LogPoint&) { return true; });
    double worst = 0.0;
    int good_nonzero = 0, good = 0;
    for (const auto& z : points) {
      const auto m = symplecticity_margin(data, t, z, s);
      worst = std::max(worst, m.norm_dbar / m.norm_d);
      if (classify_region(data, t, z.u()).good()) {
        ++good;
        good_nonzero += m.norm_dbar != 0.0;
      }
    }
    const std::string tag = "s = " + std::to_string(s).substr(0, 3);
    out.push_back(make_check("surface samples (" + tag + ")", static_cast<double>(points.size()), ">=", samples));
    out.push_back(make_check("max |dbar| / |d| (" + tag + ")", worst, "<", ratio_tol));
    out.push_back(make_check("good-region points with dbar != 0 (" + tag + ")", good_nonzero, "==", 0,
                             std::to_string(good) + " good-region points"));
  }
  return out;
}

std::vector<Check> legendre_checks(std::shared_ptr<const Potential> phi, int samples, std::mt19937_64& rng,
                                   const LegendreTolerances& tol) {
  const int n = phi->dim();
  std::uniform_real_distribution<double> box(-2.0, 2.0);
  auto draw = [&] {
    Eigen::VectorXd x(n);
    for (int k = 0; k < n; ++k) x[k] = box(rng);
    return x;
  };
  double roundtrip = 0.0, ray = 0.0, dual = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Eigen::VectorXd x = draw();
    roundtrip = std::max(roundtrip, (legendre_inverse(*phi, legendre_forward(*phi, x)) - x).norm() / x.norm());
  }
  for (int i = 0; i < std::min(samples, 100); ++i) ray = std::max(ray, gradient_ray_residual(*phi, draw()));
  const LegendreDual psi_star(std::make_shared<LegendreDual>(phi));
  for (int i = 0; i < std::min(samples, 200); ++i) {
    const Eigen::VectorXd x = draw();
    dual = std::max(dual, std::abs(psi_star.value(x) - phi->value(x)) / phi->value(x));
  }
  std::vector<Check> out{make_check("Legendre roundtrip error", roundtrip, "<", tol.roundtrip),
                         make_check("dual-of-dual error", dual, "<", tol.dual_of_dual),
                         make_check("gradient-ray residual", ray, "<", tol.ray)};
  if (n == 2) out.push_back(make_check("projective Legendre winding", projective_winding_number(*phi), "==", 1));
  return out;
}

Check dual_verdict_check(const std::string& label, std::shared_ptr<const Potential> phi, const Polyhedron& p) {
  const bool primal = check_adapted(*phi, p).pass;
  const auto dual = dual_adaptedness_check(std::move(phi), p);
  std::string detail = std::string("primal ") + (primal ? "pass" : "fail") + ", dual " + (dual.pass ? "pass" : "fail");
  if (const auto* bad = dual.first_failure()) detail += " on " + bad->label;
  return make_check("dual adaptedness verdict matches (" + label + ")", primal == dual.pass ? 1.0 : 0.0, "==", 1.0,
                    detail);
}

Check scan_check(const NewtonData& data, const StarTriangulation& t, const Potential& phi, const ScanGrid& grid) {
  const auto scan = scan_extraneous_critical(data, t, phi, grid);
  std::ostringstream detail;
  detail << scan.evaluated << " off-locus points, " << scan.skipped << " near-locus points skipped (min "
         << scan.near_locus_min << ")";
  if (scan.floor_u.size() == 2) detail << "; floor at u = (" << scan.floor_u[0] << ", " << scan.floor_u[1] << ")";
  auto c = make_check("off-locus floor of lambda on TH", scan.floor, ">", grid.floor_tol, detail.str());
  c.pass = c.pass && scan.pass;
  return c;
}

HessianSpectrum fhat_hessian_spectrum(const NewtonData& data, const StarTriangulation& t, const Polyhedron& p,
                                      int directions, double window) {
  HessianSpectrum out;
  out.good_min = out.bad_min = std::numeric_limits<double>::infinity();
  for (const auto& u : collar_samples(p, data.beta, directions, window)) {
    const auto jet = eval_Fhat(data, t, u);
    const double lo = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(jet.hessian).eigenvalues().minCoeff() /
                      std::max(1.0, jet.hessian.norm());
    if (classify_region(data, t, u).good()) {
      ++out.good_samples;
      out.good_min = std::min(out.good_min, lo);
    } else {
      ++out.bad_samples;
      out.bad_min = std::min(out.bad_min, lo);
      out.bad_negative += lo < -1e-8;
    }
  }
  return out;
}

std::vector<Check> skeleton_checks(const NewtonData& data, const StarTriangulation& t, const SkeletonRun& run) {
  std::vector<Check> out;
  out.push_back(make_check("critical points = boundary simplices", static_cast<double>(run.critical.size()), "==",
                           static_cast<double>(t.boundary().size())));
  std::vector<int> hist(static_cast<std::size_t>(data.dim), 0);
  int wrong = 0;
  for (const auto& c : run.critical) {
    wrong += c.morse_index != c.simplex.dim();
    if (c.morse_index >= 0 && c.morse_index < data.dim) hist[static_cast<std::size_t>(c.morse_index)]++;
  }
  const auto f = t.boundary_f_vector();
  int off = 0;
  for (std::size_t k = 0; k < hist.size() && k < f.size(); ++k) off += std::abs(hist[k] - f[k]);
  out.push_back(make_check("index histogram entries off the boundary f-vector", off, "==", 0));
  out.push_back(make_check("points with index != dim tau", wrong, "==", 0));
  int cone_failures = 0;
  for (const auto& c : run.cones) cone_failures += !c.pass;
  out.push_back(make_check("cone correspondence failures", cone_failures, "==", 0));
  const auto rstz = rstz_complex(data, t);
  const auto cmp = compare_complexes(run.complex, rstz);
  out.push_back(make_check("Liouville and combinatorial complexes isomorphic", cmp.isomorphic ? 1 : 0, "==", 1,
                           cmp.first_disagreement));
  if (data.dim == 2) {
    Rational volume = 0;
    for (const auto& s : t.maximal_simplices()) volume += simplex_volume(data, s);
    const double expected = -2.0 * to_double(volume);
    out.push_back(make_check("Euler characteristic vs -2 vol(Q)", run.complex.euler, "==", expected));
  }
  return out;
}

}  // namespace tropskel
