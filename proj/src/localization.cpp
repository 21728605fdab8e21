#include "tropskel/localization.hpp"

#include "tropskel/errors.hpp"
#include "tropskel/log_sum_exp.hpp"
#include "tropskel/tropical_dual.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace tropskel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd point(const NewtonData& data, int i) { return data.points[static_cast<std::size_t>(i)].to_eigen(); }

double wrap_angle(double x) {
  x = std::fmod(x, 2 * std::numbers::pi);
  return x < 0 ? x + 2 * std::numbers::pi : x;
}

}  // namespace

double log_chi(double x) {
  if (x >= 0) return 0.0;
  if (x <= -2) return -kInf;
  return -1.0 / (x + 2) + 0.5 - x / 4 + x * x / 8;
}

double log_chi_d1(double x) {
  if (x >= 0 || x <= -2) return 0.0;
  return 1.0 / ((x + 2) * (x + 2)) - 0.25 + x / 4;
}

double log_chi_d2(double x) {
  if (x >= 0 || x <= -2) return 0.0;
  return -2.0 / ((x + 2) * (x + 2) * (x + 2)) + 0.25;
}

double chi(double x) {
  if (x >= 0) return 1.0;
  if (x <= -2) return 0.0;
  return std::exp(log_chi(x));
}

double chi_d1(double x) { return log_chi_d1(x) * chi(x); }

double chi_d2(double x) {
  double g1 = log_chi_d1(x);
  return (log_chi_d2(x) + g1 * g1) * chi(x);
}

double exp_chi_ratio(double x) { return (chi(x) + 2 * chi_d1(x) + chi_d2(x)) / chi(x); }

double cutoff_polynomial(double x) {
  return 256 + x * (608 + x * (576 + x * (288 + x * (85 + x * (14 + x)))));
}

LogPoint LogPoint::from_u(const Eigen::VectorXd& u, const Eigen::VectorXd& theta, double beta) {
  return LogPoint{beta * u, theta, beta};
}

TermJet ftilde_term(const NewtonData& data, const StarTriangulation& t, int alpha, const Eigen::VectorXd& u,
                    int order) {
  const double beta = data.beta;
  const double sb = std::sqrt(beta);
  const Eigen::VectorXd a = point(data, alpha);
  const double la = data.linear_form(alpha, u);
  TermJet jet;
  jet.log_value = beta * la;
  if (order >= 1) jet.grad = beta * a;
  if (order >= 2) jet.hess = Eigen::MatrixXd::Zero(data.dim, data.dim);
  for (int nb : t.adjacent(alpha)) {
    const double x = beta * (la - data.linear_form(nb, u)) + sb;
    if (x <= -2) return jet;  // alive stays false
    jet.log_value += log_chi(x);
    const Eigen::VectorXd diff = a - point(data, nb);
    if (order >= 1) jet.grad += log_chi_d1(x) * beta * diff;
    if (order >= 2) jet.hess += log_chi_d2(x) * beta * beta * diff * diff.transpose();
  }
  jet.alive = true;
  return jet;
}

TermJet fhat_term(const NewtonData& data, int alpha, const Eigen::VectorXd& u, int order) {
  const double beta = data.beta;
  const Eigen::VectorXd a = point(data, alpha);
  const double la = data.linear_form(alpha, u);
  const double x = beta * la + std::sqrt(beta);
  TermJet jet;
  if (x <= -2) return jet;
  jet.alive = true;
  jet.log_value = beta * la + log_chi(x);
  if (order >= 1) jet.grad = beta * (1 + log_chi_d1(x)) * a;
  if (order >= 2) jet.hess = log_chi_d2(x) * beta * beta * a * a.transpose();
  return jet;
}

double monomial_cutoff(const NewtonData& data, const StarTriangulation& t, int alpha, const Eigen::VectorXd& u) {
  auto jet = ftilde_term(data, t, alpha, u, 0);
  if (!jet.alive) return 0.0;
  return std::exp(jet.log_value - data.beta * data.linear_form(alpha, u));
}

ModelJet eval_model(const NewtonData& data, const StarTriangulation& t, Model model, const Eigen::VectorXd& u,
                    int order) {
  const int origin = data.origin_index();
  std::vector<TermJet> terms;
  if (model == Model::Ftilde) {
    for (int i = 0; i < data.size(); ++i) {
      if (i != origin) terms.push_back(ftilde_term(data, t, i, u, order));
    }
  } else {
    for (int i : t.adjacent(origin)) terms.push_back(fhat_term(data, i, u, order));
  }
  std::vector<double> logs;
  for (const auto& term : terms) {
    if (term.alive) logs.push_back(term.log_value);
  }
  ModelJet out;
  out.value = log_sum_exp(logs);
  const int n = data.dim;
  if (order >= 1) out.grad = Eigen::VectorXd::Zero(n);
  if (order >= 2) out.hess = Eigen::MatrixXd::Zero(n, n);
  if (!std::isfinite(out.value) || order == 0) return out;
  for (const auto& term : terms) {
    if (!term.alive) continue;
    const double w = std::exp(term.log_value - out.value);
    out.grad += w * term.grad;
    if (order >= 2) out.hess += w * (term.hess + term.grad * term.grad.transpose());
  }
  if (order >= 2) out.hess -= out.grad * out.grad.transpose();
  return out;
}

RegionLabel classify_region(const NewtonData& data, const StarTriangulation& t, const Eigen::VectorXd& u) {
  const double lo = 1.0 / std::sqrt(data.beta);
  const double hi = lo + 2.0 / data.beta;
  RegionLabel label;
  for (int i = 0; i < data.size(); ++i) {
    const double r = r_alpha(data, i, u);
    if (r > lo && r < hi) {
      label.kind = RegionLabel::Kind::Bad;
      label.bad_alpha = i;
      return label;
    }
  }
  std::vector<int> tau;
  for (int i = 0; i < data.size(); ++i) {
    const double c = monomial_cutoff(data, t, i, u);
    if (c == 1.0) {
      tau.push_back(i);
    } else if (c != 0.0) {
      fail(ErrorKind::InconsistentLabel, "cutoff of " + data.points[static_cast<std::size_t>(i)].to_string() +
                                             " is fractional outside the bad region");
    }
  }
  label.tau = Simplex(tau);
  if (!t.contains(label.tau)) {
    fail(ErrorKind::InconsistentLabel, "active set " + label.tau.to_string(data) + " is not a simplex of T");
  }
  return label;
}

ValueGradient eval_Ftilde(const NewtonData& data, const StarTriangulation& t, const Eigen::VectorXd& u) {
  auto jet = eval_model(data, t, Model::Ftilde, u, 1);
  const double e = std::exp(jet.value);
  return {std::expm1(jet.value), e * jet.grad};
}

ValueGradientHessian eval_Fhat(const NewtonData& data, const StarTriangulation& t, const Eigen::VectorXd& u) {
  auto jet = eval_model(data, t, Model::Fhat, u, 2);
  const double e = std::exp(jet.value);
  return {e, e * jet.grad, e * (jet.hess + jet.grad * jet.grad.transpose())};
}

namespace {

// One term f_a c_a of the defining function on the exp(-log_scale) scale.
struct SurfaceTerm {
  std::complex<double> f;
  double c = 1.0;                // s chi_a + 1 - s
  double chi = 1.0;
  Eigen::VectorXd dchi_rho;      // d chi_a / d rho
  Eigen::VectorXd alpha;
};

std::vector<SurfaceTerm> surface_terms(const NewtonData& data, const StarTriangulation& t, SurfaceKind kind,
                                       const LogPoint& z, double& log_scale) {
  const Eigen::VectorXd u = z.u();
  const int origin = data.origin_index();
  double m = -kInf;
  for (int i = 0; i < data.size(); ++i) m = std::max(m, data.linear_form(i, u));
  log_scale = data.beta * m;
  std::vector<SurfaceTerm> out;
  for (int i = 0; i < data.size(); ++i) {
    SurfaceTerm term;
    term.alpha = point(data, i);
    const double phase = term.alpha.dot(z.theta) - data.phases[static_cast<std::size_t>(i)];
    term.f = std::polar(std::exp(data.beta * (data.linear_form(i, u) - m)), phase);
    term.dchi_rho = Eigen::VectorXd::Zero(data.dim);
    if (!(kind.localized && i == origin)) {
      auto jet = ftilde_term(data, t, i, u, 1);
      if (jet.alive) {
        term.chi = std::exp(jet.log_value - data.beta * data.linear_form(i, u));
        // d/d rho = (1/beta) d/du; the e^{beta l} part of the jet is removed.
        term.dchi_rho = term.chi * (jet.grad - data.beta * term.alpha) / data.beta;
      } else {
        term.chi = 0.0;
      }
    }
    term.c = kind.s * term.chi + 1.0 - kind.s;
    out.push_back(std::move(term));
  }
  return out;
}

}  // namespace

SurfaceJet surface_jet(const NewtonData& data, const StarTriangulation& t, SurfaceKind kind, const LogPoint& z) {
  SurfaceJet jet;
  auto terms = surface_terms(data, t, kind, z, jet.log_scale);
  const int n = data.dim;
  const std::complex<double> I(0.0, 1.0);
  jet.f = 0.0;
  jet.d_rho = Eigen::VectorXcd::Zero(n);
  jet.d_theta = Eigen::VectorXcd::Zero(n);
  for (const auto& term : terms) {
    jet.f += term.f * term.c;
    for (int k = 0; k < n; ++k) {
      jet.d_rho[k] += term.f * (term.alpha[k] * term.c + kind.s * term.dchi_rho[k]);
      jet.d_theta[k] += I * term.alpha[k] * term.f * term.c;
    }
    jet.magnitude += std::abs(term.f) * std::abs(term.c);
  }
  return jet;
}

std::complex<double> eval_fs(const NewtonData& data, const StarTriangulation& t, const LogPoint& z, double s) {
  auto jet = surface_jet(data, t, SurfaceKind{s, false}, z);
  return jet.f * std::exp(jet.log_scale);
}

SymplecticityMargin symplecticity_margin(const NewtonData& data, const StarTriangulation& t, const LogPoint& z,
                                         double s) {
  double log_scale = 0.0;
  auto terms = surface_terms(data, t, SurfaceKind{s, false}, z, log_scale);
  const int n = data.dim;
  std::complex<double> f = 0.0;
  double magnitude = 0.0;
  Eigen::VectorXcd d = Eigen::VectorXcd::Zero(n), dbar = Eigen::VectorXcd::Zero(n);
  for (const auto& term : terms) {
    f += term.f * term.c;
    magnitude += std::abs(term.f) * std::abs(term.c);
    for (int k = 0; k < n; ++k) {
      // In w = rho + i theta: d f_a = a f_a dw, d chi = dbar chi = (1/2) d_rho chi.
      d[k] += term.alpha[k] * term.f * term.c + s * term.f * 0.5 * term.dchi_rho[k];
      dbar[k] += s * term.f * 0.5 * term.dchi_rho[k];
    }
  }
  if (std::abs(f) > 1e-8 * magnitude) {
    fail(ErrorKind::NotOnHypersurface, "|f_s| relative to its terms is " + std::to_string(std::abs(f) / magnitude));
  }
  return {d.norm(), dbar.norm()};
}

Eigen::VectorXd boundary_solve(const NewtonData& data, const StarTriangulation& t, const Eigen::VectorXd& direction,
                               Model model) {
  if (direction.norm() == 0) fail(ErrorKind::InvalidArgument, "zero direction");
  const Eigen::VectorXd d = direction.normalized();
  double t_star = kInf;
  for (int i = 0; i < data.size(); ++i) {
    const double ad = point(data, i).dot(d);
    if (ad > 1e-14) t_star = std::min(t_star, data.height(i) / ad);
  }
  if (!std::isfinite(t_star)) fail(ErrorKind::NoRoot, "direction lies in the recession cone of P");
  auto g = [&](double s) { return eval_model(data, t, model, s * d, 0).value; };
  double lo = 0.0, hi = t_star + 1.0;
  if (!(g(lo) < 0) || !(g(hi) > 0)) fail(ErrorKind::NoRoot, "model does not change sign along the ray");
  // Safeguarded Newton started at the tropical boundary point t*, which lies
  // within O(1/beta) of the root; bisection takes over whenever Newton leaves
  // the bracket.
  double s = t_star;
  for (int it = 0; it < 200; ++it) {
    auto jet = eval_model(data, t, model, s * d, 1);
    if (std::abs(jet.value) < 1e-14) return s * d;
    (jet.value > 0 ? hi : lo) = s;
    if (hi - lo <= 4 * std::numeric_limits<double>::epsilon() * hi) return s * d;
    const double slope = jet.grad.dot(d);
    double next = s - jet.value / slope;
    if (!(slope > 0) || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
    s = next;
  }
  fail(ErrorKind::NoConvergence, "radial root finder did not converge");
}

std::optional<LogPoint> solve_on_surface(const NewtonData& data, const StarTriangulation& t, SurfaceKind kind,
                                         LogPoint z, int j) {
  const double max_step = 0.05 * data.beta;
  for (int it = 0; it < 80; ++it) {
    auto jet = surface_jet(data, t, kind, z);
    if (!(jet.magnitude > 0) || !std::isfinite(jet.magnitude)) return std::nullopt;
    if (std::abs(jet.f) <= 1e-12 * jet.magnitude) {
      z.theta = z.theta.unaryExpr([](double x) { return wrap_angle(x); });
      return z;
    }
    Eigen::Matrix2d jac;
    jac << jet.d_rho[j].real(), jet.d_theta[j].real(), jet.d_rho[j].imag(), jet.d_theta[j].imag();
    const Eigen::Vector2d rhs(jet.f.real(), jet.f.imag());
    Eigen::Vector2d step = jac.fullPivLu().solve(-rhs);
    if (!step.allFinite()) return std::nullopt;
    const double scale = std::max({1.0, std::abs(step[0]) / max_step, std::abs(step[1]) / 1.0});
    step /= scale;
    z.rho[j] += step[0];
    z.theta[j] += step[1];
  }
  return std::nullopt;
}

std::vector<LogPoint> sample_surface(const NewtonData& data, const StarTriangulation& t, SurfaceKind kind, int count,
                                     double lo, double hi, std::mt19937_64& rng,
                                     const std::function<bool(const LogPoint&)>& keep, int max_attempts) {
  const int n = data.dim;
  std::uniform_real_distribution<double> box(lo, hi), angle(0.0, 2 * std::numbers::pi);
  std::uniform_int_distribution<int> coord(0, n - 1);
  std::vector<LogPoint> out;
  for (int attempt = 0; attempt < max_attempts && static_cast<int>(out.size()) < count; ++attempt) {
    const int j = coord(rng);
    Eigen::VectorXd u(n), theta(n);
    for (int k = 0; k < n; ++k) {
      u[k] = box(rng);
      theta[k] = angle(rng);
    }
    // Seed u_j at a tie l_a = l_a' that is maximal among all terms.
    std::vector<double> ties;
    for (int a = 0; a < data.size(); ++a) {
      for (int b = a + 1; b < data.size(); ++b) {
        const Eigen::VectorXd diff = point(data, a) - point(data, b);
        if (diff[j] == 0) continue;
        Eigen::VectorXd v = u;
        v[j] = 0;
        v[j] = (data.height(a) - data.height(b) - diff.dot(v)) / diff[j];
        const double la = data.linear_form(a, v);
        if (tropical_eval(data, v).value - la <= 1e-9 * (1 + std::abs(la))) ties.push_back(v[j]);
      }
    }
    if (ties.empty()) continue;
    u[j] = ties[std::uniform_int_distribution<std::size_t>(0, ties.size() - 1)(rng)];
    auto z = solve_on_surface(data, t, kind, LogPoint::from_u(u, theta, data.beta), j);
    if (z && keep(*z)) out.push_back(*z);
  }
  return out;
}

std::vector<Eigen::VectorXd> sphere_directions(int n, int count) {
  std::vector<Eigen::VectorXd> out;
  if (n == 1) {
    out.push_back(Eigen::VectorXd::Constant(1, 1.0));
    out.push_back(Eigen::VectorXd::Constant(1, -1.0));
    return out;
  }
  if (n == 2) {
    for (int k = 0; k < count; ++k) {
      const double a = 2 * std::numbers::pi * (k + 0.5) / count;
      Eigen::VectorXd d(2);
      d << std::cos(a), std::sin(a);
      out.push_back(d);
    }
    return out;
  }
  if (n != 3) fail(ErrorKind::UnsupportedDimension, "sphere sampling needs n <= 3");
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < count; ++k) {
    const double z = 1.0 - 2.0 * (k + 0.5) / count;
    const double r = std::sqrt(1.0 - z * z);
    Eigen::VectorXd d(3);
    d << r * std::cos(golden * k), r * std::sin(golden * k), z;
    out.push_back(d);
  }
  return out;
}

std::optional<double> radial_hit(const Polyhedron& p, const Eigen::VectorXd& d) {
  double best = kInf;
  for (const auto& c : p.inequalities()) {
    const double ad = exact::to_eigen(c.normal).dot(d);
    if (ad > 1e-14) best = std::min(best, to_double(c.bound) / ad);
  }
  if (!std::isfinite(best)) return std::nullopt;
  return best;
}

namespace {

double segment_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double len2 = 0.0, dot = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    len2 += (b[k] - a[k]) * (b[k] - a[k]);
    dot += (x[k] - a[k]) * (b[k] - a[k]);
  }
  const double s = len2 > 0 ? std::clamp(dot / len2, 0.0, 1.0) : 0.0;
  double dist2 = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double r = x[k] - a[k] - s * (b[k] - a[k]);
    dist2 += r * r;
  }
  return std::sqrt(dist2);
}

// Directed Hausdorff distance from the vertices of `from` to the closed polyline
// `to`, for polylines in R^2 (or lifts whose first two coordinates are a point
// of R^2) that wind once around the origin. Only segments whose start lies
// within `window` radians of the query's polar angle are searched.
double directed_to_polyline(const std::vector<Eigen::VectorXd>& from, const std::vector<Eigen::VectorXd>& to,
                            double window = 0.05) {
  std::vector<std::pair<double, std::size_t>> by_angle;
  for (std::size_t i = 0; i < to.size(); ++i) by_angle.emplace_back(std::atan2(to[i][1], to[i][0]), i);
  std::sort(by_angle.begin(), by_angle.end());
  const std::size_t m = by_angle.size();
  double worst = 0.0;
  for (const auto& x : from) {
    const double a = std::atan2(x[1], x[0]);
    double best = kInf;
    for (double shift : {-2 * std::numbers::pi, 0.0, 2 * std::numbers::pi}) {
      auto lo = std::lower_bound(by_angle.begin(), by_angle.end(), std::make_pair(a + shift - window, std::size_t{0}));
      for (auto it = lo; it != by_angle.end() && it->first <= a + shift + window; ++it) {
        const std::size_t i = it->second;
        best = std::min(best, segment_distance(x, to[i], to[(i + 1) % m]));
        best = std::min(best, segment_distance(x, to[(i + m - 1) % m], to[i]));
      }
    }
    worst = std::max(worst, best);
  }
  return worst;
}

double directed_to_cloud(const std::vector<Eigen::VectorXd>& from, const std::vector<Eigen::VectorXd>& to) {
  double worst = 0.0;
  for (const auto& x : from) {
    double best = kInf;
    for (const auto& y : to) best = std::min(best, (x - y).squaredNorm());
    worst = std::max(worst, std::sqrt(best));
  }
  return worst;
}

Eigen::VectorXd stack(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd out(a.size() + b.size());
  out << a, b;
  return out;
}

// Closed polylines of dP and of its unit-normal lift for a bounded polygon.
void polygon_lift(const Polyhedron& p, double spacing, std::vector<Eigen::VectorXd>& points,
                  std::vector<Eigen::VectorXd>& lift) {
  std::vector<Eigen::VectorXd> verts;
  for (const auto& v : p.vertices()) verts.push_back(exact::to_eigen(v));
  Eigen::VectorXd c = Eigen::VectorXd::Zero(2);
  for (const auto& v : verts) c += v / static_cast<double>(verts.size());
  std::sort(verts.begin(), verts.end(), [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return std::atan2(a[1] - c[1], a[0] - c[0]) < std::atan2(b[1] - c[1], b[0] - c[0]);
  });
  const std::size_t m = verts.size();
  auto edge_normal = [&](std::size_t k) {
    const Eigen::VectorXd e = verts[(k + 1) % m] - verts[k];
    Eigen::VectorXd nrm(2);
    nrm << e[1], -e[0];
    return Eigen::VectorXd(nrm.normalized());
  };
  for (std::size_t k = 0; k < m; ++k) {
    // Arc of normals at vertex k, from the previous edge's normal to the next.
    const Eigen::VectorXd n0 = edge_normal((k + m - 1) % m), n1 = edge_normal(k);
    const double a0 = std::atan2(n0[1], n0[0]);
    double a1 = std::atan2(n1[1], n1[0]);
    while (a1 < a0) a1 += 2 * std::numbers::pi;
    const int arc_steps = std::max(2, static_cast<int>((a1 - a0) / spacing));
    for (int s = 0; s < arc_steps; ++s) {
      const double a = a0 + (a1 - a0) * s / arc_steps;
      Eigen::VectorXd nrm(2);
      nrm << std::cos(a), std::sin(a);
      lift.push_back(stack(verts[k], nrm));
    }
    const Eigen::VectorXd& a = verts[k];
    const Eigen::VectorXd& b = verts[(k + 1) % m];
    const int steps = std::max(2, static_cast<int>((b - a).norm() / spacing));
    for (int s = 0; s < steps; ++s) {
      const Eigen::VectorXd x = a + (b - a) * (static_cast<double>(s) / steps);
      points.push_back(x);
      lift.push_back(stack(x, n1));
    }
  }
}

}  // namespace

std::vector<BoundarySample> boundary_polyline(const NewtonData& data, const StarTriangulation& t, Model model,
                                               int initial, double max_turn, double max_gap) {
  if (data.dim != 2) fail(ErrorKind::UnsupportedDimension, "boundary polylines are drawn for n = 2 only");
  auto sample = [&](double angle) {
    Eigen::VectorXd d(2);
    d << std::cos(angle), std::sin(angle);
    BoundarySample s;
    s.angle = angle;
    s.u = boundary_solve(data, t, d, model);
    s.normal = eval_model(data, t, model, s.u, 1).grad.normalized();
    return s;
  };
  std::vector<BoundarySample> out;
  for (int k = 0; k < initial; ++k) out.push_back(sample(2 * std::numbers::pi * (k + 0.5) / initial));
  // Bisect in the angle until neighbours are close in position and normal.
  for (int pass = 0; pass < 40; ++pass) {
    std::vector<BoundarySample> refined;
    bool changed = false;
    for (std::size_t i = 0; i < out.size(); ++i) {
      const auto& a = out[i];
      const auto& b = out[(i + 1) % out.size()];
      refined.push_back(a);
      double gap_angle = b.angle - a.angle;
      if (gap_angle <= 0) gap_angle += 2 * std::numbers::pi;
      const double turn = std::acos(std::clamp(a.normal.dot(b.normal), -1.0, 1.0));
      if ((turn > max_turn || (a.u - b.u).norm() > max_gap) && gap_angle > 1e-12) {
        refined.push_back(sample(a.angle + 0.5 * gap_angle));
        changed = true;
      }
    }
    out = std::move(refined);
    if (!changed) break;
  }
  return out;
}

std::vector<ConvergenceRow> convergence_report(const NewtonData& data, const StarTriangulation& t,
                                               const Polyhedron& p, const std::vector<double>& betas,
                                               int directions, Model model) {
  if (data.dim != 2 && data.dim != 3) fail(ErrorKind::UnsupportedDimension, "convergence report needs n = 2 or 3");
  if (!p.bounded()) fail(ErrorKind::Unbounded, "convergence report needs a bounded P");
  std::vector<ConvergenceRow> rows;
  const auto dirs = sphere_directions(data.dim, directions);
  for (double beta : betas) {
    NewtonData d = data;
    d.beta = beta;
    std::vector<Eigen::VectorXd> pts, lift;
    if (data.dim == 2) {
      for (const auto& s : boundary_polyline(d, t, model, directions, 0.01, 2e-3)) {
        pts.push_back(s.u);
        lift.push_back(stack(s.u, s.normal));
      }
    } else {
      for (const auto& dir : dirs) {
        const Eigen::VectorXd b = boundary_solve(d, t, dir, model);
        const Eigen::VectorXd nrm = eval_model(d, t, model, b, 1).grad.normalized();
        pts.push_back(b);
        lift.push_back(stack(b, nrm));
      }
    }
    ConvergenceRow row{beta, 0.0, 0.0, static_cast<int>(pts.size())};
    if (data.dim == 2) {
      std::vector<Eigen::VectorXd> p_pts, p_lift;
      polygon_lift(p, 2e-3, p_pts, p_lift);
      row.point_distance = std::max(directed_to_polyline(pts, p_pts), directed_to_polyline(p_pts, pts));
      row.lift_distance = std::max(directed_to_polyline(lift, p_lift), directed_to_polyline(p_lift, lift));
    } else {
      // n = 3: exact distance one way, nearest sample the other way; the lift
      // of dP is sampled on facets and on the normal cones of edges and vertices.
      double forward = 0.0;
      for (const auto& b : pts) forward = std::max(forward, distance_to_boundary(p, b));
      std::vector<Eigen::VectorXd> p_pts, p_lift;
      for (const auto& dir : dirs) {
        const double s = *radial_hit(p, dir);
        p_pts.push_back(s * dir);
      }
      for (const auto& v : p.vertices()) p_pts.push_back(exact::to_eigen(v));
      for (const auto& x : p_pts) {
        for (const auto& c : p.inequalities()) {
          Eigen::VectorXd a = exact::to_eigen(c.normal);
          if (std::abs(a.dot(x) - to_double(c.bound)) < 1e-9) p_lift.push_back(stack(x, a.normalized()));
        }
      }
      for (const auto& face : p.faces()) {
        if (face.dim >= 2 || face.tight.size() < 2) continue;
        Eigen::VectorXd x = face.interior_point;
        std::vector<Eigen::VectorXd> normals;
        for (int c : face.tight) normals.push_back(exact::to_eigen(p.inequalities()[static_cast<std::size_t>(c)].normal).normalized());
        for (int s = 0; s < 200; ++s) {
          Eigen::VectorXd w = Eigen::VectorXd::Zero(3);
          double total = 0.0;
          for (std::size_t k = 0; k < normals.size(); ++k) {
            const double lam = std::fmod(0.618034 * (s + 1) * (k + 1), 1.0);
            w += lam * normals[k];
            total += lam;
          }
          if (total > 0) p_lift.push_back(stack(x, w.normalized()));
        }
      }
      row.point_distance = std::max(forward, directed_to_cloud(p_pts, pts));
      row.lift_distance = std::max(directed_to_cloud(lift, p_lift), directed_to_cloud(p_lift, lift));
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<Eigen::VectorXd> collar_samples(const Polyhedron& p, double beta, int directions, double window) {
  std::vector<Eigen::VectorXd> out;
  const double step = 0.1 / beta;
  for (const auto& d : sphere_directions(p.dim(), directions)) {
    auto hit = radial_hit(p, d);
    const double reach = hit ? *hit : window * 10;
    for (int k = 0; k < 10; ++k) out.push_back((reach * k / 10.0) * d);
    if (!hit) continue;
    for (double back = 0.0; back <= window && back < reach; back += step) out.push_back((reach - back) * d);
  }
  return out;
}

ClosenessBound localization_closeness(const NewtonData& data, const StarTriangulation& t, const Polyhedron& p,
                                      int directions) {
  ClosenessBound out;
  out.beta = data.beta;
  out.min_gap = kInf;
  const int origin = data.origin_index();
  const double sb = std::sqrt(data.beta);
  for (const auto& u : collar_samples(p, data.beta, directions, 4.0 / std::sqrt(data.beta))) {
    auto hat = eval_Fhat(data, t, u);
    auto til = eval_Ftilde(data, t, u);
    // Term by term, F^ - (F~ + 1) = sum e^{beta l_a} (chi(beta l_a + sqrt(beta)) - chi_a),
    // which avoids cancellation between two O(1) sums.
    double gap = 0.0;
    for (int a : t.adjacent(origin)) {
      const double la = data.linear_form(a, u);
      double product = 1.0;
      for (int nb : t.adjacent(a)) product *= chi(data.beta * (la - data.linear_form(nb, u)) + sb);
      gap += std::exp(data.beta * la) * (chi(data.beta * la + sb) - product);
    }
    out.sup_value = std::max(out.sup_value, std::abs(gap));
    out.min_gap = std::min(out.min_gap, gap);
    out.sup_gradient = std::max(out.sup_gradient, (hat.gradient - til.gradient).norm());
  }
  const double e = std::exp(-std::sqrt(data.beta));
  out.c_value = out.sup_value / e;
  out.c_gradient = out.sup_gradient / (data.beta * e);
  return out;
}

}  // namespace tropskel
