#include "tropskel/potential.hpp"

#include "tropskel/errors.hpp"
#include "tropskel/nnls.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace tropskel {

GaugePotential GaugePotential::gauge(std::vector<RationalVector> forms, int p, double epsilon) {
  if (forms.empty()) fail(ErrorKind::InvalidArgument, "gauge potential needs at least one form");
  if (p < 4 || p % 2 != 0) fail(ErrorKind::InvalidArgument, "smoothing exponent must be an even integer >= 4");
  if (!(epsilon > 0)) fail(ErrorKind::InvalidArgument, "epsilon must be positive");
  GaugePotential g;
  g.mode_ = Mode::Gauge;
  g.dim_ = static_cast<int>(forms.front().size());
  g.l_.resize(static_cast<Eigen::Index>(forms.size()), g.dim_);
  for (std::size_t i = 0; i < forms.size(); ++i) g.l_.row(static_cast<Eigen::Index>(i)) = exact::to_eigen(forms[i]);
  g.forms_ = std::move(forms);
  g.p_ = p;
  g.epsilon_ = epsilon;
  return g;
}

GaugePotential GaugePotential::quadratic(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) fail(ErrorKind::InvalidArgument, "matrix must be square");
  if ((m - m.transpose()).norm() > 1e-12 * m.norm()) fail(ErrorKind::InvalidArgument, "matrix must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) fail(ErrorKind::InvalidArgument, "matrix must be positive definite");
  GaugePotential g;
  g.mode_ = Mode::Quadratic;
  g.dim_ = static_cast<int>(m.rows());
  g.g_ = m;
  return g;
}

void GaugePotential::gauge_jet(const Eigen::VectorXd& x, double& n, Eigen::VectorXd* grad,
                               Eigen::MatrixXd* hess) const {
  // With M = max m_i and mu_i = m_i / M, N = M s^{1/p} where s = sum mu_i^p.
  // Scaling by M keeps the p-th powers in range.
  const Eigen::VectorXd m = (l_ * x).cwiseMax(0.0);
  const double mx = m.maxCoeff();
  if (grad) *grad = Eigen::VectorXd::Zero(dim_);
  if (hess) *hess = Eigen::MatrixXd::Zero(dim_, dim_);
  n = 0.0;
  if (!(mx > 0)) return;
  const double p = p_;
  double s = 0.0;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim_);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(dim_, dim_);
  for (Eigen::Index i = 0; i < l_.rows(); ++i) {
    if (m[i] <= 0) continue;
    const double mu = m[i] / mx;
    const double mu_p2 = std::pow(mu, p - 2);
    s += mu_p2 * mu * mu;
    v += mu_p2 * mu * l_.row(i).transpose();
    if (hess) w += mu_p2 * l_.row(i).transpose() * l_.row(i);
  }
  n = mx * std::pow(s, 1.0 / p);
  const double s_pow = std::pow(s, 1.0 / p - 1.0);
  if (grad) *grad = s_pow * v;
  if (hess) *hess = (p - 1.0) / mx * s_pow * (w - v * v.transpose() / s);
}

double GaugePotential::value(const Eigen::VectorXd& x) const {
  if (mode_ == Mode::Quadratic) return x.dot(g_ * x);
  double n = 0.0;
  gauge_jet(x, n, nullptr, nullptr);
  return n * n + epsilon_ * x.squaredNorm();
}

Eigen::VectorXd GaugePotential::gradient(const Eigen::VectorXd& x) const {
  if (mode_ == Mode::Quadratic) return 2.0 * g_ * x;
  double n = 0.0;
  Eigen::VectorXd dn;
  gauge_jet(x, n, &dn, nullptr);
  return 2.0 * n * dn + 2.0 * epsilon_ * x;
}

Eigen::MatrixXd GaugePotential::hessian(const Eigen::VectorXd& x) const {
  if (x.norm() == 0) fail(ErrorKind::EvalAtOriginOrder2, "the potential is not twice differentiable at 0");
  if (mode_ == Mode::Quadratic) return 2.0 * g_;
  double n = 0.0;
  Eigen::VectorXd dn;
  Eigen::MatrixXd d2n;
  gauge_jet(x, n, &dn, &d2n);
  return 2.0 * dn * dn.transpose() + 2.0 * n * d2n + 2.0 * epsilon_ * Eigen::MatrixXd::Identity(dim_, dim_);
}

double LegendreDual::value(const Eigen::VectorXd& p) const { return legendre_dual_eval(*phi_, p); }

Eigen::VectorXd LegendreDual::gradient(const Eigen::VectorXd& p) const { return legendre_inverse(*phi_, p); }

Eigen::MatrixXd LegendreDual::hessian(const Eigen::VectorXd& p) const {
  if (p.norm() == 0) fail(ErrorKind::EvalAtOriginOrder2, "the dual potential is not twice differentiable at 0");
  return phi_->hessian(legendre_inverse(*phi_, p)).inverse();
}

PhiJet phi_eval(const Potential& phi, const Eigen::VectorXd& x, DerivativeOrder order) {
  PhiJet jet;
  jet.value = phi.value(x);
  if (order >= DerivativeOrder::Gradient) jet.gradient = phi.gradient(x);
  if (order >= DerivativeOrder::Hessian) jet.hessian = phi.hessian(x);
  return jet;
}

Eigen::VectorXd legendre_forward(const Potential& phi, const Eigen::VectorXd& rho) { return phi.gradient(rho); }

Eigen::VectorXd legendre_inverse(const Potential& phi, const Eigen::VectorXd& p) {
  const double pn = p.norm();
  if (pn == 0) return Eigen::VectorXd::Zero(p.size());
  // Minimize phi(rho) - <p, rho>; start at the best multiple of p.
  Eigen::VectorXd rho = p * (pn * pn / (2.0 * phi.value(p)));
  auto objective = [&](const Eigen::VectorXd& r) { return phi.value(r) - p.dot(r); };
  for (int it = 0; it < 100; ++it) {
    const Eigen::VectorXd g = phi.gradient(rho) - p;
    if (g.norm() <= 1e-13 * pn) return rho;
    const Eigen::VectorXd step = phi.hessian(rho).ldlt().solve(-g);
    const double f0 = objective(rho);
    // Near the solution the objective decrease drowns in rounding, so a step
    // that shrinks the residual is accepted too.
    auto accept = [&](double t) {
      const Eigen::VectorXd r = rho + t * step;
      return objective(r) <= f0 + 1e-4 * t * g.dot(step) || (phi.gradient(r) - p).norm() < 0.5 * g.norm();
    };
    double t = 1.0;
    while (t > 1e-12 && !accept(t)) t *= 0.5;
    rho += t * step;
    if (t <= 1e-12) break;
  }
  if ((phi.gradient(rho) - p).norm() <= 1e-10 * pn) return rho;
  fail(ErrorKind::NoConvergence, "Legendre inverse did not converge");
}

double legendre_dual_eval(const Potential& phi, const Eigen::VectorXd& p) {
  const Eigen::VectorXd rho = legendre_inverse(phi, p);
  return rho.dot(p) - phi.value(rho);
}

Eigen::VectorXd projective_legendre(const Potential& phi, const Eigen::VectorXd& x) {
  if (x.norm() == 0) fail(ErrorKind::InvalidArgument, "projective Legendre map is undefined at 0");
  return phi.gradient(x).normalized();
}

int projective_winding_number(const Potential& phi, int samples) {
  if (phi.dim() != 2) fail(ErrorKind::UnsupportedDimension, "winding number needs n = 2");
  double total = 0.0;
  double prev = 0.0;
  for (int k = 0; k <= samples; ++k) {
    const double a = 2 * std::numbers::pi * k / samples;
    Eigen::VectorXd x(2);
    x << std::cos(a), std::sin(a);
    const Eigen::VectorXd y = projective_legendre(phi, x);
    const double angle = std::atan2(y[1], y[0]);
    if (k > 0) total += std::remainder(angle - prev, 2 * std::numbers::pi);
    prev = angle;
  }
  return static_cast<int>(std::lround(total / (2 * std::numbers::pi)));
}

double gradient_ray_residual(const Potential& phi, const Eigen::VectorXd& rho) {
  const Eigen::VectorXd v = phi.hessian(rho).ldlt().solve(phi.gradient(rho));
  const Eigen::VectorXd dir = rho.normalized();
  return (v - v.dot(dir) * dir).norm() / v.norm();
}

NormalConeTest normal_cone_membership(const Eigen::VectorXd& v, const std::vector<Eigen::VectorXd>& normals) {
  NormalConeTest out;
  const double vn = v.norm();
  if (normals.empty()) {
    out.in_relative_interior = vn < 1e-12;
    out.residual = vn;
    return out;
  }
  if (vn == 0) return out;
  Eigen::MatrixXd a(v.size(), static_cast<Eigen::Index>(normals.size()));
  for (std::size_t i = 0; i < normals.size(); ++i) a.col(static_cast<Eigen::Index>(i)) = normals[i].normalized();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (lu.rank() == a.cols()) {
    const Eigen::VectorXd lambda = a.colPivHouseholderQr().solve(v);
    out.residual = (a * lambda - v).norm() / vn;
    out.margin = lambda.minCoeff() / vn;
    out.in_relative_interior = out.residual < 1e-7 && out.margin > 1e-9;
    return out;
  }
  // Dependent normals: v is in the relative interior iff v - t sum(a_i) is
  // still in the cone for some small t > 0.
  const double t = 1e-6 * vn;
  const Eigen::VectorXd w = v - t * a.rowwise().sum();
  const Eigen::VectorXd lambda = nnls(a, w);
  out.residual = (a * lambda - w).norm() / vn;
  out.in_relative_interior = out.residual < 1e-9;
  out.margin = out.in_relative_interior ? t / vn : -out.residual;
  return out;
}

std::string face_label(const Polyhedron& p, int face) {
  const auto& f = p.faces().at(static_cast<std::size_t>(face));
  auto fmt = [](const RationalVector& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + to_string(v[i]);
    return s + ")";
  };
  std::string s;
  if (f.vertices.size() == 1 && f.rays.empty()) return fmt(p.vertices()[static_cast<std::size_t>(f.vertices[0])]);
  s = "conv{";
  for (std::size_t i = 0; i < f.vertices.size(); ++i) {
    s += (i ? "," : "") + fmt(p.vertices()[static_cast<std::size_t>(f.vertices[i])]);
  }
  s += "}";
  if (!f.rays.empty()) {
    s += "+cone{";
    for (std::size_t i = 0; i < f.rays.size(); ++i) s += (i ? "," : "") + fmt(p.rays()[static_cast<std::size_t>(f.rays[i])]);
    s += "}";
  }
  return s;
}

namespace {

// Newton minimization of phi over the affine hull of a face.
Eigen::VectorXd affine_minimize(const Potential& phi, const Polyhedron& p, int face) {
  const auto& f = p.faces()[static_cast<std::size_t>(face)];
  const Eigen::MatrixXd d = p.face_directions(face);
  const Eigen::VectorXd x0 = f.interior_point;
  if (d.cols() == 0) return x0;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(d.cols());
  auto at = [&](const Eigen::VectorXd& yy) { return Eigen::VectorXd(x0 + d * yy); };
  for (int it = 0; it < 100; ++it) {
    const Eigen::VectorXd x = at(y);
    const Eigen::VectorXd full = phi.gradient(x);
    const Eigen::VectorXd g = d.transpose() * full;
    if (g.norm() <= 1e-12 * std::max(1.0, full.norm())) break;
    const Eigen::MatrixXd h = d.transpose() * phi.hessian(x) * d;
    const Eigen::VectorXd step = h.ldlt().solve(-g);
    const double f0 = phi.value(x);
    double t = 1.0;
    while (t > 1e-14 && phi.value(at(y + t * step)) > f0 + 1e-4 * t * g.dot(step)) t *= 0.5;
    y += t * step;
    if (t <= 1e-14) break;
  }
  return at(y);
}

// Minimizer over the face itself: the affine minimizer if it lies in the
// face, else the best minimizer over its facets (phi is convex).
Eigen::VectorXd face_minimize(const Potential& phi, const Polyhedron& p, int face) {
  const auto& f = p.faces()[static_cast<std::size_t>(face)];
  if (f.dim == 0) return exact::to_eigen(p.vertices()[static_cast<std::size_t>(f.vertices[0])]);
  const Eigen::VectorXd x = affine_minimize(phi, p, face);
  if (p.relative_margin(face, x) >= -1e-12) return x;
  Eigen::VectorXd best;
  double best_value = std::numeric_limits<double>::infinity();
  for (int sub : f.facets) {
    const Eigen::VectorXd y = face_minimize(phi, p, sub);
    const double v = phi.value(y);
    if (v < best_value) {
      best_value = v;
      best = y;
    }
  }
  return best;
}

}  // namespace

const AdaptednessRow* AdaptednessReport::first_failure() const {
  for (const auto& r : rows) {
    if (!r.informational && !r.pass) return &r;
  }
  return nullptr;
}

AdaptednessReport check_adapted(const Potential& phi, const Polyhedron& p) {
  if (phi.dim() != p.dim()) fail(ErrorKind::InvalidArgument, "potential and polyhedron dimensions differ");
  AdaptednessReport report;
  const auto& faces = p.faces();
  for (std::size_t fi = 0; fi < faces.size(); ++fi) {
    const auto& f = faces[fi];
    if (f.dim >= p.dim()) continue;
    AdaptednessRow row;
    row.face = static_cast<int>(fi);
    row.dim = f.dim;
    row.label = face_label(p, row.face);
    row.informational = f.dim == 0;
    if (f.dim == 0) {
      row.affine_minimizer = row.minimizer = exact::to_eigen(p.vertices()[static_cast<std::size_t>(f.vertices[0])]);
      row.minimizer_vertex = f.vertices[0];
      row.margin = 0.0;
    } else {
      row.affine_minimizer = affine_minimize(phi, p, row.face);
      row.margin = p.relative_margin(row.face, row.affine_minimizer);
      row.minimizer = row.margin >= 0 ? row.affine_minimizer : face_minimize(phi, p, row.face);
      for (std::size_t v = 0; v < p.vertices().size(); ++v) {
        if ((exact::to_eigen(p.vertices()[v]) - row.minimizer).norm() < 1e-8) row.minimizer_vertex = static_cast<int>(v);
      }
    }
    std::vector<Eigen::VectorXd> normals;
    for (int c : f.tight) normals.push_back(exact::to_eigen(p.inequalities()[static_cast<std::size_t>(c)].normal));
    row.normal_cone = normal_cone_membership(phi.gradient(row.minimizer), normals);
    row.pass = row.margin > 1e-9 && row.normal_cone.in_relative_interior;
    report.rows.push_back(std::move(row));
  }
  report.pass = report.first_failure() == nullptr;
  return report;
}

AdaptednessReport dual_adaptedness_check(std::shared_ptr<const Potential> phi, const Polyhedron& p) {
  Polyhedron dual = p.polar();
  LegendreDual psi(std::move(phi));
  return check_adapted(psi, dual);
}

AdaptedConstruction build_adapted_potential(const Polyhedron& p, double delta, int smoothing_p, double epsilon) {
  const int n = p.dim();
  if (n > 3) fail(ErrorKind::Unsupported, "adapted potentials are built for n <= 3");
  if (!p.strictly_contains_origin()) fail(ErrorKind::OriginNotInterior, "0 must be interior to P");
  if (!(delta > 0)) fail(ErrorKind::InvalidArgument, "delta must be positive");
  AdaptedConstruction out;
  Rational radius = 0;
  for (const auto& f : p.faces()) {
    if (f.dim >= n) continue;
    // x_F: barycenter of the face's vertices plus the sum of its rays.
    RationalVector x(static_cast<std::size_t>(n), Rational(0));
    for (int v : f.vertices) {
      for (int k = 0; k < n; ++k) x[static_cast<std::size_t>(k)] += p.vertices()[static_cast<std::size_t>(v)][static_cast<std::size_t>(k)];
    }
    for (auto& c : x) c /= static_cast<int>(f.vertices.size());
    for (int r : f.rays) {
      for (int k = 0; k < n; ++k) x[static_cast<std::size_t>(k)] += p.rays()[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
    }
    const Rational c = 1 + rational_from_double(delta) * (n - 1 - f.dim);
    for (auto& e : x) {
      e /= c;
      radius = std::max(radius, Rational(e < 0 ? Rational(-e) : e));
    }
    out.body_points.push_back(std::move(x));
  }
  // Unbounded P: close Omega with far points along the recession rays.
  const Rational far = 2 * (radius + 1);
  for (const auto& r : p.rays()) out.body_points.push_back(exact::scale(r, far));
  Polyhedron omega = Polyhedron::convex_hull(n, out.body_points);
  std::vector<RationalVector> forms;
  for (const auto& c : omega.inequalities()) {
    if (c.bound <= 0) fail(ErrorKind::OriginNotInterior, "0 is not interior to the candidate body");
    forms.push_back(exact::scale(c.normal, 1 / c.bound));
  }
  out.potential = std::make_shared<GaugePotential>(GaugePotential::gauge(std::move(forms), smoothing_p, epsilon));
  out.report = check_adapted(*out.potential, p);
  if (!out.report.pass) {
    const auto* bad = out.report.first_failure();
    fail(ErrorKind::NotAdapted, "constructed potential fails on face " + bad->label +
                                    " (margin " + std::to_string(bad->margin) + ")");
  }
  return out;
}

}  // namespace tropskel
