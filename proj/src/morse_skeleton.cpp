#include "tropskel/morse_skeleton.hpp"

#include "tropskel/errors.hpp"
#include "tropskel/parallel.hpp"
#include "tropskel/tropical_dual.hpp"

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>

namespace tropskel {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

double wrap(double x) { return std::remainder(x, kTwoPi); }

Eigen::VectorXd point(const NewtonData& data, int i) {
  return data.points[static_cast<std::size_t>(i)].to_eigen();
}

// Orthonormal basis of the tangent space {v : grad . v = 0}.
Eigen::MatrixXd tangent_basis(const Eigen::VectorXd& grad) {
  const Eigen::Index n = grad.size();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr{Eigen::MatrixXd(grad)};
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  return q.rightCols(n - 1);
}

struct Projected {
  Eigen::MatrixXd basis;    // tangent basis, n x (n-1)
  Eigen::MatrixXd hessian;  // basis^T (H_phi - c H_G) basis
};

Projected projected_hessian(const NewtonData& data, const StarTriangulation& t, const Potential& phi, Model model,
                            const Eigen::VectorXd& u, double c) {
  const auto jet = eval_model(data, t, model, u, 2);
  Projected out;
  out.basis = tangent_basis(jet.grad);
  out.hessian = out.basis.transpose() * (phi.hessian(u) - c * jet.hess) * out.basis;
  return out;
}

struct LagrangeResult {
  Eigen::VectorXd u;
  double c = 0.0;
};

// Damped Newton on the Lagrange system of phi on {G = 0}.
std::optional<LagrangeResult> lagrange_newton(const NewtonData& data, const StarTriangulation& t,
                                              const Potential& phi, Model model, Eigen::VectorXd u) {
  const int n = data.dim;
  auto jet = eval_model(data, t, model, u, 2);
  double c = phi.gradient(u).dot(jet.grad) / jet.grad.squaredNorm();
  auto merit = [&](const Eigen::VectorXd& uu, double cc, const ModelJet& j) {
    const Eigen::VectorXd g = phi.gradient(uu);
    return (g - cc * j.grad).norm() / g.norm() + std::abs(j.value);
  };
  const double max_step = 5.0 / data.beta;
  for (int it = 0; it < 100; ++it) {
    const Eigen::VectorXd g = phi.gradient(u);
    const Eigen::VectorXd r1 = g - c * jet.grad;
    if (r1.norm() <= 1e-11 * g.norm() && std::abs(jet.value) <= 1e-12) return LagrangeResult{u, c};
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n + 1, n + 1);
    jac.topLeftCorner(n, n) = phi.hessian(u) - c * jet.hess;
    jac.topRightCorner(n, 1) = -jet.grad;
    jac.bottomLeftCorner(1, n) = jet.grad.transpose();
    Eigen::VectorXd rhs(n + 1);
    rhs << -r1, -jet.value;
    const Eigen::VectorXd delta = jac.fullPivLu().solve(rhs);
    if (!delta.allFinite()) return std::nullopt;
    double step = 1.0;
    const double du = delta.head(n).norm();
    if (du > max_step) step = max_step / du;
    const double m0 = merit(u, c, jet);
    while (true) {
      const Eigen::VectorXd un = u + step * delta.head(n);
      const double cn = c + step * delta[n];
      auto jn = eval_model(data, t, model, un, 2);
      if (merit(un, cn, jn) < (1 - 1e-4 * step) * m0 || step < 1e-8) {
        u = un;
        c = cn;
        jet = std::move(jn);
        break;
      }
      step *= 0.5;
    }
    if (step < 1e-8) break;
  }
  const Eigen::VectorXd g = phi.gradient(u);
  if ((g - c * jet.grad).norm() <= 1e-9 * g.norm() && std::abs(jet.value) <= 1e-10) return LagrangeResult{u, c};
  return std::nullopt;
}

int negative_count(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  return static_cast<int>((es.eigenvalues().array() < 0).count());
}

// Newton along the gradient back onto {G = 0}.
Eigen::VectorXd project_to_level(const NewtonData& data, const StarTriangulation& t, Model model,
                                 Eigen::VectorXd u) {
  for (int it = 0; it < 8; ++it) {
    const auto jet = eval_model(data, t, model, u, 1);
    if (std::abs(jet.value) < 1e-14) break;
    u -= jet.value / jet.grad.squaredNorm() * jet.grad;
  }
  return u;
}

}  // namespace

Simplex strip_origin(const NewtonData& data, const Simplex& s) {
  std::vector<int> v;
  for (int a : s.vertices) {
    if (a != data.origin_index()) v.push_back(a);
  }
  return Simplex(v);
}

std::vector<CriticalDatum> find_critical_points(const NewtonData& data, const StarTriangulation& t,
                                                const Potential& phi, Model model) {
  const auto cp = complement_polytope(data, t);
  const auto report = check_adapted(phi, cp.polytope);
  std::map<int, Eigen::VectorXd> minimizer;
  for (const auto& row : report.rows) minimizer[row.face] = row.minimizer;

  const auto& boundary = t.boundary();
  std::vector<CriticalDatum> out(boundary.size());
  parallel_for(boundary.size(), [&](std::size_t i) {
    CriticalDatum& d = out[i];
    d.simplex = strip_origin(data, boundary[i]);
    d.face = cp.face(boundary[i]);
    d.pl_limit = minimizer.at(d.face);
    d.model = model;
    const Eigen::VectorXd seed = boundary_solve(data, t, d.pl_limit, Model::Fhat);
    auto res = lagrange_newton(data, t, phi, Model::Fhat, seed);
    if (res && model == Model::Ftilde) res = lagrange_newton(data, t, phi, Model::Ftilde, res->u);
    if (!res) fail(ErrorKind::SeedFailed, "Newton failed from the seed of " + d.simplex.to_string(data));
    if (!(res->c > 0)) {
      fail(ErrorKind::SeedFailed, "nonpositive multiplier at the critical point of " + d.simplex.to_string(data));
    }
    d.location = res->u;
    d.multiplier = res->c;
    d.value = phi.value(res->u);
    d.morse_index = negative_count(projected_hessian(data, t, phi, model, res->u, res->c).hessian);
    if (d.morse_index != d.simplex.dim()) {
      fail(ErrorKind::IndexMismatch, "index " + std::to_string(d.morse_index) + " at the critical point of " +
                                         d.simplex.to_string(data));
    }
  });
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = i + 1; j < out.size(); ++j) {
      if ((out[i].location - out[j].location).norm() < 1e-6) {
        fail(ErrorKind::CountMismatch, "seeds of " + out[i].simplex.to_string(data) + " and " +
                                           out[j].simplex.to_string(data) + " reach the same critical point");
      }
    }
  }
  return out;
}

SubtorusDescription::SubtorusDescription(IntMatrix rows, std::vector<double> phases, int dim)
    : rows_(std::move(rows)), phases_(std::move(phases)), dim_(dim) {
  if (rows_.size() != phases_.size()) fail(ErrorKind::InvalidArgument, "one phase per row is required");
  for (const auto& r : rows_) {
    if (static_cast<int>(r.size()) != dim_) fail(ErrorKind::InvalidArgument, "row length differs from dimension");
  }
  const std::size_t k = rows_.size();
  if (static_cast<int>(k) > dim_) fail(ErrorKind::InvalidArgument, "more congruences than variables");
  if (k > 0) snf_ = smith_normal_form(rows_);
  else snf_.w = snf_.w_inv = identity_matrix(dim_);
  for (auto d : snf_.diag) {
    if (d == 0) fail(ErrorKind::InvalidArgument, "congruence rows are linearly dependent");
  }
  // U A W = D, so with theta = W phi the system reads d_i phi_i = (U Theta)_i.
  u_theta_.assign(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) u_theta_[i] += static_cast<double>(snf_.u[i][j]) * phases_[j];
  }
  for (int j = static_cast<int>(k); j < dim_; ++j) {
    std::vector<std::int64_t> col;
    for (int i = 0; i < dim_; ++i) col.push_back(snf_.w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    basis_.push_back(col);
  }
  const int count = components();
  for (int index = 0; index < count; ++index) {
    Eigen::VectorXd ph = Eigen::VectorXd::Zero(dim_);
    int rest = index;
    for (std::size_t i = 0; i < k; ++i) {
      const auto d = snf_.diag[i];
      const int m = rest % static_cast<int>(d);
      rest /= static_cast<int>(d);
      ph[static_cast<Eigen::Index>(i)] = (u_theta_[i] + kTwoPi * m) / static_cast<double>(d);
    }
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(dim_);
    for (int i = 0; i < dim_; ++i) {
      for (int j = 0; j < dim_; ++j) {
        theta[i] += static_cast<double>(snf_.w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) * ph[j];
      }
      theta[i] = wrap(theta[i]);
    }
    reps_.push_back(theta);
  }
}

int SubtorusDescription::components() const {
  std::int64_t c = 1;
  for (auto d : snf_.diag) c *= d;
  return static_cast<int>(c);
}

double SubtorusDescription::residual(const Eigen::VectorXd& theta) const {
  double worst = 0.0;
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    double s = -phases_[r];
    for (int j = 0; j < dim_; ++j) s += static_cast<double>(rows_[r][static_cast<std::size_t>(j)]) * theta[j];
    worst = std::max(worst, std::abs(wrap(s)));
  }
  return worst;
}

int SubtorusDescription::component_of(const Eigen::VectorXd& theta) const {
  int index = 0;
  int radix = 1;
  for (std::size_t i = 0; i < snf_.diag.size(); ++i) {
    double ph = 0.0;
    for (int j = 0; j < dim_; ++j) ph += static_cast<double>(snf_.w_inv[i][static_cast<std::size_t>(j)]) * theta[j];
    const auto d = snf_.diag[i];
    const long m = std::lround((static_cast<double>(d) * ph - u_theta_[i]) / kTwoPi);
    const int mm = static_cast<int>(((m % d) + d) % d);
    index += mm * radix;
    radix *= static_cast<int>(d);
  }
  return index;
}

SubtorusDescription critical_torus(const NewtonData& data, const Simplex& tau) {
  IntMatrix rows;
  std::vector<double> phases;
  for (int a : tau.vertices) {
    if (a == data.origin_index()) continue;
    rows.push_back(data.points[static_cast<std::size_t>(a)].coords());
    phases.push_back(data.phases[static_cast<std::size_t>(a)]);
  }
  return SubtorusDescription(std::move(rows), std::move(phases), data.dim);
}

TorusNondegeneracy normal_nondegeneracy(const NewtonData& data, const StarTriangulation& t, const Potential& phi,
                                        const CriticalDatum& crit, double step) {
  const int n = data.dim;
  const SurfaceKind kind{1.0, true};
  const auto torus = critical_torus(data, crit.simplex);
  LogPoint z0 = LogPoint::from_u(crit.location, torus.representatives().front(), data.beta);
  auto jet = surface_jet(data, t, kind, z0);
  int chart = 0;
  for (int j = 1; j < n; ++j) {
    if (std::abs(jet.d_rho[j]) > std::abs(jet.d_rho[chart])) chart = j;
  }
  TorusNondegeneracy out;
  out.torus_dim = torus.dimension();
  out.surface_residual = std::abs(jet.f) / jet.magnitude;

  // Real tangent space of {f = 0} in (rho, theta).
  Eigen::MatrixXd jac(2, 2 * n);
  jac << jet.d_rho.real().transpose(), jet.d_theta.real().transpose(), jet.d_rho.imag().transpose(),
      jet.d_theta.imag().transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeFullV);
  const Eigen::MatrixXd tangent = svd.matrixV().rightCols(2 * n - 2);
  Eigen::MatrixXd along(2 * n, out.torus_dim);
  for (int k = 0; k < out.torus_dim; ++k) {
    along.col(k).setZero();
    for (int i = 0; i < n; ++i) along(n + i, k) = static_cast<double>(torus.basis()[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]);
  }
  // Transverse directions: the tangent space minus the torus span.
  Eigen::MatrixXd transverse = tangent;
  if (out.torus_dim > 0) {
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(tangent * (tangent.transpose() * along))
                                  .householderQ() * Eigen::MatrixXd::Identity(2 * n, out.torus_dim);
    const Eigen::MatrixXd rest = tangent - q * (q.transpose() * tangent);
    Eigen::JacobiSVD<Eigen::MatrixXd> rs(rest, Eigen::ComputeThinU);
    transverse = rs.matrixU().leftCols(2 * n - 2 - out.torus_dim);
  }
  out.transverse_dim = static_cast<int>(transverse.cols());

  const double phi0 = phi.value(z0.u());
  auto value_at = [&](const Eigen::VectorXd& v) {
    LogPoint z = z0;
    z.rho += v.head(n);
    z.theta += v.tail(n);
    const auto on = solve_on_surface(data, t, kind, z, chart);
    if (!on) fail(ErrorKind::NoConvergence, "projection onto the hypersurface failed near " + crit.simplex.to_string(data));
    return phi.value(on->u());
  };
  auto second = [&](const Eigen::VectorXd& v) {
    return (value_at(step * v) - 2 * phi0 + value_at(-step * v)) / (step * step);
  };
  const int m = out.transverse_dim;
  Eigen::MatrixXd q(m, m);
  for (int i = 0; i < m; ++i) q(i, i) = second(transverse.col(i));
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      q(i, j) = q(j, i) =
          0.25 * (second(transverse.col(i) + transverse.col(j)) - second(transverse.col(i) - transverse.col(j)));
    }
  }
  const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(q).eigenvalues();
  const double largest = eig.cwiseAbs().maxCoeff();
  out.negative = static_cast<int>((eig.array() < 0).count());
  out.min_relative = largest > 0 ? eig.cwiseAbs().minCoeff() / largest : 0.0;
  for (int k = 0; k < out.torus_dim; ++k) {
    out.along_torus = std::max(out.along_torus, std::abs(second(along.col(k).normalized())) / largest);
  }
  out.nondegenerate = out.min_relative > 1e-6;
  return out;
}

namespace {

// One g_phi-gradient line of phi on {G = 0} started next to crits[origin].
// Forward time descends to lower-index points; backward time climbs to higher ones.
FlowTrajectory integrate_flow(const NewtonData& data, const StarTriangulation& t, const Potential& phi,
                              const std::vector<CriticalDatum>& crits, int origin, Model model,
                              const FlowOptions& options, const Eigen::VectorXd& direction, bool backward) {
  const CriticalDatum& crit = crits[static_cast<std::size_t>(origin)];
  const int n = data.dim;
  const double sign = backward ? 1.0 : -1.0;
  using State = std::vector<double>;
  auto rhs = [&](const State& x, State& dxdt, double) {
    const Eigen::Map<const Eigen::VectorXd> u(x.data(), n);
    const auto jet = eval_model(data, t, model, u, 1);
    const Eigen::VectorXd v = phi.hessian(u).ldlt().solve(jet.grad);
    const double c1 = jet.grad.dot(u) / jet.grad.dot(v);
    Eigen::Map<Eigen::VectorXd>(dxdt.data(), n) = sign * (u - c1 * v);
  };
  auto target = [&](const CriticalDatum& c) {
    return backward ? c.morse_index > crit.morse_index : c.morse_index < crit.morse_index;
  };
  namespace odeint = boost::numeric::odeint;
  const double max_move = 0.2 / data.beta;

  FlowTrajectory tr;
  tr.origin = origin;
  auto stepper = odeint::make_controlled(1e-10, 1e-8, odeint::runge_kutta_dopri5<State>());
  Eigen::VectorXd u =
      project_to_level(data, t, model, crit.location + options.seed_scale / data.beta * direction.normalized());
  double time = 0.0;
  double dt = 1e-3 / data.beta;
  tr.times.push_back(time);
  tr.samples.push_back(u);
  int rejected = 0;
  while (time < options.t_max && rejected < 10000) {
    State x(u.data(), u.data() + n);
    double tt = time, dtt = dt;
    if (stepper.try_step(rhs, x, tt, dtt) == odeint::fail) {
      dt = dtt;
      ++rejected;
      continue;
    }
    const Eigen::VectorXd next = project_to_level(data, t, model, Eigen::Map<Eigen::VectorXd>(x.data(), n));
    // Keep samples dense enough to resolve the O(1/beta) corners.
    if ((next - u).norm() > max_move) {
      dt = 0.5 * (tt - time);
      ++rejected;
      continue;
    }
    u = next;
    time = tt;
    dt = std::min(dtt, 1.0);
    tr.times.push_back(backward ? -time : time);
    tr.samples.push_back(u);
    if (!u.allFinite() || u.norm() > 1e3) break;
    for (std::size_t j = 0; j < crits.size(); ++j) {
      if (!target(crits[j])) continue;
      const double dist = (u - crits[j].location).norm();
      const int jj = static_cast<int>(j);
      if (dist < options.near && std::find(tr.visited.begin(), tr.visited.end(), jj) == tr.visited.end()) {
        tr.visited.push_back(jj);
      }
      if (dist < options.dist_stop) tr.limit = jj;
    }
    if (tr.limit >= 0) break;
  }
  tr.divergent = tr.limit < 0;
  return tr;
}

// Eigenvectors of the projected Hessian, negative eigenvalues first.
Eigen::MatrixXd eigen_directions(const NewtonData& data, const StarTriangulation& t, const Potential& phi,
                                 Model model, const CriticalDatum& crit) {
  const auto proj = projected_hessian(data, t, phi, model, crit.location, crit.multiplier);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(proj.hessian);
  return proj.basis * es.eigenvectors();
}

std::vector<FlowTrajectory> fan_out(const NewtonData& data, const StarTriangulation& t, const Potential& phi,
                                    const std::vector<CriticalDatum>& crits, int origin, Model model,
                                    const FlowOptions& options, const Eigen::MatrixXd& span, bool backward) {
  std::vector<Eigen::VectorXd> seeds;
  if (span.cols() == 1) {
    seeds = {span.col(0), -span.col(0)};
  } else {
    for (const auto& d : sphere_directions(static_cast<int>(span.cols()), options.directions)) seeds.push_back(span * d);
  }
  std::vector<FlowTrajectory> out(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t s) {
    out[s] = integrate_flow(data, t, phi, crits, origin, model, options, seeds[s], backward);
  });
  return out;
}

}  // namespace

std::vector<FlowTrajectory> flow_unstable(const NewtonData& data, const StarTriangulation& t, const Potential& phi,
                                          const std::vector<CriticalDatum>& crits, int origin, Model model,
                                          const FlowOptions& options) {
  const CriticalDatum& crit = crits.at(static_cast<std::size_t>(origin));
  if (crit.morse_index == 0) {
    FlowTrajectory point;
    point.origin = point.limit = origin;
    point.times = {0.0};
    point.samples = {crit.location};
    return {point};
  }
  const Eigen::MatrixXd dirs = eigen_directions(data, t, phi, model, crit);
  return fan_out(data, t, phi, crits, origin, model, options, dirs.leftCols(crit.morse_index), false);
}

std::vector<FlowTrajectory> flow_stable(const NewtonData& data, const StarTriangulation& t, const Potential& phi,
                                        const std::vector<CriticalDatum>& crits, int origin, Model model,
                                        const FlowOptions& options) {
  const CriticalDatum& crit = crits.at(static_cast<std::size_t>(origin));
  const int stable = data.dim - 1 - crit.morse_index;
  if (crit.morse_index == 0 || stable == 0) return {};
  const Eigen::MatrixXd dirs = eigen_directions(data, t, phi, model, crit);
  return fan_out(data, t, phi, crits, origin, model, options, dirs.rightCols(stable), true);
}

ConeReport cone_correspondence_check(const NewtonData& data, const Potential& phi, const CriticalDatum& crit,
                                     const std::vector<FlowTrajectory>& flows, double eps_cover,
                                     const std::vector<FlowTrajectory>& closure) {
  const int k = static_cast<int>(crit.simplex.vertices.size());
  Eigen::MatrixXd a(data.dim, k);
  for (int i = 0; i < k; ++i) a.col(i) = point(data, crit.simplex.vertices[static_cast<std::size_t>(i)]);
  const auto qr = a.colPivHouseholderQr();
  ConeReport rep;
  rep.min_margin = 1.0;
  std::vector<Eigen::VectorXd> bary;
  auto image = [&](const Eigen::VectorXd& u, bool interior) {
    const Eigen::VectorXd y = projective_legendre(phi, u);
    const Eigen::VectorXd lambda = qr.solve(y);
    rep.max_residual = std::max(rep.max_residual, (a * lambda - y).norm());
    const double total = lambda.sum();
    const Eigen::VectorXd b = total > 0 ? Eigen::VectorXd(lambda / total) : lambda;
    if (interior) rep.min_margin = std::min(rep.min_margin, total > 0 ? b.minCoeff() : -1.0);
    bary.push_back(b);
  };
  for (const auto& tr : flows) {
    for (const auto& u : tr.samples) image(u, true);
  }
  for (const auto& tr : closure) {
    for (const auto& u : tr.samples) image(u, false);
  }
  // Coverage: every point of a barycentric grid on the simplex has an image nearby.
  if (k >= 2) {
    const int m = static_cast<int>(std::ceil(1.0 / eps_cover));
    std::vector<int> idx(static_cast<std::size_t>(k - 1), 0);
    std::function<void(int, int)> visit = [&](int pos, int left) {
      if (pos == k - 1) {
        Eigen::VectorXd g(k);
        for (int i = 0; i < k - 1; ++i) g[i] = static_cast<double>(idx[static_cast<std::size_t>(i)]) / m;
        g[k - 1] = static_cast<double>(left) / m;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& b : bary) best = std::min(best, (b - g).norm());
        rep.coverage_gap = std::max(rep.coverage_gap, best);
        return;
      }
      for (int v = 0; v <= left; ++v) {
        idx[static_cast<std::size_t>(pos)] = v;
        visit(pos + 1, left - v);
      }
    };
    visit(0, m);
  }
  rep.pass = rep.min_margin > -1e-9 && rep.max_residual < 1e-6 && rep.coverage_gap <= eps_cover;
  return rep;
}

LiouvilleSample liouville_field(const NewtonData& data, const StarTriangulation& t, const Potential& phi,
                                const LogPoint& z) {
  const int n = data.dim;
  const Eigen::VectorXd u = z.u();
  const auto jet = surface_jet(data, t, SurfaceKind{1.0, true}, z);
  if (std::abs(jet.f) > 1e-8 * jet.magnitude) {
    fail(ErrorKind::NotOnPositiveLocus, "point is not on the localized hypersurface");
  }
  for (int a = 0; a < data.size(); ++a) {
    if (a == data.origin_index() || monomial_cutoff(data, t, a, u) == 0.0) continue;
    const double s = point(data, a).dot(z.theta) - data.phases[static_cast<std::size_t>(a)];
    if (std::abs(wrap(s)) > 1e-8) fail(ErrorKind::NotOnPositiveLocus, "phase of an active term is off the locus");
  }
  const Eigen::LDLT<Eigen::MatrixXd> h(phi.hessian(u));
  // Hamiltonian field of a function with differential (d_rho, d_theta).
  auto hamiltonian = [&](const Eigen::VectorXd& d_rho, const Eigen::VectorXd& d_theta) {
    Eigen::VectorXd x(2 * n);
    x.head(n) = h.solve(d_theta);
    x.tail(n) = -h.solve(d_rho);
    return x;
  };
  Eigen::VectorXd d_re(2 * n), d_im(2 * n);
  d_re << jet.d_rho.real(), jet.d_theta.real();
  d_im << jet.d_rho.imag(), jet.d_theta.imag();
  const Eigen::VectorXd x_re = hamiltonian(jet.d_rho.real(), jet.d_theta.real());
  const Eigen::VectorXd x_im = hamiltonian(jet.d_rho.imag(), jet.d_theta.imag());
  Eigen::VectorXd x_lambda = Eigen::VectorXd::Zero(2 * n);
  x_lambda.head(n) = z.rho;

  LiouvilleSample out;
  out.x_imf = x_im;
  out.pairing = d_re.dot(x_im);
  const double b = d_re.dot(x_lambda) / out.pairing;
  const double a = -d_im.dot(x_lambda) / out.pairing;
  const Eigen::VectorXd parallel = x_lambda - a * x_re - b * x_im;
  out.c1 = b;
  out.theta_component = parallel.tail(n).norm();
  return out;
}

std::vector<LogPoint> positive_locus_samples(const NewtonData& data, const StarTriangulation& t, int directions) {
  std::vector<LogPoint> out;
  int round_robin = 0;
  for (const auto& d : sphere_directions(data.dim, directions)) {
    Eigen::VectorXd u;
    try {
      u = boundary_solve(data, t, d, Model::Ftilde);
    } catch (const Error&) {
      continue;  // recession directions of P
    }
    RegionLabel label;
    try {
      label = classify_region(data, t, u);
    } catch (const Error&) {
      continue;
    }
    if (!label.good()) continue;
    const Simplex tau = strip_origin(data, label.tau);
    if (tau.vertices.empty()) continue;
    const auto torus = critical_torus(data, tau);
    const auto& reps = torus.representatives();
    const Eigen::VectorXd theta = reps[static_cast<std::size_t>(round_robin++) % reps.size()];
    out.push_back(LogPoint::from_u(u, theta, data.beta));
  }
  return out;
}

ExtraneousScan scan_extraneous_critical(const NewtonData& data, const StarTriangulation& t, const Potential& phi,
                                        const ScanGrid& grid) {
  if (data.dim != 2) fail(ErrorKind::UnsupportedDimension, "the extraneous scan is implemented for n = 2");
  const int m = grid.size;
  const SurfaceKind kind{1.0, true};
  struct Cell {
    int evaluated = 0, skipped = 0;
    double floor = std::numeric_limits<double>::infinity();
    double near = std::numeric_limits<double>::infinity();
    Eigen::VectorXd u, theta;
  };
  // One slot per (chart, grid row).
  std::vector<Cell> cells(static_cast<std::size_t>(2 * m));
  parallel_for(cells.size(), [&](std::size_t slot) {
    Cell& cell = cells[slot];
    const int j = static_cast<int>(slot) / m;  // freed coordinate
    const int k = 1 - j;                       // grid coordinate
    const int row = static_cast<int>(slot) % m;
    const double uk = grid.lo + (grid.hi - grid.lo) * row / (m - 1);
    for (int col = 0; col < m; ++col) {
      const double thk = kTwoPi * col / m;
      for (int a = 0; a < data.size(); ++a) {
        for (int b = a + 1; b < data.size(); ++b) {
          const Eigen::VectorXd diff = point(data, a) - point(data, b);
          if (diff[j] == 0) continue;
          // Seed at a maximal tie of terms a and b with opposite phases.
          Eigen::VectorXd u(2), theta(2);
          u[k] = uk;
          u[j] = (data.height(a) - data.height(b) - diff[k] * uk) / diff[j];
          const double la = data.linear_form(a, u);
          if (tropical_eval(data, u).value - la > 1e-9 * (1 + std::abs(la))) continue;
          theta[k] = thk;
          theta[j] = (std::numbers::pi + data.phases[static_cast<std::size_t>(a)] -
                      data.phases[static_cast<std::size_t>(b)] - diff[k] * thk) /
                     diff[j];
          auto z = solve_on_surface(data, t, kind, LogPoint::from_u(u, theta, data.beta), j);
          if (!z) continue;
          const Eigen::VectorXd zu = z->u();
          if (zu[j] < grid.lo - 1 || zu[j] > grid.hi + 1) continue;
          // Distance to the positive locus over the terms that matter here.
          double lmax = 0.0;
          for (int c = 0; c < data.size(); ++c) lmax = std::max(lmax, data.linear_form(c, zu));
          double phase_gap = 0.0;
          for (int c = 0; c < data.size(); ++c) {
            if (c == data.origin_index()) continue;
            const double w = std::exp(data.beta * (data.linear_form(c, zu) - lmax)) * monomial_cutoff(data, t, c, zu);
            if (w < 1e-3) continue;
            const double s = point(data, c).dot(z->theta) - data.phases[static_cast<std::size_t>(c)];
            phase_gap = std::max(phase_gap, std::abs(wrap(s)));
          }
          // lambda = sum_j d phi/d rho_j d theta_j against the conormal span.
          const auto jet = surface_jet(data, t, kind, *z);
          Eigen::MatrixXd span(4, 2);
          span.col(0) << jet.d_rho.real(), jet.d_theta.real();
          span.col(1) << jet.d_rho.imag(), jet.d_theta.imag();
          Eigen::VectorXd lambda = Eigen::VectorXd::Zero(4);
          lambda.tail(2) = phi.gradient(zu);
          const Eigen::VectorXd fit = span.colPivHouseholderQr().solve(lambda);
          const double norm = (lambda - span * fit).norm() / lambda.norm();
          if (phase_gap < grid.theta_exclusion) {
            ++cell.skipped;
            cell.near = std::min(cell.near, norm);
            continue;
          }
          ++cell.evaluated;
          if (norm < cell.floor) {
            cell.floor = norm;
            cell.u = zu;
            cell.theta = z->theta;
          }
        }
      }
    }
  });
  ExtraneousScan out;
  out.floor = std::numeric_limits<double>::infinity();
  out.near_locus_min = std::numeric_limits<double>::infinity();
  for (const auto& c : cells) {
    out.evaluated += c.evaluated;
    out.skipped += c.skipped;
    out.near_locus_min = std::min(out.near_locus_min, c.near);
    if (c.floor < out.floor) {
      out.floor = c.floor;
      out.floor_u = c.u;
      out.floor_theta = c.theta;
    }
  }
  out.pass = out.evaluated > 0 && out.floor > grid.floor_tol;
  return out;
}

int SkeletonComplex::find(const Simplex& s, int component) const {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].simplex == s && cells[i].component == component) return static_cast<int>(i);
  }
  return -1;
}

std::pair<int, int> SkeletonComplex::census() const {
  int tori = 0, points = 0;
  for (const auto& c : cells) (c.torus_dim > 0 ? tori : points)++;
  return {tori, points};
}

namespace {

void add_cells(const NewtonData& data, const Simplex& tau, SkeletonComplex& out) {
  const auto torus = critical_torus(data, tau);
  for (int c = 0; c < torus.components(); ++c) {
    SkeletonCell cell;
    cell.simplex = tau;
    cell.component = c;
    cell.torus_dim = torus.dimension();
    cell.dim = tau.dim() + cell.torus_dim;
    cell.representative = torus.representatives()[static_cast<std::size_t>(c)];
    out.cells.push_back(cell);
  }
}

// Cells of tau attach to the cells of a face tau' their representatives restrict to.
void attach(const NewtonData& data, const Simplex& upper, const Simplex& lower, SkeletonComplex& out) {
  const auto torus = critical_torus(data, lower);
  for (std::size_t i = 0; i < out.cells.size(); ++i) {
    if (out.cells[i].simplex != upper) continue;
    const int target = out.find(lower, torus.component_of(out.cells[i].representative));
    if (target >= 0) out.incidence.insert({target, static_cast<int>(i)});
  }
}

int euler_characteristic(const SkeletonComplex& s) {
  // Open disc of dimension dim tau times a torus: only point fibres contribute.
  int e = 0;
  for (const auto& c : s.cells) {
    if (c.torus_dim == 0) e += (c.simplex.dim() % 2 == 0) ? 1 : -1;
  }
  return e;
}

std::set<std::pair<int, int>> closure(std::set<std::pair<int, int>> rel) {
  bool grew = true;
  while (grew) {
    grew = false;
    std::set<std::pair<int, int>> added;
    for (const auto& [a, b] : rel) {
      for (const auto& [c, d] : rel) {
        if (b == c && !rel.contains({a, d})) added.insert({a, d});
      }
    }
    if (!added.empty()) {
      rel.insert(added.begin(), added.end());
      grew = true;
    }
  }
  return rel;
}

std::string cell_name(const SkeletonCell& c) {
  std::string s = "{";
  for (std::size_t i = 0; i < c.simplex.vertices.size(); ++i) s += (i ? "," : "") + std::to_string(c.simplex.vertices[i]);
  return s + "}#" + std::to_string(c.component);
}

}  // namespace

SkeletonComplex assemble_skeleton(const NewtonData& data, const std::vector<CriticalDatum>& crits,
                                  const std::vector<std::vector<FlowTrajectory>>& flows,
                                  const std::vector<std::vector<FlowTrajectory>>& stable_flows) {
  if (flows.size() != crits.size()) fail(ErrorKind::IncompleteFlowData, "flow data missing for some critical points");
  if (!stable_flows.empty() && stable_flows.size() != crits.size()) {
    fail(ErrorKind::IncompleteFlowData, "stable flow data missing for some critical points");
  }
  SkeletonComplex out;
  for (const auto& c : crits) add_cells(data, c.simplex, out);
  auto connect = [&](std::size_t i, const FlowTrajectory& tr, bool backward) {
    if (tr.divergent) {
      fail(ErrorKind::IncompleteFlowData, "a flow from " + crits[i].simplex.to_string(data) + " diverged");
    }
    std::vector<int> reached = tr.visited;
    reached.push_back(tr.limit);
    for (int j : reached) {
      if (j == static_cast<int>(i)) continue;
      const auto& other = crits[static_cast<std::size_t>(j)].simplex;
      if (backward) attach(data, other, crits[i].simplex, out);
      else attach(data, crits[i].simplex, other, out);
    }
  };
  for (std::size_t i = 0; i < crits.size(); ++i) {
    for (const auto& tr : flows[i]) connect(i, tr, false);
    if (!stable_flows.empty()) {
      for (const auto& tr : stable_flows[i]) connect(i, tr, true);
    }
  }
  out.euler = euler_characteristic(out);
  return out;
}

SkeletonComplex rstz_complex(const NewtonData& data, const StarTriangulation& t) {
  SkeletonComplex out;
  std::vector<Simplex> taus;
  for (const auto& s : t.boundary()) taus.push_back(strip_origin(data, s));
  for (const auto& tau : taus) add_cells(data, tau, out);
  for (const auto& upper : taus) {
    for (const auto& lower : taus) {
      if (lower != upper && lower.is_face_of(upper)) attach(data, upper, lower, out);
    }
  }
  out.euler = euler_characteristic(out);
  return out;
}

ComplexComparison compare_complexes(const SkeletonComplex& a, const SkeletonComplex& b) {
  ComplexComparison out;
  out.euler_a = a.euler;
  out.euler_b = b.euler;
  std::vector<int> to_b(a.cells.size(), -1);
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    to_b[i] = b.find(a.cells[i].simplex, a.cells[i].component);
    if (to_b[i] < 0) {
      out.first_disagreement = "cell " + cell_name(a.cells[i]) + " has no counterpart";
      return out;
    }
    if (a.cells[i].dim != b.cells[static_cast<std::size_t>(to_b[i])].dim) {
      out.first_disagreement = "cell " + cell_name(a.cells[i]) + " differs in dimension";
      return out;
    }
  }
  if (a.cells.size() != b.cells.size()) {
    out.first_disagreement = "cell counts differ: " + std::to_string(a.cells.size()) + " vs " +
                             std::to_string(b.cells.size());
    return out;
  }
  std::set<std::pair<int, int>> mapped;
  for (const auto& [lo, hi] : closure(a.incidence)) {
    mapped.insert({to_b[static_cast<std::size_t>(lo)], to_b[static_cast<std::size_t>(hi)]});
  }
  const auto target = closure(b.incidence);
  for (const auto& e : target) {
    if (!mapped.contains(e)) {
      out.first_disagreement = "incidence " + cell_name(b.cells[static_cast<std::size_t>(e.first)]) + " < " +
                               cell_name(b.cells[static_cast<std::size_t>(e.second)]) + " missing in the first complex";
      return out;
    }
  }
  for (const auto& e : mapped) {
    if (!target.contains(e)) {
      out.first_disagreement = "incidence " + cell_name(b.cells[static_cast<std::size_t>(e.first)]) + " < " +
                               cell_name(b.cells[static_cast<std::size_t>(e.second)]) +
                               " missing in the second complex";
      return out;
    }
  }
  if (a.euler != b.euler) {
    out.first_disagreement = "Euler characteristics differ";
    return out;
  }
  out.isomorphic = true;
  return out;
}

SkeletonRun run_skeleton(const NewtonData& data, const StarTriangulation& t, const Potential& phi, Model model,
                         const FlowOptions& options) {
  SkeletonRun run;
  run.critical = find_critical_points(data, t, phi, model);
  const std::size_t m = run.critical.size();
  for (std::size_t i = 0; i < m; ++i) {
    run.flows.push_back(flow_unstable(data, t, phi, run.critical, static_cast<int>(i), model, options));
    run.stable_flows.push_back(flow_stable(data, t, phi, run.critical, static_cast<int>(i), model, options));
  }
  // The closure of an unstable manifold also holds the separatrices climbing
  // into it and the unstable manifolds of their lower ends.
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<FlowTrajectory> closure;
    for (std::size_t j = 0; j < m; ++j) {
      for (const auto& tr : run.stable_flows[j]) {
        if (tr.limit != static_cast<int>(i)) continue;
        closure.push_back(tr);
        closure.insert(closure.end(), run.flows[j].begin(), run.flows[j].end());
      }
    }
    run.cones.push_back(cone_correspondence_check(data, phi, run.critical[i], run.flows[i], options.eps_cover, closure));
  }
  run.complex = assemble_skeleton(data, run.critical, run.flows, run.stable_flows);
  return run;
}

}  // namespace tropskel
