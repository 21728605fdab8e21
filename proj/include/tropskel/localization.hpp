#pragma once

#include "tropskel/newton_core.hpp"
#include "tropskel/polyhedron.hpp"

#include <Eigen/Core>

#include <complex>
#include <functional>
#include <optional>
#include <random>
#include <vector>

namespace tropskel {

// The cutoff profile: 1 on [0, inf), exp(g(x)) on (-2, 0), 0 on (-inf, -2] with
// g(x) = -1/(x+2) + 1/2 - x/4 + x^2/8.
double chi(double x);
double chi_d1(double x);
double chi_d2(double x);
// g and its derivatives; g = log chi on (-2, inf) (zero on [0, inf)).
double log_chi(double x);
double log_chi_d1(double x);
double log_chi_d2(double x);

// (e^x chi)'' / (e^x chi) on (-2, 0), computed from chi's derivatives.
double exp_chi_ratio(double x);
// 256 + 608x + 576x^2 + 288x^3 + 85x^4 + 14x^5 + x^6; equals
// 16 (x+2)^4 * exp_chi_ratio(x).
double cutoff_polynomial(double x);

struct LogPoint {
  Eigen::VectorXd rho;
  Eigen::VectorXd theta;
  double beta = 100.0;

  static LogPoint from_u(const Eigen::VectorXd& u, const Eigen::VectorXd& theta, double beta);
  Eigen::VectorXd u() const { return rho / beta; }
};

struct RegionLabel {
  enum class Kind { Good, Bad };
  Kind kind = Kind::Good;
  Simplex tau;          // Good: {alpha : chi_alpha = 1}
  int bad_alpha = -1;   // Bad: a point whose r_alpha is in the transition band

  bool good() const { return kind == Kind::Good; }
};

enum class Model { Ftilde, Fhat };

// log of one monomial term e^{beta l} * cutoff, with derivatives in u.
struct TermJet {
  bool alive = false;  // false when the cutoff vanishes
  double log_value = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

// G = log(F~ + 1) or log(F^): the model boundary is {G = 0}.
struct ModelJet {
  double value = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

// Product over edge-neighbours alpha' of chi(beta (l_a - l_a') + sqrt(beta)).
double monomial_cutoff(const NewtonData& data, const StarTriangulation& t, int alpha, const Eigen::VectorXd& u);

// Term e^{beta l_a} chi_a of F~; `order` selects how many derivatives are filled.
TermJet ftilde_term(const NewtonData& data, const StarTriangulation& t, int alpha, const Eigen::VectorXd& u,
                    int order);
// Term e^{beta l_a'} chi(beta l_a' + sqrt(beta)) of F^.
TermJet fhat_term(const NewtonData& data, int alpha, const Eigen::VectorXd& u, int order);

ModelJet eval_model(const NewtonData& data, const StarTriangulation& t, Model model, const Eigen::VectorXd& u,
                    int order = 2);

RegionLabel classify_region(const NewtonData& data, const StarTriangulation& t, const Eigen::VectorXd& u);

struct ValueGradient {
  double value = 0.0;
  Eigen::VectorXd gradient;
};

struct ValueGradientHessian {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

// F~(u) = -1 + sum_{a != 0} e^{beta l_a} chi_a.
ValueGradient eval_Ftilde(const NewtonData& data, const StarTriangulation& t, const Eigen::VectorXd& u);
// F^(u) = sum_{a' adj 0} e^{beta l_a'} chi(beta l_a' + sqrt(beta)).
ValueGradientHessian eval_Fhat(const NewtonData& data, const StarTriangulation& t, const Eigen::VectorXd& u);

// Which defining function of the hypersurface: f_s with every term cut off, or
// the localized f~ whose constant term is left uncut.
struct SurfaceKind {
  double s = 1.0;
  bool localized = false;
};

// Value and first derivatives of the defining function, all scaled by
// exp(-beta * max_a l_a(u)) so the dominant terms are O(1).
struct SurfaceJet {
  std::complex<double> f;
  Eigen::VectorXcd d_rho;
  Eigen::VectorXcd d_theta;
  double magnitude = 0.0;  // sum of |terms| on the same scale
  double log_scale = 0.0;  // beta * max l
};

SurfaceJet surface_jet(const NewtonData& data, const StarTriangulation& t, SurfaceKind kind, const LogPoint& z);

// f_s(z) = sum_a f_a(z) (s chi_a(u) + 1 - s), f_a = e^{-beta h(a) - i Theta(a)} z^a.
std::complex<double> eval_fs(const NewtonData& data, const StarTriangulation& t, const LogPoint& z, double s);

// Radial root of the model: the point t*d with G(t d) = 0.
Eigen::VectorXd boundary_solve(const NewtonData& data, const StarTriangulation& t, const Eigen::VectorXd& direction,
                               Model model);

struct SymplecticityMargin {
  double norm_d = 0.0;
  double norm_dbar = 0.0;
};

SymplecticityMargin symplecticity_margin(const NewtonData& data, const StarTriangulation& t, const LogPoint& z,
                                         double s);

// Newton in the chart that frees (rho_j, theta_j) and fixes everything else.
std::optional<LogPoint> solve_on_surface(const NewtonData& data, const StarTriangulation& t, SurfaceKind kind,
                                         LogPoint start, int j);

// Random points of the hypersurface with u in [lo, hi]^n accepted by `keep`.
std::vector<LogPoint> sample_surface(const NewtonData& data, const StarTriangulation& t, SurfaceKind kind, int count,
                                     double lo, double hi, std::mt19937_64& rng,
                                     const std::function<bool(const LogPoint&)>& keep, int max_attempts = 200000);

struct BoundarySample {
  double angle = 0.0;
  Eigen::VectorXd u;
  Eigen::VectorXd normal;
};

// Closed polyline of the model boundary for n = 2, refined until neighbouring
// samples differ by at most `max_turn` radians in normal and `max_gap` in position.
std::vector<BoundarySample> boundary_polyline(const NewtonData& data, const StarTriangulation& t, Model model,
                                               int initial, double max_turn, double max_gap);

struct ConvergenceRow {
  double beta = 0.0;
  double point_distance = 0.0;
  double lift_distance = 0.0;
  int samples = 0;
};

// Hausdorff distances between the model boundary and dP (and between their
// unit-normal lifts) by dense radial sampling. Requires bounded P, n = 2 or 3.
std::vector<ConvergenceRow> convergence_report(const NewtonData& data, const StarTriangulation& t,
                                               const Polyhedron& p, const std::vector<double>& betas,
                                               int directions = 2000, Model model = Model::Ftilde);

// Points of P at which the localization bounds are measured: radial rays
// with extra density in the last few multiples of 1/beta before dP.
std::vector<Eigen::VectorXd> collar_samples(const Polyhedron& p, double beta, int directions, double window);

struct ClosenessBound {
  double beta = 0.0;
  double sup_value = 0.0;     // sup |F^ - (F~ + 1)|
  double sup_gradient = 0.0;  // sup |grad F^ - grad F~|
  double min_gap = 0.0;       // min (F^ - (F~ + 1)); nonnegative when F^ dominates
  double c_value = 0.0;       // sup_value / e^{-sqrt(beta)}
  double c_gradient = 0.0;    // sup_gradient / (beta e^{-sqrt(beta)})
};

ClosenessBound localization_closeness(const NewtonData& data, const StarTriangulation& t, const Polyhedron& p,
                                      int directions = 1000);

// Unit directions on S^{n-1}: equally spaced for n = 2, a Fibonacci lattice for n = 3.
std::vector<Eigen::VectorXd> sphere_directions(int n, int count);

// Largest t with t*d in P, or nullopt when the ray stays in P.
std::optional<double> radial_hit(const Polyhedron& p, const Eigen::VectorXd& d);

}  // namespace tropskel
