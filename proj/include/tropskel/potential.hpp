#pragma once

#include "tropskel/exact_linalg.hpp"
#include "tropskel/polyhedron.hpp"

#include <Eigen/Core>

#include <memory>
#include <string>
#include <vector>

namespace tropskel {

// A strictly convex function on R^n, homogeneous of degree 2.
class Potential {
 public:
  virtual ~Potential() = default;
  virtual int dim() const = 0;
  virtual double value(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd gradient(const Eigen::VectorXd& x) const = 0;
  // Throws EvalAtOriginOrder2 at x = 0.
  virtual Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const = 0;
};

// Gauge mode: phi(x) = (sum_i max(l_i . x, 0)^p)^{2/p} + eps |x|^2.
// Quadratic mode: phi(x) = x^T G x.
class GaugePotential : public Potential {
 public:
  enum class Mode { Gauge, Quadratic };

  static GaugePotential gauge(std::vector<RationalVector> forms, int p, double epsilon);
  static GaugePotential quadratic(const Eigen::MatrixXd& g);

  Mode mode() const { return mode_; }
  const std::vector<RationalVector>& forms() const { return forms_; }
  int smoothing_p() const { return p_; }
  double epsilon() const { return epsilon_; }
  const Eigen::MatrixXd& matrix() const { return g_; }

  int dim() const override { return dim_; }
  double value(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const override;

 private:
  GaugePotential() = default;

  // N(x) = (sum max(l_i x, 0)^p)^{1/p} with its gradient and Hessian.
  void gauge_jet(const Eigen::VectorXd& x, double& n, Eigen::VectorXd* grad, Eigen::MatrixXd* hess) const;

  Mode mode_ = Mode::Quadratic;
  int dim_ = 0;
  std::vector<RationalVector> forms_;
  Eigen::MatrixXd l_;  // forms as rows
  int p_ = 8;
  double epsilon_ = 0.0;
  Eigen::MatrixXd g_;
};

// psi(p) = <rho, p> - phi(rho) with d phi(rho) = p.
class LegendreDual : public Potential {
 public:
  explicit LegendreDual(std::shared_ptr<const Potential> phi) : phi_(std::move(phi)) {}

  int dim() const override { return phi_->dim(); }
  double value(const Eigen::VectorXd& p) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& p) const override;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& p) const override;

 private:
  std::shared_ptr<const Potential> phi_;
};

enum class DerivativeOrder { Value = 0, Gradient = 1, Hessian = 2 };

struct PhiJet {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

PhiJet phi_eval(const Potential& phi, const Eigen::VectorXd& x, DerivativeOrder order);

Eigen::VectorXd legendre_forward(const Potential& phi, const Eigen::VectorXd& rho);
// Damped Newton on d phi(rho) = p.
Eigen::VectorXd legendre_inverse(const Potential& phi, const Eigen::VectorXd& p);
double legendre_dual_eval(const Potential& phi, const Eigen::VectorXd& p);

Eigen::VectorXd projective_legendre(const Potential& phi, const Eigen::VectorXd& x);

// Degree of the map theta -> angle(d phi(cos theta, sin theta)) for n = 2.
int projective_winding_number(const Potential& phi, int samples = 3600);

// |component of H^{-1} d phi orthogonal to rho| / |H^{-1} d phi|.
double gradient_ray_residual(const Potential& phi, const Eigen::VectorXd& rho);

struct NormalConeTest {
  bool in_relative_interior = false;
  double margin = 0.0;    // smallest normalized coefficient
  double residual = 0.0;  // relative distance to the span / cone
};

// Whether v is a strictly positive combination of the given normals.
NormalConeTest normal_cone_membership(const Eigen::VectorXd& v, const std::vector<Eigen::VectorXd>& normals);

struct AdaptednessRow {
  int face = -1;
  int dim = 0;
  Eigen::VectorXd affine_minimizer;  // minimizer over the affine hull of F
  Eigen::VectorXd minimizer;         // minimizer over F itself
  int minimizer_vertex = -1;         // vertex of P the minimizer sits at, if any
  double margin = 0.0;               // signed distance of the affine minimizer to dF
  NormalConeTest normal_cone;
  bool informational = false;        // vertex rows do not enter the verdict
  bool pass = false;
  std::string label;
};

struct AdaptednessReport {
  std::vector<AdaptednessRow> rows;
  bool pass = false;

  const AdaptednessRow* first_failure() const;
};

// For every positive-dimensional proper face of P: minimize phi over the face
// and test the interior and normal-cone conditions.
AdaptednessReport check_adapted(const Potential& phi, const Polyhedron& p);

// check_adapted for the Legendre dual against the polar polytope.
AdaptednessReport dual_adaptedness_check(std::shared_ptr<const Potential> phi, const Polyhedron& p);

struct AdaptedConstruction {
  std::shared_ptr<GaugePotential> potential;
  std::vector<RationalVector> body_points;  // x_F / c_{dim F}
  AdaptednessReport report;
};

// Gauge of Omega = conv{x_F / c_{dim F}} with c_d = 1 + delta (n - 1 - d),
// smoothed and regularized, then verified; throws NotAdapted on failure.
AdaptedConstruction build_adapted_potential(const Polyhedron& p, double delta = 0.1, int smoothing_p = 8,
                                            double epsilon = 0.05);

std::string face_label(const Polyhedron& p, int face);

}  // namespace tropskel
