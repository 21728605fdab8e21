#pragma once

#include "tropskel/localization.hpp"
#include "tropskel/newton_core.hpp"
#include "tropskel/potential.hpp"
#include "tropskel/smith.hpp"

#include <Eigen/Core>

#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace tropskel {

// Critical point of phi restricted to the model boundary {G = 0}, in u-coordinates.
struct CriticalDatum {
  Simplex simplex;           // tau in the boundary of T (origin removed)
  int face = -1;             // face of P dual to tau
  Eigen::VectorXd location;  // on the model boundary
  double multiplier = 0.0;   // d phi = c dG
  int morse_index = -1;
  double value = 0.0;        // phi(location)
  Eigen::VectorXd pl_limit;  // minimizer of phi on the dual face
  Model model = Model::Fhat;
};

// Damped Newton on {d phi = c dG, G = 0}, one point per boundary simplex. With
// Model::Ftilde the points are found on the convex model and then refined.
std::vector<CriticalDatum> find_critical_points(const NewtonData& data, const StarTriangulation& t,
                                                const Potential& phi, Model model = Model::Fhat);

// Solutions of <alpha, theta> = Theta(alpha) mod 2 pi over the rows alpha.
class SubtorusDescription {
 public:
  SubtorusDescription(IntMatrix rows, std::vector<double> phases, int dim);

  int dimension() const { return dim_ - static_cast<int>(rows_.size()); }
  int components() const;
  // One solution per component, wrapped to (-pi, pi].
  const std::vector<Eigen::VectorXd>& representatives() const { return reps_; }
  // Integer vectors spanning the tangent lattice of each component.
  const IntMatrix& basis() const { return basis_; }
  const std::vector<std::int64_t>& elementary_divisors() const { return snf_.diag; }

  // Largest violation of the congruences at theta, in radians.
  double residual(const Eigen::VectorXd& theta) const;
  // Component containing a solution theta.
  int component_of(const Eigen::VectorXd& theta) const;

 private:
  IntMatrix rows_;
  std::vector<double> phases_;
  int dim_ = 0;
  SmithForm snf_;
  std::vector<double> u_theta_;
  std::vector<Eigen::VectorXd> reps_;
  IntMatrix basis_;
};

// The congruences of the non-origin vertices of tau.
SubtorusDescription critical_torus(const NewtonData& data, const Simplex& tau);

// Second differences of phi o Log along the localized hypersurface at a
// critical torus, in directions transverse to the torus.
struct TorusNondegeneracy {
  int torus_dim = 0;
  int transverse_dim = 0;
  int negative = 0;             // negative transverse eigenvalues
  double min_relative = 0.0;    // smallest |eigenvalue| / largest
  double along_torus = 0.0;     // largest |second difference| along the torus, same scale
  double surface_residual = 0.0;
  bool nondegenerate = false;
};

// crit should sit on the F~ boundary (find_critical_points with Model::Ftilde).
TorusNondegeneracy normal_nondegeneracy(const NewtonData& data, const StarTriangulation& t, const Potential& phi,
                                        const CriticalDatum& crit, double step = 1e-2);

struct FlowOptions {
  double seed_scale = 1e-2;  // seed offset is seed_scale / beta
  double dist_stop = 1e-4;
  double t_max = 100.0;
  double near = 0.05;        // passes this close to a critical point are recorded
  int directions = 8;        // seeds on the unstable sphere when the index is >= 2
  double eps_cover = 0.05;   // coverage mesh of the cone correspondence check
};

struct FlowTrajectory {
  int origin = -1;  // index into the critical list
  int limit = -1;   // -1 when divergent
  bool divergent = false;
  std::vector<int> visited;  // lower critical points passed within `near`
  std::vector<double> times;
  std::vector<Eigen::VectorXd> samples;
};

// Negative g_phi-gradient flow of phi on {G = 0} out of crits[origin].
std::vector<FlowTrajectory> flow_unstable(const NewtonData& data, const StarTriangulation& t, const Potential& phi,
                                          const std::vector<CriticalDatum>& crits, int origin, Model model,
                                          const FlowOptions& options = {});

struct ConeReport {
  double min_margin = 0.0;    // smallest normalized cone coefficient over samples
  double max_residual = 0.0;  // distance of the direction to span(tau)
  double coverage_gap = 0.0;  // largest hole in the barycentric image
  bool pass = false;
};

// Backward flow out of crits[origin] along its stable directions inside {G = 0};
// the limits are the higher-index points whose unstable manifolds contain it.
// Empty for minima and for points without stable directions.
std::vector<FlowTrajectory> flow_stable(const NewtonData& data, const StarTriangulation& t, const Potential& phi,
                                        const std::vector<CriticalDatum>& crits, int origin, Model model,
                                        const FlowOptions& options = {});

// Projective Legendre images of the samples against cone(tau). Samples of
// `closure` (boundary strata of the unstable manifold) count toward coverage only.
ConeReport cone_correspondence_check(const NewtonData& data, const Potential& phi, const CriticalDatum& crit,
                                     const std::vector<FlowTrajectory>& flows, double eps_cover = 0.05,
                                     const std::vector<FlowTrajectory>& closure = {});

struct LiouvilleSample {
  Eigen::VectorXd x_imf;  // (rho part, theta part)
  double c1 = 0.0;
  double theta_component = 0.0;
  double pairing = 0.0;
};

// Decomposes X_lambda along the localized hypersurface at a positive-locus point.
LiouvilleSample liouville_field(const NewtonData& data, const StarTriangulation& t, const Potential& phi,
                                const LogPoint& z);

// Good-region points of the positive locus, found radially on the F~ boundary.
std::vector<LogPoint> positive_locus_samples(const NewtonData& data, const StarTriangulation& t, int directions);

struct ScanGrid {
  int size = 200;
  double lo = -2.5;
  double hi = 2.0;
  double theta_exclusion = 0.2;
  double floor_tol = 1e-3;
};

struct ExtraneousScan {
  int evaluated = 0;
  int skipped = 0;
  double floor = 0.0;  // smallest normalized |lambda restricted to TH| off the locus
  Eigen::VectorXd floor_u;
  Eigen::VectorXd floor_theta;
  double near_locus_min = 0.0;  // same quantity over the skipped points
  bool pass = false;
};

ExtraneousScan scan_extraneous_critical(const NewtonData& data, const StarTriangulation& t, const Potential& phi,
                                        const ScanGrid& grid = {});

struct SkeletonCell {
  Simplex simplex;
  int component = 0;
  int dim = 0;        // dim tau + torus dimension
  int torus_dim = 0;
  Eigen::VectorXd representative;
};

struct SkeletonComplex {
  std::vector<SkeletonCell> cells;
  std::set<std::pair<int, int>> incidence;  // (lower, upper)
  int euler = 0;

  int find(const Simplex& s, int component) const;
  std::pair<int, int> census() const;  // (torus cells, point-fibre cells)
};

// Cells from critical data, incidence from flow limits.
SkeletonComplex assemble_skeleton(const NewtonData& data, const std::vector<CriticalDatum>& crits,
                                  const std::vector<std::vector<FlowTrajectory>>& flows,
                                  const std::vector<std::vector<FlowTrajectory>>& stable_flows = {});

// Cells and incidence read off the triangulation alone.
SkeletonComplex rstz_complex(const NewtonData& data, const StarTriangulation& t);

struct ComplexComparison {
  bool isomorphic = false;
  std::string first_disagreement;
  int euler_a = 0;
  int euler_b = 0;
};

ComplexComparison compare_complexes(const SkeletonComplex& a, const SkeletonComplex& b);

// Boundary simplex without the origin vertex.
Simplex strip_origin(const NewtonData& data, const Simplex& s);

struct SkeletonRun {
  std::vector<CriticalDatum> critical;
  std::vector<std::vector<FlowTrajectory>> flows;
  std::vector<std::vector<FlowTrajectory>> stable_flows;
  std::vector<ConeReport> cones;
  SkeletonComplex complex;
};

SkeletonRun run_skeleton(const NewtonData& data, const StarTriangulation& t, const Potential& phi,
                         Model model = Model::Fhat, const FlowOptions& options = {});

}  // namespace tropskel
