#pragma once

#include "tropskel/morse_skeleton.hpp"
#include "tropskel/report.hpp"

#include <functional>
#include <random>
#include <vector>

namespace tropskel {

// Builds the instance at a given beta; the rate checks sweep beta through it.
using InstanceAt = std::function<NewtonData(double)>;

// max / min of a positive sequence.
double spread(const std::vector<double>& v);

// Second differences of e^x chi on `points` grid points of [-2, 0], and the
// ratio (e^x chi)'' / (e^x chi) at x = -1 against `expected_ratio`.
std::vector<Check> cutoff_checks(int points, double convexity_tol, double expected_ratio, double ratio_tol);

// sup |F^ - (F~ + 1)| = c e^{-sqrt beta}: spread of c over betas, and F^ >= F~ + 1.
std::vector<Check> closeness_checks(const InstanceAt& at, const std::vector<double>& betas, int directions,
                                    double max_spread);

// d_H * sqrt(beta) for the boundary and its unit-normal lift, within max_spread.
std::vector<Check> convergence_checks(const InstanceAt& at, const std::vector<double>& betas, int directions,
                                      double max_spread);

// max_tau |critical point - tropical limit|: decreasing, and d sqrt(beta) within max_spread.
std::vector<Check> drift_checks(const InstanceAt& at, const Potential& phi, const std::vector<double>& betas,
                                double max_spread);

std::vector<Check> liouville_checks(const NewtonData& data, const StarTriangulation& t, const Potential& phi,
                                    int directions, int min_samples, double theta_tol);

std::vector<Check> symplecticity_checks(const NewtonData& data, const StarTriangulation& t, int samples,
                                        std::mt19937_64& rng, double ratio_tol);

struct LegendreTolerances {
  double roundtrip = 1e-8;
  double dual_of_dual = 1e-6;
  double ray = 1e-6;
};

std::vector<Check> legendre_checks(std::shared_ptr<const Potential> phi, int samples, std::mt19937_64& rng,
                                   const LegendreTolerances& tol);

// Primal and dual adaptedness verdicts agree.
Check dual_verdict_check(const std::string& label, std::shared_ptr<const Potential> phi, const Polyhedron& p);

Check scan_check(const NewtonData& data, const StarTriangulation& t, const Potential& phi, const ScanGrid& grid);

struct HessianSpectrum {
  int good_samples = 0;
  int bad_samples = 0;
  double good_min = 0.0;  // smallest eigenvalue / max(1, |H|), good-region points
  double bad_min = 0.0;   // same over the bad-region points
  int bad_negative = 0;   // bad-region points with a negative normalized eigenvalue below -1e-8
};

// Spectrum of the F^ Hessian over collar points of dP, split by region. Reported, not asserted.
HessianSpectrum fhat_hessian_spectrum(const NewtonData& data, const StarTriangulation& t, const Polyhedron& p,
                                      int directions, double window);

// Census, index law, Euler characteristic -n! vol(Q) and isomorphism with the
// combinatorial complex.
std::vector<Check> skeleton_checks(const NewtonData& data, const StarTriangulation& t, const SkeletonRun& run);

}  // namespace tropskel
