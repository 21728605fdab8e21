#pragma once

#include "tropskel/newton_core.hpp"
#include "tropskel/polyhedron.hpp"

#include <Eigen/Core>

#include <map>
#include <vector>

namespace tropskel {

// l_alpha(u) = <u, alpha> - h(alpha)
struct LinearForm {
  LatticeVector alpha;
  Rational offset;

  double operator()(const Eigen::VectorXd& u) const;
};

struct TropicalValue {
  double value = 0.0;
  std::vector<int> active;  // indices into NewtonData::points
};

// max_alpha l_alpha(u) with the argmax set under tol_active = 1e-9 (1 + |value|).
TropicalValue tropical_eval(const NewtonData& data, const Eigen::VectorXd& u);

// max_alpha' l_alpha'(u) - l_alpha(u); zero exactly on C_alpha.
double r_alpha(const NewtonData& data, int alpha, const Eigen::VectorXd& u);

// C_tau = {u : l_a = l_a' >= l_a'' for a, a' in tau and every a''}.
Polyhedron dual_cell(const NewtonData& data, const StarTriangulation& t, const Simplex& tau);

struct DualComplex {
  std::map<Simplex, Polyhedron> cells;
};

DualComplex dual_complex(const NewtonData& data, const StarTriangulation& t);

// P = C_0 together with the order-reversing bijection between boundary
// simplices and proper faces of P.
struct ComplementPolytope {
  Polyhedron polytope;
  std::vector<int> constraint_point;  // point index of each inequality of P
  std::map<Simplex, int> face_of;     // boundary simplex -> face index of P
  std::map<int, Simplex> simplex_of;  // inverse of face_of

  int face(const Simplex& tau) const;
};

ComplementPolytope complement_polytope(const NewtonData& data, const StarTriangulation& t);

Polyhedron polar_dual(const Polyhedron& p);

// A proper face F of P, the face F^vee of the polar it pairs with, and
// generators of the cones over both.
struct ConormalPair {
  int face = -1;
  int dual_face = -1;
  std::vector<Eigen::VectorXd> cone;
  std::vector<Eigen::VectorXd> dual_cone;
};

std::vector<ConormalPair> conormal_face_pairs(const Polyhedron& p);

// Segments of the tropical hypersurface for n = 2: one per edge of T, with
// rays truncated at length `extent`.
struct Segment {
  Eigen::VectorXd a;
  Eigen::VectorXd b;
};

std::vector<Segment> amoeba_spine(const NewtonData& data, const StarTriangulation& t, double extent);

// Euclidean distance from x to the boundary of a full-dimensional polyhedron.
double distance_to_boundary(const Polyhedron& p, const Eigen::VectorXd& x);

}  // namespace tropskel
