#pragma once

#include "tropskel/exact_linalg.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace tropskel {

// Half-space a.x <= b (or hyperplane a.x = b when used as an equality).
struct LinearConstraint {
  RationalVector normal;
  Rational bound;
};

// A nonempty face, described by the generators it contains and the
// inequality constraints tight on all of it.
struct PolyFace {
  std::vector<int> vertices;  // indices into Polyhedron::vertices()
  std::vector<int> rays;      // indices into Polyhedron::rays()
  std::vector<int> tight;     // inequality indices, sorted
  int dim = 0;
  Eigen::VectorXd interior_point;  // vertex barycenter plus the sum of unit rays
  std::vector<int> facets;         // immediate sub-faces (indices into faces())
};

// Pointed polyhedron {x : A x <= b, E x = e} in dimension n <= 3 with an exact
// face lattice. Generators come from brute-force n-subsets of constraints,
// which is adequate at desk scale.
class Polyhedron {
 public:
  Polyhedron(int dim, std::vector<LinearConstraint> inequalities,
             std::vector<LinearConstraint> equalities = {});

  // H-representation of conv(points); requires the points to span R^n.
  static Polyhedron convex_hull(int dim, const std::vector<RationalVector>& points);

  int dim() const { return dim_; }
  int affine_dim() const { return faces_.empty() ? -1 : faces_.back().dim; }
  bool empty() const { return vertices_.empty(); }
  bool bounded() const { return rays_.empty(); }

  const std::vector<LinearConstraint>& inequalities() const { return ineq_; }
  const std::vector<LinearConstraint>& equalities() const { return eq_; }
  const std::vector<RationalVector>& vertices() const { return vertices_; }
  const std::vector<RationalVector>& rays() const { return rays_; }

  // All nonempty faces ordered by dimension; the last one is the polyhedron itself.
  const std::vector<PolyFace>& faces() const { return faces_; }
  std::vector<int> faces_of_dim(int d) const;
  // Index of the face whose tight set is exactly `tight`, or -1.
  int face_with_tight_set(const std::vector<int>& tight) const;

  bool contains(const RationalVector& x) const;
  bool contains(const Eigen::VectorXd& x, double tol) const;
  bool strictly_contains_origin() const;

  // Orthonormal basis (columns) of the direction space of a face.
  Eigen::MatrixXd face_directions(int face) const;
  // Distance from x (assumed in the affine hull of the face) to the face's
  // relative boundary inside that hull; negative when x violates a constraint.
  double relative_margin(int face, const Eigen::VectorXd& x) const;

  // P^vee = {p : <p, x> <= 1 for all x in P}; requires P bounded with 0 interior.
  Polyhedron polar() const;

  std::string describe() const;

 private:
  void enumerate_generators();
  void build_face_lattice();

  int dim_;
  std::vector<LinearConstraint> ineq_;
  std::vector<LinearConstraint> eq_;
  std::vector<RationalVector> vertices_;
  std::vector<RationalVector> rays_;
  std::vector<PolyFace> faces_;
};

}  // namespace tropskel
