#pragma once

#include "tropskel/exact_linalg.hpp"
#include "tropskel/rational.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <initializer_list>
#include <set>
#include <string>
#include <vector>

namespace tropskel {

// A point of the lattice N = Z^n.
class LatticeVector {
 public:
  LatticeVector() = default;
  explicit LatticeVector(std::vector<std::int64_t> coords) : coords_(std::move(coords)) {}
  LatticeVector(std::initializer_list<std::int64_t> coords) : coords_(coords) {}

  int dim() const { return static_cast<int>(coords_.size()); }
  std::int64_t operator[](int i) const { return coords_[static_cast<std::size_t>(i)]; }
  const std::vector<std::int64_t>& coords() const { return coords_; }
  bool is_zero() const;

  Eigen::VectorXd to_eigen() const;
  RationalVector to_rational() const;
  std::string to_string() const;

  auto operator<=>(const LatticeVector&) const = default;

 private:
  std::vector<std::int64_t> coords_;
};

// The problem instance: marked points A (containing the origin) with heights h,
// phases Theta and the tropical parameter beta.
struct NewtonData {
  int dim = 0;
  std::vector<LatticeVector> points;
  std::vector<Rational> heights;
  std::vector<double> phases;
  double beta = 100.0;

  // Validates the instance invariants; throws Error otherwise.
  static NewtonData create(std::vector<LatticeVector> points, std::vector<Rational> heights,
                           std::vector<double> phases, double beta);

  void validate() const;
  int size() const { return static_cast<int>(points.size()); }
  int origin_index() const;
  double height(int i) const;
  // l_alpha(u) = <u, alpha> - h(alpha)
  double linear_form(int i, const Eigen::VectorXd& u) const;
};

// Simplex spanned by points of A, stored as sorted indices into NewtonData::points.
struct Simplex {
  std::vector<int> vertices;

  Simplex() = default;
  explicit Simplex(std::vector<int> v);

  int dim() const { return static_cast<int>(vertices.size()) - 1; }
  bool contains(int vertex) const;
  bool is_face_of(const Simplex& other) const;
  std::vector<Simplex> faces() const;  // all nonempty faces, including itself
  std::string to_string(const NewtonData& data) const;

  auto operator<=>(const Simplex&) const = default;
};

class StarTriangulation {
 public:
  StarTriangulation(int origin, std::vector<Simplex> maximal);

  int origin() const { return origin_; }
  const std::vector<Simplex>& maximal_simplices() const { return maximal_; }
  const std::vector<Simplex>& all_faces() const { return faces_; }
  const std::vector<Simplex>& boundary() const { return boundary_; }

  bool contains(const Simplex& s) const;
  // Vertices spanning an edge of T with `vertex`.
  const std::vector<int>& adjacent(int vertex) const;
  // Number of boundary simplices of each dimension.
  std::vector<int> boundary_f_vector() const;

 private:
  int origin_;
  std::vector<Simplex> maximal_;
  std::vector<Simplex> faces_;
  std::vector<Simplex> boundary_;
  std::set<Simplex> face_set_;
  std::vector<std::vector<int>> adjacency_;
};

// Triangulation induced by the lower hull of the lifted points (alpha, h(alpha)).
StarTriangulation build_coherent_triangulation(const NewtonData& data);

// Faces of maximal simplices that omit the origin.
std::vector<Simplex> boundary_complex(const StarTriangulation& t);

// Value at y of the PL function that is affine on each maximal simplex and
// interpolates h at the vertices.
Rational pl_extension_eval(const NewtonData& data, const StarTriangulation& t,
                           const RationalVector& y);

// |det| of the simplex's edge vectors divided by n!.
Rational simplex_volume(const NewtonData& data, const Simplex& s);

}  // namespace tropskel
