#include "tropskel/polyhedron.hpp"

#include "tropskel/combinatorics.hpp"
#include "tropskel/errors.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace tropskel {

namespace {

// Scales v so that its first nonzero entry has absolute value one.
RationalVector canonical_direction(RationalVector v) {
  for (const auto& x : v) {
    if (x != 0) {
      Rational s = x < 0 ? Rational(-x) : x;
      for (auto& y : v) y /= s;
      break;
    }
  }
  return v;
}

bool is_zero(const RationalVector& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& x) { return x == 0; });
}

}  // namespace

Polyhedron::Polyhedron(int dim, std::vector<LinearConstraint> inequalities, std::vector<LinearConstraint> equalities)
    : dim_(dim), ineq_(std::move(inequalities)), eq_(std::move(equalities)) {
  if (dim_ < 1 || dim_ > 3) fail(ErrorKind::Unsupported, "polyhedra are supported for 1 <= n <= 3");
  for (const auto& c : ineq_) {
    if (static_cast<int>(c.normal.size()) != dim_) fail(ErrorKind::InvalidArgument, "constraint dimension mismatch");
  }
  for (const auto& c : eq_) {
    if (static_cast<int>(c.normal.size()) != dim_) fail(ErrorKind::InvalidArgument, "constraint dimension mismatch");
  }
  RationalMatrix all;
  for (const auto& c : ineq_) all.push_back(c.normal);
  for (const auto& c : eq_) all.push_back(c.normal);
  if (exact::rank(all) < dim_) fail(ErrorKind::Unsupported, "polyhedron contains a line");
  enumerate_generators();
  build_face_lattice();
}

void Polyhedron::enumerate_generators() {
  std::vector<const LinearConstraint*> rows;
  for (const auto& c : eq_) rows.push_back(&c);
  for (const auto& c : ineq_) rows.push_back(&c);
  const int m = static_cast<int>(rows.size());

  std::set<RationalVector> seen_vertices;
  for_each_subset(m, dim_, [&](const std::vector<int>& idx) {
    RationalMatrix a;
    RationalVector b;
    for (int i : idx) {
      a.push_back(rows[static_cast<std::size_t>(i)]->normal);
      b.push_back(rows[static_cast<std::size_t>(i)]->bound);
    }
    auto x = exact::solve(a, b);
    if (x && contains(*x) && seen_vertices.insert(*x).second) vertices_.push_back(*x);
  });

  // Extreme rays of the recession cone {A r <= 0, E r = 0}: one-dimensional
  // solution sets of n-1 tight rows.
  std::set<RationalVector> seen_rays;
  auto in_cone = [&](const RationalVector& r) {
    for (const auto& c : eq_) {
      if (exact::dot(c.normal, r) != 0) return false;
    }
    for (const auto& c : ineq_) {
      if (exact::dot(c.normal, r) > 0) return false;
    }
    return true;
  };
  auto try_ray = [&](RationalVector r) {
    if (is_zero(r)) return;
    for (int sign : {1, -1}) {
      auto s = exact::scale(r, sign);
      if (in_cone(s)) {
        // Normalize by the largest entry so sign is kept.
        Rational mx = 0;
        for (const auto& x : s) mx = std::max(mx, Rational(x < 0 ? Rational(-x) : x));
        for (auto& x : s) x /= mx;
        if (seen_rays.insert(s).second) rays_.push_back(s);
      }
    }
  };
  if (dim_ == 1) {
    try_ray({Rational(1)});
  } else {
    for_each_subset(m, dim_ - 1, [&](const std::vector<int>& idx) {
      RationalMatrix a;
      for (int i : idx) a.push_back(rows[static_cast<std::size_t>(i)]->normal);
      auto ns = exact::nullspace(a, dim_);
      if (ns.size() == 1) try_ray(ns.front());
    });
  }
  // Rays found from rank-deficient subsets may be non-extreme; keep only those
  // whose tight set has rank n-1.
  std::vector<RationalVector> extreme;
  for (const auto& r : rays_) {
    RationalMatrix tight;
    for (const auto& c : eq_) tight.push_back(c.normal);
    for (const auto& c : ineq_) {
      if (exact::dot(c.normal, r) == 0) tight.push_back(c.normal);
    }
    if (exact::rank(tight) == dim_ - 1) extreme.push_back(r);
  }
  rays_ = std::move(extreme);
}

void Polyhedron::build_face_lattice() {
  if (vertices_.empty()) return;
  using Key = std::pair<std::vector<int>, std::vector<int>>;
  std::set<Key> keys;
  std::vector<int> all_v(vertices_.size()), all_r(rays_.size());
  for (std::size_t i = 0; i < all_v.size(); ++i) all_v[i] = static_cast<int>(i);
  for (std::size_t i = 0; i < all_r.size(); ++i) all_r[i] = static_cast<int>(i);
  keys.insert({all_v, all_r});
  for (const auto& c : ineq_) {
    Key k;
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      if (exact::dot(c.normal, vertices_[i]) == c.bound) k.first.push_back(static_cast<int>(i));
    }
    for (std::size_t i = 0; i < rays_.size(); ++i) {
      if (exact::dot(c.normal, rays_[i]) == 0) k.second.push_back(static_cast<int>(i));
    }
    if (!k.first.empty()) keys.insert(k);
  }
  // Close under pairwise intersection.
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<Key> current(keys.begin(), keys.end());
    for (std::size_t i = 0; i < current.size(); ++i) {
      for (std::size_t j = i + 1; j < current.size(); ++j) {
        Key k;
        std::set_intersection(current[i].first.begin(), current[i].first.end(), current[j].first.begin(),
                              current[j].first.end(), std::back_inserter(k.first));
        std::set_intersection(current[i].second.begin(), current[i].second.end(), current[j].second.begin(),
                              current[j].second.end(), std::back_inserter(k.second));
        if (!k.first.empty() && keys.insert(k).second) grew = true;
      }
    }
  }

  for (const auto& [vs, rs] : keys) {
    PolyFace f;
    f.vertices = vs;
    f.rays = rs;
    for (std::size_t c = 0; c < ineq_.size(); ++c) {
      bool tight = true;
      for (int v : vs) tight = tight && exact::dot(ineq_[c].normal, vertices_[static_cast<std::size_t>(v)]) == ineq_[c].bound;
      for (int r : rs) tight = tight && exact::dot(ineq_[c].normal, rays_[static_cast<std::size_t>(r)]) == 0;
      if (tight) f.tight.push_back(static_cast<int>(c));
    }
    RationalMatrix span;
    const auto& v0 = vertices_[static_cast<std::size_t>(vs.front())];
    for (std::size_t i = 1; i < vs.size(); ++i) span.push_back(exact::sub(vertices_[static_cast<std::size_t>(vs[i])], v0));
    for (int r : rs) span.push_back(rays_[static_cast<std::size_t>(r)]);
    f.dim = exact::rank(span);
    f.interior_point = Eigen::VectorXd::Zero(dim_);
    for (int v : vs) f.interior_point += exact::to_eigen(vertices_[static_cast<std::size_t>(v)]);
    f.interior_point /= static_cast<double>(vs.size());
    for (int r : rs) f.interior_point += exact::to_eigen(rays_[static_cast<std::size_t>(r)]).normalized();
    faces_.push_back(std::move(f));
  }
  std::sort(faces_.begin(), faces_.end(), [](const PolyFace& a, const PolyFace& b) {
    if (a.dim != b.dim) return a.dim < b.dim;
    return a.tight > b.tight;
  });
  for (auto& f : faces_) {
    for (std::size_t g = 0; g < faces_.size(); ++g) {
      const auto& sub = faces_[g];
      if (sub.dim != f.dim - 1) continue;
      if (std::includes(f.vertices.begin(), f.vertices.end(), sub.vertices.begin(), sub.vertices.end()) &&
          std::includes(f.rays.begin(), f.rays.end(), sub.rays.begin(), sub.rays.end())) {
        f.facets.push_back(static_cast<int>(g));
      }
    }
  }
}

Polyhedron Polyhedron::convex_hull(int dim, const std::vector<RationalVector>& points) {
  const int m = static_cast<int>(points.size());
  std::set<std::pair<RationalVector, Rational>> seen;
  std::vector<LinearConstraint> facets;
  for_each_subset(m, dim, [&](const std::vector<int>& idx) {
    RationalMatrix diffs;
    const auto& p0 = points[static_cast<std::size_t>(idx[0])];
    for (std::size_t i = 1; i < idx.size(); ++i) diffs.push_back(exact::sub(points[static_cast<std::size_t>(idx[i])], p0));
    auto ns = exact::nullspace(diffs, dim);
    if (ns.size() != 1) return;
    RationalVector a = canonical_direction(ns.front());
    Rational b = exact::dot(a, p0);
    bool below = false, above = false;
    for (const auto& p : points) {
      Rational s = exact::dot(a, p) - b;
      below = below || s < 0;
      above = above || s > 0;
    }
    if (below && above) return;
    if (above) {
      a = exact::scale(a, -1);
      b = -b;
    }
    if (seen.insert({a, b}).second) facets.push_back({a, b});
  });
  if (static_cast<int>(facets.size()) <= dim) fail(ErrorKind::DegenerateQ, "points do not span a full-dimensional hull");
  return Polyhedron(dim, std::move(facets));
}

std::vector<int> Polyhedron::faces_of_dim(int d) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < faces_.size(); ++i) {
    if (faces_[i].dim == d) out.push_back(static_cast<int>(i));
  }
  return out;
}

int Polyhedron::face_with_tight_set(const std::vector<int>& tight) const {
  auto sorted = tight;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < faces_.size(); ++i) {
    if (faces_[i].tight == sorted) return static_cast<int>(i);
  }
  return -1;
}

bool Polyhedron::contains(const RationalVector& x) const {
  for (const auto& c : eq_) {
    if (exact::dot(c.normal, x) != c.bound) return false;
  }
  for (const auto& c : ineq_) {
    if (exact::dot(c.normal, x) > c.bound) return false;
  }
  return true;
}

bool Polyhedron::contains(const Eigen::VectorXd& x, double tol) const {
  for (const auto& c : eq_) {
    if (std::abs(exact::to_eigen(c.normal).dot(x) - to_double(c.bound)) > tol) return false;
  }
  for (const auto& c : ineq_) {
    if (exact::to_eigen(c.normal).dot(x) > to_double(c.bound) + tol) return false;
  }
  return true;
}

bool Polyhedron::strictly_contains_origin() const {
  if (!eq_.empty()) return false;
  return std::all_of(ineq_.begin(), ineq_.end(), [](const LinearConstraint& c) { return c.bound > 0; });
}

Eigen::MatrixXd Polyhedron::face_directions(int face) const {
  const auto& f = faces_.at(static_cast<std::size_t>(face));
  RationalMatrix tight;
  for (const auto& c : eq_) tight.push_back(c.normal);
  for (int t : f.tight) tight.push_back(ineq_[static_cast<std::size_t>(t)].normal);
  auto ns = exact::nullspace(tight, dim_);
  Eigen::MatrixXd basis(dim_, static_cast<Eigen::Index>(ns.size()));
  for (std::size_t j = 0; j < ns.size(); ++j) basis.col(static_cast<Eigen::Index>(j)) = exact::to_eigen(ns[j]);
  if (basis.cols() == 0) return basis;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
  return qr.householderQ() * Eigen::MatrixXd::Identity(dim_, basis.cols());
}

double Polyhedron::relative_margin(int face, const Eigen::VectorXd& x) const {
  const auto& f = faces_.at(static_cast<std::size_t>(face));
  Eigen::MatrixXd d = face_directions(face);
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < ineq_.size(); ++c) {
    if (std::binary_search(f.tight.begin(), f.tight.end(), static_cast<int>(c))) continue;
    Eigen::VectorXd a = exact::to_eigen(ineq_[c].normal);
    double norm = d.cols() ? (d.transpose() * a).norm() : 0.0;
    if (norm < 1e-12) continue;
    margin = std::min(margin, (to_double(ineq_[c].bound) - a.dot(x)) / norm);
  }
  return margin;
}

Polyhedron Polyhedron::polar() const {
  if (!bounded()) fail(ErrorKind::Unbounded, "polar dual requires a bounded polytope");
  if (!strictly_contains_origin()) fail(ErrorKind::OriginNotInterior, "polar dual requires 0 in the interior");
  std::vector<LinearConstraint> cons;
  for (const auto& v : vertices_) cons.push_back({v, Rational(1)});
  return Polyhedron(dim_, std::move(cons));
}

std::string Polyhedron::describe() const {
  std::ostringstream os;
  auto row = [&](const LinearConstraint& c, const char* op) {
    os << '(';
    for (std::size_t i = 0; i < c.normal.size(); ++i) os << (i ? "," : "") << to_string(c.normal[i]);
    os << ")." << "x " << op << ' ' << to_string(c.bound) << '\n';
  };
  for (const auto& c : ineq_) row(c, "<=");
  for (const auto& c : eq_) row(c, "==");
  return os.str();
}

}  // namespace tropskel
