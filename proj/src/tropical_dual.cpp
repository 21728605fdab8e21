#include "tropskel/tropical_dual.hpp"

#include "tropskel/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tropskel {

double LinearForm::operator()(const Eigen::VectorXd& u) const {
  return alpha.to_eigen().dot(u) - to_double(offset);
}

TropicalValue tropical_eval(const NewtonData& data, const Eigen::VectorXd& u) {
  TropicalValue out;
  out.value = -std::numeric_limits<double>::infinity();
  std::vector<double> l(static_cast<std::size_t>(data.size()));
  for (int i = 0; i < data.size(); ++i) {
    l[static_cast<std::size_t>(i)] = data.linear_form(i, u);
    out.value = std::max(out.value, l[static_cast<std::size_t>(i)]);
  }
  const double tol = 1e-9 * (1.0 + std::abs(out.value));
  for (int i = 0; i < data.size(); ++i) {
    if (out.value - l[static_cast<std::size_t>(i)] <= tol) out.active.push_back(i);
  }
  return out;
}

double r_alpha(const NewtonData& data, int alpha, const Eigen::VectorXd& u) {
  double mx = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < data.size(); ++i) mx = std::max(mx, data.linear_form(i, u));
  return mx - data.linear_form(alpha, u);
}

Polyhedron dual_cell(const NewtonData& data, const StarTriangulation& t, const Simplex& tau) {
  if (!t.contains(tau)) fail(ErrorKind::SimplexNotInTriangulation, tau.to_string(data) + " is not a simplex of T");
  const int a0 = tau.vertices.front();
  const auto p0 = data.points[static_cast<std::size_t>(a0)].to_rational();
  const auto& h0 = data.heights[static_cast<std::size_t>(a0)];
  std::vector<LinearConstraint> eqs, ineqs;
  // l_a - l_a0 = <u, a - a0> - (h(a) - h(a0))
  for (int i = 0; i < data.size(); ++i) {
    if (i == a0) continue;
    LinearConstraint c{exact::sub(data.points[static_cast<std::size_t>(i)].to_rational(), p0),
                       data.heights[static_cast<std::size_t>(i)] - h0};
    if (tau.contains(i)) {
      eqs.push_back(std::move(c));
    } else {
      ineqs.push_back(std::move(c));
    }
  }
  return Polyhedron(data.dim, std::move(ineqs), std::move(eqs));
}

DualComplex dual_complex(const NewtonData& data, const StarTriangulation& t) {
  DualComplex dc;
  for (const auto& tau : t.all_faces()) dc.cells.emplace(tau, dual_cell(data, t, tau));
  return dc;
}

int ComplementPolytope::face(const Simplex& tau) const {
  auto it = face_of.find(tau);
  if (it == face_of.end()) fail(ErrorKind::SimplexNotInTriangulation, "simplex is not in the boundary complex");
  return it->second;
}

ComplementPolytope complement_polytope(const NewtonData& data, const StarTriangulation& t) {
  const int origin = data.origin_index();
  std::vector<LinearConstraint> cons;
  std::vector<int> point_of;
  std::map<int, int> constraint_of_point;
  for (int i = 0; i < data.size(); ++i) {
    if (i == origin) continue;
    if (data.heights[static_cast<std::size_t>(i)] <= 0) {
      fail(ErrorKind::OriginNotInterior, "h" + data.points[static_cast<std::size_t>(i)].to_string() + " <= 0");
    }
    constraint_of_point[i] = static_cast<int>(cons.size());
    cons.push_back({data.points[static_cast<std::size_t>(i)].to_rational(), data.heights[static_cast<std::size_t>(i)]});
    point_of.push_back(i);
  }
  ComplementPolytope out{Polyhedron(data.dim, std::move(cons)), std::move(point_of), {}, {}};
  for (const auto& tau : t.boundary()) {
    std::vector<int> tight;
    for (int v : tau.vertices) tight.push_back(constraint_of_point.at(v));
    int f = out.polytope.face_with_tight_set(tight);
    if (f < 0 || out.polytope.faces()[static_cast<std::size_t>(f)].dim != data.dim - 1 - tau.dim()) {
      fail(ErrorKind::InconsistentLabel, "no face of P is dual to " + tau.to_string(data));
    }
    out.face_of[tau] = f;
    out.simplex_of[f] = tau;
  }
  return out;
}

Polyhedron polar_dual(const Polyhedron& p) { return p.polar(); }

std::vector<ConormalPair> conormal_face_pairs(const Polyhedron& p) {
  Polyhedron dual = p.polar();
  std::vector<ConormalPair> out;
  const auto& faces = p.faces();
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const auto& face = faces[f];
    if (face.dim == p.dim()) continue;
    ConormalPair pair;
    pair.face = static_cast<int>(f);
    // The polar's constraints are indexed by P's vertices, so F^vee is the face
    // of P^vee tight exactly on F's vertices.
    pair.dual_face = dual.face_with_tight_set(face.vertices);
    for (int v : face.vertices) pair.cone.push_back(exact::to_eigen(p.vertices()[static_cast<std::size_t>(v)]));
    if (pair.dual_face >= 0) {
      for (int v : dual.faces()[static_cast<std::size_t>(pair.dual_face)].vertices) {
        pair.dual_cone.push_back(exact::to_eigen(dual.vertices()[static_cast<std::size_t>(v)]));
      }
    }
    out.push_back(std::move(pair));
  }
  return out;
}

std::vector<Segment> amoeba_spine(const NewtonData& data, const StarTriangulation& t, double extent) {
  if (data.dim != 2) fail(ErrorKind::UnsupportedDimension, "amoeba spine is drawn for n = 2 only");
  std::vector<Segment> out;
  for (const auto& tau : t.all_faces()) {
    if (tau.dim() != 1) continue;
    Polyhedron cell = dual_cell(data, t, tau);
    if (cell.empty()) continue;
    Eigen::VectorXd a = exact::to_eigen(cell.vertices().front());
    if (cell.vertices().size() >= 2) {
      out.push_back({a, exact::to_eigen(cell.vertices()[1])});
    } else if (!cell.rays().empty()) {
      out.push_back({a, a + extent * exact::to_eigen(cell.rays().front()).normalized()});
    }
  }
  return out;
}

double distance_to_boundary(const Polyhedron& p, const Eigen::VectorXd& x) {
  if (p.contains(x, 0.0)) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& c : p.inequalities()) {
      Eigen::VectorXd a = exact::to_eigen(c.normal);
      d = std::min(d, (to_double(c.bound) - a.dot(x)) / a.norm());
    }
    return d;
  }
  // Outside: the nearest point is the projection onto the affine hull of the
  // face whose relative interior contains it.
  double best = std::numeric_limits<double>::infinity();
  const auto& faces = p.faces();
  for (std::size_t f = 0; f + 1 < faces.size(); ++f) {
    const auto& face = faces[f];
    Eigen::VectorXd anchor = exact::to_eigen(p.vertices()[static_cast<std::size_t>(face.vertices.front())]);
    Eigen::MatrixXd d = p.face_directions(static_cast<int>(f));
    Eigen::VectorXd y = anchor;
    if (d.cols() > 0) y += d * (d.transpose() * (x - anchor));
    if (p.contains(y, 1e-12)) best = std::min(best, (x - y).norm());
  }
  return best;
}

}  // namespace tropskel
