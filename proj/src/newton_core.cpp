#include "tropskel/newton_core.hpp"

#include "tropskel/combinatorics.hpp"
#include "tropskel/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace tropskel {

bool LatticeVector::is_zero() const {
  return std::all_of(coords_.begin(), coords_.end(), [](auto c) { return c == 0; });
}

Eigen::VectorXd LatticeVector::to_eigen() const {
  Eigen::VectorXd v(dim());
  for (int i = 0; i < dim(); ++i) v[i] = static_cast<double>(coords_[static_cast<std::size_t>(i)]);
  return v;
}

RationalVector LatticeVector::to_rational() const {
  RationalVector v;
  v.reserve(coords_.size());
  for (auto c : coords_) v.emplace_back(c);
  return v;
}

std::string LatticeVector::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < coords_.size(); ++i) os << (i ? "," : "") << coords_[i];
  os << ')';
  return os.str();
}

NewtonData NewtonData::create(std::vector<LatticeVector> points, std::vector<Rational> heights,
                              std::vector<double> phases, double beta) {
  NewtonData d;
  d.dim = points.empty() ? 0 : points.front().dim();
  d.points = std::move(points);
  d.heights = std::move(heights);
  d.phases = std::move(phases);
  d.beta = beta;
  d.validate();
  return d;
}

void NewtonData::validate() const {
  if (dim <= 0) fail(ErrorKind::InvalidArgument, "dimension must be positive");
  if (heights.size() != points.size() || phases.size() != points.size()) {
    fail(ErrorKind::InvalidArgument, "points, heights and phases must have equal length");
  }
  if (!(beta > 0)) fail(ErrorKind::InvalidArgument, "beta must be positive");
  for (const auto& p : points) {
    if (p.dim() != dim) fail(ErrorKind::InvalidArgument, "point " + p.to_string() + " has wrong dimension");
  }
  auto sorted = points;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    fail(ErrorKind::InvalidArgument, "points must be distinct");
  }
  for (double t : phases) {
    if (!(t >= 0.0 && t < 2 * std::numbers::pi)) fail(ErrorKind::InvalidArgument, "phase outside [0, 2pi)");
  }
  int o = origin_index();
  if (heights[static_cast<std::size_t>(o)] != 0) fail(ErrorKind::InvalidArgument, "h(0) must be 0");
  if (std::abs(phases[static_cast<std::size_t>(o)] - std::numbers::pi) > 1e-12) {
    fail(ErrorKind::InvalidArgument, "Theta(0) must be pi");
  }
  RationalMatrix diffs;
  for (const auto& p : points) diffs.push_back(p.to_rational());
  if (exact::rank(diffs) < dim) fail(ErrorKind::DegenerateQ, "conv(A) is not full-dimensional");
}

int NewtonData::origin_index() const {
  for (int i = 0; i < size(); ++i) {
    if (points[static_cast<std::size_t>(i)].is_zero()) return i;
  }
  fail(ErrorKind::InvalidArgument, "the origin must belong to A");
}

double NewtonData::height(int i) const { return to_double(heights[static_cast<std::size_t>(i)]); }

double NewtonData::linear_form(int i, const Eigen::VectorXd& u) const {
  const auto& a = points[static_cast<std::size_t>(i)];
  double s = -height(i);
  for (int k = 0; k < dim; ++k) s += u[k] * static_cast<double>(a[k]);
  return s;
}

Simplex::Simplex(std::vector<int> v) : vertices(std::move(v)) {
  std::sort(vertices.begin(), vertices.end());
}

bool Simplex::contains(int vertex) const {
  return std::binary_search(vertices.begin(), vertices.end(), vertex);
}

bool Simplex::is_face_of(const Simplex& other) const {
  return std::includes(other.vertices.begin(), other.vertices.end(), vertices.begin(), vertices.end());
}

std::vector<Simplex> Simplex::faces() const {
  std::vector<Simplex> out;
  const int k = static_cast<int>(vertices.size());
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    std::vector<int> v;
    for (int i = 0; i < k; ++i) {
      if (mask & (1u << i)) v.push_back(vertices[static_cast<std::size_t>(i)]);
    }
    out.emplace_back(std::move(v));
  }
  return out;
}

std::string Simplex::to_string(const NewtonData& data) const {
  std::string s = "{";
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (i) s += ",";
    s += data.points[static_cast<std::size_t>(vertices[i])].to_string();
  }
  return s + "}";
}

namespace {

bool by_dim_then_lex(const Simplex& a, const Simplex& b) {
  if (a.dim() != b.dim()) return a.dim() < b.dim();
  return a.vertices < b.vertices;
}

}  // namespace

StarTriangulation::StarTriangulation(int origin, std::vector<Simplex> maximal)
    : origin_(origin), maximal_(std::move(maximal)) {
  std::sort(maximal_.begin(), maximal_.end(), by_dim_then_lex);
  int max_vertex = origin_;
  for (const auto& s : maximal_) {
    for (const auto& f : s.faces()) face_set_.insert(f);
    for (int v : s.vertices) max_vertex = std::max(max_vertex, v);
  }
  faces_.assign(face_set_.begin(), face_set_.end());
  std::sort(faces_.begin(), faces_.end(), by_dim_then_lex);
  for (const auto& f : faces_) {
    if (!f.contains(origin_)) boundary_.push_back(f);
  }
  adjacency_.assign(static_cast<std::size_t>(max_vertex + 1), {});
  for (const auto& f : faces_) {
    if (f.dim() != 1) continue;
    adjacency_[static_cast<std::size_t>(f.vertices[0])].push_back(f.vertices[1]);
    adjacency_[static_cast<std::size_t>(f.vertices[1])].push_back(f.vertices[0]);
  }
  for (auto& a : adjacency_) std::sort(a.begin(), a.end());
}

bool StarTriangulation::contains(const Simplex& s) const { return face_set_.count(s) > 0; }

const std::vector<int>& StarTriangulation::adjacent(int vertex) const {
  return adjacency_.at(static_cast<std::size_t>(vertex));
}

std::vector<int> StarTriangulation::boundary_f_vector() const {
  std::vector<int> f;
  for (const auto& s : boundary_) {
    if (static_cast<int>(f.size()) <= s.dim()) f.resize(static_cast<std::size_t>(s.dim() + 1), 0);
    ++f[static_cast<std::size_t>(s.dim())];
  }
  return f;
}

StarTriangulation build_coherent_triangulation(const NewtonData& data) {
  data.validate();
  const int n = data.dim;
  const int m = data.size();
  const int origin = data.origin_index();

  std::vector<Simplex> maximal;
  std::vector<bool> used(static_cast<std::size_t>(m), false);
  // Each affinely independent (n+1)-subset determines a non-vertical hyperplane
  // through its lifted points; it spans a lower facet iff every other lifted
  // point lies strictly above it.
  for_each_subset(m, n + 1, [&](const std::vector<int>& idx) {
    RationalMatrix a;
    RationalVector b;
    for (int i : idx) {
      auto row = data.points[static_cast<std::size_t>(i)].to_rational();
      row.emplace_back(1);
      a.push_back(std::move(row));
      b.push_back(data.heights[static_cast<std::size_t>(i)]);
    }
    auto coeffs = exact::solve(a, b);
    if (!coeffs) return;
    bool lower = true;
    int on_plane = -1;
    for (int j = 0; j < m && lower; ++j) {
      if (std::find(idx.begin(), idx.end(), j) != idx.end()) continue;
      auto p = data.points[static_cast<std::size_t>(j)].to_rational();
      p.emplace_back(1);
      Rational gap = data.heights[static_cast<std::size_t>(j)] - exact::dot(*coeffs, p);
      if (gap < 0) lower = false;
      if (gap == 0) on_plane = j;
    }
    if (!lower) return;
    if (on_plane >= 0) {
      fail(ErrorKind::NonGenericHeights,
           "lifted point " + data.points[static_cast<std::size_t>(on_plane)].to_string() +
               " lies on the lower facet through " + Simplex(idx).to_string(data));
    }
    for (int i : idx) used[static_cast<std::size_t>(i)] = true;
    maximal.emplace_back(idx);
  });

  for (int i = 0; i < m; ++i) {
    if (!used[static_cast<std::size_t>(i)]) {
      fail(ErrorKind::NonGenericHeights, "point " + data.points[static_cast<std::size_t>(i)].to_string() +
                                             " lifts strictly above the lower hull");
    }
  }
  for (const auto& s : maximal) {
    if (!s.contains(origin)) fail(ErrorKind::NotStar, "maximal simplex " + s.to_string(data) + " omits the origin");
  }
  // The complement cell C_0 must contain the origin in its interior, i.e. the
  // lifted origin lies strictly below every other lifted point.
  for (int i = 0; i < m; ++i) {
    if (i != origin && data.heights[static_cast<std::size_t>(i)] <= 0) {
      fail(ErrorKind::NotStar, "h" + data.points[static_cast<std::size_t>(i)].to_string() +
                                   " <= h(0): the origin is not a strict lower vertex");
    }
  }
  return StarTriangulation(origin, std::move(maximal));
}

std::vector<Simplex> boundary_complex(const StarTriangulation& t) { return t.boundary(); }

Rational simplex_volume(const NewtonData& data, const Simplex& s) {
  const int n = data.dim;
  RationalMatrix edges;
  const auto base = data.points[static_cast<std::size_t>(s.vertices[0])].to_rational();
  for (std::size_t i = 1; i < s.vertices.size(); ++i) {
    edges.push_back(exact::sub(data.points[static_cast<std::size_t>(s.vertices[i])].to_rational(), base));
  }
  if (static_cast<int>(edges.size()) != n) return 0;
  Rational det = exact::determinant(edges);
  if (det < 0) det = -det;
  Rational fact = 1;
  for (int k = 2; k <= n; ++k) fact *= k;
  return det / fact;
}

Rational pl_extension_eval(const NewtonData& data, const StarTriangulation& t, const RationalVector& y) {
  const int n = data.dim;
  if (static_cast<int>(y.size()) != n) fail(ErrorKind::InvalidArgument, "point has wrong dimension");
  for (const auto& s : t.maximal_simplices()) {
    // Barycentric coordinates: sum lambda_i alpha_i = y, sum lambda_i = 1.
    RationalMatrix a(static_cast<std::size_t>(n + 1), RationalVector(static_cast<std::size_t>(n + 1)));
    for (int j = 0; j <= n; ++j) {
      const auto& p = data.points[static_cast<std::size_t>(s.vertices[static_cast<std::size_t>(j)])];
      for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = p[i];
      a[static_cast<std::size_t>(n)][static_cast<std::size_t>(j)] = 1;
    }
    RationalVector rhs = y;
    rhs.emplace_back(1);
    auto lambda = exact::solve(a, rhs);
    if (!lambda) continue;
    if (std::any_of(lambda->begin(), lambda->end(), [](const Rational& l) { return l < 0; })) continue;
    Rational value = 0;
    for (int j = 0; j <= n; ++j) {
      value += (*lambda)[static_cast<std::size_t>(j)] *
               data.heights[static_cast<std::size_t>(s.vertices[static_cast<std::size_t>(j)])];
    }
    return value;
  }
  fail(ErrorKind::PointOutsideQ, "point lies outside conv(A)");
}

}  // namespace tropskel
