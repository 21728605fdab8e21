#include "tropskel/plots.hpp"

#include "tropskel/errors.hpp"
#include "tropskel/localization.hpp"
#include "tropskel/tropical_dual.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace tropskel {

namespace {

class Svg {
 public:
  Svg(double xmin, double xmax, double ymin, double ymax, double size = 640.0)
      : xmin_(xmin), ymax_(ymax), scale_(size / std::max(xmax - xmin, ymax - ymin)) {
    width_ = (xmax - xmin) * scale_;
    height_ = (ymax - ymin) * scale_;
  }

  void line(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const std::string& style) {
    body_ << "<line x1=\"" << x(a[0]) << "\" y1=\"" << y(a[1]) << "\" x2=\"" << x(b[0]) << "\" y2=\"" << y(b[1])
          << "\" style=\"" << style << "\"/>\n";
  }
  void polyline(const std::vector<Eigen::VectorXd>& pts, const std::string& style, bool closed = false) {
    if (pts.size() < 2) return;
    body_ << (closed ? "<polygon" : "<polyline") << " points=\"";
    for (const auto& p : pts) body_ << x(p[0]) << "," << y(p[1]) << " ";
    body_ << "\" style=\"fill:none;" << style << "\"/>\n";
  }
  void circle(const Eigen::VectorXd& c, double r_px, const std::string& style) {
    body_ << "<circle cx=\"" << x(c[0]) << "\" cy=\"" << y(c[1]) << "\" r=\"" << r_px << "\" style=\"" << style
          << "\"/>\n";
  }
  void text(const Eigen::VectorXd& at, const std::string& s, int size = 12) {
    body_ << "<text x=\"" << x(at[0]) + 4 << "\" y=\"" << y(at[1]) - 4 << "\" font-size=\"" << size
          << "\" font-family=\"sans-serif\">" << s << "</text>\n";
  }
  double scale() const { return scale_; }

  void save(const std::string& path) const {
    std::ofstream out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\"" << height_
        << "\" viewBox=\"0 0 " << width_ << " " << height_ << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << body_.str() << "</svg>\n";
  }

 private:
  double x(double v) const { return (v - xmin_) * scale_; }
  double y(double v) const { return (ymax_ - v) * scale_; }

  double xmin_, ymax_, scale_, width_ = 0, height_ = 0;
  std::ostringstream body_;
};

Eigen::VectorXd v2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

const char* kIndexColor[] = {"#1f77b4", "#d62728", "#2ca02c"};

// Runs of consecutive radial boundary points; breaks where the ray escapes.
std::vector<std::vector<Eigen::VectorXd>> boundary_runs(const NewtonData& data, const StarTriangulation& t,
                                                        double extent, int directions) {
  std::vector<std::vector<Eigen::VectorXd>> runs(1);
  for (const auto& d : sphere_directions(2, directions)) {
    try {
      const Eigen::VectorXd u = boundary_solve(data, t, d, Model::Ftilde);
      if (u.lpNorm<Eigen::Infinity>() <= extent) {
        runs.back().push_back(u);
        continue;
      }
    } catch (const Error&) {
    }
    if (!runs.back().empty()) runs.emplace_back();
  }
  // Join the wrap-around run.
  if (runs.size() > 1 && !runs.back().empty() && !runs.front().empty() && directions > 0) {
    runs.back().insert(runs.back().end(), runs.front().begin(), runs.front().end());
    runs.erase(runs.begin());
  }
  return runs;
}

}  // namespace

std::vector<std::string> emit_plots(const PlotInput& in, const std::string& dir) {
  const NewtonData& data = *in.data;
  if (data.dim != 2) fail(ErrorKind::UnsupportedDimension, "plots are drawn for n = 2 only");
  const StarTriangulation& t = *in.triangulation;
  const Polyhedron& p = *in.polytope;
  std::filesystem::create_directories(dir);
  std::vector<std::string> files;
  auto path = [&](const std::string& name) {
    files.push_back((std::filesystem::path(dir) / name).string());
    return files.back();
  };

  double extent = 1.0;
  for (const auto& v : p.vertices()) extent = std::max(extent, exact::to_eigen(v).lpNorm<Eigen::Infinity>());
  extent += 1.5;

  // Amoeba figure: spine, P, model boundary, minimizers, critical points, flows.
  Svg svg(-extent, extent, -extent, extent);
  const auto spine = amoeba_spine(data, t, extent);
  for (const auto& s : spine) svg.line(s.a, s.b, "stroke:#999;stroke-width:1");
  for (std::size_t f = 0; f < p.faces().size(); ++f) {
    const auto& face = p.faces()[f];
    if (face.dim != 1) continue;
    const Eigen::VectorXd a = exact::to_eigen(p.vertices()[static_cast<std::size_t>(face.vertices[0])]);
    Eigen::VectorXd b;
    if (face.vertices.size() == 2) b = exact::to_eigen(p.vertices()[static_cast<std::size_t>(face.vertices[1])]);
    else b = a + 3 * extent * exact::to_eigen(p.rays()[static_cast<std::size_t>(face.rays[0])]).normalized();
    svg.line(a, b, "stroke:black;stroke-width:1.5;stroke-dasharray:4,3");
  }
  const auto runs = boundary_runs(data, t, extent, 4000);
  for (const auto& r : runs) svg.polyline(r, "stroke:#ff7f0e;stroke-width:1.5", false);
  if (in.adaptedness) {
    for (const auto& row : in.adaptedness->rows) {
      if (row.informational) continue;
      svg.circle(row.minimizer, 3, row.pass ? "fill:black" : "fill:red");
    }
  }
  if (in.skeleton) {
    for (const auto& per : in.skeleton->flows) {
      for (const auto& f : per) svg.polyline(f.samples, "stroke:#9467bd;stroke-width:1");
    }
    for (const auto& c : in.skeleton->critical) {
      svg.circle(c.location, 4, std::string("fill:") + kIndexColor[std::min(c.morse_index, 2)]);
      svg.text(c.location, c.simplex.to_string(data), 10);
    }
  }
  svg.save(path("amoeba.svg"));

  {
    std::ofstream csv(path("spine.csv"));
    csv << "x1,y1,x2,y2\n";
    for (const auto& s : spine) csv << s.a[0] << "," << s.a[1] << "," << s.b[0] << "," << s.b[1] << "\n";
  }
  {
    std::ofstream csv(path("boundary.csv"));
    csv << "run,u1,u2\n";
    for (std::size_t r = 0; r < runs.size(); ++r) {
      for (const auto& u : runs[r]) csv << r << "," << u[0] << "," << u[1] << "\n";
    }
  }
  if (!in.skeleton) return files;
  {
    std::ofstream csv(path("trajectories.csv"));
    csv << "trajectory,origin,limit,t,u1,u2\n";
    int id = 0;
    for (const auto& per : in.skeleton->flows) {
      for (const auto& f : per) {
        for (std::size_t k = 0; k < f.samples.size(); ++k) {
          csv << id << "," << f.origin << "," << f.limit << "," << f.times[k] << "," << f.samples[k][0] << ","
              << f.samples[k][1] << "\n";
        }
        ++id;
      }
    }
  }

  // Schematic skeleton: circle cells at the directions of their vertices,
  // interval cells joining the circles they attach to.
  const auto& cx = in.skeleton->complex;
  Svg sk(-3.5, 3.5, -3.5, 3.5, 480);
  std::map<int, Eigen::VectorXd> centre;
  for (std::size_t i = 0; i < cx.cells.size(); ++i) {
    const auto& c = cx.cells[i];
    if (c.torus_dim == 0 || c.simplex.vertices.size() != 1) continue;
    const Eigen::VectorXd a = data.points[static_cast<std::size_t>(c.simplex.vertices[0])].to_eigen();
    const Eigen::VectorXd at = 2.0 * a.normalized() + 0.3 * c.component * v2(1, 0);
    centre[static_cast<int>(i)] = at;
    sk.circle(at, 0.5 * sk.scale(), "fill:none;stroke:#1f77b4;stroke-width:2");
    sk.text(at + v2(0.5, 0.5), c.simplex.to_string(data), 11);
  }
  for (std::size_t i = 0; i < cx.cells.size(); ++i) {
    const auto& c = cx.cells[i];
    if (c.torus_dim != 0) continue;
    std::vector<Eigen::VectorXd> ends;
    for (const auto& [lo, hi] : cx.incidence) {
      if (hi == static_cast<int>(i) && centre.contains(lo)) ends.push_back(centre[lo]);
    }
    if (ends.size() != 2) continue;
    // Attachment points on the circles facing each other, offset per component.
    const Eigen::VectorXd dir = (ends[1] - ends[0]).normalized();
    const Eigen::VectorXd normal = v2(-dir[1], dir[0]) * (0.15 * c.component);
    const Eigen::VectorXd a = ends[0] + 0.5 * dir + normal, b = ends[1] - 0.5 * dir + normal;
    sk.line(a, b, "stroke:#d62728;stroke-width:2");
    sk.circle(a, 3, "fill:black");
    sk.circle(b, 3, "fill:black");
  }
  sk.save(path("skeleton.svg"));
  return files;
}

}  // namespace tropskel
