#include "tropskel/pipeline.hpp"

#include "tropskel/errors.hpp"
#include "tropskel/localization.hpp"
#include "tropskel/plots.hpp"
#include "tropskel/tropical_dual.hpp"
#include "tropskel/verification.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <random>

namespace tropskel {

namespace {

template <class F>
auto stage(const std::string& name, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    std::string message = e.what();
    const std::string prefix = std::string(to_string(e.kind())) + ": ";
    if (message.starts_with(prefix)) message.erase(0, prefix.size());
    throw Error(e.kind(), "stage " + name + ": " + message);
  }
}

void append(std::vector<Check>& to, std::vector<Check> from) {
  to.insert(to.end(), std::make_move_iterator(from.begin()), std::make_move_iterator(from.end()));
}

std::vector<Check> adaptedness_checks(const AdaptednessReport& r) {
  std::vector<Check> out;
  for (const auto& row : r.rows) {
    if (row.informational) continue;
    std::string detail = "minimizer (";
    for (int k = 0; k < row.minimizer.size(); ++k) detail += (k ? ", " : "") + std::to_string(row.minimizer[k]);
    detail += ")";
    if (row.minimizer_vertex >= 0) detail += " at a vertex";
    detail += row.normal_cone.in_relative_interior ? "; normal cone ok" : "; gradient outside the normal cone";
    auto c = make_check("face minimizer interior margin on " + row.label, row.margin, ">", 0.0, detail);
    c.pass = row.pass;
    out.push_back(std::move(c));
  }
  return out;
}

struct Context {
  const RunConfig& config;
  NewtonData data;
  StarTriangulation triangulation;
  ComplementPolytope complement;
  std::shared_ptr<Potential> phi;
  std::optional<AdaptednessReport> adaptedness;
  std::optional<SkeletonRun> skeleton;
};

Context prepare(const RunConfig& config, RunReport& report) {
  NewtonData data = stage("instance", [&] { return make_data(config); });
  StarTriangulation t = stage("triangulate", [&] { return build_coherent_triangulation(data); });
  report.stages["triangulation"] = triangulation_json(data, t);
  ComplementPolytope cp = stage("amoeba", [&] { return complement_polytope(data, t); });
  report.stages["polytope"] = polyhedron_json(cp.polytope);
  return Context{config, std::move(data), std::move(t), std::move(cp), nullptr, std::nullopt, std::nullopt};
}

// The configured potential; a gauge construction that fails verification
// becomes a failing check instead of an exception.
void potential_stage(Context& ctx, RunReport& report) {
  const Polyhedron& p = ctx.complement.polytope;
  try {
    ctx.phi = stage("potential", [&] { return make_potential(ctx.config, p); });
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotAdapted) throw;
    report.checks.push_back(make_check("adapted potential constructed", 0, "==", 1, e.what()));
    return;
  }
  ctx.adaptedness = stage("potential-check", [&] { return check_adapted(*ctx.phi, p); });
  report.stages["adaptedness"] = adaptedness_json(*ctx.adaptedness);
  append(report.checks, adaptedness_checks(*ctx.adaptedness));
  if (p.bounded()) report.checks.push_back(stage("potential-check", [&] {
    return dual_verdict_check(ctx.config.name, ctx.phi, p);
  }));
}

nlohmann::json finite_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(); }

// Morse-Bott check of the critical tori on the localized hypersurface; reported, not asserted.
void nondegeneracy_stage(Context& ctx, RunReport& report) {
  const auto crits = stage("critical", [&] {
    return find_critical_points(ctx.data, ctx.triangulation, *ctx.phi, Model::Ftilde);
  });
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& c : crits) {
    const auto r = stage("critical", [&] { return normal_nondegeneracy(ctx.data, ctx.triangulation, *ctx.phi, c); });
    rows.push_back({{"simplex", c.simplex.to_string(ctx.data)},
                    {"morse_index", c.morse_index},
                    {"torus_dim", r.torus_dim},
                    {"transverse_dim", r.transverse_dim},
                    {"negative", r.negative},
                    {"min_relative_eigenvalue", r.min_relative},
                    {"along_torus", r.along_torus},
                    {"nondegenerate", r.nondegenerate}});
  }
  report.stages["normal_nondegeneracy"] = rows;
}

void skeleton_stage(Context& ctx, RunReport& report) {
  const auto& tol = ctx.config.tolerances;
  FlowOptions options;
  options.seed_scale = tol.flow_seed;
  options.dist_stop = tol.flow_stop;
  options.eps_cover = tol.cover;
  ctx.skeleton = stage("skeleton", [&] { return run_skeleton(ctx.data, ctx.triangulation, *ctx.phi, Model::Fhat, options); });
  report.stages["critical"] = critical_json(ctx.data, ctx.skeleton->critical);
  report.stages["flows"] = flows_json(ctx.skeleton->flows);
  report.stages["complex"] = complex_json(ctx.data, ctx.skeleton->complex);
  report.stages["rstz_complex"] = complex_json(ctx.data, rstz_complex(ctx.data, ctx.triangulation));
  append(report.checks, skeleton_checks(ctx.data, ctx.triangulation, *ctx.skeleton));
}

void verify_stage(Context& ctx, RunReport& report) {
  const auto& cfg = ctx.config;
  const NewtonData& data = ctx.data;
  const StarTriangulation& t = ctx.triangulation;
  const Polyhedron& p = ctx.complement.polytope;
  std::mt19937_64 rng(cfg.seed);
  append(report.checks, stage("cutoff", [&] { return cutoff_checks(10000, 1e-9, 8.0, 1e-6); }));
  append(report.checks, stage("liouville", [&] {
    return liouville_checks(data, t, *ctx.phi, cfg.sampling.positive_locus_directions, 100, 1e-6);
  }));
  append(report.checks, stage("symplecticity", [&] {
    return symplecticity_checks(data, t, cfg.sampling.surface_samples, rng, 0.1);
  }));
  append(report.checks, stage("legendre", [&] {
    return legendre_checks(ctx.phi, cfg.sampling.legendre_samples, rng, LegendreTolerances{});
  }));
  if (data.dim == 2) {
    ScanGrid grid;
    grid.size = cfg.sampling.scan_grid;
    grid.floor_tol = cfg.tolerances.floor_tol;
    report.checks.push_back(stage("scan", [&] { return scan_check(data, t, *ctx.phi, grid); }));
  }
  const auto& betas = cfg.instance.beta_list;
  if (p.bounded() && betas.size() < 2) {
    const auto bound = stage("localization", [&] {
      return localization_closeness(data, t, p, cfg.sampling.closeness_directions);
    });
    report.checks.push_back(make_check("convex model dominates: min (F^ - F~ - 1)", bound.min_gap, ">=", 0.0));
  }
  if (betas.size() < 2) return;
  const InstanceAt at = [&cfg](double b) { return make_data(cfg, b); };
  if (p.bounded()) {
    append(report.checks, stage("rates", [&] {
      return closeness_checks(at, betas, cfg.sampling.closeness_directions, 10.0);
    }));
    append(report.checks, stage("rates", [&] {
      return convergence_checks(at, betas, cfg.sampling.boundary_directions, 3.0);
    }));
  }
  append(report.checks, stage("rates", [&] { return drift_checks(at, *ctx.phi, betas, 3.0); }));
}

void plot_stage(Context& ctx, RunReport& report, const std::string& out_dir) {
  if (!ctx.config.output.plots) return;
  PlotInput in{&ctx.data, &ctx.triangulation, &ctx.complement.polytope,
               ctx.adaptedness ? &*ctx.adaptedness : nullptr, ctx.skeleton ? &*ctx.skeleton : nullptr};
  try {
    const auto files = emit_plots(in, out_dir);
    nlohmann::json names = nlohmann::json::array();
    for (const auto& f : files) names.push_back(std::filesystem::path(f).filename().string());
    report.stages["plots"] = names;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::UnsupportedDimension) throw;
    report.stages["plots"] = {{"skipped", e.what()}};
  }
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"triangulate", "amoeba", "potential-check",
                                              "critical", "skeleton", "verify"};
  return names;
}

RunReport run_command(const std::string& command, const RunConfig& config, const std::string& out_dir) {
  const auto& names = subcommands();
  if (std::find(names.begin(), names.end(), command) == names.end()) {
    fail(ErrorKind::InvalidArgument, "unknown subcommand '" + command + "'");
  }
  RunReport report;
  report.schema_version = kSchemaVersion;
  report.command = command;
  report.instance = config.name;
  report.stages["config"] = to_json(config);

  Context ctx = prepare(config, report);
  if (command == "amoeba") {
    report.stages["spine_segments"] = amoeba_spine(ctx.data, ctx.triangulation, 10.0).size();
    if (ctx.complement.polytope.bounded()) {
      const auto rows = stage("amoeba", [&] {
        return convergence_report(ctx.data, ctx.triangulation, ctx.complement.polytope, {config.instance.beta},
                                  config.sampling.boundary_directions);
      });
      report.stages["boundary_distance"] = {{"beta", rows[0].beta},
                                            {"point", rows[0].point_distance},
                                            {"normal_lift", rows[0].lift_distance},
                                            {"samples", rows[0].samples}};
    }
  }
  if (command == "amoeba" || command == "verify") {
    const auto spectrum = stage("amoeba", [&] {
      return fhat_hessian_spectrum(ctx.data, ctx.triangulation, ctx.complement.polytope, 200, 0.3);
    });
    report.stages["fhat_hessian"] = {{"good_samples", spectrum.good_samples},
                                     {"bad_samples", spectrum.bad_samples},
                                     {"good_min_normalized_eigenvalue", finite_or_null(spectrum.good_min)},
                                     {"bad_min_normalized_eigenvalue", finite_or_null(spectrum.bad_min)},
                                     {"bad_negative", spectrum.bad_negative}};
  }
  if (command == "potential-check" || command == "critical" || command == "skeleton" || command == "verify") {
    potential_stage(ctx, report);
  }
  if (ctx.phi && command == "critical") {
    const auto crits = stage("critical", [&] { return find_critical_points(ctx.data, ctx.triangulation, *ctx.phi); });
    report.stages["critical"] = critical_json(ctx.data, crits);
    report.checks.push_back(make_check("critical points = boundary simplices", static_cast<double>(crits.size()), "==",
                                       static_cast<double>(ctx.triangulation.boundary().size())));
  }
  if (ctx.phi && (command == "critical" || command == "verify")) nondegeneracy_stage(ctx, report);
  if (ctx.phi && (command == "skeleton" || command == "verify")) skeleton_stage(ctx, report);
  if (ctx.phi && command == "verify") verify_stage(ctx, report);

  if (command != "triangulate") plot_stage(ctx, report, out_dir);
  write_report(report, out_dir);
  return report;
}

}  // namespace tropskel
