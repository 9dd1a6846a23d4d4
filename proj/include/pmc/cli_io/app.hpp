#pragma once

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pmc/cli_io/config.hpp"
#include "pmc/cli_io/csv.hpp"
#include "pmc/cli_io/report.hpp"
#include "pmc/cli_io/svg.hpp"
#include "pmc/continuation.hpp"
#include "pmc/diagnostics.hpp"
#include "pmc/linearized.hpp"
#include "pmc/minimal_branch.hpp"
#include "pmc/problem.hpp"
#include "pmc/radial_core.hpp"

namespace pmc::io {

inline constexpr const char* tool_version = "0.1.0";

enum ExitCode : int { exit_ok = 0, exit_inadmissible = 2, exit_numerical = 3, exit_config = 4 };

namespace detail {

struct Session {
  RunConfig cfg;
  std::filesystem::path out_dir;
  Json report;
  std::ostream* out = nullptr;

  std::string path(const std::string& name) const {
    const std::filesystem::path p(name);
    return (p.is_absolute() ? p : out_dir / p).string();
  }
  void say(const std::string& line) const {
    if (cfg.output.verbosity > 0) *out << line << '\n';
  }
};

inline std::vector<BranchPoint> points_from_samples(const RadialGrid& grid, const ProblemSpec& spec,
                                                    const std::vector<BranchSample>& samples) {
  std::vector<BranchPoint> pts;
  double s = 0.0;
  const std::vector<double>* prev = nullptr;
  double prev_lambda = 0.0;
  for (const BranchSample& b : samples) {
    if (!b.result.converged) continue;
    const std::vector<double>& u = b.result.profile.u;
    if (prev) {
      double d2 = (b.lambda - prev_lambda) * (b.lambda - prev_lambda);
      for (int i = 0; i < grid.cells(); ++i) d2 += grid.volume(i) * (u[i] - (*prev)[i]) * (u[i] - (*prev)[i]);
      s += std::sqrt(d2);
    }
    BranchPoint bp = make_point(grid, spec, u, b.lambda, true);
    bp.index = int(pts.size());
    bp.arclength = s;
    pts.push_back(bp);
    prev = &u;
    prev_lambda = b.lambda;
  }
  return pts;
}

inline void write_profile_file(const std::string& path, const RadialGrid& grid, const Profile& pr) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  for (int i = 0; i <= grid.cells(); ++i) os << format_real(grid.node(i)) << ' ' << format_real(pr.u[i]) << '\n';
  if (!os) throw IoError("write failed: " + path);
}

inline int run_minimal_branch(Session& S, const RadialGrid& grid) {
  const ProblemSpec& spec = S.cfg.problem;
  std::vector<double> lambdas = S.cfg.lambda_samples();
  double lstar = 0.0;
  if (lambdas.empty()) {
    const LambdaStarEstimate est = bisect_lambda_star(spec, grid);
    S.report["lambda_star"] = {{"bisection", to_json(est)}};
    lstar = est.lambda_star;
    const double top = est.lambda_star - 10.0 * spec.tol.bisect;
    for (int k = 0; k < 20; ++k) lambdas.push_back(top * k / 19.0);
  }
  const SweepResult sw = sweep_branch(spec, grid, lambdas, lstar);
  Json diags = Json::array();
  for (const BranchSample& b : sw.samples)
    if (b.result.converged) diags.push_back(to_json(analyze_profile(spec, grid, b.result.profile, b.lambda)));
  S.report["points"] = diags;
  Json anomalies = Json::array();
  bool failed = false;
  for (const BranchSample& b : sw.samples)
    if (!b.result.converged) {
      anomalies.push_back("no convergence at lambda = " + format_real(b.lambda) + " (" + to_string(b.result.stop) + ")");
      failed = true;
    }
  S.report["anomalies"] = anomalies;
  const std::vector<BranchPoint> pts = points_from_samples(grid, spec, sw.samples);
  if (!pts.empty()) emit_branch_csv(pts, S.path(S.cfg.output.branch_csv), spec.tol.eig);
  if (pts.size() >= 2) emit_bifurcation_svg(pts, std::nullopt, S.path(S.cfg.output.svg));
  S.say("minimal branch: " + std::to_string(pts.size()) + " converged samples of " + std::to_string(lambdas.size()));
  return failed ? exit_numerical : exit_ok;
}

inline int run_lambda_star(Session& S, const RadialGrid& grid) {
  const ProblemSpec& spec = S.cfg.problem;
  const LambdaStarEstimate est = bisect_lambda_star(spec, grid);
  S.report["lambda_star"] = {{"bisection", to_json(est)}};
  S.report["apriori_lambda_bound"] = real(est.upper_bound);
  const Profile ext = extremal_solution(spec, grid, est.lambda_star);
  const double lam = est.lambda_star - spec.tol.bisect;
  Json e = {{"lambda", real(lam)},
            {"u0", real(ext.height())},
            {"sup_ur", real(ext.sup_slope())},
            {"mu1", real(smallest_eigenpair(assemble_L(grid, ext, lam, spec), spec.tol.eig).mu1)}};
  e["diagnostics"] = to_json(analyze_profile(spec, grid, ext, lam));
  S.report["extremal"] = e;
  write_profile_file(S.path(S.cfg.output.profile), grid, ext);
  S.say("lambda* = " + format_real(est.lambda_star) + "  (a-priori bound " + format_real(est.upper_bound) + ")");
  return exit_ok;
}

inline TraceOptions trace_options(const RunConfig& c) {
  TraceOptions o;
  o.ds0 = c.run.ds0;
  o.max_steps = c.run.max_steps;
  o.lambda_stop = c.run.lambda_stop;
  return o;
}

inline int run_continue(Session& S, const RadialGrid& grid, bool plot_only) {
  const ProblemSpec& spec = S.cfg.problem;
  TraceResult tr = trace_branch(spec, grid, trace_options(S.cfg));
  S.report["trace"] = {{"points", tr.points.size()}, {"termination", tr.termination}, {"complete", tr.complete}};
  if (tr.fold) {
    const EigenResult er = smallest_eigenpair(assemble_L(grid, tr.fold->u_fold, tr.fold->lambda_fold, spec), spec.tol.eig);
    const CurvatureCheck cc = fold_curvature_check(grid, spec, tr.fold->u_fold, tr.fold->lambda_fold,
                                                   tr.fold->lambda_second_deriv, er.w1);
    tr.fold->curvature_identity_gap = cc.gap;
    Json f = to_json(*tr.fold);
    f["mu1_at_fold"] = real(er.mu1);
    f["curvature_identity"] = {{"lhs", real(cc.lhs)}, {"rhs", real(cc.rhs)}, {"implied_second_deriv", real(cc.implied_second_deriv)}};
    S.report["fold"] = f;
  }
  emit_branch_csv(tr.points, S.path(S.cfg.output.branch_csv), spec.tol.eig);
  if (tr.points.size() >= 2) emit_bifurcation_svg(tr.points, tr.fold, S.path(S.cfg.output.svg));
  if (!plot_only && tr.fold) {
    const LambdaStarEstimate est = bisect_lambda_star(spec, grid);
    S.report["lambda_star"] = {{"bisection", to_json(est)},
                               {"fold", real(tr.fold->lambda_fold)},
                               {"agreement_gap", real(std::abs(tr.fold->lambda_fold - est.lambda_star) / est.lambda_star)}};
    S.report["apriori_lambda_bound"] = real(est.upper_bound);
  }
  if (!tr.fold) {
    S.report["anomalies"] = Json::array({"incomplete trace: no fold detected (" + tr.termination + ")"});
    return exit_numerical;
  }
  S.say("fold at lambda = " + format_real(tr.fold->lambda_fold) + ", " + std::to_string(tr.points.size()) + " points");
  return exit_ok;
}

inline int run_second(Session& S, const RadialGrid& grid) {
  const ProblemSpec& spec = S.cfg.problem;
  const std::vector<double> lambdas = S.cfg.lambda_samples();
  if (lambdas.empty()) throw ConfigurationError("run.lambdas: the second mode needs a target lambda (or --lambda)");
  const double lam = lambdas.front();
  TraceOptions o = trace_options(S.cfg);
  if (!o.lambda_stop) o.lambda_stop = 0.9 * lam;
  const TraceResult tr = trace_branch(spec, grid, o);
  if (!tr.fold) throw NoConvergence("second: no fold found while tracing the branch");
  const Profile sec = second_solution(spec, grid, lam, tr);
  const PicardResult mn = picard_minimal(spec, grid, lam);
  S.report["second_solution"] = {{"lambda", real(lam)},
                                 {"lambda_fold", real(tr.fold->lambda_fold)},
                                 {"u0_second", real(sec.height())},
                                 {"u0_minimal", real(mn.profile.height())},
                                 {"mu1_second", real(smallest_eigenpair(assemble_L(grid, sec, lam, spec), spec.tol.eig).mu1)}};
  write_profile_file(S.path(S.cfg.output.profile), grid, sec);
  S.say("second solution at lambda = " + format_real(lam) + ": u(0) = " + format_real(sec.height()) +
        " (minimal " + format_real(mn.profile.height()) + ")");
  return exit_ok;
}

inline int run_diagnose(Session& S, const RadialGrid& grid) {
  const ProblemSpec& spec = S.cfg.problem;
  std::vector<double> lambdas = S.cfg.lambda_samples();
  if (lambdas.empty()) lambdas.push_back(0.0);
  Json diags = Json::array(), anomalies = Json::array();
  for (double lam : lambdas) {
    const PicardResult r = picard_minimal(spec, grid, lam);
    if (!r.converged) {
      anomalies.push_back("no convergence at lambda = " + format_real(lam) + " (" + to_string(r.stop) + ")");
      continue;
    }
    diags.push_back(to_json(analyze_profile(spec, grid, r.profile, lam)));
  }
  S.report["points"] = diags;
  S.report["anomalies"] = anomalies;
  S.say("diagnosed " + std::to_string(diags.size()) + " profiles");
  return anomalies.empty() ? exit_ok : exit_numerical;
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Radial prescribed mean curvature solver"};
  std::string command, config_path, out_dir = ".";
  std::optional<double> lambda;
  std::optional<int> grid_m;
  app.add_option("command", command, "minimal-branch | lambda-star | continue | second | diagnose | plot")->required();
  app.add_option("--config", config_path, "configuration file")->required();
  app.add_option("--lambda", lambda, "lambda override");
  app.add_option("--grid-m", grid_m, "cell count override");
  app.add_option("--out-dir", out_dir, "directory for output files");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_config;
  }
  if (!is_mode(command)) {
    err << "unknown subcommand '" << command << "'\n";
    return exit_config;
  }

  detail::Session S;
  S.out = &out;
  try {
    std::ifstream is(config_path);
    if (!is) throw ConfigurationError("config: cannot read " + config_path);
    std::stringstream buf;
    buf << is.rdbuf();
    S.cfg = parse_config(buf.str());
    S.cfg.run.mode = command;
    if (lambda) S.cfg.run.lambdas = {*lambda};
    if (grid_m) S.cfg.M = *grid_m;
    validate(S.cfg);
    S.out_dir = out_dir;
    std::filesystem::create_directories(S.out_dir);
  } catch (const ConfigurationError& e) {
    err << e.what() << '\n';
    return exit_config;
  } catch (const std::filesystem::filesystem_error& e) {
    err << e.what() << '\n';
    return exit_config;
  }

  const auto t0 = std::chrono::steady_clock::now();
  S.report["tool"] = {{"name", "pmc"}, {"version", tool_version}};
  S.report["config"] = to_json(S.cfg);
  int code = exit_ok;
  std::string message = "ok";
  try {
    const ConditionReport adm = check_admissibility(S.cfg.problem);
    S.report["admissibility"] = to_json(adm);
    if (!adm.admissible) {
      code = exit_inadmissible;
      message = "problem is not admissible";
    } else {
      const RadialGrid grid = build_grid(S.cfg.problem, S.cfg.M);
      if (command == "minimal-branch") code = detail::run_minimal_branch(S, grid);
      else if (command == "lambda-star") code = detail::run_lambda_star(S, grid);
      else if (command == "continue") code = detail::run_continue(S, grid, false);
      else if (command == "plot") code = detail::run_continue(S, grid, true);
      else if (command == "second") code = detail::run_second(S, grid);
      else code = detail::run_diagnose(S, grid);
      if (code != exit_ok) message = "numerical failure, see anomalies";
    }
  } catch (const ConfigurationError& e) {
    err << e.what() << '\n';
    return exit_config;
  } catch (const std::exception& e) {
    code = exit_numerical;
    message = e.what();
  }
  S.report["timing_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  S.report["exit_status"] = {{"code", code}, {"message", message}};
  try {
    write_json(S.report, S.path(S.cfg.output.report_json));
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    if (code == exit_ok) code = exit_numerical;
  }
  if (code != exit_ok) err << message << '\n';
  return code;
}

}  // namespace pmc::io
