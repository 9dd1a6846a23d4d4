#pragma once

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <string>

#include "pmc/cli_io/config.hpp"
#include "pmc/continuation.hpp"
#include "pmc/diagnostics.hpp"
#include "pmc/errors.hpp"
#include "pmc/minimal_branch.hpp"
#include "pmc/problem.hpp"

namespace pmc::io {

using Json = nlohmann::ordered_json;

// JSON has no NaN or infinity; those become null.
inline Json real(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

inline Json to_json(const RunConfig& c) {
  Json j;
  j["problem"] = {{"n", c.problem.n},
                  {"R", c.problem.R},
                  {"p", c.problem.p},
                  {"H", c.problem.H.coefficients()},
                  {"eps0", c.problem.eps0},
                  {"picard_tol", c.problem.tol.picard},
                  {"newton_tol", c.problem.tol.newton},
                  {"eig_tol", c.problem.tol.eig},
                  {"bisect_tol", c.problem.tol.bisect}};
  j["grid"] = {{"M", c.M}};
  Json run = {{"mode", c.run.mode}, {"lambdas", c.run.lambdas}};
  if (c.run.lambda_range)
    run["lambda_range"] = {c.run.lambda_range->start, c.run.lambda_range->stop, c.run.lambda_range->count};
  run["ds0"] = c.run.ds0;
  run["max_steps"] = c.run.max_steps;
  run["lambda_stop"] = c.run.lambda_stop ? Json(*c.run.lambda_stop) : Json(nullptr);
  j["run"] = run;
  j["output"] = {{"branch_csv", c.output.branch_csv},
                 {"report_json", c.output.report_json},
                 {"svg", c.output.svg},
                 {"profile", c.output.profile},
                 {"verbosity", c.output.verbosity}};
  return j;
}

inline Json to_json(const ConditionReport& r) {
  return {{"interior_margin", real(r.interior_margin)},
          {"boundary_strict_ok", r.boundary_strict_ok},
          {"boundary_ball_relaxed_ok", r.boundary_ball_relaxed_ok},
          {"positivity_ok", r.positivity_ok},
          {"admissible", r.admissible},
          {"ball_restricted", r.ball_restricted}};
}

inline Json to_json(const LambdaStarEstimate& e) {
  return {{"lambda_star", real(e.lambda_star)},
          {"bracket", {real(e.lambda_lo), real(e.lambda_hi)}},
          {"bisection_steps", e.bisection_steps},
          {"apriori_lambda_bound", real(e.upper_bound)}};
}

inline Json to_json(const DiagnosticsReport& d) {
  Json j = {{"lambda", real(d.lambda)},
            {"ball_condition_margin", real(d.ball_condition_margin)},
            {"apriori_lambda_bound", real(d.apriori_lambda_bound)},
            {"lower_bound_ok", d.lower_bound_ok},
            {"origin_gradient_bound",
             {{"r1", real(d.origin_gradient.r1)}, {"C1", real(d.origin_gradient.C1)}, {"ok", d.origin_gradient.ok}}},
            {"boundary_slope", real(d.boundary_slope)},
            {"barrier_ok", d.barrier_ok},
            {"barrier_status", d.barrier_status}};
  if (d.barrier)
    j["barrier"] = {{"eps", real(d.barrier->eps)},
                    {"delta", real(d.barrier->delta)},
                    {"extent", real(d.barrier->extent)},
                    {"slope_cap", real(d.barrier->slope_cap)}};
  j["v_equation_residual"] = real(d.v_equation_residual);
  j["bv_norm"] = real(d.bv_norm);
  j["sup_norm"] = real(d.sup_norm);
  return j;
}

inline Json to_json(const FoldInfo& f) {
  return {{"lambda_fold", real(f.lambda_fold)},
          {"u0_fold", f.u_fold.empty() ? Json(nullptr) : real(f.u_fold.front())},
          {"lambda_second_deriv", real(f.lambda_second_deriv)},
          {"vertex_slope", real(f.vertex_slope)},
          {"window_ds", real(f.window_ds)},
          {"arclength", real(f.arclength)},
          {"curvature_identity_gap", real(f.curvature_identity_gap)}};
}

inline void write_json(const Json& j, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os << j.dump(2) << '\n';
  os.flush();
  if (!os) throw IoError("write failed: " + path);
}

}  // namespace pmc::io
