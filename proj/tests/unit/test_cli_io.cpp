#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "fixtures.hpp"
#include "pmc/cli_io/app.hpp"

using namespace pmc;
using namespace pmc::io;
namespace fs = std::filesystem;

namespace {

const std::string minimal_doc =
    "[problem]\n"
    "n = 2\n"
    "R = 1\n"
    "H = 0.5\n"
    "p = 2\n"
    "[run]\n"
    "mode = lambda-star\n";

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("pmc_cli_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

fs::path write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(PMC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

BranchPoint point(double lambda, double u0, double mu1, double tl) {
  BranchPoint bp;
  bp.lambda = lambda;
  bp.u0 = u0;
  bp.mu1 = mu1;
  bp.tangent_lambda = tl;
  return bp;
}

}  // namespace

TEST(Config, DefaultsFilled) {
  const RunConfig c = parse_config(minimal_doc);
  EXPECT_EQ(c.problem.n, 2);
  EXPECT_EQ(c.problem.R, 1.0);
  EXPECT_EQ(c.problem.p, 2.0);
  EXPECT_TRUE(c.problem.H.is_constant());
  EXPECT_EQ(c.problem.H(0.3), 0.5);
  EXPECT_EQ(c.M, 2048);
  EXPECT_EQ(c.problem.eps0, 0.1);
  EXPECT_EQ(c.problem.tol.picard, 1e-10);
  EXPECT_EQ(c.problem.tol.newton, 1e-10);
  EXPECT_EQ(c.problem.tol.eig, 1e-8);
  EXPECT_EQ(c.problem.tol.bisect, 1e-5);
  EXPECT_EQ(c.run.ds0, 0.01);
  EXPECT_EQ(c.run.mode, "lambda-star");
}

TEST(Config, RejectsSmallExponent) {
  std::string doc = minimal_doc;
  doc.replace(doc.find("p = 2"), 5, "p = 0.5");
  try {
    parse_config(doc);
    FAIL() << "accepted p = 0.5";
  } catch (const ConfigurationError& e) {
    EXPECT_NE(std::string(e.what()).find("problem.p"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("p must be >= 1"), std::string::npos);
  }
}

TEST(Config, RejectsNegativeLambda) {
  EXPECT_THROW(parse_config(minimal_doc + "lambdas = 1, -2\n"), ConfigurationError);
}

TEST(Config, RejectsUnknownAndMissingKeys) {
  EXPECT_THROW(parse_config(minimal_doc + "colour = red\n"), ConfigurationError);
  EXPECT_THROW(parse_config("[problem]\nn = 2\nR = 1\np = 2\n"), ConfigurationError);
  EXPECT_THROW(parse_config(minimal_doc + "[grid]\nM = 8\n"), ConfigurationError);
  EXPECT_THROW(parse_config(minimal_doc + "[grid]\nM = 2x\n"), ConfigurationError);
}

TEST(Config, RoundTrip) {
  RunConfig c = parse_config(minimal_doc);
  c.problem.H = CurvatureField(std::vector<double>{0.5, -0.125, 0.1});
  c.problem.tol.picard = 3.3e-11;
  c.M = 777;
  c.run.mode = "continue";
  c.run.lambdas = {0.1, 2.0 / 3.0};
  c.run.lambda_range = LambdaRange{0.0, 12.5, 7};
  c.run.lambda_stop = 1.0 / 7.0;
  c.output.svg = "diagram.svg";
  c.output.verbosity = 0;
  EXPECT_EQ(parse_config(serialize_config(c)), c);
  const RunConfig d = parse_config(minimal_doc);
  EXPECT_EQ(parse_config(serialize_config(d)), d);
}

TEST(Config, LambdaRangeSamples) {
  const RunConfig c = parse_config(minimal_doc + "lambda_range = 0, 1, 5\n");
  const auto l = c.lambda_samples();
  ASSERT_EQ(l.size(), 5u);
  EXPECT_EQ(l.front(), 0.0);
  EXPECT_EQ(l.back(), 1.0);
  EXPECT_EQ(l[2], 0.5);
}

TEST(Csv, SinglePoint) {
  const std::vector<BranchPoint> pts{point(0.0, 0.127, 5.4, 1.0)};
  std::ostringstream os;
  write_branch_csv(os, pts, 1e-8);
  std::istringstream is(os.str());
  std::string header, row, extra;
  std::getline(is, header);
  std::getline(is, row);
  EXPECT_FALSE(std::getline(is, extra));
  EXPECT_EQ(header, "index,lambda,u0,sup_ur,mu1,bv_norm,residual,arclength,stable");
  EXPECT_EQ(row.back(), '1');
  EXPECT_EQ(row.substr(0, 8), "0,0,0.12");
}

TEST(Csv, StabilityFlag) {
  EXPECT_EQ(stability_flag(1.0, 1e-8), '1');
  EXPECT_EQ(stability_flag(-1.0, 1e-8), '0');
  EXPECT_EQ(stability_flag(1e-9, 1e-8), '?');
}

TEST(Csv, EmptyBranchRejected) {
  std::ostringstream os;
  EXPECT_THROW(write_branch_csv(os, {}, 1e-8), PreconditionError);
  EXPECT_THROW(emit_branch_csv({}, "unused.csv", 1e-8), PreconditionError);
}

TEST(Csv, UnwritablePath) {
  const std::vector<BranchPoint> pts{point(0.0, 0.1, 1.0, 1.0)};
  EXPECT_THROW(emit_branch_csv(pts, "/nonexistent-dir/x.csv", 1e-8), IoError);
}

TEST(Svg, TwoPointsSingleSolidSegment) {
  const std::vector<BranchPoint> pts{point(0.0, 0.1, 1.0, 1.0), point(1.0, 0.2, 0.5, 1.0)};
  const std::string svg = bifurcation_svg(pts, std::nullopt);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("class=\"lower\""), std::string::npos);
  EXPECT_EQ(svg.find("class=\"upper\""), std::string::npos);
  EXPECT_EQ(svg.find("class=\"fold\""), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Svg, FoldStylesAndMarker) {
  std::vector<BranchPoint> pts;
  for (int k = 0; k < 9; ++k) {
    const double t = 0.1 * k - 0.45;
    BranchPoint bp = point(2.0 - t * t, 0.1 * k, 1.0 - k * 0.2, -2 * t);
    bp.arclength = 0.1 * k;
    pts.push_back(bp);
  }
  const FoldInfo fi = locate_fold(pts);
  const std::string svg = bifurcation_svg(pts, fi);
  EXPECT_NE(svg.find("class=\"lower\""), std::string::npos);
  EXPECT_NE(svg.find("class=\"upper\""), std::string::npos);
  EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);
  EXPECT_NE(svg.find("<circle class=\"fold\""), std::string::npos);
}

TEST(Svg, NonFiniteRejected) {
  const std::vector<BranchPoint> pts{point(0.0, 0.1, 1.0, 1.0), point(NAN, 0.2, 0.5, 1.0)};
  EXPECT_THROW(bifurcation_svg(pts, std::nullopt), NumericalError);
}

TEST(Report, NanBecomesNull) {
  EXPECT_TRUE(real(NAN).is_null());
  EXPECT_EQ(real(1.5).get<double>(), 1.5);
}

TEST(Cli, HalfSphereIsInadmissible) {
  const fs::path d = scratch("half");
  const fs::path cfg = write_file(d / "h.cfg", "[problem]\nn = 2\nR = 1\nH = 2\np = 2\n");
  EXPECT_EQ(run_binary("lambda-star --config " + cfg.string() + " --out-dir " + d.string()), 2);
  const auto report = Json::parse(slurp(d / "report.json"));
  EXPECT_EQ(report["exit_status"]["code"], 2);
  EXPECT_FALSE(report["admissibility"]["admissible"].get<bool>());
}

TEST(Cli, UnknownSubcommand) {
  const fs::path d = scratch("unknown");
  const fs::path cfg = write_file(d / "a.cfg", minimal_doc);
  EXPECT_EQ(run_binary("frobnicate --config " + cfg.string() + " --out-dir " + d.string()), 4);
}

TEST(Cli, InvalidConfig) {
  const fs::path d = scratch("invalid");
  const fs::path cfg = write_file(d / "a.cfg", "[problem]\nn = 2\nR = 1\nH = 0.5\np = 0.5\n");
  EXPECT_EQ(run_binary("lambda-star --config " + cfg.string() + " --out-dir " + d.string()), 4);
  EXPECT_EQ(run_binary("lambda-star --config " + (d / "missing.cfg").string()), 4);
}

TEST(Cli, LambdaStarWithinBound) {
  const fs::path d = scratch("lstar");
  const fs::path cfg = write_file(d / "a.cfg", minimal_doc + "[grid]\nM = 512\n");
  EXPECT_EQ(run_binary("lambda-star --config " + cfg.string() + " --out-dir " + d.string()), 0);
  const auto report = Json::parse(slurp(d / "report.json"));
  const double ls = report["lambda_star"]["bisection"]["lambda_star"].get<double>();
  const double bound = report["apriori_lambda_bound"].get<double>();
  EXPECT_GT(ls, 0.0);
  EXPECT_LE(ls, bound);
  EXPECT_NEAR(ls, fixtures::disc_quadratic.lambda_star, 1e-3 * ls);
  EXPECT_EQ(report["tool"]["version"], tool_version);
  EXPECT_TRUE(fs::exists(d / "profile.txt"));
}

TEST(Cli, ContinueIsDeterministic) {
  const fs::path d1 = scratch("det1"), d2 = scratch("det2");
  const std::string doc = minimal_doc + "[grid]\nM = 256\n";
  const fs::path c1 = write_file(d1 / "a.cfg", doc), c2 = write_file(d2 / "a.cfg", doc);
  std::ostringstream out, err;
  const std::string a1 = "--out-dir=" + d1.string(), a2 = "--out-dir=" + d2.string();
  const std::string k1 = "--config=" + c1.string(), k2 = "--config=" + c2.string();
  const char* argv1[] = {"pmc", "continue", k1.c_str(), a1.c_str()};
  const char* argv2[] = {"pmc", "continue", k2.c_str(), a2.c_str()};
  ASSERT_EQ(run_cli(4, argv1, out, err), 0) << err.str();
  ASSERT_EQ(run_cli(4, argv2, out, err), 0) << err.str();
  const std::string csv = slurp(d1 / "branch.csv");
  EXPECT_EQ(csv, slurp(d2 / "branch.csv"));
  EXPECT_EQ(slurp(d1 / "branch.svg"), slurp(d2 / "branch.svg"));
  // lambda rises then falls across the fold
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  std::vector<double> lam;
  while (std::getline(is, line)) lam.push_back(std::stod(line.substr(line.find(',') + 1)));
  const auto top = std::max_element(lam.begin(), lam.end()) - lam.begin();
  EXPECT_GT(top, 0);
  EXPECT_LT(top, long(lam.size()) - 1);
  const auto report = Json::parse(slurp(d1 / "report.json"));
  EXPECT_EQ(report["trace"]["points"].get<std::size_t>(), lam.size());
  EXPECT_LE(report["lambda_star"]["agreement_gap"].get<double>(), 1e-3);
}

TEST(Cli, SecondSolutionMode) {
  const fs::path d = scratch("second");
  const fs::path cfg = write_file(d / "a.cfg", minimal_doc + "[grid]\nM = 256\n");
  EXPECT_EQ(run_binary("second --config " + cfg.string() + " --lambda 12 --out-dir " + d.string()), 0);
  const auto report = Json::parse(slurp(d / "report.json"));
  EXPECT_GT(report["second_solution"]["u0_second"].get<double>(), report["second_solution"]["u0_minimal"].get<double>());
}
