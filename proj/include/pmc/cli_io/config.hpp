#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pmc/errors.hpp"
#include "pmc/problem.hpp"

namespace pmc::io {

inline constexpr std::array<std::string_view, 6> run_modes{"minimal-branch", "lambda-star", "continue",
                                                           "second",         "diagnose",    "plot"};

inline bool is_mode(std::string_view m) {
  return std::find(run_modes.begin(), run_modes.end(), m) != run_modes.end();
}

struct LambdaRange {
  double start = 0.0;
  double stop = 0.0;
  int count = 0;
  friend bool operator==(const LambdaRange&, const LambdaRange&) = default;
};

struct RunSection {
  std::string mode = "lambda-star";
  std::vector<double> lambdas;
  std::optional<LambdaRange> lambda_range;
  double ds0 = 0.01;
  int max_steps = 4000;
  std::optional<double> lambda_stop;
  friend bool operator==(const RunSection&, const RunSection&) = default;
};

struct OutputSection {
  std::string branch_csv = "branch.csv";
  std::string report_json = "report.json";
  std::string svg = "branch.svg";
  std::string profile = "profile.txt";
  int verbosity = 1;
  friend bool operator==(const OutputSection&, const OutputSection&) = default;
};

struct RunConfig {
  ProblemSpec problem;
  int M = 2048;
  RunSection run;
  OutputSection output;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  // Explicit list, else the evenly spaced range, else empty.
  std::vector<double> lambda_samples() const {
    if (!run.lambdas.empty()) return run.lambdas;
    std::vector<double> out;
    if (run.lambda_range) {
      const auto& r = *run.lambda_range;
      for (int k = 0; k < r.count; ++k)
        out.push_back(r.count == 1 ? r.start : r.start + (r.stop - r.start) * double(k) / double(r.count - 1));
    }
    return out;
  }
};

// Shortest decimal form that reads back to the same double.
inline std::string format_real(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_real(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(v))
    throw ConfigurationError(key + ": expected a finite real, got '" + t + "'");
  return v;
}

inline int parse_int(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  int v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw ConfigurationError(key + ": expected an integer, got '" + t + "'");
  return v;
}

inline std::vector<double> parse_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(item, key));
  if (out.empty()) throw ConfigurationError(key + ": empty list");
  return out;
}

inline std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_real(v[i]);
  }
  return s;
}

}  // namespace detail

inline void validate(const RunConfig& c) {
  c.problem.validate();
  if (c.M < 16) throw ConfigurationError("grid.M: at least 16 cells required");
  if (!is_mode(c.run.mode)) throw ConfigurationError("run.mode: unknown mode '" + c.run.mode + "'");
  for (double l : c.run.lambdas)
    if (!(l >= 0.0)) throw ConfigurationError("run.lambdas: lambda values must be >= 0");
  if (c.run.lambda_range) {
    const auto& r = *c.run.lambda_range;
    if (!(r.start >= 0.0) || !(r.stop >= r.start) || r.count < 1)
      throw ConfigurationError("run.lambda_range: expected start >= 0, stop >= start, count >= 1");
  }
  if (!(c.run.ds0 > 0.0)) throw ConfigurationError("run.ds0: must be > 0");
  if (c.run.max_steps < 1) throw ConfigurationError("run.max_steps: must be >= 1");
  if (c.run.lambda_stop && !(*c.run.lambda_stop >= 0.0))
    throw ConfigurationError("run.lambda_stop: must be >= 0");
}

inline RunConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigurationError(std::string("config: ") + e.what());
  }
  static const std::set<std::string> known{
      "problem.n",         "problem.R",          "problem.p",          "problem.H",
      "problem.eps0",      "problem.picard_tol", "problem.newton_tol", "problem.eig_tol",
      "problem.bisect_tol", "grid.M",            "run.mode",           "run.lambdas",
      "run.lambda_range",  "run.ds0",            "run.max_steps",      "run.lambda_stop",
      "output.branch_csv", "output.report_json", "output.svg",         "output.profile",
      "output.verbosity"};
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigurationError(section + ": key outside of a section");
    for (const auto& [key, value] : body) {
      const std::string path = section + "." + key;
      if (!known.count(path)) throw ConfigurationError(path + ": unknown key");
    }
  }
  auto get = [&](const std::string& path) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'))) return *v;
    return std::nullopt;
  };
  auto require = [&](const std::string& path) {
    auto v = get(path);
    if (!v) throw ConfigurationError(path + ": missing required key");
    return *v;
  };

  RunConfig c;
  c.problem.n = detail::parse_int(require("problem.n"), "problem.n");
  c.problem.R = detail::parse_real(require("problem.R"), "problem.R");
  c.problem.p = detail::parse_real(require("problem.p"), "problem.p");
  {
    const std::vector<double> coef = detail::parse_list(require("problem.H"), "problem.H");
    try {
      c.problem.H = CurvatureField(coef);
    } catch (const ConfigurationError& e) {
      throw ConfigurationError(std::string("problem.") + e.what());
    }
  }
  if (auto v = get("problem.eps0")) c.problem.eps0 = detail::parse_real(*v, "problem.eps0");
  if (auto v = get("problem.picard_tol")) c.problem.tol.picard = detail::parse_real(*v, "problem.picard_tol");
  if (auto v = get("problem.newton_tol")) c.problem.tol.newton = detail::parse_real(*v, "problem.newton_tol");
  if (auto v = get("problem.eig_tol")) c.problem.tol.eig = detail::parse_real(*v, "problem.eig_tol");
  if (auto v = get("problem.bisect_tol")) c.problem.tol.bisect = detail::parse_real(*v, "problem.bisect_tol");
  if (auto v = get("grid.M")) c.M = detail::parse_int(*v, "grid.M");
  if (auto v = get("run.mode")) c.run.mode = detail::trim(*v);
  if (auto v = get("run.lambdas")) c.run.lambdas = detail::parse_list(*v, "run.lambdas");
  if (auto v = get("run.lambda_range")) {
    const std::vector<double> r = detail::parse_list(*v, "run.lambda_range");
    if (r.size() != 3 || r[2] != std::floor(r[2]))
      throw ConfigurationError("run.lambda_range: expected 'start, stop, count'");
    c.run.lambda_range = LambdaRange{r[0], r[1], int(r[2])};
  }
  if (auto v = get("run.ds0")) c.run.ds0 = detail::parse_real(*v, "run.ds0");
  if (auto v = get("run.max_steps")) c.run.max_steps = detail::parse_int(*v, "run.max_steps");
  if (auto v = get("run.lambda_stop")) c.run.lambda_stop = detail::parse_real(*v, "run.lambda_stop");
  if (auto v = get("output.branch_csv")) c.output.branch_csv = detail::trim(*v);
  if (auto v = get("output.report_json")) c.output.report_json = detail::trim(*v);
  if (auto v = get("output.svg")) c.output.svg = detail::trim(*v);
  if (auto v = get("output.profile")) c.output.profile = detail::trim(*v);
  if (auto v = get("output.verbosity")) c.output.verbosity = detail::parse_int(*v, "output.verbosity");
  validate(c);
  return c;
}

inline std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  const auto& p = c.problem;
  os << "[problem]\n"
     << "n = " << p.n << "\n"
     << "R = " << format_real(p.R) << "\n"
     << "p = " << format_real(p.p) << "\n"
     << "H = " << detail::join(p.H.coefficients()) << "\n"
     << "eps0 = " << format_real(p.eps0) << "\n"
     << "picard_tol = " << format_real(p.tol.picard) << "\n"
     << "newton_tol = " << format_real(p.tol.newton) << "\n"
     << "eig_tol = " << format_real(p.tol.eig) << "\n"
     << "bisect_tol = " << format_real(p.tol.bisect) << "\n\n"
     << "[grid]\n"
     << "M = " << c.M << "\n\n"
     << "[run]\n"
     << "mode = " << c.run.mode << "\n";
  if (!c.run.lambdas.empty()) os << "lambdas = " << detail::join(c.run.lambdas) << "\n";
  if (c.run.lambda_range)
    os << "lambda_range = " << format_real(c.run.lambda_range->start) << ", "
       << format_real(c.run.lambda_range->stop) << ", " << c.run.lambda_range->count << "\n";
  os << "ds0 = " << format_real(c.run.ds0) << "\n"
     << "max_steps = " << c.run.max_steps << "\n";
  if (c.run.lambda_stop) os << "lambda_stop = " << format_real(*c.run.lambda_stop) << "\n";
  os << "\n[output]\n"
     << "branch_csv = " << c.output.branch_csv << "\n"
     << "report_json = " << c.output.report_json << "\n"
     << "svg = " << c.output.svg << "\n"
     << "profile = " << c.output.profile << "\n"
     << "verbosity = " << c.output.verbosity << "\n";
  return os.str();
}

}  // namespace pmc::io
