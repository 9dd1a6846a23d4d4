#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>

#include "pmc/continuation.hpp"
#include "pmc/errors.hpp"

namespace pmc::io {

namespace detail {

inline std::string fixed(double x, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

inline std::string tick_label(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

}  // namespace detail

// u(0) against lambda: lower segment solid, upper segment dashed, fold marked.
inline std::string bifurcation_svg(std::span<const BranchPoint> pts, const std::optional<FoldInfo>& fold) {
  if (pts.size() < 2) throw PreconditionError("emit_bifurcation_svg: at least two points required");
  for (const BranchPoint& p : pts)
    if (!std::isfinite(p.lambda) || !std::isfinite(p.u0)) throw NumericalError("emit_bifurcation_svg: non-finite point");

  constexpr double W = 640, Hh = 480, left = 70, right = 20, top = 20, bottom = 60;
  double lmin = pts[0].lambda, lmax = lmin, umin = pts[0].u0, umax = umin;
  for (const BranchPoint& p : pts) {
    lmin = std::min(lmin, p.lambda);
    lmax = std::max(lmax, p.lambda);
    umin = std::min(umin, p.u0);
    umax = std::max(umax, p.u0);
  }
  if (lmax == lmin) lmax = lmin + 1.0;
  if (umax == umin) umax = umin + 1.0;
  const double lpad = 0.05 * (lmax - lmin), upad = 0.05 * (umax - umin);
  lmin -= lpad;
  lmax += lpad;
  umin -= upad;
  umax += upad;
  auto X = [&](double l) { return left + (l - lmin) / (lmax - lmin) * (W - left - right); };
  auto Y = [&](double u) { return Hh - bottom - (u - umin) / (umax - umin) * (Hh - top - bottom); };

  const std::size_t split = fold ? std::size_t(std::clamp<int>(fold->crossing_index, 1, int(pts.size()))) : pts.size();
  auto polyline = [&](std::size_t a, std::size_t b, const char* cls, const char* extra) {
    std::string s = std::string("  <polyline class=\"") + cls + "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"" +
                    extra + " points=\"";
    for (std::size_t k = a; k < b; ++k) {
      if (k > a) s += ' ';
      s += detail::fixed(X(pts[k].lambda)) + "," + detail::fixed(Y(pts[k].u0));
    }
    return s + "\"/>\n";
  };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << Hh << "\" viewBox=\"0 0 " << W
     << ' ' << Hh << "\">\n"
     << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // axes and ticks
  os << "  <line x1=\"" << left << "\" y1=\"" << Hh - bottom << "\" x2=\"" << W - right << "\" y2=\"" << Hh - bottom
     << "\" stroke=\"black\"/>\n"
     << "  <line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << Hh - bottom
     << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double l = lmin + (lmax - lmin) * k / 4.0, u = umin + (umax - umin) * k / 4.0;
    os << "  <text x=\"" << detail::fixed(X(l)) << "\" y=\"" << Hh - bottom + 18
       << "\" font-size=\"11\" text-anchor=\"middle\">" << detail::tick_label(l) << "</text>\n"
       << "  <text x=\"" << left - 6 << "\" y=\"" << detail::fixed(Y(u) + 4)
       << "\" font-size=\"11\" text-anchor=\"end\">" << detail::tick_label(u) << "</text>\n";
  }
  os << "  <text x=\"" << (left + W - right) / 2 << "\" y=\"" << Hh - 15
     << "\" font-size=\"14\" text-anchor=\"middle\">\xce\xbb</text>\n"
     << "  <text x=\"18\" y=\"" << (top + Hh - bottom) / 2 << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
     << (top + Hh - bottom) / 2 << ")\">u(0)</text>\n";

  os << polyline(0, split, "lower", "");
  if (fold && split < pts.size()) {
    os << polyline(split - 1, pts.size(), "upper", " stroke-dasharray=\"6 4\"");
    const double uf = fold->u_fold.empty() ? pts[split - 1].u0 : fold->u_fold.front();
    os << "  <circle class=\"fold\" cx=\"" << detail::fixed(X(fold->lambda_fold)) << "\" cy=\"" << detail::fixed(Y(uf))
       << "\" r=\"4\" fill=\"red\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

inline void emit_bifurcation_svg(std::span<const BranchPoint> pts, const std::optional<FoldInfo>& fold,
                                 const std::string& path) {
  const std::string doc = bifurcation_svg(pts, fold);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os << doc;
  os.flush();
  if (!os) throw IoError("write failed: " + path);
}

}  // namespace pmc::io
