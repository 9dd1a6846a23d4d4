#pragma once

#include <cmath>
#include <fstream>
#include <ostream>
#include <span>
#include <string>

#include "pmc/cli_io/config.hpp"
#include "pmc/continuation.hpp"
#include "pmc/errors.hpp"

namespace pmc::io {

inline constexpr const char* branch_csv_header = "index,lambda,u0,sup_ur,mu1,bv_norm,residual,arclength,stable";

inline char stability_flag(double mu1, double eig_tol) {
  if (mu1 > eig_tol) return '1';
  if (mu1 < -eig_tol) return '0';
  return '?';
}

inline void write_branch_csv(std::ostream& os, std::span<const BranchPoint> pts, double eig_tol) {
  if (pts.empty()) throw PreconditionError("emit_branch_csv: empty branch");
  os << branch_csv_header << '\n';
  for (const BranchPoint& p : pts) {
    os << p.index << ',' << format_real(p.lambda) << ',' << format_real(p.u0) << ',' << format_real(p.sup_ur) << ','
       << format_real(p.mu1) << ',' << format_real(p.bv_norm) << ',' << format_real(p.residual) << ','
       << format_real(p.arclength) << ',' << stability_flag(p.mu1, eig_tol) << '\n';
  }
}

inline void emit_branch_csv(std::span<const BranchPoint> pts, const std::string& path, double eig_tol) {
  if (pts.empty()) throw PreconditionError("emit_branch_csv: empty branch");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  write_branch_csv(os, pts, eig_tol);
  os.flush();
  if (!os) throw IoError("write failed: " + path);
}

}  // namespace pmc::io
