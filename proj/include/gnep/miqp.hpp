#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gnep/active_set.hpp"

namespace gnep {

/// Convex-in-the-continuous-part MIQP: `relaxation` with the variables
/// flagged in `integral` restricted to integers (finite bounds required).
struct MixedIntegerQp {
  QpProblem relaxation;
  std::vector<bool> integral;
};

struct MiqpOptions {
  double tol = 1e-9;
  std::uint64_t cap = 1000000;
  bool parallel = true;
};

struct MiqpResult {
  SolveStatus status = SolveStatus::failed;
  Eigen::VectorXd x;
  double objective = 0.0;
  Certificate certificate;  // of the continuous solve at the winning assignment
  std::uint64_t assignments = 0;
  std::string message;
};

/// Enumerates every integer assignment and solves the remaining convex QP.
/// Exact when each continuous subproblem is convex; a subproblem with
/// negative curvature makes the whole solve `failed`. Ties go to the
/// lexicographically smallest assignment, independent of thread count.
MiqpResult solve_miqp(const MixedIntegerQp& problem, const MiqpOptions& options = {});

}  // namespace gnep
