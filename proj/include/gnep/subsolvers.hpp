#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gnep/active_set.hpp"
#include "gnep/feasible_set.hpp"

namespace gnep {

enum class Optimize { minimize, maximize };

struct DenseLinearProgram {
  Optimize sense = Optimize::minimize;
  Eigen::VectorXd objective;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  Eigen::MatrixXd rows;
  Eigen::VectorXd rhs;
  std::vector<Sense> senses;

  int num_vars() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rhs.size()); }
  /// Empty program over n variables with infinite bounds.
  static DenseLinearProgram with_vars(int n, Optimize sense = Optimize::minimize);
  void add_row(const Eigen::VectorXd& coefs, Sense sense, double rhs);
  void validate() const;
};

/// Convex quadratic program. The constructor checks symmetry and that the
/// smallest eigenvalue is >= -1e-10 * max|H|.
class DenseConvexQP {
 public:
  DenseConvexQP(Eigen::MatrixXd hessian, Eigen::VectorXd linear, Eigen::VectorXd lower, Eigen::VectorXd upper,
                Eigen::MatrixXd rows = {}, Eigen::VectorXd rhs = {}, std::vector<Sense> senses = {});

  const QpProblem& problem() const { return problem_; }

 private:
  QpProblem problem_;
};

/// Outcome of solve_lp / solve_qp. `value` is in the caller's sense (a
/// maximum for maximization LPs); duals and the certificate refer to the
/// equivalent minimization.
struct SubsolverResult {
  SolveStatus status = SolveStatus::failed;
  Eigen::VectorXd x;
  Eigen::VectorXd row_duals;
  Eigen::VectorXd ray;
  double value = 0.0;
  Certificate certificate;
  int iterations = 0;
  std::string message;
};

SubsolverResult solve_lp(const DenseLinearProgram& lp, double tol = 1e-9, const Eigen::VectorXd* start = nullptr);
SubsolverResult solve_qp(const DenseConvexQP& qp, double tol = 1e-9, const Eigen::VectorXd* start = nullptr);

/// Plain-text tableau dump of an LP/QP (format described in docs/formats.md).
std::string dump_tableau(const QpProblem& problem);
/// Inverse of dump_tableau. Throws std::invalid_argument on malformed input.
QpProblem parse_tableau(const std::string& text);

struct EnumerationOptions {
  std::uint64_t cap = 1000000;
  /// Lower bound on any completion of a prefix assignment (first `depth`
  /// variables fixed). Subtrees whose bound exceeds the incumbent are skipped.
  std::function<double(std::span<const double> prefix, int depth)> prune_bound;
};

struct EnumerationResult {
  SolveStatus status = SolveStatus::failed;
  std::vector<double> assignment;
  double value = 0.0;
  std::uint64_t visited = 0;
  std::string message;
};

/// Exact minimum of `objective` over the integer lattice of `set` (all
/// variables must be integral) intersected with its constraints, evaluated
/// with shared block `shared`. Ties go to the lexicographically smallest
/// assignment.
EnumerationResult enumerate_assignments(const FeasibleSet& set, std::span<const double> shared,
                                        const std::function<double(std::span<const double>)>& objective,
                                        const EnumerationOptions& options = {});

/// Number of lattice points in the box of the integral variables; saturates
/// at UINT64_MAX.
std::uint64_t lattice_size(std::span<const double> lower, std::span<const double> upper);

}  // namespace gnep
