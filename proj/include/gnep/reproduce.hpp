#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gnep/cga.hpp"
#include "gnep/instances.hpp"
#include "gnep/io.hpp"
#include "gnep/pricetaking.hpp"

namespace gnep {

/// One computed quantity diffed against an expectation entry.
struct Comparison {
  std::string quantity;
  std::vector<double> computed;
  std::vector<double> expected;
  double tolerance = 0.0;
  /// "abs" (componentwise |c - e| <= tol), "max" (c <= e), "flag" (c == e).
  std::string rule = "abs";
  Provenance provenance = Provenance::published;
  std::string citation;
  bool pass = false;
  double worst = 0.0;  // largest componentwise deviation
  /// Reported but excluded from the verdict (non-unique optimal allocations).
  bool informational = false;
};

Comparison compare_abs(const std::string& quantity, std::vector<double> computed, const Expectation& e);
Comparison compare_at_most(const std::string& quantity, double computed, const Expectation& e);
Comparison compare_flag(const std::string& quantity, bool computed, bool expected, const std::string& citation);

struct ReproduceOptions {
  RunOptions run;
  /// Dual cutting-plane stopping gap for the gas case.
  double dual_tol = 1e-4;
  int dual_max_iter = 2000;
  bool parallel = true;
};

struct Reproduction {
  std::string name;
  std::vector<Comparison> comparisons;
  std::optional<SolveReport> report;  // cournot, uc
  std::optional<PrimalResult> primal;  // gas
  std::optional<DualResult> dual;      // gas
  double dual_at_published = 0.0;     // gas
  double seconds = 0.0;
  bool pass() const;
};

Reproduction reproduce_cournot(const ReproduceOptions& options = {});
Reproduction reproduce_uc(const ReproduceOptions& options = {});
Reproduction reproduce_gas(const ReproduceOptions& options = {});
/// Throws std::invalid_argument for an unknown name.
Reproduction reproduce(const std::string& name, const ReproduceOptions& options = {});

Json reproduction_to_json(const Reproduction& r);

}  // namespace gnep
