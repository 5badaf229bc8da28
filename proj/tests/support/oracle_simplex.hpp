#pragma once

#include <vector>

#include "ccm/formulation.hpp"

namespace ccm::testing {

enum class OracleStatus { Optimal, Infeasible, Unbounded, Stalled };

struct OracleResult {
  OracleStatus status = OracleStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
};

struct OracleRow {
  std::vector<double> a;  // dense coefficients
  char sense = '=';       // '=', '<', '>'
  double b = 0.0;
};

/// Textbook Big-M tableau simplex used only as a cross-check. Kept
/// deliberately independent of the production kernel: dense rows, a single
/// Big-M phase, Dantzig pricing with reduced costs recomputed from scratch
/// every iteration.
OracleResult oracle_solve_min(std::vector<double> cost, std::vector<bool> is_free,
                              std::vector<OracleRow> rows);

/// Bridge from the tagged LP form.
OracleResult oracle_solve(const LpInstance& lp);

}  // namespace ccm::testing
