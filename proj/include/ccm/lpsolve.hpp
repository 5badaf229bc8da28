#pragma once

#include <string>
#include <vector>

#include "ccm/formulation.hpp"
#include "ccm/matrix.hpp"
#include "ccm/simplex.hpp"
#include "ccm/sysmodel.hpp"

namespace ccm {

enum class SolveStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

struct PrimalSolution {
  std::vector<double> x;  // per LP variable
  double objective = 0.0;
};

/// Row duals in the sensitivity convention (d objective / d rhs): duals of
/// Le rows are <= 0, Ge rows >= 0, equalities free. With the row orientations
/// used by the builders this makes the balance duals the nodal prices and the
/// flow-bound duals carry their conventional signs (lower bound >= 0, upper
/// bound <= 0) directly.
struct DualSolution {
  std::vector<double> row;  // per LP row
  Mat pi;                   // buses x (K+1); column 0 is the pre-contingency state
  Mat f_plus;               // lines x (K+1), lower-bound duals; NaN where absent
  Mat f_minus;              // lines x (K+1), upper-bound duals; NaN where absent
};

struct SolverOptions {
  double tol_feas = 1e-7;
  double tol_gap = 1e-6;  // relative
  bool parallel = false;  // OpenMP tableau kernel
};

struct SolveResult {
  SolveStatus status = SolveStatus::NumericalFailure;
  PrimalSolution primal;
  DualSolution dual;
  int iterations = 0;
  std::string diagnostics;
};

SolveResult solve(const LpInstance& lp, const SolverOptions& opts = {});

DualSolution extract_duals(const LpInstance& lp, const std::vector<double>& row_duals);

/// Named schedules recovered from the LP vector, with per-state line flows
/// in MW (NaN for a line outaged in a state).
struct Schedules {
  std::vector<double> g0, r_g_up, r_g_dn;
  Mat g_k;  // gens x K
  std::vector<double> d0, r_d_up, r_d_dn;
  Mat d_k;    // loads x K
  Mat theta;  // buses x (K+1)
  Mat flow;   // lines x (K+1)
};

Schedules extract_schedules(const System& system, const LpInstance& lp,
                            const std::vector<double>& x);

struct KktTolerances {
  double feas = 1e-7;
  double stationarity = 1e-6;
  double cs = 1e-6;
  double gap_rel = 1e-6;
  double dual_sign = 1e-9;
  double balance_sign = 1e-9;  // single-bus post-contingency duals >= -this
};

struct OptimalityReport {
  double duality_gap = 0.0;
  double max_primal_infeasibility = 0.0;
  double max_stationarity_residual = 0.0;
  double max_slackness_violation = 0.0;
  double max_sign_violation = 0.0;
  double max_flow_dual_product = 0.0;
  double max_post_balance_negativity = 0.0;  // single-bus only
  bool pass = false;
  std::vector<std::string> failures;
};

OptimalityReport check_kkt(const LpInstance& lp, const PrimalSolution& primal,
                           const DualSolution& dual, const KktTolerances& tol = {});

/// Primal objective minus the dual objective b^T y; ~0 at a certified optimum.
double duality_gap(const LpInstance& lp, const PrimalSolution& primal,
                   const DualSolution& dual);

}  // namespace ccm
