#include "ccm/lpsolve.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace ccm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

lp::KernelLp lower_to_kernel(const LpInstance& lpi) {
  lp::KernelLp k;
  k.n_cols = lpi.n_vars();
  k.cost.resize(k.n_cols);
  k.is_free.assign(k.n_cols, 0);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<lp::KernelRow> bound_rows;
  for (int j = 0; j < k.n_cols; ++j) {
    const auto& v = lpi.variables[j];
    k.cost[j] = v.cost;
    if (v.lb == 0.0 && v.ub == inf) continue;
    if (v.lb == -inf && v.ub == inf) {
      k.is_free[j] = 1;
      continue;
    }
    // General bounds are not produced by the builders; lower them into rows.
    if (v.lb == -inf || v.lb < 0.0)
      k.is_free[j] = 1;
    if (v.lb != 0.0 && v.lb != -inf)
      bound_rows.push_back({{{j, 1.0}}, lp::RowSense::Ge, v.lb});
    if (v.ub != inf)
      bound_rows.push_back({{{j, 1.0}}, lp::RowSense::Le, v.ub});
  }
  k.rows.reserve(lpi.n_rows() + bound_rows.size());
  for (const auto& c : lpi.constraints) {
    lp::RowSense s = c.sense == Sense::Eq   ? lp::RowSense::Eq
                     : c.sense == Sense::Le ? lp::RowSense::Le
                                            : lp::RowSense::Ge;
    k.rows.push_back({c.coeffs, s, c.rhs});
  }
  for (auto& r : bound_rows) k.rows.push_back(std::move(r));
  return k;
}

}  // namespace

DualSolution extract_duals(const LpInstance& lp, const std::vector<double>& row_duals) {
  DualSolution d;
  d.row = row_duals;
  const auto& sh = lp.shape;
  const int ns = sh.n_contingencies + 1;
  d.pi = Mat(sh.n_buses, ns);
  for (int b = 0; b < sh.n_buses; ++b) {
    int r = lp.row_of({TagKind::PreBalance, b, kPreState});
    d.pi(b, 0) = r >= 0 ? row_duals[r] : 0.0;
    for (int k = 1; k < ns; ++k) {
      r = lp.row_of({TagKind::PostBalance, b, k});
      d.pi(b, k) = r >= 0 ? row_duals[r] : 0.0;
    }
  }
  d.f_plus = Mat(sh.n_lines, ns, kNaN);
  d.f_minus = Mat(sh.n_lines, ns, kNaN);
  for (int l = 0; l < sh.n_lines; ++l) {
    for (int s = 0; s < ns; ++s) {
      int rlo = lp.row_of({TagKind::FlowLower, l, s});
      int rup = lp.row_of({TagKind::FlowUpper, l, s});
      if (rlo >= 0) d.f_plus(l, s) = row_duals[rlo];
      if (rup >= 0) d.f_minus(l, s) = row_duals[rup];
    }
  }
  return d;
}

SolveResult solve(const LpInstance& lpi, const SolverOptions& opts) {
  lp::KernelOptions kopts;
  kopts.parallel = opts.parallel;
  kopts.tol_feas = opts.tol_feas;
  const lp::KernelLp klp = lower_to_kernel(lpi);
  lp::KernelResult kr = lp::simplex_solve(klp, kopts);

  SolveResult res;
  res.iterations = kr.iterations;
  switch (kr.status) {
    case lp::KernelStatus::Optimal:
      res.status = SolveStatus::Optimal;
      break;
    case lp::KernelStatus::Infeasible:
      res.status = SolveStatus::Infeasible;
      res.diagnostics = "no feasible point: " + kr.note;
      return res;
    case lp::KernelStatus::Unbounded:
      res.status = SolveStatus::Unbounded;
      res.diagnostics = kr.note;
      return res;
    case lp::KernelStatus::IterLimit:
      res.status = SolveStatus::NumericalFailure;
      res.diagnostics = kr.note;
      return res;
  }

  res.primal.x = kr.x;
  res.primal.objective = kr.objective;
  std::vector<double> row_duals(kr.y.begin(), kr.y.begin() + lpi.n_rows());
  res.dual = extract_duals(lpi, row_duals);

  // Certify the result on the original data; a clean vertex should sit far
  // inside these tolerances.
  KktTolerances tol;
  tol.feas = opts.tol_feas;
  tol.gap_rel = opts.tol_gap;
  tol.stationarity = 1e-6;
  OptimalityReport rep = check_kkt(lpi, res.primal, res.dual, tol);
  if (!rep.pass) {
    res.status = SolveStatus::NumericalFailure;
    std::ostringstream os;
    os << "optimality certificate failed:";
    for (const auto& f : rep.failures) os << " [" << f << "]";
    res.diagnostics = os.str();
  }
  return res;
}

Schedules extract_schedules(const System& system, const LpInstance& lp,
                            const std::vector<double>& x) {
  Schedules s;
  const auto& sh = lp.shape;
  const int nk = sh.n_contingencies;

  auto var_value = [&](VarRole role, int e, int st) {
    const int j = lp.var_of(role, e, st);
    return j >= 0 ? x[j] : 0.0;
  };

  for (int i = 0; i < sh.n_gens; ++i) {
    s.g0.push_back(var_value(VarRole::GenPower0, i, kPreState));
    s.r_g_up.push_back(var_value(VarRole::GenResUp, i, -1));
    s.r_g_dn.push_back(var_value(VarRole::GenResDn, i, -1));
  }
  s.g_k = Mat(sh.n_gens, nk);
  for (int k = 1; k <= nk; ++k)
    for (int i = 0; i < sh.n_gens; ++i)
      s.g_k(i, k - 1) = var_value(VarRole::GenPowerK, i, k);

  for (int j = 0; j < sh.n_loads; ++j) {
    const auto& ld = system.loads()[j];
    if (ld.fixed_demand) {
      s.d0.push_back(*ld.fixed_demand);
      s.r_d_up.push_back(0.0);
      s.r_d_dn.push_back(0.0);
    } else {
      s.d0.push_back(var_value(VarRole::DemPower0, j, kPreState));
      s.r_d_up.push_back(var_value(VarRole::DemResUp, j, -1));
      s.r_d_dn.push_back(var_value(VarRole::DemResDn, j, -1));
    }
  }
  s.d_k = Mat(sh.n_loads, nk);
  for (int k = 1; k <= nk; ++k)
    for (int j = 0; j < sh.n_loads; ++j) {
      const auto& ld = system.loads()[j];
      s.d_k(j, k - 1) =
          ld.fixed_demand ? *ld.fixed_demand : var_value(VarRole::DemPowerK, j, k);
    }

  s.theta = Mat(sh.n_buses, nk + 1);
  s.flow = Mat(sh.n_lines, nk + 1);
  if (sh.kind == ModelKind::Network) {
    for (int st = 0; st <= nk; ++st)
      for (int b = 0; b < sh.n_buses; ++b)
        s.theta(b, st) = var_value(VarRole::Angle, b, st);
    const double base = system.base_mva();
    for (int st = 0; st <= nk; ++st) {
      std::vector<int> on(system.n_lines(), 1);
      if (st > 0)
        for (int l : system.outaged_lines(st - 1)) on[l] = 0;
      for (int l = 0; l < sh.n_lines; ++l) {
        if (!on[l]) continue;  // an outaged line carries no flow; keep 0
        const double sus = 1.0 / system.lines()[l].reactance;
        s.flow(l, st) = base * sus *
                        (s.theta(system.line_from(l), st) - s.theta(system.line_to(l), st));
      }
    }
  }
  return s;
}

double duality_gap(const LpInstance& lp, const PrimalSolution& primal,
                   const DualSolution& dual) {
  double dual_obj = 0.0;
  for (int i = 0; i < lp.n_rows(); ++i) dual_obj += dual.row[i] * lp.constraints[i].rhs;
  return primal.objective - dual_obj;
}

OptimalityReport check_kkt(const LpInstance& lp, const PrimalSolution& primal,
                           const DualSolution& dual, const KktTolerances& tol) {
  OptimalityReport rep;
  const auto& x = primal.x;
  const auto& y = dual.row;

  // Primal feasibility: variable bounds and row residuals.
  for (int j = 0; j < lp.n_vars(); ++j) {
    const auto& v = lp.variables[j];
    if (x[j] < v.lb)
      rep.max_primal_infeasibility = std::max(rep.max_primal_infeasibility, v.lb - x[j]);
    if (x[j] > v.ub)
      rep.max_primal_infeasibility = std::max(rep.max_primal_infeasibility, x[j] - v.ub);
  }
  std::vector<double> slack(lp.n_rows(), 0.0);
  for (int i = 0; i < lp.n_rows(); ++i) {
    const auto& c = lp.constraints[i];
    const double act = lp.row_activity(i, x);
    double infeas = 0.0;
    switch (c.sense) {
      case Sense::Eq:
        infeas = std::abs(act - c.rhs);
        slack[i] = 0.0;
        break;
      case Sense::Le:
        infeas = std::max(0.0, act - c.rhs);
        slack[i] = c.rhs - act;
        break;
      case Sense::Ge:
        infeas = std::max(0.0, c.rhs - act);
        slack[i] = act - c.rhs;
        break;
    }
    rep.max_primal_infeasibility = std::max(rep.max_primal_infeasibility, infeas);
  }

  // Dual sign feasibility.
  for (int i = 0; i < lp.n_rows(); ++i) {
    const auto& c = lp.constraints[i];
    double viol = 0.0;
    if (c.sense == Sense::Le) viol = std::max(0.0, y[i]);
    if (c.sense == Sense::Ge) viol = std::max(0.0, -y[i]);
    rep.max_sign_violation = std::max(rep.max_sign_violation, viol);
  }

  // Stationarity: reduced cost c_j - sum_i y_i a_ij must vanish for free
  // variables and be >= 0 for x_j >= 0, with x_j * r_j ~ 0.
  std::vector<double> reduced(lp.n_vars());
  for (int j = 0; j < lp.n_vars(); ++j) reduced[j] = lp.variables[j].cost;
  for (int i = 0; i < lp.n_rows(); ++i)
    for (const auto& [j, a] : lp.constraints[i].coeffs) reduced[j] -= y[i] * a;
  for (int j = 0; j < lp.n_vars(); ++j) {
    const auto& v = lp.variables[j];
    const bool is_free = std::isinf(v.lb);
    if (is_free) {
      rep.max_stationarity_residual =
          std::max(rep.max_stationarity_residual, std::abs(reduced[j]));
    } else {
      rep.max_stationarity_residual =
          std::max(rep.max_stationarity_residual, std::max(0.0, -reduced[j]));
      const double cs = std::abs(x[j] * reduced[j]) / (1.0 + std::abs(x[j]));
      rep.max_slackness_violation = std::max(rep.max_slackness_violation, cs);
    }
  }

  // Row complementary slackness.
  for (int i = 0; i < lp.n_rows(); ++i) {
    if (lp.constraints[i].sense == Sense::Eq) continue;
    const double cs =
        std::abs(y[i] * slack[i]) / (1.0 + std::abs(lp.constraints[i].rhs));
    rep.max_slackness_violation = std::max(rep.max_slackness_violation, cs);
  }

  // Flow-bound dual products (network) and post-contingency balance dual
  // signs (single-bus).
  if (lp.shape.kind == ModelKind::Network) {
    for (int l = 0; l < dual.f_plus.rows(); ++l)
      for (int s = 0; s < dual.f_plus.cols(); ++s) {
        const double p = dual.f_plus(l, s), q = dual.f_minus(l, s);
        if (std::isnan(p) || std::isnan(q)) continue;
        rep.max_flow_dual_product = std::max(rep.max_flow_dual_product, std::abs(p * q));
      }
  } else {
    for (int k = 1; k < dual.pi.cols(); ++k)
      rep.max_post_balance_negativity =
          std::max(rep.max_post_balance_negativity, -dual.pi(0, k));
  }

  rep.duality_gap = duality_gap(lp, primal, dual);
  const double gap_tol = tol.gap_rel * (1.0 + std::abs(primal.objective));

  auto fail = [&](bool bad, const std::string& what) {
    if (bad) rep.failures.push_back(what);
  };
  fail(rep.max_primal_infeasibility > tol.feas,
       "primal infeasibility " + std::to_string(rep.max_primal_infeasibility));
  fail(rep.max_sign_violation > tol.dual_sign,
       "dual sign violation " + std::to_string(rep.max_sign_violation));
  fail(rep.max_stationarity_residual > tol.stationarity,
       "stationarity residual " + std::to_string(rep.max_stationarity_residual));
  fail(rep.max_slackness_violation > tol.cs,
       "complementary slackness " + std::to_string(rep.max_slackness_violation));
  fail(std::abs(rep.duality_gap) > gap_tol,
       "duality gap " + std::to_string(rep.duality_gap));
  fail(rep.max_flow_dual_product > tol.cs,
       "flow dual product " + std::to_string(rep.max_flow_dual_product));
  fail(lp.shape.kind == ModelKind::SingleBus &&
           rep.max_post_balance_negativity > tol.balance_sign,
       "negative post-contingency balance dual " +
           std::to_string(rep.max_post_balance_negativity));
  rep.pass = rep.failures.empty();
  return rep;
}

}  // namespace ccm
