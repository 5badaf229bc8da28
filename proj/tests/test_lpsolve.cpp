#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "ccm/lpsolve.hpp"
#include "ccm/synth.hpp"
#include "support/oracle_simplex.hpp"
#include "support/sample_cases.hpp"

using namespace ccm;
using testing::single_bus_case;
using testing::two_bus_case;

namespace {

constexpr double kTol = 1e-4;

LpInstance permute_vars(const LpInstance& lp, const std::vector<int>& perm) {
  LpInstance out;
  out.shape = lp.shape;
  std::vector<int> inv(lp.n_vars());
  for (int jn = 0; jn < lp.n_vars(); ++jn) {
    out.add_variable(lp.variables[perm[jn]]);
    inv[perm[jn]] = jn;
  }
  for (const auto& c : lp.constraints) {
    Constraint cc = c;
    for (auto& [j, a] : cc.coeffs) j = inv[j];
    out.add_constraint(std::move(cc));
  }
  return out;
}

}  // namespace

TEST_CASE("single-bus case solves to the known optimum") {
  const System sys = System::validate(single_bus_case());
  const LpInstance lp = build_single_bus_lp(sys);
  const SolveResult r = solve(lp);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.primal.objective == doctest::Approx(5800.0).epsilon(1e-9));

  const Schedules s = extract_schedules(sys, lp, r.primal.x);
  CHECK(s.g0[0] == doctest::Approx(65.0).epsilon(kTol));
  CHECK(s.g0[1] == doctest::Approx(30.0).epsilon(kTol));
  CHECK(s.g0[2] == doctest::Approx(25.0).epsilon(kTol));
  CHECK(s.r_g_up[0] == doctest::Approx(0.0).scale(1).epsilon(kTol));
  CHECK(s.r_g_up[1] == doctest::Approx(30.0).epsilon(kTol));
  CHECK(s.r_g_up[2] == doctest::Approx(35.0).epsilon(kTol));

  CHECK(r.dual.pi(0, 0) == doctest::Approx(20.0).epsilon(kTol));
  CHECK(r.dual.pi(0, 1) == doctest::Approx(80.0).epsilon(kTol));
  CHECK(r.dual.pi(0, 2) == doctest::Approx(0.0).scale(1).epsilon(kTol));
  CHECK(r.dual.pi(0, 3) == doctest::Approx(0.0).scale(1).epsilon(kTol));

  const OptimalityReport rep = check_kkt(lp, r.primal, r.dual);
  CHECK(rep.pass);
  CHECK(rep.max_post_balance_negativity <= 1e-9);
}

TEST_CASE("two-bus case solves to the known optimum") {
  const System sys = System::validate(two_bus_case());
  const LpInstance lp = build_network_lp(sys);
  const SolveResult r = solve(lp);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.primal.objective == doctest::Approx(-15475.0).epsilon(1e-9));

  const Schedules s = extract_schedules(sys, lp, r.primal.x);
  // Pre-contingency dispatch and reserves.
  CHECK(s.g0[0] == doctest::Approx(75.0).epsilon(kTol));
  CHECK(s.g0[1] == doctest::Approx(30.0).epsilon(kTol));
  CHECK(s.g0[2] == doctest::Approx(15.0).epsilon(kTol));
  CHECK(s.r_g_up[0] == doctest::Approx(0.0).scale(1).epsilon(kTol));
  CHECK(s.r_g_up[1] == doctest::Approx(30.0).epsilon(kTol));
  CHECK(s.r_g_up[2] == doctest::Approx(35.0).epsilon(kTol));
  CHECK(s.r_g_dn[1] == doctest::Approx(5.0).epsilon(kTol));
  CHECK(s.d0[0] == doctest::Approx(80.0).epsilon(kTol));
  CHECK(s.d0[1] == doctest::Approx(40.0).epsilon(kTol));
  CHECK(s.r_d_up[0] == doctest::Approx(10.0).epsilon(kTol));

  // Uniquely determined post-contingency columns: the generator-1 outage
  // (binding everywhere) and the line outage (islanded).
  CHECK(s.g_k(0, 0) == doctest::Approx(0.0).scale(1).epsilon(kTol));
  CHECK(s.g_k(1, 0) == doctest::Approx(60.0).epsilon(kTol));
  CHECK(s.g_k(2, 0) == doctest::Approx(50.0).epsilon(kTol));
  CHECK(s.d_k(0, 0) == doctest::Approx(70.0).epsilon(kTol));
  CHECK(s.d_k(1, 0) == doctest::Approx(40.0).epsilon(kTol));
  CHECK(s.g_k(0, 3) == doctest::Approx(75.0).epsilon(kTol));
  CHECK(s.g_k(1, 3) == doctest::Approx(25.0).epsilon(kTol));
  CHECK(s.g_k(2, 3) == doctest::Approx(15.0).epsilon(kTol));
  CHECK(s.d_k(0, 3) == doctest::Approx(75.0).epsilon(kTol));
  CHECK(s.d_k(1, 3) == doctest::Approx(40.0).epsilon(kTol));

  CHECK(s.flow(0, 0) == doctest::Approx(-5.0).epsilon(kTol));
  CHECK(s.flow(0, 1) == doctest::Approx(-70.0).epsilon(kTol));
  CHECK(s.flow(0, 4) == 0.0);

  // Balance duals per bus and state.
  const double want1[5] = {20, 180, 0, 0, 0};
  const double want2[5] = {20, 85, 0, 0, -5};
  for (int st = 0; st < 5; ++st) {
    CHECK(r.dual.pi(0, st) == doctest::Approx(want1[st]).scale(1).epsilon(kTol));
    CHECK(r.dual.pi(1, st) == doctest::Approx(want2[st]).scale(1).epsilon(kTol));
  }
  // Congestion only under the generator-1 outage; the lower flow bound binds.
  CHECK(r.dual.f_plus(0, 1) == doctest::Approx(95.0).epsilon(kTol));
  CHECK(r.dual.f_minus(0, 1) == doctest::Approx(0.0).scale(1).epsilon(kTol));
  CHECK(r.dual.f_plus(0, 0) == doctest::Approx(0.0).scale(1).epsilon(kTol));
  CHECK(std::isnan(r.dual.f_plus(0, 4)));

  CHECK(check_kkt(lp, r.primal, r.dual).pass);
}

TEST_CASE("unbounded objectives are reported") {
  LpInstance lp;
  lp.shape = {ModelKind::SingleBus, 1, 1, 0, 0, 0};
  lp.add_variable({"x", VarRole::GenPower0, 0, kPreState, 0.0,
                   std::numeric_limits<double>::infinity(), -1.0});
  lp.add_variable({"y", VarRole::GenResUp, 0, -1, 0.0,
                   std::numeric_limits<double>::infinity(), 0.0});
  lp.add_constraint({{TagKind::GenResUpCap, 0, -1}, Sense::Le, {{1, 1.0}}, 5.0});
  const SolveResult r = solve(lp);
  CHECK(r.status == SolveStatus::Unbounded);
}

TEST_CASE("capacity shortfall is infeasible") {
  MarketSystem s = single_bus_case();
  s.generators[0].g_max = 2.0;
  s.generators[1].g_max = 2.0;
  s.generators[2].g_max = 1.0;
  s.loads[0].fixed_demand = 10.0;
  s.contingencies.clear();
  const SolveResult r = solve(build_single_bus_lp(System::validate(s)));
  CHECK(r.status == SolveStatus::Infeasible);
}

TEST_CASE("perturbed dual fails the stationarity check") {
  const System sys = System::validate(single_bus_case());
  const LpInstance lp = build_single_bus_lp(sys);
  const SolveResult r = solve(lp);
  REQUIRE(r.status == SolveStatus::Optimal);

  DualSolution bad = r.dual;
  const int row = lp.row_of({TagKind::PreBalance, 0, kPreState});
  bad.row[row] += 1.0;  // pi0: 20 -> 21
  bad.pi(0, 0) += 1.0;
  const OptimalityReport rep = check_kkt(lp, r.primal, bad);
  CHECK_FALSE(rep.pass);
  CHECK(rep.max_stationarity_residual > 0.5);
}

TEST_CASE("duality gap: zero at optimum, positive at a suboptimal point") {
  const System sys = System::validate(single_bus_case());
  const LpInstance lp = build_single_bus_lp(sys);
  const SolveResult opt = solve(lp);
  REQUIRE(opt.status == SolveStatus::Optimal);
  CHECK(std::abs(duality_gap(lp, opt.primal, opt.dual)) <= 1e-6);

  // A feasible but suboptimal point: re-solve with generator 1 priced out.
  // Offers do not enter the constraints, so that optimum is feasible here
  // and strictly costlier under the original objective.
  MarketSystem repriced = single_bus_case();
  repriced.generators[0].energy_offer = 200.0;
  const SolveResult sub = solve(build_single_bus_lp(System::validate(repriced)));
  REQUIRE(sub.status == SolveStatus::Optimal);
  PrimalSolution feas = sub.primal;
  feas.objective = lp.objective_value(feas.x);
  CHECK(duality_gap(lp, feas, opt.dual) > 1.0);
}

TEST_CASE("two-bus duality gap vanishes at optimum") {
  const LpInstance lp = build_network_lp(System::validate(two_bus_case()));
  const SolveResult r = solve(lp);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(std::abs(duality_gap(lp, r.primal, r.dual)) <= 1e-6);
}

TEST_CASE("single-bus balance duals agree with finite differences") {
  // The fixed demand enters every state's balance, so the sensitivity of the
  // optimal cost to demand is the sum of all balance duals.
  auto cost_at = [](double demand) {
    MarketSystem s = single_bus_case();
    s.loads[0].fixed_demand = demand;
    const SolveResult r = solve(build_single_bus_lp(System::validate(s)));
    REQUIRE(r.status == SolveStatus::Optimal);
    return r.primal.objective;
  };
  const SolveResult r = solve(build_single_bus_lp(System::validate(single_bus_case())));
  double dual_sum = 0.0;
  for (int st = 0; st < 4; ++st) dual_sum += r.dual.pi(0, st);
  const double right = (cost_at(120.5) - cost_at(120.0)) / 0.5;
  const double left = (cost_at(120.0) - cost_at(119.5)) / 0.5;
  CHECK(dual_sum >= left - 1e-6);
  CHECK(dual_sum <= right + 1e-6);
  CHECK(dual_sum == doctest::Approx(100.0).epsilon(kTol));
}

TEST_CASE("random instances: solver matches the independent oracle") {
  std::mt19937_64 rng(2025);
  int solved = 0;
  while (solved < 40) {
    const System sys = System::validate(random_system(rng));
    const LpInstance lp = build_network_lp(sys);
    const SolveResult r = solve(lp);
    REQUIRE(r.status == SolveStatus::Optimal);  // elastic demand: always feasible
    const auto oracle = testing::oracle_solve(lp);
    REQUIRE(oracle.status == testing::OracleStatus::Optimal);
    CHECK(r.primal.objective ==
          doctest::Approx(oracle.objective).epsilon(1e-6).scale(1.0));
    CHECK(check_kkt(lp, r.primal, r.dual).pass);
    ++solved;
  }
}

TEST_CASE("random single-bus instances match the oracle when feasible") {
  std::mt19937_64 rng(77);
  SynthOptions opts;
  opts.single_bus = true;
  int solved = 0, attempts = 0;
  while (solved < 25 && attempts < 400) {
    ++attempts;
    const System sys = System::validate(random_system(rng, opts));
    const LpInstance lp = build_single_bus_lp(sys);
    const SolveResult r = solve(lp);
    if (r.status != SolveStatus::Optimal) continue;
    const auto oracle = testing::oracle_solve(lp);
    REQUIRE(oracle.status == testing::OracleStatus::Optimal);
    CHECK(r.primal.objective ==
          doctest::Approx(oracle.objective).epsilon(1e-6).scale(1.0));
    const OptimalityReport rep = check_kkt(lp, r.primal, r.dual);
    CHECK(rep.pass);
    ++solved;
  }
  CHECK(solved == 25);
}

TEST_CASE("re-solve with permuted variables certifies both ways") {
  const System sys = System::validate(two_bus_case());
  const LpInstance lp = build_network_lp(sys);
  const SolveResult a = solve(lp);
  REQUIRE(a.status == SolveStatus::Optimal);

  std::vector<int> perm(lp.n_vars());
  for (int j = 0; j < lp.n_vars(); ++j) perm[j] = j;
  std::mt19937_64 rng(5);
  std::shuffle(perm.begin(), perm.end(), rng);
  const LpInstance plp = permute_vars(lp, perm);
  const SolveResult b = solve(plp);
  REQUIRE(b.status == SolveStatus::Optimal);
  CHECK(a.primal.objective == doctest::Approx(b.primal.objective).epsilon(1e-9));

  // Row order is unchanged, so the permuted solve's duals certify the
  // original primal as well.
  DualSolution crossed = a.dual;
  crossed.row = b.dual.row;
  crossed.pi = b.dual.pi;
  crossed.f_plus = b.dual.f_plus;
  crossed.f_minus = b.dual.f_minus;
  CHECK(check_kkt(lp, a.primal, crossed).pass);
}

TEST_CASE("re-solving is reproducible") {
  const LpInstance lp = build_network_lp(System::validate(two_bus_case()));
  const SolveResult a = solve(lp);
  const SolveResult b = solve(lp);
  CHECK(a.primal.x == b.primal.x);
  CHECK(a.dual.row == b.dual.row);
}

TEST_CASE("parallel kernel is bit-identical to serial") {
  SolverOptions par;
  par.parallel = true;
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    const System sys = System::validate(random_system(rng));
    const LpInstance lp = build_network_lp(sys);
    const SolveResult s = solve(lp);
    const SolveResult p = solve(lp, par);
    REQUIRE(s.status == SolveStatus::Optimal);
    REQUIRE(p.status == SolveStatus::Optimal);
    CHECK(s.primal.x == p.primal.x);
    CHECK(s.dual.row == p.dual.row);
  }
  const LpInstance lp = build_network_lp(System::validate(two_bus_case()));
  const SolveResult s = solve(lp);
  const SolveResult p = solve(lp, par);
  CHECK(s.primal.x == p.primal.x);
  CHECK(s.dual.row == p.dual.row);
}

TEST_CASE("weak duality on every solved pair") {
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 20; ++trial) {
    const System sys = System::validate(random_system(rng));
    const LpInstance lp = build_network_lp(sys);
    const SolveResult r = solve(lp);
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(duality_gap(lp, r.primal, r.dual) >=
          -1e-6 * (1.0 + std::abs(r.primal.objective)));
  }
}
