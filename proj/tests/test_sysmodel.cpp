#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ccm/synth.hpp"
#include "ccm/sysmodel.hpp"
#include "support/sample_cases.hpp"

using namespace ccm;
using testing::single_bus_case;
using testing::two_bus_case;

namespace {

bool has_violation(const std::vector<Violation>& v, Violation::Code code) {
  for (const auto& x : v)
    if (x.code == code) return true;
  return false;
}

}  // namespace

TEST_CASE("bundled cases validate") {
  CHECK_NOTHROW(System::validate(single_bus_case()));
  CHECK_NOTHROW(System::validate(two_bus_case()));
}

TEST_CASE("zero generators rejected") {
  MarketSystem s = single_bus_case();
  s.generators.clear();
  s.contingencies.clear();
  const auto v = System::check(s);
  CHECK(has_violation(v, Violation::Code::EmptySet));
  CHECK_THROWS_AS(System::validate(s), ValidationError);
}

TEST_CASE("zero reactance rejected") {
  MarketSystem s = two_bus_case();
  s.lines[0].reactance = 0.0;
  CHECK(has_violation(System::check(s), Violation::Code::NegativeParameter));
}

TEST_CASE("duplicate and dangling ids rejected") {
  MarketSystem s = two_bus_case();
  s.generators[1].id = "g1";
  CHECK(has_violation(System::check(s), Violation::Code::DuplicateId));

  s = two_bus_case();
  s.loads[0].bus = "nope";
  CHECK(has_violation(System::check(s), Violation::Code::DanglingReference));

  s = two_bus_case();
  s.contingencies[0].generators = {"ghost"};
  CHECK(has_violation(System::check(s), Violation::Code::DanglingReference));
}

TEST_CASE("empty contingency rejected") {
  MarketSystem s = single_bus_case();
  s.contingencies.push_back({"k-empty", {}, {}});
  CHECK(has_violation(System::check(s), Violation::Code::EmptySet));
}

TEST_CASE("disconnected pre-contingency network rejected") {
  MarketSystem s = two_bus_case();
  s.buses.push_back({"b3", false});
  CHECK(has_violation(System::check(s),
                      Violation::Code::DisconnectedPreContingencyNetwork));
}

TEST_CASE("negative parameters rejected") {
  MarketSystem s = single_bus_case();
  s.generators[0].g_max = -1.0;
  CHECK(has_violation(System::check(s), Violation::Code::NegativeParameter));

  s = single_bus_case();
  s.loads[0].fixed_demand = -5.0;
  CHECK(has_violation(System::check(s), Violation::Code::NegativeParameter));
}

TEST_CASE("two-bus matrices") {
  const System sys = System::validate(two_bus_case());
  const NetworkMatrices m = build_matrices(sys);
  REQUIRE(m.incidence.rows() == 2);
  REQUIRE(m.incidence.cols() == 1);
  CHECK(m.incidence(0, 0) == 1.0);
  CHECK(m.incidence(1, 0) == -1.0);
  REQUIRE(m.branch_flow.rows() == 1);
  CHECK(m.branch_flow(0, 0) == 1.0);
  CHECK(m.branch_flow(0, 1) == -1.0);
  // One placement per generator/load.
  for (int g = 0; g < sys.n_gens(); ++g) {
    double col = 0.0;
    for (int b = 0; b < sys.n_buses(); ++b) col += m.gen_map(b, g);
    CHECK(col == 1.0);
  }
  for (int j = 0; j < sys.n_loads(); ++j) {
    double col = 0.0;
    for (int b = 0; b < sys.n_buses(); ++b) col += m.load_map(b, j);
    CHECK(col == 1.0);
  }
}

TEST_CASE("no lines means empty incidence") {
  const System sys = System::validate(single_bus_case());
  const NetworkMatrices m = build_matrices(sys);
  CHECK(m.incidence.cols() == 0);
  CHECK(m.branch_flow.rows() == 0);
  CHECK(m.gen_map.cols() == 3);
}

TEST_CASE("triangle incidence structure") {
  MarketSystem s;
  s.buses = {{"b1", false}, {"b2", false}, {"b3", false}};
  s.lines = {{"l1", "b1", "b2", 1.0, 50.0},
             {"l2", "b2", "b3", 1.0, 50.0},
             {"l3", "b3", "b1", 1.0, 50.0}};
  s.generators = {{"g1", "b1", 50.0, 0.0, 0.0, 10.0, 0.0, 0.0}};
  const System sys = System::validate(s);
  const NetworkMatrices m = build_matrices(sys);
  for (int l = 0; l < 3; ++l) {
    int plus = 0, minus = 0;
    double colsum = 0.0;
    for (int b = 0; b < 3; ++b) {
      if (m.incidence(b, l) == 1.0) ++plus;
      if (m.incidence(b, l) == -1.0) ++minus;
      colsum += m.incidence(b, l);
    }
    CHECK(plus == 1);
    CHECK(minus == 1);
    CHECK(colsum == 0.0);
    // Flows are invariant to a uniform angle shift.
    double rowsum = 0.0;
    for (int b = 0; b < 3; ++b) rowsum += m.branch_flow(l, b);
    CHECK(rowsum == doctest::Approx(0.0));
  }
}

TEST_CASE("contingency view: generator outage") {
  const System sys = System::validate(single_bus_case());
  const ContingencyView v = contingency_view(sys, 0);
  CHECK(v.gen_available == std::vector<int>{0, 1, 1});
  CHECK(v.islands.size() == 1);
}

TEST_CASE("contingency view: line outage islands the two buses") {
  const System sys = System::validate(two_bus_case());
  const ContingencyView v = contingency_view(sys, 3);
  CHECK(v.gen_available == std::vector<int>{1, 1, 1});
  CHECK(v.line_in_service == std::vector<int>{0});
  for (int b = 0; b < 2; ++b) {
    CHECK(v.branch_flow(0, b) == 0.0);
    CHECK(v.incidence(b, 0) == 0.0);
  }
  REQUIRE(v.islands.size() == 2);
  CHECK(v.islands[0] == std::vector<int>{0});
  CHECK(v.islands[1] == std::vector<int>{1});
}

TEST_CASE("contingency view is pure") {
  const System sys = System::validate(two_bus_case());
  const ContingencyView a = contingency_view(sys, 3);
  const ContingencyView b = contingency_view(sys, 3);
  CHECK(a.gen_available == b.gen_available);
  CHECK(a.incidence == b.incidence);
  CHECK(a.branch_flow == b.branch_flow);
  CHECK(a.islands == b.islands);
}

TEST_CASE("availability marks exactly the outaged generators") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    MarketSystem raw = random_system(rng);
    const System sys = System::validate(raw);
    for (int k = 0; k < sys.n_contingencies(); ++k) {
      const ContingencyView v = contingency_view(sys, k);
      for (int g = 0; g < sys.n_gens(); ++g) {
        const bool outaged = std::binary_search(sys.outaged_gens(k).begin(),
                                                sys.outaged_gens(k).end(), g);
        CHECK(v.gen_available[g] == (outaged ? 0 : 1));
      }
    }
  }
}

TEST_CASE("model kind inference") {
  CHECK(System::validate(single_bus_case()).inferred_kind() == ModelKind::SingleBus);
  CHECK(System::validate(two_bus_case()).inferred_kind() == ModelKind::Network);
  MarketSystem s = single_bus_case();
  s.loads[0].fixed_demand.reset();
  s.loads[0].utility = 100.0;
  CHECK(System::validate(s).inferred_kind() == ModelKind::Network);
}
