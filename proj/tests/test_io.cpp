#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "ccm/io.hpp"
#include "support/sample_cases.hpp"

using namespace ccm;
namespace fs = std::filesystem;

namespace {

constexpr double kTol = 1e-4;

std::string write_temp(const std::string& name, const std::string& content) {
  const auto path = fs::temp_directory_path() / name;
  std::ofstream f(path, std::ios::binary);
  f << content;
  return path.string();
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

std::string golden_dir() {
  const char* d = std::getenv("CCM_GOLDEN_DIR");
  return d ? d : "tests/golden";
}

void check_golden(const std::string& name, const std::string& actual) {
  const std::string path = golden_dir() + "/" + name;
  if (std::getenv("CCM_UPDATE_GOLDEN")) {
    std::ofstream f(path, std::ios::binary);
    f << actual;
  }
  INFO("golden file: " << path);
  CHECK(actual == read_file(path));
}

ScenarioConfig config_for(const std::string& file) {
  ScenarioConfig cfg;
  cfg.system_path = testing::data_file(file);
  return cfg;
}

}  // namespace

TEST_CASE("bundled data files match the in-code cases") {
  const MarketSystem sb = load_system(testing::data_file("single_bus.json"));
  CHECK(system_to_json(sb) == system_to_json(testing::single_bus_case()));
  const MarketSystem tb = load_system(testing::data_file("two_bus.json"));
  CHECK(system_to_json(tb) == system_to_json(testing::two_bus_case()));
}

TEST_CASE("empty or malformed files raise ParseError") {
  const auto empty = write_temp("ccm_empty.json", "");
  CHECK_THROWS_AS(load_system(empty), ParseError);
  const auto garbage = write_temp("ccm_garbage.json", "{\"buses\": [");
  CHECK_THROWS_AS(load_system(garbage), ParseError);
  const auto missing = write_temp("ccm_missing.json", "{\"buses\": []}");
  CHECK_THROWS_AS(load_system(missing), ParseError);
  CHECK_THROWS_AS(load_system("/nonexistent/x.json"), ParseError);
}

TEST_CASE("validation failures surface as ValidationError") {
  ordered_json j = system_to_json(testing::two_bus_case());
  j["lines"][0]["reactance"] = 0.0;
  const auto path = write_temp("ccm_invalid.json", j.dump());
  CHECK_THROWS_AS(load_system(path), ValidationError);
}

TEST_CASE("json round trip is a fixpoint") {
  for (const auto& sys : {testing::single_bus_case(), testing::two_bus_case()}) {
    const ordered_json j = system_to_json(sys);
    const ordered_json j2 = system_to_json(system_from_json(j));
    CHECK(j == j2);
  }
}

TEST_CASE("run_scenario on the two-bus case") {
  const RunArchive a = run_scenario(config_for("two_bus.json"));
  REQUIRE(a.status == SolveStatus::Optimal);
  CHECK(a.kind == ModelKind::Network);
  REQUIRE(a.proposed.has_value());
  CHECK(a.proposed->settlement.system.generation_revenue ==
        doctest::Approx(11550.0).epsilon(kTol));
  CHECK(a.proposed->settlement.system.transmission_revenue ==
        doctest::Approx(6650.0).epsilon(kTol));
  CHECK(a.proposed->settlement.system.consumer_payment ==
        doctest::Approx(18200.0).epsilon(kTol));
  CHECK(a.proposed->settlement.system.balance == doctest::Approx(0.0).epsilon(kTol));
  CHECK(a.verdicts_pass);
  CHECK(exit_code_for(a) == kExitOk);
  CHECK(a.stamp.empty());
}

TEST_CASE("run_scenario on the single-bus case passes verdicts") {
  ScenarioConfig cfg = config_for("single_bus.json");
  cfg.run_baseline = false;
  const RunArchive a = run_scenario(cfg);
  REQUIRE(a.status == SolveStatus::Optimal);
  CHECK(a.kind == ModelKind::SingleBus);
  CHECK(a.verdicts_pass);
  CHECK(exit_code_for(a) == kExitOk);
}

TEST_CASE("infeasible systems exit with the solver code") {
  MarketSystem s = testing::single_bus_case();
  for (auto& g : s.generators) g.g_max = 1.0;
  const auto path = write_temp("ccm_infeasible.json", system_to_json(s).dump());
  ScenarioConfig cfg;
  cfg.system_path = path;
  const RunArchive a = run_scenario(cfg);
  CHECK(a.status == SolveStatus::Infeasible);
  CHECK(exit_code_for(a) == kExitInfeasible);
}

TEST_CASE("empty scheme selection is rejected") {
  ScenarioConfig cfg = config_for("two_bus.json");
  cfg.run_baseline = false;
  cfg.run_proposed = false;
  CHECK_THROWS_AS(run_scenario(cfg), ParseError);
}

TEST_CASE("baseline-only runs never gate on verdicts") {
  ScenarioConfig cfg = config_for("two_bus.json");
  cfg.run_proposed = false;
  const RunArchive a = run_scenario(cfg);
  REQUIRE(a.status == SolveStatus::Optimal);
  CHECK(a.verdicts_pass);  // baseline imbalance is reported, never failed on
  CHECK(exit_code_for(a) == kExitOk);
  REQUIRE(a.baseline.has_value());
  CHECK(a.baseline->neutrality.imbalance == doctest::Approx(-6900.0).epsilon(1e-4));
}

TEST_CASE("verdict failures map to their exit code") {
  RunArchive a;
  a.status = SolveStatus::Optimal;
  a.verdicts_pass = false;
  CHECK(exit_code_for(a) == kExitVerdict);
}

TEST_CASE("batch captures per-scenario errors") {
  std::vector<ScenarioConfig> cfgs(2);
  cfgs[0] = config_for("two_bus.json");
  cfgs[1].system_path = "/nonexistent/y.json";
  const auto archives = run_batch(cfgs, 2);
  CHECK(archives[0].status == SolveStatus::Optimal);
  CHECK(archives[1].failed_before_solve);
  CHECK(exit_code_for(archives[1]) == kExitInput);
}

TEST_CASE("deterministic rendering") {
  for (const auto* file : {"single_bus.json", "two_bus.json"}) {
    const RunArchive a = run_scenario(config_for(file));
    const RunArchive b = run_scenario(config_for(file));
    for (OutputFormat f : {OutputFormat::Table, OutputFormat::Json, OutputFormat::Csv})
      CHECK(emit_report(a, f) == emit_report(b, f));
  }
}

TEST_CASE("archive json carries the settlement and parses back") {
  const RunArchive a = run_scenario(config_for("two_bus.json"));
  const std::string text = emit_report(a, OutputFormat::Json);
  const ordered_json j = ordered_json::parse(text);
  CHECK(j["solver"]["objective"].get<double>() == a.objective);
  CHECK(j["schemes"]["proposed"]["settlement"]["system"]["balance"].get<double>() ==
        a.proposed->settlement.system.balance);
  CHECK(j["input"]["sha256"].get<std::string>() == a.input_sha256);
  CHECK_FALSE(j.contains("generated_at"));
}

TEST_CASE("csv uses full precision") {
  const RunArchive a = run_scenario(config_for("two_bus.json"));
  const std::string csv = emit_report(a, OutputFormat::Csv);
  std::istringstream is(csv);
  std::string line;
  bool found = false;
  while (std::getline(is, line)) {
    if (line.rfind("solver,,,objective,", 0) == 0) {
      const double v = std::stod(line.substr(line.rfind(',') + 1));
      CHECK(v == a.objective);
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("table rendering matches the golden files") {
  for (const auto* file : {"single_bus.json", "two_bus.json"}) {
    const RunArchive a = run_scenario(config_for(file));
    const std::string name =
        std::string(file) == "single_bus.json" ? "single_bus_table.txt" : "two_bus_table.txt";
    check_golden(name, emit_report(a, OutputFormat::Table));
  }
}

TEST_CASE("price table slice matches the golden file") {
  const RunArchive a = run_scenario(config_for("two_bus.json"));
  check_golden("two_bus_prices.txt", render_prices(a));
}

TEST_CASE("archive json re-emits identically after a parse round trip") {
  const RunArchive a = run_scenario(config_for("two_bus.json"));
  const std::string text = emit_report(a, OutputFormat::Json);
  const ordered_json j = ordered_json::parse(text);
  CHECK(j.dump(2) + "\n" == text);
}

TEST_CASE("lp-format export") {
  const System sys = System::validate(testing::two_bus_case());
  const LpInstance lp = build_network_lp(sys);
  const std::string text = to_lp_format(lp);
  CHECK(text.rfind("Minimize", 0) == 0);
  CHECK(text.find("Subject To") != std::string::npos);
  CHECK(text.find("PreBalance_0__s0_:") != std::string::npos);
  CHECK(text.find(" free") != std::string::npos);
  CHECK(text.find("End") != std::string::npos);
  // One named row per constraint.
  size_t rows = 0;
  for (size_t pos = text.find(": "); pos != std::string::npos;
       pos = text.find(": ", pos + 1))
    ++rows;
  CHECK(rows >= static_cast<size_t>(lp.n_rows()));
}

TEST_CASE("cli exit codes") {
  const char* cli = std::getenv("CCM_CLI");
  REQUIRE(cli != nullptr);
  const auto run_cli = [&](const std::string& args) {
    const std::string cmd =
        std::string("\"") + cli + "\" " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
  };
  const std::string good = testing::data_file("two_bus.json");
  CHECK(run_cli("validate --system \"" + good + "\"") == kExitOk);
  CHECK(run_cli("run --system \"" + good + "\" --scheme both") == kExitOk);
  CHECK(run_cli("prices --system \"" + good + "\"") == kExitOk);
  CHECK(run_cli("settle --system \"" + good + "\" --scheme proposed") == kExitOk);
  CHECK(run_cli("verify --system \"" + good + "\"") == kExitOk);
  CHECK(run_cli("compare --system \"" + good + "\"") == kExitOk);

  const auto bad = write_temp("ccm_cli_bad.json", "{nope");
  CHECK(run_cli("validate --system \"" + bad + "\"") == kExitInput);
  CHECK(run_cli("run --system \"" + bad + "\"") == kExitInput);

  MarketSystem s = testing::single_bus_case();
  for (auto& g : s.generators) g.g_max = 1.0;
  const auto infeasible = write_temp("ccm_cli_infeasible.json", system_to_json(s).dump());
  CHECK(run_cli("run --system \"" + infeasible + "\"") == kExitInfeasible);
}

TEST_CASE("stamp is included only on request") {
  ScenarioConfig cfg = config_for("single_bus.json");
  cfg.stamp = true;
  const RunArchive a = run_scenario(cfg);
  CHECK_FALSE(a.stamp.empty());
  const ordered_json j = archive_to_json(a);
  CHECK(j.contains("generated_at"));
}
