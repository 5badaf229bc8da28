#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccm/lpsolve.hpp"
#include "ccm/pricing.hpp"
#include "ccm/settlement.hpp"
#include "ccm/sysmodel.hpp"

namespace ccm {

using ordered_json = nlohmann::ordered_json;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

MarketSystem system_from_json(const ordered_json& j);
ordered_json system_to_json(const MarketSystem& system);

/// Parse and validate a system file.
MarketSystem load_system(const std::string& path);

enum class OutputFormat { Table, Json, Csv };

struct Tolerances {
  double gap = 1e-6;    // relative duality gap
  double money = 1e-4;  // $ slack in settlement verdicts
  double feas = 1e-7;   // MW
  double cs = 1e-6;     // complementary slackness
};

struct ScenarioConfig {
  std::string system_path;
  std::string model_kind = "auto";  // auto | single-bus | network
  bool run_baseline = true;
  bool run_proposed = true;
  Tolerances tol;
  OutputFormat format = OutputFormat::Table;
  std::string out_path;  // empty -> stdout
  bool stamp = false;    // include a wall-clock timestamp in the archive
  bool parallel_solver = false;
};

struct SchemeResult {
  PriceBook prices;
  SecurityCharges charges;  // empty under Baseline
  SettlementReport settlement;
  AdequacyVerdict adequacy;
  NeutralityVerdict neutrality;
};

struct RunArchive {
  std::string input_path;
  std::string input_sha256;
  ModelKind kind = ModelKind::SingleBus;
  Tolerances tol;
  SolveStatus status = SolveStatus::NumericalFailure;
  int iterations = 0;
  double objective = 0.0;
  OptimalityReport certificate;
  Schedules schedules;
  DualSolution duals;
  std::vector<std::string> bus_ids, gen_ids, load_ids, line_ids, contingency_ids;
  std::optional<SchemeResult> baseline;
  std::optional<SchemeResult> proposed;
  bool verdicts_pass = false;      // proposed-scheme verdicts; baseline never gates
  bool failed_before_solve = false;
  std::string error;               // failure description, empty on success
  std::string stamp;               // optional wall-clock time, empty by default
};

RunArchive run_scenario(const ScenarioConfig& config);

/// Independent scenarios executed concurrently when jobs > 1 (OpenMP);
/// archives come back in input order and errors are captured per archive.
std::vector<RunArchive> run_batch(const std::vector<ScenarioConfig>& configs, int jobs);

ordered_json archive_to_json(const RunArchive& archive);
std::string emit_report(const RunArchive& archive, OutputFormat format);

/// CPLEX-LP-format text of a built instance, for cross-checks with external
/// solvers. Row names are the constraint tags.
std::string to_lp_format(const LpInstance& lp);

/// Focused table renderings backing the prices/settle/verify/compare verbs.
std::string render_prices(const RunArchive& archive);
std::string render_settlement(const RunArchive& archive);
std::string render_verdicts(const RunArchive& archive);
std::string render_compare(const RunArchive& archive);

std::string sha256_file(const std::string& path);

/// Exit codes shared by the CLI and tests.
constexpr int kExitOk = 0;
constexpr int kExitInput = 2;       // parse/validation/model errors
constexpr int kExitInfeasible = 3;  // infeasible/unbounded/numerical failure
constexpr int kExitVerdict = 4;     // proposed-scheme verdict failed

int exit_code_for(const RunArchive& archive);

}  // namespace ccm
