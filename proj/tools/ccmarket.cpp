// Command-line front end: validate system files, clear the market, and print
// prices, settlements, verdicts, and scheme comparisons.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "ccm/io.hpp"

namespace {

struct CommonArgs {
  std::vector<std::string> systems;
  std::string scheme = "both";
  std::string kind = "auto";
  std::string format = "table";
  std::string out;
  double tol_gap = 1e-6;
  double tol_money = 1e-4;
  int jobs = 1;
  bool stamp = false;
  bool parallel = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool multi_system) {
  auto* sys = cmd->add_option("--system", args.systems, "system file (JSON)");
  sys->required();
  if (!multi_system) sys->expected(1);
  cmd->add_option("--scheme", args.scheme, "baseline | proposed | both")
      ->check(CLI::IsMember({"baseline", "proposed", "both"}));
  cmd->add_option("--model", args.kind, "auto | single-bus | network")
      ->check(CLI::IsMember({"auto", "single-bus", "network"}));
  cmd->add_option("--format", args.format, "table | json | csv")
      ->check(CLI::IsMember({"table", "json", "csv"}));
  cmd->add_option("--out", args.out, "output file (directory for multiple systems)");
  cmd->add_option("--tol-gap", args.tol_gap, "relative duality-gap tolerance")
      ->envname("CCMARKET_TOL_GAP");
  cmd->add_option("--tol-money", args.tol_money, "settlement tolerance in $")
      ->envname("CCMARKET_TOL_MONEY");
  cmd->add_option("--jobs", args.jobs, "concurrent scenarios");
  cmd->add_flag("--stamp", args.stamp, "include a wall-clock timestamp in archives");
  cmd->add_flag("--parallel", args.parallel, "OpenMP tableau kernel");
}

ccm::ScenarioConfig to_config(const CommonArgs& args, const std::string& path) {
  ccm::ScenarioConfig cfg;
  cfg.system_path = path;
  cfg.model_kind = args.kind;
  cfg.run_baseline = args.scheme != "proposed";
  cfg.run_proposed = args.scheme != "baseline";
  cfg.tol.gap = args.tol_gap;
  cfg.tol.money = args.tol_money;
  cfg.format = args.format == "json"  ? ccm::OutputFormat::Json
               : args.format == "csv" ? ccm::OutputFormat::Csv
                                      : ccm::OutputFormat::Table;
  cfg.out_path = args.out;
  cfg.stamp = args.stamp;
  cfg.parallel_solver = args.parallel;
  return cfg;
}

void write_out(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw ccm::ParseError("cannot write '" + out_path + "'");
  f << text;
}

int max_exit(int a, int b) { return std::max(a, b); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contingency-constrained energy and reserve market clearing"};
  app.require_subcommand(1);

  CommonArgs run_args, prices_args, settle_args, verify_args, compare_args;
  std::vector<std::string> validate_systems;

  auto* validate = app.add_subcommand("validate", "check a system file");
  validate->add_option("--system", validate_systems, "system file (JSON)")->required();

  auto* run = app.add_subcommand("run", "clear, settle, verify; write the full archive");
  add_common(run, run_args, true);
  std::string dump_lp;
  run->add_option("--dump-lp", dump_lp, "also write the built LP in LP-format text");

  auto* prices = app.add_subcommand("prices", "print price books");
  add_common(prices, prices_args, false);

  auto* settle = app.add_subcommand("settle", "print settlement tables");
  add_common(settle, settle_args, false);

  auto* verify = app.add_subcommand("verify", "print adequacy/neutrality verdicts");
  add_common(verify, verify_args, false);

  auto* compare = app.add_subcommand("compare", "baseline vs proposed differences");
  add_common(compare, compare_args, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) {
      int code = ccm::kExitOk;
      for (const auto& path : validate_systems) {
        try {
          ccm::load_system(path);
          std::cout << path << ": valid\n";
        } catch (const ccm::ValidationError& e) {
          std::cout << path << ": " << e.what() << "\n";
          code = ccm::kExitInput;
        } catch (const ccm::ParseError& e) {
          std::cout << path << ": parse error: " << e.what() << "\n";
          code = ccm::kExitInput;
        }
      }
      return code;
    }

    if (run->parsed()) {
      std::vector<ccm::ScenarioConfig> cfgs;
      for (const auto& p : run_args.systems) cfgs.push_back(to_config(run_args, p));
      if (!dump_lp.empty()) {
        const ccm::System sys =
            ccm::System::validate(ccm::load_system(cfgs.front().system_path));
        const ccm::ModelKind kind = run_args.kind == "single-bus" ? ccm::ModelKind::SingleBus
                                    : run_args.kind == "network" ? ccm::ModelKind::Network
                                                                 : sys.inferred_kind();
        write_out(ccm::to_lp_format(ccm::build_lp(sys, kind)), dump_lp);
      }
      // `run` defaults to the machine-readable archive.
      const ccm::OutputFormat fmt =
          run_args.format == "table" ? ccm::OutputFormat::Json : cfgs.front().format;
      const auto archives = ccm::run_batch(cfgs, run_args.jobs);
      int code = ccm::kExitOk;
      for (const auto& a : archives) {
        std::string text = ccm::emit_report(a, fmt);
        if (archives.size() > 1 && !run_args.out.empty()) {
          namespace fs = std::filesystem;
          fs::create_directories(run_args.out);
          const auto stem = fs::path(a.input_path).stem().string();
          const char* ext = fmt == ccm::OutputFormat::Csv ? ".csv" : ".json";
          write_out(text, (fs::path(run_args.out) / (stem + ext)).string());
        } else {
          write_out(text, run_args.out);
        }
        if (!a.error.empty()) std::cerr << a.input_path << ": " << a.error << "\n";
        code = max_exit(code, ccm::exit_code_for(a));
      }
      return code;
    }

    const CommonArgs& args = prices->parsed()   ? prices_args
                             : settle->parsed() ? settle_args
                             : verify->parsed() ? verify_args
                                                : compare_args;
    ccm::ScenarioConfig cfg = to_config(args, args.systems.front());
    if (compare->parsed()) {
      cfg.run_baseline = true;
      cfg.run_proposed = true;
    }
    const ccm::RunArchive a = ccm::run_scenario(cfg);
    if (a.status != ccm::SolveStatus::Optimal) {
      std::cerr << a.input_path << ": solver status "
                << (a.status == ccm::SolveStatus::Infeasible  ? "infeasible"
                    : a.status == ccm::SolveStatus::Unbounded ? "unbounded"
                                                              : "numerical failure")
                << (a.error.empty() ? "" : ": " + a.error) << "\n";
      return ccm::kExitInfeasible;
    }
    std::string text;
    if (cfg.format != ccm::OutputFormat::Table) {
      text = ccm::emit_report(a, cfg.format);
    } else if (prices->parsed()) {
      text = ccm::render_prices(a);
    } else if (settle->parsed()) {
      text = ccm::render_settlement(a);
    } else if (verify->parsed()) {
      text = ccm::render_verdicts(a);
    } else {
      text = ccm::render_compare(a);
    }
    write_out(text, cfg.out_path);
    if (verify->parsed() && !a.verdicts_pass) return ccm::kExitVerdict;
    return ccm::kExitOk;
  } catch (const ccm::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ccm::kExitInput;
  } catch (const ccm::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ccm::kExitInput;
  } catch (const ccm::ModelMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ccm::kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ccm::kExitInfeasible;
  }
}
