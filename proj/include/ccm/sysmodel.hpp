#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccm/matrix.hpp"

namespace ccm {

struct Bus {
  std::string id;
  bool is_reference = false;
};

struct Generator {
  std::string id;
  std::string bus;
  double g_max = 0.0;         // MW
  double r_up_max = 0.0;      // MW
  double r_dn_max = 0.0;      // MW
  double energy_offer = 0.0;  // $/MWh
  double up_offer = 0.0;      // $/MW
  double dn_offer = 0.0;      // $/MW
};

struct Load {
  std::string id;
  std::string bus;
  double d_max = 0.0;     // MW
  double r_up_max = 0.0;  // MW
  double r_dn_max = 0.0;  // MW
  double utility = 0.0;   // $/MWh
  double up_offer = 0.0;  // $/MW
  double dn_offer = 0.0;  // $/MW
  std::optional<double> fixed_demand;  // MW, inelastic single-bus demand
};

struct Line {
  std::string id;
  std::string from_bus;
  std::string to_bus;
  double reactance = 0.0;  // p.u. on system base
  double capacity = 0.0;   // MW
};

struct Contingency {
  std::string id;
  std::vector<std::string> generators;  // outaged generator ids
  std::vector<std::string> lines;       // outaged line ids
};

struct MarketSystem {
  std::vector<Bus> buses;
  std::vector<Generator> generators;
  std::vector<Load> loads;
  std::vector<Line> lines;
  std::vector<Contingency> contingencies;
  double base_mva = 100.0;
  double period_hours = 1.0;
};

enum class ModelKind { SingleBus, Network };

struct Violation {
  enum class Code {
    DuplicateId,
    DanglingReference,
    NegativeParameter,
    DisconnectedPreContingencyNetwork,
    EmptySet,
    InvalidReference,
  };
  Code code;
  std::string message;
};

class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string what, std::vector<Violation> violations)
      : std::runtime_error(std::move(what)), violations_(std::move(violations)) {}
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// bus x line incidence (A), line x bus branch flow (H, per-unit 1/x),
/// bus x generator and bus x load maps.
struct NetworkMatrices {
  Mat incidence;    // +1 at from bus, -1 at to bus
  Mat branch_flow;  // row l = (1/x_l) * (e_from - e_to)^T, per-unit
  Mat gen_map;
  Mat load_map;
};

/// One contingency applied to the system: generator availability plus the
/// incidence/branch-flow matrices with outaged lines zeroed out.
struct ContingencyView {
  std::vector<int> gen_available;         // a_ik in {0,1} per generator
  std::vector<int> line_in_service;       // per line
  Mat incidence;                          // A_k
  Mat branch_flow;                        // H_k
  std::vector<std::vector<int>> islands;  // bus indices, each sorted, islands
                                          // ordered by smallest member
};

/// Validated immutable market instance with id -> index lookups.
/// Construction runs all invariant checks; instances are safe to share
/// read-only across threads.
class System {
 public:
  static System validate(MarketSystem raw);

  /// All violations without throwing; empty means valid.
  static std::vector<Violation> check(const MarketSystem& raw);

  const MarketSystem& data() const { return raw_; }
  const std::vector<Bus>& buses() const { return raw_.buses; }
  const std::vector<Generator>& generators() const { return raw_.generators; }
  const std::vector<Load>& loads() const { return raw_.loads; }
  const std::vector<Line>& lines() const { return raw_.lines; }
  const std::vector<Contingency>& contingencies() const { return raw_.contingencies; }
  double base_mva() const { return raw_.base_mva; }
  double period_hours() const { return raw_.period_hours; }

  int n_buses() const { return static_cast<int>(raw_.buses.size()); }
  int n_gens() const { return static_cast<int>(raw_.generators.size()); }
  int n_loads() const { return static_cast<int>(raw_.loads.size()); }
  int n_lines() const { return static_cast<int>(raw_.lines.size()); }
  int n_contingencies() const { return static_cast<int>(raw_.contingencies.size()); }

  int bus_index(const std::string& id) const;
  int gen_bus(int g) const { return gen_bus_[g]; }
  int load_bus(int j) const { return load_bus_[j]; }
  int line_from(int l) const { return line_from_[l]; }
  int line_to(int l) const { return line_to_[l]; }

  /// Generator/line index sets outaged per contingency (sorted).
  const std::vector<int>& outaged_gens(int k) const { return outaged_gens_[k]; }
  const std::vector<int>& outaged_lines(int k) const { return outaged_lines_[k]; }

  /// Contingency indices in which generator g is out of service, sorted.
  std::vector<int> contingencies_off(int g) const;

  /// Reference bus index for the pre-contingency network (explicit flag if
  /// set, otherwise bus 0).
  int reference_bus() const { return reference_bus_; }

  ModelKind inferred_kind() const;

 private:
  System() = default;
  MarketSystem raw_;
  std::map<std::string, int> bus_idx_;
  std::vector<int> gen_bus_, load_bus_, line_from_, line_to_;
  std::vector<std::vector<int>> outaged_gens_, outaged_lines_;
  int reference_bus_ = 0;
};

inline MarketSystem validate_system(MarketSystem system) {
  return System::validate(std::move(system)).data();
}

NetworkMatrices build_matrices(const System& system);

ContingencyView contingency_view(const System& system, int k);

/// Connected components of the bus graph restricted to in-service lines.
std::vector<std::vector<int>> find_islands(const System& system,
                                           const std::vector<int>& line_in_service);

}  // namespace ccm
