#pragma once

#include <limits>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "ccm/sysmodel.hpp"

namespace ccm {

/// States are numbered 0 (pre-contingency) and 1..K (contingency index + 1).
constexpr int kPreState = 0;

enum class TagKind {
  PreBalance,    // (bus)
  PostBalance,   // (bus, k)
  FlowUpper,     // (line, state)
  FlowLower,     // (line, state)
  GenUpLink,     // (gen, k)
  GenDnLink,     // (gen, k)
  GenCapUp,      // (gen)
  GenCapDn,      // (gen)
  GenResUpCap,   // (gen)
  GenResDnCap,   // (gen)
  DemUpLink,     // (load, k)
  DemDnLink,     // (load, k)
  DemLower,      // (load)
  DemUpper,      // (load)
  DemResUpCap,   // (load)
  DemResDnCap,   // (load)
  RefAngle,      // (bus, state)
};

struct ConstraintTag {
  TagKind kind;
  int entity = -1;  // bus/line/generator/load index depending on kind
  int state = -1;   // -1 when not state-indexed; 0 pre, k>=1 contingency

  friend auto operator<=>(const ConstraintTag&, const ConstraintTag&) = default;
};

std::string to_string(const ConstraintTag& tag);

enum class VarRole {
  GenPower0,   // g_{i0}
  GenResUp,    // r_i^{g,up}
  GenResDn,    // r_i^{g,dn}
  GenPowerK,   // g_{ik}
  DemPower0,   // d_{j0}
  DemResUp,    // r_j^{d,up}
  DemResDn,    // r_j^{d,dn}
  DemPowerK,   // d_{jk}
  Angle,       // theta_{b,state}
};

struct Variable {
  std::string name;
  VarRole role;
  int entity = -1;
  int state = -1;
  double lb = 0.0;
  double ub = std::numeric_limits<double>::infinity();
  double cost = 0.0;
};

enum class Sense { Eq, Le, Ge };

struct Constraint {
  ConstraintTag tag;
  Sense sense;
  std::vector<std::pair<int, double>> coeffs;  // (variable index, coefficient)
  double rhs = 0.0;
};

/// Shape metadata tying the LP back to the instance it was built from.
struct LpShape {
  ModelKind kind = ModelKind::SingleBus;
  int n_buses = 0, n_gens = 0, n_loads = 0, n_lines = 0, n_contingencies = 0;
};

/// A fully tagged minimization LP. Every row carries exactly one tag so dual
/// values can be read back by meaning rather than by row position.
class LpInstance {
 public:
  LpShape shape;
  std::vector<Variable> variables;
  std::vector<Constraint> constraints;

  void add_variable(Variable v);
  int add_constraint(Constraint c);

  int n_vars() const { return static_cast<int>(variables.size()); }
  int n_rows() const { return static_cast<int>(constraints.size()); }

  /// Row index for a tag; -1 if the row does not exist (e.g. flow bounds of
  /// an outaged line).
  int row_of(const ConstraintTag& tag) const;
  /// Variable index by role; -1 if absent.
  int var_of(VarRole role, int entity, int state = -1) const;

  double objective_value(const std::vector<double>& x) const;
  /// Row activity a_i^T x.
  double row_activity(int row, const std::vector<double>& x) const;

 private:
  std::map<ConstraintTag, int> row_by_tag_;
  std::map<std::tuple<int, int, int>, int> var_by_key_;  // (role, entity, state)
};

class ModelMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Energy plus up-spinning reserve clearing on a single bus with inelastic
/// demand and generator-only contingencies.
LpInstance build_single_bus_lp(const System& system);

/// Full network clearing: energy, up/down reserves for generators and loads,
/// DC power flow per state, generator and line outages.
LpInstance build_network_lp(const System& system);

LpInstance build_lp(const System& system, ModelKind kind);

}  // namespace ccm
