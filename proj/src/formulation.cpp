#include "ccm/formulation.hpp"

#include <cmath>
#include <sstream>

namespace ccm {

namespace {

const char* tag_name(TagKind k) {
  switch (k) {
    case TagKind::PreBalance: return "PreBalance";
    case TagKind::PostBalance: return "PostBalance";
    case TagKind::FlowUpper: return "FlowUpper";
    case TagKind::FlowLower: return "FlowLower";
    case TagKind::GenUpLink: return "GenUpLink";
    case TagKind::GenDnLink: return "GenDnLink";
    case TagKind::GenCapUp: return "GenCapUp";
    case TagKind::GenCapDn: return "GenCapDn";
    case TagKind::GenResUpCap: return "GenResUpCap";
    case TagKind::GenResDnCap: return "GenResDnCap";
    case TagKind::DemUpLink: return "DemUpLink";
    case TagKind::DemDnLink: return "DemDnLink";
    case TagKind::DemLower: return "DemLower";
    case TagKind::DemUpper: return "DemUpper";
    case TagKind::DemResUpCap: return "DemResUpCap";
    case TagKind::DemResDnCap: return "DemResDnCap";
    case TagKind::RefAngle: return "RefAngle";
  }
  return "?";
}

}  // namespace

std::string to_string(const ConstraintTag& tag) {
  std::ostringstream os;
  os << tag_name(tag.kind) << "(" << tag.entity;
  if (tag.state >= 0) os << ", s" << tag.state;
  os << ")";
  return os.str();
}

void LpInstance::add_variable(Variable v) {
  var_by_key_[{static_cast<int>(v.role), v.entity, v.state}] = n_vars();
  variables.push_back(std::move(v));
}

int LpInstance::add_constraint(Constraint c) {
  const int row = n_rows();
  auto [it, inserted] = row_by_tag_.emplace(c.tag, row);
  if (!inserted)
    throw std::logic_error("duplicate constraint tag " + to_string(c.tag));
  constraints.push_back(std::move(c));
  return row;
}

int LpInstance::row_of(const ConstraintTag& tag) const {
  auto it = row_by_tag_.find(tag);
  return it == row_by_tag_.end() ? -1 : it->second;
}

int LpInstance::var_of(VarRole role, int entity, int state) const {
  auto it = var_by_key_.find({static_cast<int>(role), entity, state});
  return it == var_by_key_.end() ? -1 : it->second;
}

double LpInstance::objective_value(const std::vector<double>& x) const {
  double acc = 0.0;
  for (int j = 0; j < n_vars(); ++j) acc += variables[j].cost * x[j];
  return acc;
}

double LpInstance::row_activity(int row, const std::vector<double>& x) const {
  double acc = 0.0;
  for (const auto& [j, a] : constraints[row].coeffs) acc += a * x[j];
  return acc;
}

LpInstance build_single_bus_lp(const System& system) {
  if (!system.lines().empty())
    throw ModelMismatch("single-bus model cannot carry network data (lines present)");
  for (const auto& d : system.loads())
    if (!d.fixed_demand)
      throw ModelMismatch("single-bus model requires fixed_demand on every load ('" +
                          d.id + "' has none)");
  for (int k = 0; k < system.n_contingencies(); ++k)
    if (!system.outaged_lines(k).empty())
      throw ModelMismatch("single-bus model admits generator outages only");

  const int ng = system.n_gens();
  const int nk = system.n_contingencies();
  const double hours = system.period_hours();
  double demand = 0.0;
  for (const auto& d : system.loads()) demand += *d.fixed_demand;

  LpInstance lp;
  lp.shape = {ModelKind::SingleBus, system.n_buses(), ng, system.n_loads(), 0, nk};

  for (int i = 0; i < ng; ++i) {
    const auto& g = system.generators()[i];
    lp.add_variable({"g0[" + g.id + "]", VarRole::GenPower0, i, kPreState, 0.0,
                     std::numeric_limits<double>::infinity(), g.energy_offer * hours});
  }
  for (int i = 0; i < ng; ++i) {
    const auto& g = system.generators()[i];
    lp.add_variable({"r_up[" + g.id + "]", VarRole::GenResUp, i, -1, 0.0,
                     std::numeric_limits<double>::infinity(), g.up_offer});
  }
  for (int k = 1; k <= nk; ++k)
    for (int i = 0; i < ng; ++i)
      lp.add_variable({"g[" + system.generators()[i].id + ",s" + std::to_string(k) + "]",
                       VarRole::GenPowerK, i, k, 0.0,
                       std::numeric_limits<double>::infinity(), 0.0});

  // Pre- and post-contingency power balance.
  {
    Constraint c{{TagKind::PreBalance, 0, kPreState}, Sense::Eq, {}, demand};
    for (int i = 0; i < ng; ++i) c.coeffs.push_back({lp.var_of(VarRole::GenPower0, i, kPreState), 1.0});
    lp.add_constraint(std::move(c));
  }
  for (int k = 1; k <= nk; ++k) {
    Constraint c{{TagKind::PostBalance, 0, k}, Sense::Eq, {}, demand};
    for (int i = 0; i < ng; ++i) c.coeffs.push_back({lp.var_of(VarRole::GenPowerK, i, k), 1.0});
    lp.add_constraint(std::move(c));
  }

  // g_k <= a_k (g0 + r_up): deployed output limited by the scheduled headroom
  // of in-service units.
  for (int k = 1; k <= nk; ++k) {
    const auto view = contingency_view(system, k - 1);
    for (int i = 0; i < ng; ++i) {
      const double a = view.gen_available[i];
      Constraint c{{TagKind::GenUpLink, i, k}, Sense::Le, {}, 0.0};
      c.coeffs.push_back({lp.var_of(VarRole::GenPowerK, i, k), 1.0});
      if (a != 0.0) {
        c.coeffs.push_back({lp.var_of(VarRole::GenPower0, i, kPreState), -a});
        c.coeffs.push_back({lp.var_of(VarRole::GenResUp, i), -a});
      }
      lp.add_constraint(std::move(c));
    }
  }

  for (int i = 0; i < ng; ++i) {
    lp.add_constraint({{TagKind::GenCapUp, i, -1},
                       Sense::Le,
                       {{lp.var_of(VarRole::GenPower0, i, kPreState), 1.0},
                        {lp.var_of(VarRole::GenResUp, i), 1.0}},
                       system.generators()[i].g_max});
  }
  for (int i = 0; i < ng; ++i) {
    lp.add_constraint({{TagKind::GenResUpCap, i, -1},
                       Sense::Le,
                       {{lp.var_of(VarRole::GenResUp, i), 1.0}},
                       system.generators()[i].r_up_max});
  }
  return lp;
}

LpInstance build_network_lp(const System& system) {
  if (system.buses().empty())
    throw ModelMismatch("network model requires bus topology");

  const int nb = system.n_buses();
  const int ng = system.n_gens();
  const int nj = system.n_loads();
  const int nl = system.n_lines();
  const int nk = system.n_contingencies();
  const double hours = system.period_hours();
  const double base = system.base_mva();
  const double inf = std::numeric_limits<double>::infinity();

  LpInstance lp;
  lp.shape = {ModelKind::Network, nb, ng, nj, nl, nk};

  for (int i = 0; i < ng; ++i) {
    const auto& g = system.generators()[i];
    lp.add_variable({"g0[" + g.id + "]", VarRole::GenPower0, i, kPreState, 0.0, inf,
                     g.energy_offer * hours});
  }
  for (int i = 0; i < ng; ++i)
    lp.add_variable({"r_g_up[" + system.generators()[i].id + "]", VarRole::GenResUp, i, -1,
                     0.0, inf, system.generators()[i].up_offer});
  for (int i = 0; i < ng; ++i)
    lp.add_variable({"r_g_dn[" + system.generators()[i].id + "]", VarRole::GenResDn, i, -1,
                     0.0, inf, system.generators()[i].dn_offer});
  for (int k = 1; k <= nk; ++k)
    for (int i = 0; i < ng; ++i)
      lp.add_variable({"g[" + system.generators()[i].id + ",s" + std::to_string(k) + "]",
                       VarRole::GenPowerK, i, k, 0.0, inf, 0.0});
  for (int j = 0; j < nj; ++j) {
    const auto& d = system.loads()[j];
    lp.add_variable({"d0[" + d.id + "]", VarRole::DemPower0, j, kPreState, 0.0, inf,
                     -d.utility * hours});
  }
  for (int j = 0; j < nj; ++j)
    lp.add_variable({"r_d_up[" + system.loads()[j].id + "]", VarRole::DemResUp, j, -1, 0.0,
                     inf, system.loads()[j].up_offer});
  for (int j = 0; j < nj; ++j)
    lp.add_variable({"r_d_dn[" + system.loads()[j].id + "]", VarRole::DemResDn, j, -1, 0.0,
                     inf, system.loads()[j].dn_offer});
  for (int k = 1; k <= nk; ++k)
    for (int j = 0; j < nj; ++j)
      lp.add_variable({"d[" + system.loads()[j].id + ",s" + std::to_string(k) + "]",
                       VarRole::DemPowerK, j, k, 0.0, inf, 0.0});
  for (int s = 0; s <= nk; ++s)
    for (int b = 0; b < nb; ++b)
      lp.add_variable({"theta[" + system.buses()[b].id + ",s" + std::to_string(s) + "]",
                       VarRole::Angle, b, s, -inf, inf, 0.0});

  const NetworkMatrices m0 = build_matrices(system);

  // Per state: nodal balance, then flow bounds for in-service lines.
  for (int s = 0; s <= nk; ++s) {
    Mat inc = m0.incidence, bf = m0.branch_flow;
    std::vector<int> gen_avail(ng, 1), line_on(nl, 1);
    std::vector<std::vector<int>> islands;
    if (s == 0) {
      islands = find_islands(system, line_on);
    } else {
      auto view = contingency_view(system, s - 1);
      inc = view.incidence;
      bf = view.branch_flow;
      gen_avail = view.gen_available;
      line_on = view.line_in_service;
      islands = view.islands;
    }

    // Balance at bus b: sum(g) - sum_l A(b,l) * base * [H theta]_l - sum(d) = 0.
    // Fixed demand (if any load carries it) moves to the rhs.
    for (int b = 0; b < nb; ++b) {
      ConstraintTag tag = s == 0 ? ConstraintTag{TagKind::PreBalance, b, kPreState}
                                 : ConstraintTag{TagKind::PostBalance, b, s};
      Constraint c{tag, Sense::Eq, {}, 0.0};
      for (int i = 0; i < ng; ++i) {
        if (system.gen_bus(i) != b) continue;
        int v = s == 0 ? lp.var_of(VarRole::GenPower0, i, kPreState)
                       : lp.var_of(VarRole::GenPowerK, i, s);
        c.coeffs.push_back({v, 1.0});
      }
      for (int l = 0; l < nl; ++l) {
        const double a_bl = inc(b, l);
        if (a_bl == 0.0) continue;
        for (int bb = 0; bb < nb; ++bb) {
          const double h = bf(l, bb);
          if (h == 0.0) continue;
          c.coeffs.push_back({lp.var_of(VarRole::Angle, bb, s), -a_bl * base * h});
        }
      }
      for (int j = 0; j < nj; ++j) {
        if (system.load_bus(j) != b) continue;
        if (system.loads()[j].fixed_demand) {
          c.rhs += *system.loads()[j].fixed_demand;
        } else {
          int v = s == 0 ? lp.var_of(VarRole::DemPower0, j, kPreState)
                         : lp.var_of(VarRole::DemPowerK, j, s);
          c.coeffs.push_back({v, -1.0});
        }
      }
      lp.add_constraint(std::move(c));
    }

    for (int l = 0; l < nl; ++l) {
      if (!line_on[l]) continue;
      std::vector<std::pair<int, double>> flow;
      for (int bb = 0; bb < nb; ++bb) {
        const double h = bf(l, bb);
        if (h != 0.0) flow.push_back({lp.var_of(VarRole::Angle, bb, s), base * h});
      }
      const double cap = system.lines()[l].capacity;
      lp.add_constraint({{TagKind::FlowLower, l, s}, Sense::Ge, flow, -cap});
      lp.add_constraint({{TagKind::FlowUpper, l, s}, Sense::Le, flow, cap});
    }

    for (const auto& island : islands) {
      int ref = island.front();
      for (int b : island)
        if (b == system.reference_bus()) ref = b;
      lp.add_constraint({{TagKind::RefAngle, ref, s},
                         Sense::Eq,
                         {{lp.var_of(VarRole::Angle, ref, s), 1.0}},
                         0.0});
    }
  }

  // Generator reserve deployment links per contingency.
  for (int k = 1; k <= nk; ++k) {
    const auto view = contingency_view(system, k - 1);
    for (int i = 0; i < ng; ++i) {
      const double a = view.gen_available[i];
      {
        Constraint c{{TagKind::GenUpLink, i, k}, Sense::Le, {}, 0.0};
        c.coeffs.push_back({lp.var_of(VarRole::GenPowerK, i, k), 1.0});
        if (a != 0.0) {
          c.coeffs.push_back({lp.var_of(VarRole::GenPower0, i, kPreState), -a});
          c.coeffs.push_back({lp.var_of(VarRole::GenResUp, i), -a});
        }
        lp.add_constraint(std::move(c));
      }
      {
        Constraint c{{TagKind::GenDnLink, i, k}, Sense::Ge, {}, 0.0};
        c.coeffs.push_back({lp.var_of(VarRole::GenPowerK, i, k), 1.0});
        if (a != 0.0) {
          c.coeffs.push_back({lp.var_of(VarRole::GenPower0, i, kPreState), -a});
          c.coeffs.push_back({lp.var_of(VarRole::GenResDn, i), a});
        }
        lp.add_constraint(std::move(c));
      }
    }
  }

  for (int i = 0; i < ng; ++i)
    lp.add_constraint({{TagKind::GenCapUp, i, -1},
                       Sense::Le,
                       {{lp.var_of(VarRole::GenPower0, i, kPreState), 1.0},
                        {lp.var_of(VarRole::GenResUp, i), 1.0}},
                       system.generators()[i].g_max});
  for (int i = 0; i < ng; ++i)
    lp.add_constraint({{TagKind::GenCapDn, i, -1},
                       Sense::Ge,
                       {{lp.var_of(VarRole::GenPower0, i, kPreState), 1.0},
                        {lp.var_of(VarRole::GenResDn, i), -1.0}},
                       0.0});
  for (int i = 0; i < ng; ++i)
    lp.add_constraint({{TagKind::GenResUpCap, i, -1},
                       Sense::Le,
                       {{lp.var_of(VarRole::GenResUp, i), 1.0}},
                       system.generators()[i].r_up_max});
  for (int i = 0; i < ng; ++i)
    lp.add_constraint({{TagKind::GenResDnCap, i, -1},
                       Sense::Le,
                       {{lp.var_of(VarRole::GenResDn, i), 1.0}},
                       system.generators()[i].r_dn_max});

  // Demand-side links and bounds (skipped for fixed-demand loads, whose
  // consumption entered the balance rhs).
  for (int j = 0; j < nj; ++j) {
    if (system.loads()[j].fixed_demand) continue;
    for (int k = 1; k <= nk; ++k) {
      lp.add_constraint({{TagKind::DemUpLink, j, k},
                         Sense::Ge,
                         {{lp.var_of(VarRole::DemPowerK, j, k), 1.0},
                          {lp.var_of(VarRole::DemPower0, j, kPreState), -1.0},
                          {lp.var_of(VarRole::DemResUp, j), 1.0}},
                         0.0});
      lp.add_constraint({{TagKind::DemDnLink, j, k},
                         Sense::Le,
                         {{lp.var_of(VarRole::DemPowerK, j, k), 1.0},
                          {lp.var_of(VarRole::DemPower0, j, kPreState), -1.0},
                          {lp.var_of(VarRole::DemResDn, j), -1.0}},
                         0.0});
    }
    lp.add_constraint({{TagKind::DemLower, j, -1},
                       Sense::Ge,
                       {{lp.var_of(VarRole::DemPower0, j, kPreState), 1.0},
                        {lp.var_of(VarRole::DemResUp, j), -1.0}},
                       0.0});
    lp.add_constraint({{TagKind::DemUpper, j, -1},
                       Sense::Le,
                       {{lp.var_of(VarRole::DemPower0, j, kPreState), 1.0},
                        {lp.var_of(VarRole::DemResDn, j), 1.0}},
                       system.loads()[j].d_max});
    lp.add_constraint({{TagKind::DemResUpCap, j, -1},
                       Sense::Le,
                       {{lp.var_of(VarRole::DemResUp, j), 1.0}},
                       system.loads()[j].r_up_max});
    lp.add_constraint({{TagKind::DemResDnCap, j, -1},
                       Sense::Le,
                       {{lp.var_of(VarRole::DemResDn, j), 1.0}},
                       system.loads()[j].r_dn_max});
  }
  return lp;
}

LpInstance build_lp(const System& system, ModelKind kind) {
  return kind == ModelKind::SingleBus ? build_single_bus_lp(system)
                                      : build_network_lp(system);
}

}  // namespace ccm
