#include "ccm/settlement.hpp"

#include <cmath>

namespace ccm {

SettlementReport settle(const Schedules& sched, const PriceBook& prices,
                        const SecurityCharges* charges, const System& system) {
  if (prices.scheme == Scheme::Baseline && charges != nullptr)
    throw SchemeMismatch("security charges supplied with a baseline price book");
  if (prices.scheme == Scheme::Proposed && charges == nullptr)
    throw SchemeMismatch("proposed-scheme settlement requires security charges");

  const bool proposed = prices.scheme == Scheme::Proposed;
  const ModelKind kind = prices.kind;
  const double hours = system.period_hours();

  SettlementReport rep;
  rep.scheme = prices.scheme;
  rep.kind = kind;

  for (int i = 0; i < system.n_gens(); ++i) {
    const auto& g = system.generators()[i];
    const int b = kind == ModelKind::SingleBus ? 0 : system.gen_bus(i);
    GeneratorRow row;
    row.id = g.id;
    row.r_energy = prices.energy[b] * sched.g0[i];
    const double up_price = proposed ? prices.up[b] : prices.security[b];
    row.r_up = up_price * sched.r_g_up[i];
    if (kind == ModelKind::Network) {
      const double dn_price = proposed ? prices.dn[b] : prices.security[b];
      row.r_dn = dn_price * sched.r_g_dn[i];
    }
    row.c_security = proposed ? charges->total[i] : 0.0;
    row.r_total = row.r_energy + row.r_up + row.r_dn - row.c_security;
    row.c_energy = g.energy_offer * hours * sched.g0[i];
    row.c_up = g.up_offer * sched.r_g_up[i];
    row.c_dn = kind == ModelKind::Network ? g.dn_offer * sched.r_g_dn[i] : 0.0;
    row.c_total = row.c_energy + row.c_up + row.c_dn;
    row.profit = row.r_total - row.c_total;
    rep.generators.push_back(std::move(row));
  }

  for (int j = 0; j < system.n_loads(); ++j) {
    const auto& d = system.loads()[j];
    const int b = kind == ModelKind::SingleBus ? 0 : system.load_bus(j);
    ConsumerRow row;
    row.id = d.id;
    row.elastic = kind == ModelKind::Network && !d.fixed_demand;
    row.cp_energy = prices.energy[b] * sched.d0[j];
    if (row.elastic) {
      const double up_price = proposed ? prices.up[b] : prices.security[b];
      const double dn_price = proposed ? prices.dn[b] : prices.security[b];
      row.r_up = up_price * sched.r_d_up[j];
      row.r_dn = dn_price * sched.r_d_dn[j];
      row.payment = row.cp_energy - row.r_up - row.r_dn;
      row.utility = d.utility * hours * sched.d0[j];
      row.c_up = d.up_offer * sched.r_d_up[j];
      row.c_dn = d.dn_offer * sched.r_d_dn[j];
      row.c_total = row.c_up + row.c_dn;
      row.profit = row.utility - row.c_total - row.payment;
    } else {
      row.payment = row.cp_energy;
    }
    rep.consumers.push_back(std::move(row));
  }

  if (proposed && kind == ModelKind::Network) {
    for (int l = 0; l < system.n_lines(); ++l) {
      TransmissionRow row;
      row.id = system.lines()[l].id;
      row.price = prices.transmission[l];
      row.revenue = row.price * system.lines()[l].capacity;
      rep.lines.push_back(std::move(row));
    }
  }

  for (const auto& r : rep.generators) rep.system.generation_revenue += r.r_total;
  for (const auto& r : rep.consumers) rep.system.consumer_payment += r.payment;
  for (const auto& r : rep.lines) rep.system.transmission_revenue += r.revenue;
  rep.system.balance = rep.system.consumer_payment -
                       (rep.system.generation_revenue + rep.system.transmission_revenue);
  return rep;
}

AdequacyVerdict verify_adequacy(const SettlementReport& report, double tol_money) {
  AdequacyVerdict v;
  v.pass = true;
  v.min_profit = 0.0;
  bool first = true;
  auto consider = [&](const std::string& id, double profit) {
    if (first || profit < v.min_profit) v.min_profit = profit;
    first = false;
    if (profit < -tol_money) {
      v.pass = false;
      v.violators.push_back(id);
    }
  };
  for (const auto& g : report.generators) consider("generator " + g.id, g.profit);
  if (report.kind == ModelKind::Network)
    for (const auto& c : report.consumers)
      if (c.elastic) consider("consumer " + c.id, c.profit);
  return v;
}

NeutralityVerdict verify_neutrality(const SettlementReport& report, ModelKind kind,
                                    double tol_money) {
  (void)kind;  // the report already carries zero transmission rows off-network
  NeutralityVerdict v;
  v.imbalance = report.system.balance;
  v.pass = std::abs(v.imbalance) <= tol_money;
  return v;
}

SchemeDiff compare_schemes(const SettlementReport& baseline,
                           const SettlementReport& proposed) {
  if (baseline.scheme != Scheme::Baseline || proposed.scheme != Scheme::Proposed)
    throw SchemeMismatch("compare_schemes expects (baseline, proposed) reports");
  SchemeDiff diff;
  for (size_t i = 0; i < baseline.generators.size(); ++i) {
    const auto& b = baseline.generators[i];
    const auto& p = proposed.generators[i];
    diff.generators.push_back({b.id, p.r_energy - b.r_energy, p.r_up - b.r_up,
                               p.r_dn - b.r_dn, p.r_total - b.r_total,
                               p.profit - b.profit});
    diff.sum_security_charges += p.c_security;
  }
  for (size_t j = 0; j < baseline.consumers.size(); ++j) {
    const auto& b = baseline.consumers[j];
    const auto& p = proposed.consumers[j];
    diff.consumers.push_back({b.id, p.cp_energy - b.cp_energy, p.r_up - b.r_up,
                              p.r_dn - b.r_dn, p.payment - b.payment,
                              p.profit - b.profit});
  }
  diff.baseline_missing_money = -baseline.system.balance;
  diff.proposed_missing_money = -proposed.system.balance;
  return diff;
}

}  // namespace ccm
