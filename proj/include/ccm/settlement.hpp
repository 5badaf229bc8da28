#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ccm/pricing.hpp"

namespace ccm {

struct GeneratorRow {
  std::string id;
  double r_energy = 0.0;
  double r_up = 0.0;
  double r_dn = 0.0;
  double c_security = 0.0;  // Proposed only
  double r_total = 0.0;
  double c_energy = 0.0;
  double c_up = 0.0;
  double c_dn = 0.0;
  double c_total = 0.0;
  double profit = 0.0;
};

struct ConsumerRow {
  std::string id;
  bool elastic = true;  // false for fixed-demand loads, which pay energy only
  double cp_energy = 0.0;
  double r_up = 0.0;
  double r_dn = 0.0;
  double payment = 0.0;
  double utility = 0.0;
  double c_up = 0.0;
  double c_dn = 0.0;
  double c_total = 0.0;
  double profit = 0.0;
};

struct TransmissionRow {
  std::string id;
  double price = 0.0;
  double revenue = 0.0;  // price * capacity
};

struct SystemBalance {
  double consumer_payment = 0.0;
  double generation_revenue = 0.0;
  double transmission_revenue = 0.0;
  double balance = 0.0;  // CP - (generation + transmission)
};

struct SettlementReport {
  Scheme scheme = Scheme::Proposed;
  ModelKind kind = ModelKind::SingleBus;
  std::vector<GeneratorRow> generators;
  std::vector<ConsumerRow> consumers;
  std::vector<TransmissionRow> lines;
  SystemBalance system;
};

class SchemeMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Monetary settlement of a solved schedule under the given price book.
/// `charges` must be supplied for the Proposed scheme and must be null for
/// the Baseline scheme.
SettlementReport settle(const Schedules& sched, const PriceBook& prices,
                        const SecurityCharges* charges, const System& system);

struct AdequacyVerdict {
  bool pass = false;
  double min_profit = 0.0;
  std::vector<std::string> violators;
};

/// Every generator (and, in the network model, every elastic consumer) must
/// clear with profit >= -tol.
AdequacyVerdict verify_adequacy(const SettlementReport& report, double tol_money);

struct NeutralityVerdict {
  bool pass = false;
  double imbalance = 0.0;  // CP - (generation + transmission)
};

NeutralityVerdict verify_neutrality(const SettlementReport& report, ModelKind kind,
                                    double tol_money);

struct GeneratorDelta {
  std::string id;
  double r_energy = 0.0, r_up = 0.0, r_dn = 0.0, r_total = 0.0, profit = 0.0;
};

struct ConsumerDelta {
  std::string id;
  double cp_energy = 0.0, r_up = 0.0, r_dn = 0.0, payment = 0.0, profit = 0.0;
};

/// Proposed-minus-baseline differences plus the aggregate quantities behind
/// the missing-money comparison.
struct SchemeDiff {
  std::vector<GeneratorDelta> generators;
  std::vector<ConsumerDelta> consumers;
  double sum_security_charges = 0.0;
  double baseline_missing_money = 0.0;  // baseline revenues minus payments
  double proposed_missing_money = 0.0;
};

SchemeDiff compare_schemes(const SettlementReport& baseline,
                           const SettlementReport& proposed);

}  // namespace ccm
