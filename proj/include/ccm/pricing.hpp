#pragma once

#include <vector>

#include "ccm/lpsolve.hpp"
#include "ccm/matrix.hpp"
#include "ccm/sysmodel.hpp"

namespace ccm {

enum class Scheme { Baseline, Proposed };

/// Positive/negative parts of the post-contingency balance duals:
/// plus = max(pi, 0), minus = -min(pi, 0), so plus - minus = pi and
/// plus * minus = 0 entry-wise.
struct SplitDuals {
  Mat plus;   // buses x K
  Mat minus;  // buses x K
};

SplitDuals split_duals(const DualSolution& dual);

/// Prices are expressed per MW over the trading period; with a one-hour
/// period the energy price is the usual $/MWh figure.
struct PriceBook {
  Scheme scheme = Scheme::Proposed;
  ModelKind kind = ModelKind::SingleBus;
  std::vector<double> energy;    // per bus
  std::vector<double> security;  // per bus, Baseline only
  std::vector<double> up;        // per bus, Proposed only
  std::vector<double> dn;        // per bus, Proposed only
  std::vector<double> transmission;  // per line, Proposed only
  Mat transmission_by_state;         // lines x (K+1); NaN where line outaged
};

PriceBook price_baseline(const DualSolution& dual, ModelKind kind);
PriceBook price_proposed(const DualSolution& dual, ModelKind kind);

/// Charges levied on generators for the contingencies they cause, itemized
/// per contingency state.
struct SecurityCharges {
  std::vector<double> total;  // per generator
  std::vector<std::vector<std::pair<int, double>>> by_contingency;  // (k, amount)
};

SecurityCharges security_charges(const DualSolution& dual, const Schedules& sched,
                                 const System& system, ModelKind kind);

struct BestResponse {
  double deployed = 0.0;  // optimal post-contingency quantity
  double value = 0.0;     // objective of the per-state response problem
};

/// Per-contingency generator response to the post-state price: the deployed
/// output maximizing pi * g within the scheduled band. In the single-bus
/// model the band is [0, a (g0 + r_up)]; in the network model it is
/// [a (g0 - r_dn), a (g0 + r_up)].
BestResponse best_response_gen(double pi, double g0, double r_up, double r_dn,
                               int availability, ModelKind kind);

/// Closed form of the generator response value:
/// pi * a * g0 + max(pi,0) * a * r_up + (-min(pi,0)) * a * r_dn for the
/// network model, max(pi,0) * a * (g0 + r_up) for the single-bus model.
double gen_response_value(double pi, double g0, double r_up, double r_dn,
                          int availability, ModelKind kind);

/// Per-contingency consumer response: minimizes pi * d over
/// [d0 - r_up, d0 + r_dn].
BestResponse best_response_load(double pi, double d0, double r_up, double r_dn);

/// Closed form pi * d0 - max(pi,0) * r_up - (-min(pi,0)) * r_dn.
double load_response_value(double pi, double d0, double r_up, double r_dn);

/// Lagrangian-dual objective evaluated through the per-agent closed forms and
/// the transmission term. Assumes the angle-stationarity terms vanish, which
/// holds for any optimal dual; at such a dual this equals the primal optimum.
double ld_value(const DualSolution& dual, const System& system, ModelKind kind);

}  // namespace ccm
