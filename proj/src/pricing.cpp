#include "ccm/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ccm {

SplitDuals split_duals(const DualSolution& dual) {
  const int nb = dual.pi.rows();
  const int nk = dual.pi.cols() - 1;
  SplitDuals s{Mat(nb, nk), Mat(nb, nk)};
  for (int b = 0; b < nb; ++b)
    for (int k = 0; k < nk; ++k) {
      const double v = dual.pi(b, k + 1);
      s.plus(b, k) = std::max(v, 0.0);
      s.minus(b, k) = -std::min(v, 0.0);
    }
  return s;
}

PriceBook price_baseline(const DualSolution& dual, ModelKind kind) {
  PriceBook pb;
  pb.scheme = Scheme::Baseline;
  pb.kind = kind;
  const int nb = dual.pi.rows();
  const int nk = dual.pi.cols() - 1;
  for (int b = 0; b < nb; ++b) {
    double sum_k = 0.0;
    for (int k = 1; k <= nk; ++k) sum_k += dual.pi(b, k);
    pb.security.push_back(sum_k);
    pb.energy.push_back(dual.pi(b, 0) + sum_k);
  }
  return pb;
}

PriceBook price_proposed(const DualSolution& dual, ModelKind kind) {
  PriceBook pb;
  pb.scheme = Scheme::Proposed;
  pb.kind = kind;
  const SplitDuals sd = split_duals(dual);
  const int nb = dual.pi.rows();
  const int nk = dual.pi.cols() - 1;
  for (int b = 0; b < nb; ++b) {
    double up = 0.0, dn = 0.0;
    for (int k = 0; k < nk; ++k) {
      up += sd.plus(b, k);
      dn += sd.minus(b, k);
    }
    pb.up.push_back(up);
    pb.dn.push_back(dn);
    // Energy price through the split keeps p_e - pi0 == p_up - p_dn exact.
    pb.energy.push_back(dual.pi(b, 0) + up - dn);
  }
  if (kind == ModelKind::Network) {
    const int nl = dual.f_plus.rows();
    pb.transmission_by_state = Mat(nl, nk + 1, std::numeric_limits<double>::quiet_NaN());
    for (int l = 0; l < nl; ++l) {
      double price = 0.0;
      for (int s = 0; s <= nk; ++s) {
        const double fp = dual.f_plus(l, s), fm = dual.f_minus(l, s);
        if (std::isnan(fp) && std::isnan(fm)) continue;  // outaged in this state
        const double combined = (std::isnan(fp) ? 0.0 : fp) + (std::isnan(fm) ? 0.0 : fm);
        pb.transmission_by_state(l, s) = std::abs(combined);
        price += std::abs(combined);
      }
      pb.transmission.push_back(price);
    }
  }
  return pb;
}

SecurityCharges security_charges(const DualSolution& dual, const Schedules& sched,
                                 const System& system, ModelKind kind) {
  const SplitDuals sd = split_duals(dual);
  SecurityCharges out;
  for (int i = 0; i < system.n_gens(); ++i) {
    const int b = kind == ModelKind::SingleBus ? 0 : system.gen_bus(i);
    double total = 0.0;
    std::vector<std::pair<int, double>> items;
    for (int k : system.contingencies_off(i)) {
      double amount;
      if (kind == ModelKind::SingleBus) {
        amount = dual.pi(b, k + 1) * (sched.g0[i] + sched.r_g_up[i]);
      } else {
        amount = dual.pi(b, k + 1) * sched.g0[i] + sd.plus(b, k) * sched.r_g_up[i] +
                 sd.minus(b, k) * sched.r_g_dn[i];
      }
      items.push_back({k, amount});
      total += amount;
    }
    out.total.push_back(total);
    out.by_contingency.push_back(std::move(items));
  }
  return out;
}

BestResponse best_response_gen(double pi, double g0, double r_up, double r_dn,
                               int availability, ModelKind kind) {
  const double a = availability ? 1.0 : 0.0;
  const double hi = a * (g0 + r_up);
  const double lo = kind == ModelKind::SingleBus ? 0.0 : std::max(0.0, a * (g0 - r_dn));
  BestResponse r;
  if (pi > 0.0)
    r.deployed = hi;
  else if (pi < 0.0)
    r.deployed = lo;
  else
    r.deployed = a * g0;
  r.value = pi == 0.0 ? 0.0 : pi * r.deployed;
  return r;
}

double gen_response_value(double pi, double g0, double r_up, double r_dn,
                          int availability, ModelKind kind) {
  const double a = availability ? 1.0 : 0.0;
  const double plus = std::max(pi, 0.0);
  const double minus = -std::min(pi, 0.0);
  if (kind == ModelKind::SingleBus) return plus * a * (g0 + r_up);
  return pi * a * g0 + plus * a * r_up + minus * a * r_dn;
}

BestResponse best_response_load(double pi, double d0, double r_up, double r_dn) {
  const double lo = std::max(0.0, d0 - r_up);
  const double hi = d0 + r_dn;
  BestResponse r;
  if (pi > 0.0)
    r.deployed = lo;
  else if (pi < 0.0)
    r.deployed = hi;
  else
    r.deployed = d0;
  r.value = pi == 0.0 ? 0.0 : pi * r.deployed;
  return r;
}

double load_response_value(double pi, double d0, double r_up, double r_dn) {
  return pi * d0 - std::max(pi, 0.0) * r_up - (-std::min(pi, 0.0)) * r_dn;
}

namespace {

// Per-agent inner maximum of the dual function: optimize the reserve terms
// out for fixed base quantity, then scan the breakpoints of the resulting
// piecewise-linear function. Exact for these box-plus-coupling polytopes.
double max_gen_term(double alpha, double beta, double gamma, double g_max,
                    double r_up_max, double r_dn_max) {
  auto value_at = [&](double g) {
    const double ru = beta > 0.0 ? std::min(r_up_max, g_max - g) : 0.0;
    const double rd = gamma > 0.0 ? std::min(r_dn_max, g) : 0.0;
    return alpha * g + beta * ru + gamma * rd;
  };
  double best = 0.0;  // g0 = ru = rd = 0 is always feasible
  std::vector<double> cands{0.0, g_max};
  if (g_max - r_up_max > 0.0 && g_max - r_up_max < g_max) cands.push_back(g_max - r_up_max);
  if (r_dn_max > 0.0 && r_dn_max < g_max) cands.push_back(r_dn_max);
  for (double g : cands) best = std::max(best, value_at(g));
  return best;
}

double max_load_term(double alpha, double beta, double gamma, double d_max,
                     double r_up_max, double r_dn_max) {
  auto value_at = [&](double d) {
    const double ru = beta > 0.0 ? std::min(r_up_max, d) : 0.0;
    const double rd = gamma > 0.0 ? std::min(r_dn_max, d_max - d) : 0.0;
    return alpha * d + beta * ru + gamma * rd;
  };
  double best = 0.0;
  std::vector<double> cands{0.0, d_max};
  if (r_up_max > 0.0 && r_up_max < d_max) cands.push_back(r_up_max);
  if (d_max - r_dn_max > 0.0 && d_max - r_dn_max < d_max) cands.push_back(d_max - r_dn_max);
  for (double d : cands) best = std::max(best, value_at(d));
  return best;
}

}  // namespace

double ld_value(const DualSolution& dual, const System& system, ModelKind kind) {
  const double hours = system.period_hours();
  const int nk = system.n_contingencies();
  const SplitDuals sd = split_duals(dual);
  double phi = 0.0;

  if (kind == ModelKind::Network) {
    for (int l = 0; l < system.n_lines(); ++l) {
      double price = 0.0;
      for (int s = 0; s <= nk; ++s) {
        const double fp = dual.f_plus(l, s), fm = dual.f_minus(l, s);
        if (std::isnan(fp) && std::isnan(fm)) continue;
        price += (std::isnan(fp) ? 0.0 : fp) - (std::isnan(fm) ? 0.0 : fm);
      }
      phi -= price * system.lines()[l].capacity;
    }
  }

  for (int i = 0; i < system.n_gens(); ++i) {
    const auto& g = system.generators()[i];
    const int b = kind == ModelKind::SingleBus ? 0 : system.gen_bus(i);
    double sum_pi_avail = 0.0, sum_plus_avail = 0.0, sum_minus_avail = 0.0;
    const auto off = system.contingencies_off(i);
    for (int k = 0; k < nk; ++k) {
      if (std::binary_search(off.begin(), off.end(), k)) continue;
      sum_pi_avail += dual.pi(b, k + 1);
      sum_plus_avail += sd.plus(b, k);
      sum_minus_avail += sd.minus(b, k);
    }
    const double alpha = dual.pi(b, 0) + sum_pi_avail - g.energy_offer * hours;
    const double beta = sum_plus_avail - g.up_offer;
    if (kind == ModelKind::SingleBus) {
      phi -= max_gen_term(alpha, beta, 0.0, g.g_max, g.r_up_max, 0.0);
    } else {
      const double gamma = sum_minus_avail - g.dn_offer;
      phi -= max_gen_term(alpha, beta, gamma, g.g_max, g.r_up_max, g.r_dn_max);
    }
  }

  for (int j = 0; j < system.n_loads(); ++j) {
    const auto& d = system.loads()[j];
    const int b = kind == ModelKind::SingleBus ? 0 : system.load_bus(j);
    double sum_pi = 0.0, sum_plus = 0.0, sum_minus = 0.0;
    for (int k = 0; k < nk; ++k) {
      sum_pi += dual.pi(b, k + 1);
      sum_plus += sd.plus(b, k);
      sum_minus += sd.minus(b, k);
    }
    if (kind == ModelKind::SingleBus || d.fixed_demand) {
      phi += (dual.pi(b, 0) + sum_pi) * (d.fixed_demand ? *d.fixed_demand : 0.0);
    } else {
      const double alpha = d.utility * hours - dual.pi(b, 0) - sum_pi;
      const double beta = sum_plus - d.up_offer;
      const double gamma = sum_minus - d.dn_offer;
      phi -= max_load_term(alpha, beta, gamma, d.d_max, d.r_up_max, d.r_dn_max);
    }
  }
  return phi;
}

}  // namespace ccm
