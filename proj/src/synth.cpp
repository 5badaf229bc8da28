#include "ccm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ccm {

namespace {

int uniform(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace

MarketSystem random_system(std::mt19937_64& rng, const SynthOptions& opts) {
  MarketSystem s;
  s.base_mva = 100.0;
  s.period_hours = 1.0;

  const int nb = opts.single_bus ? 1 : uniform(rng, 1, opts.max_buses);
  for (int b = 0; b < nb; ++b) s.buses.push_back({"b" + std::to_string(b + 1), false});

  if (nb > 1) {
    // Spanning tree first, then optional extra corridors up to the line cap.
    for (int b = 1; b < nb; ++b) {
      Line l;
      l.id = "l" + std::to_string(s.lines.size() + 1);
      l.from_bus = s.buses[uniform(rng, 0, b - 1)].id;
      l.to_bus = s.buses[b].id;
      l.reactance = 0.5 * uniform(rng, 1, 4);
      l.capacity = 10.0 * uniform(rng, 3, 20);
      s.lines.push_back(std::move(l));
    }
    const int extra = uniform(rng, 0, std::max(0, opts.max_lines - nb + 1));
    for (int e = 0; e < extra && static_cast<int>(s.lines.size()) < opts.max_lines; ++e) {
      const int f = uniform(rng, 0, nb - 1);
      int t = uniform(rng, 0, nb - 1);
      if (t == f) t = (t + 1) % nb;
      Line l;
      l.id = "l" + std::to_string(s.lines.size() + 1);
      l.from_bus = s.buses[f].id;
      l.to_bus = s.buses[t].id;
      l.reactance = 0.5 * uniform(rng, 1, 4);
      l.capacity = 10.0 * uniform(rng, 3, 20);
      s.lines.push_back(std::move(l));
    }
  }

  const int ng = uniform(rng, 1, opts.max_gens);
  for (int i = 0; i < ng; ++i) {
    Generator g;
    g.id = "g" + std::to_string(i + 1);
    g.bus = s.buses[uniform(rng, 0, nb - 1)].id;
    g.g_max = 5.0 * uniform(rng, 4, 20);
    g.r_up_max = 5.0 * uniform(rng, 0, 8);
    g.r_dn_max = opts.single_bus ? 0.0 : 5.0 * uniform(rng, 0, 8);
    g.energy_offer = uniform(rng, 10, 100);
    g.up_offer = uniform(rng, 1, 20);
    g.dn_offer = opts.single_bus ? 0.0 : uniform(rng, 1, 20);
    s.generators.push_back(std::move(g));
  }

  double total_cap = 0.0;
  for (const auto& g : s.generators) total_cap += g.g_max;

  const int nj = opts.single_bus ? std::max(1, uniform(rng, 1, opts.max_loads))
                                 : uniform(rng, 0, opts.max_loads);
  for (int j = 0; j < nj; ++j) {
    Load d;
    d.id = "d" + std::to_string(j + 1);
    d.bus = s.buses[uniform(rng, 0, nb - 1)].id;
    if (opts.single_bus) {
      // Keep total fixed demand at half of installed capacity so most draws
      // survive the outage states.
      d.fixed_demand = std::floor(total_cap / (2.0 * nj));
      d.d_max = *d.fixed_demand;
    } else {
      d.d_max = 5.0 * uniform(rng, 2, 12);
      d.r_up_max = uniform(rng, 0, 15);
      d.r_dn_max = uniform(rng, 0, 15);
      d.utility = uniform(rng, 120, 300);
      d.up_offer = uniform(rng, 50, 400);
      d.dn_offer = uniform(rng, 50, 400);
    }
    s.loads.push_back(std::move(d));
  }

  const int nk = uniform(rng, 0, opts.max_contingencies);
  for (int k = 0; k < nk; ++k) {
    Contingency c;
    c.id = "k" + std::to_string(k + 1);
    const bool line_outage =
        !opts.single_bus && !s.lines.empty() && uniform(rng, 0, 2) == 0;
    if (line_outage) {
      c.lines.push_back(s.lines[uniform(rng, 0, static_cast<int>(s.lines.size()) - 1)].id);
    } else {
      c.generators.push_back(s.generators[uniform(rng, 0, ng - 1)].id);
      if (ng > 1 && uniform(rng, 0, 9) == 0) {
        const auto& second = s.generators[uniform(rng, 0, ng - 1)].id;
        if (second != c.generators.front()) c.generators.push_back(second);
      }
    }
    s.contingencies.push_back(std::move(c));
  }
  return s;
}

}  // namespace ccm
