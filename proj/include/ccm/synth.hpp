#pragma once

#include <random>

#include "ccm/sysmodel.hpp"

namespace ccm {

/// Bounds for randomized instances. All drawn parameters are small integers
/// (or integer halves for reactances) so downstream arithmetic on clean
/// optima stays exact.
struct SynthOptions {
  int max_buses = 4;
  int max_gens = 6;
  int max_loads = 3;
  int max_lines = 4;
  int max_contingencies = 5;
  bool single_bus = false;  // inelastic demand, generator outages only
};

/// Draws a random validated system. Network instances are always feasible
/// (demand is elastic); single-bus instances may be infeasible under heavy
/// outages and are meant to be filtered by solve status.
MarketSystem random_system(std::mt19937_64& rng, const SynthOptions& opts = {});

}  // namespace ccm
