#pragma once

#include <string>

#include "ccm/sysmodel.hpp"

namespace ccm::testing {

/// Three generators on one bus, 120 MW inelastic demand, one outage
/// contingency per generator. Known optimum: cost 5,800, g0 = (65, 30, 25),
/// r_up = (0, 30, 35), balance duals (20; 80, 0, 0).
MarketSystem single_bus_case();

/// Two buses joined by a 70 MW line (x = 1 p.u. on 100 MVA), same fleet with
/// down reserves, two elastic loads, three generator outages plus the line
/// outage. Known optimum: objective -15,475, balance duals
/// bus1 (20; 180, 0, 0, 0), bus2 (20; 85, 0, 0, -5).
MarketSystem two_bus_case();

/// Location of a bundled data file; honors CCM_DATA_DIR.
std::string data_file(const std::string& name);

}  // namespace ccm::testing
