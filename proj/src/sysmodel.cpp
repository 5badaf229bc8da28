#include "ccm/sysmodel.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace ccm {

namespace {

void require_nonneg(std::vector<Violation>& out, const std::string& owner,
                    const std::string& field, double value) {
  if (value < 0.0) {
    out.push_back({Violation::Code::NegativeParameter,
                   owner + ": " + field + " must be >= 0, got " + std::to_string(value)});
  }
}

}  // namespace

std::vector<Violation> System::check(const MarketSystem& raw) {
  std::vector<Violation> v;
  using Code = Violation::Code;

  if (raw.buses.empty())
    v.push_back({Code::EmptySet, "system has no buses"});
  if (raw.generators.empty())
    v.push_back({Code::EmptySet, "system has no generators"});

  std::map<std::string, int> bus_idx;
  for (size_t i = 0; i < raw.buses.size(); ++i) {
    if (!bus_idx.emplace(raw.buses[i].id, static_cast<int>(i)).second)
      v.push_back({Code::DuplicateId, "duplicate bus id '" + raw.buses[i].id + "'"});
  }
  int n_ref = 0;
  for (const auto& b : raw.buses) n_ref += b.is_reference ? 1 : 0;
  if (n_ref > 1)
    v.push_back({Code::InvalidReference, "more than one bus marked as reference"});

  std::map<std::string, int> gen_idx, load_idx, line_idx;
  for (size_t i = 0; i < raw.generators.size(); ++i) {
    const auto& g = raw.generators[i];
    if (!gen_idx.emplace(g.id, static_cast<int>(i)).second)
      v.push_back({Code::DuplicateId, "duplicate generator id '" + g.id + "'"});
    if (!bus_idx.count(g.bus))
      v.push_back({Code::DanglingReference,
                   "generator '" + g.id + "' references unknown bus '" + g.bus + "'"});
    require_nonneg(v, "generator '" + g.id + "'", "g_max", g.g_max);
    require_nonneg(v, "generator '" + g.id + "'", "r_up_max", g.r_up_max);
    require_nonneg(v, "generator '" + g.id + "'", "r_dn_max", g.r_dn_max);
    require_nonneg(v, "generator '" + g.id + "'", "energy_offer", g.energy_offer);
    require_nonneg(v, "generator '" + g.id + "'", "up_offer", g.up_offer);
    require_nonneg(v, "generator '" + g.id + "'", "dn_offer", g.dn_offer);
  }
  for (size_t i = 0; i < raw.loads.size(); ++i) {
    const auto& d = raw.loads[i];
    if (!load_idx.emplace(d.id, static_cast<int>(i)).second)
      v.push_back({Code::DuplicateId, "duplicate load id '" + d.id + "'"});
    if (!bus_idx.count(d.bus))
      v.push_back({Code::DanglingReference,
                   "load '" + d.id + "' references unknown bus '" + d.bus + "'"});
    require_nonneg(v, "load '" + d.id + "'", "d_max", d.d_max);
    require_nonneg(v, "load '" + d.id + "'", "r_up_max", d.r_up_max);
    require_nonneg(v, "load '" + d.id + "'", "r_dn_max", d.r_dn_max);
    if (d.fixed_demand && *d.fixed_demand < 0.0)
      require_nonneg(v, "load '" + d.id + "'", "fixed_demand", *d.fixed_demand);
  }
  for (size_t i = 0; i < raw.lines.size(); ++i) {
    const auto& l = raw.lines[i];
    if (!line_idx.emplace(l.id, static_cast<int>(i)).second)
      v.push_back({Code::DuplicateId, "duplicate line id '" + l.id + "'"});
    for (const std::string* end : {&l.from_bus, &l.to_bus}) {
      if (!bus_idx.count(*end))
        v.push_back({Code::DanglingReference,
                     "line '" + l.id + "' references unknown bus '" + *end + "'"});
    }
    if (l.from_bus == l.to_bus)
      v.push_back({Code::InvalidReference, "line '" + l.id + "' connects a bus to itself"});
    if (!(l.reactance > 0.0))
      v.push_back({Code::NegativeParameter,
                   "line '" + l.id + "': reactance must be > 0, got " +
                       std::to_string(l.reactance)});
    require_nonneg(v, "line '" + l.id + "'", "capacity", l.capacity);
  }
  if (raw.base_mva <= 0.0)
    v.push_back({Code::NegativeParameter, "base_mva must be > 0"});
  if (raw.period_hours <= 0.0)
    v.push_back({Code::NegativeParameter, "period_hours must be > 0"});

  std::set<std::string> cont_ids;
  for (const auto& k : raw.contingencies) {
    if (!cont_ids.insert(k.id).second)
      v.push_back({Code::DuplicateId, "duplicate contingency id '" + k.id + "'"});
    if (k.generators.empty() && k.lines.empty())
      v.push_back({Code::EmptySet, "contingency '" + k.id + "' outages nothing"});
    for (const auto& gid : k.generators) {
      if (!gen_idx.count(gid))
        v.push_back({Code::DanglingReference,
                     "contingency '" + k.id + "' references unknown generator '" + gid + "'"});
    }
    for (const auto& lid : k.lines) {
      if (!line_idx.count(lid))
        v.push_back({Code::DanglingReference,
                     "contingency '" + k.id + "' references unknown line '" + lid + "'"});
    }
  }

  // Pre-contingency connectivity over the full line set.
  if (!raw.buses.empty() && v.empty()) {
    std::vector<std::vector<int>> adj(raw.buses.size());
    for (const auto& l : raw.lines) {
      int f = bus_idx.at(l.from_bus), t = bus_idx.at(l.to_bus);
      adj[f].push_back(t);
      adj[t].push_back(f);
    }
    std::vector<char> seen(raw.buses.size(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    size_t reached = 1;
    while (!stack.empty()) {
      int b = stack.back();
      stack.pop_back();
      for (int nb : adj[b]) {
        if (!seen[nb]) {
          seen[nb] = 1;
          ++reached;
          stack.push_back(nb);
        }
      }
    }
    if (reached != raw.buses.size())
      v.push_back({Code::DisconnectedPreContingencyNetwork,
                   "pre-contingency network is not connected (" + std::to_string(reached) +
                       " of " + std::to_string(raw.buses.size()) + " buses reachable)"});
  }

  return v;
}

System System::validate(MarketSystem raw) {
  auto violations = check(raw);
  if (!violations.empty()) {
    std::ostringstream os;
    os << "invalid market system (" << violations.size() << " violation"
       << (violations.size() == 1 ? "" : "s") << "):";
    for (const auto& x : violations) os << "\n  - " << x.message;
    throw ValidationError(os.str(), std::move(violations));
  }

  System s;
  s.raw_ = std::move(raw);
  for (size_t i = 0; i < s.raw_.buses.size(); ++i) {
    s.bus_idx_.emplace(s.raw_.buses[i].id, static_cast<int>(i));
    if (s.raw_.buses[i].is_reference) s.reference_bus_ = static_cast<int>(i);
  }
  std::map<std::string, int> gen_idx, line_idx;
  for (size_t i = 0; i < s.raw_.generators.size(); ++i) {
    gen_idx.emplace(s.raw_.generators[i].id, static_cast<int>(i));
    s.gen_bus_.push_back(s.bus_idx_.at(s.raw_.generators[i].bus));
  }
  for (const auto& d : s.raw_.loads) s.load_bus_.push_back(s.bus_idx_.at(d.bus));
  for (size_t i = 0; i < s.raw_.lines.size(); ++i) {
    line_idx.emplace(s.raw_.lines[i].id, static_cast<int>(i));
    s.line_from_.push_back(s.bus_idx_.at(s.raw_.lines[i].from_bus));
    s.line_to_.push_back(s.bus_idx_.at(s.raw_.lines[i].to_bus));
  }
  for (const auto& k : s.raw_.contingencies) {
    std::vector<int> gs, ls;
    for (const auto& gid : k.generators) gs.push_back(gen_idx.at(gid));
    for (const auto& lid : k.lines) ls.push_back(line_idx.at(lid));
    std::sort(gs.begin(), gs.end());
    std::sort(ls.begin(), ls.end());
    gs.erase(std::unique(gs.begin(), gs.end()), gs.end());
    ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
    s.outaged_gens_.push_back(std::move(gs));
    s.outaged_lines_.push_back(std::move(ls));
  }
  return s;
}

int System::bus_index(const std::string& id) const {
  auto it = bus_idx_.find(id);
  if (it == bus_idx_.end()) throw std::out_of_range("unknown bus id '" + id + "'");
  return it->second;
}

std::vector<int> System::contingencies_off(int g) const {
  std::vector<int> out;
  for (int k = 0; k < n_contingencies(); ++k) {
    const auto& og = outaged_gens_[k];
    if (std::binary_search(og.begin(), og.end(), g)) out.push_back(k);
  }
  return out;
}

ModelKind System::inferred_kind() const {
  bool all_fixed = !raw_.loads.empty();
  for (const auto& d : raw_.loads)
    if (!d.fixed_demand) all_fixed = false;
  bool gens_only = true;
  for (const auto& ol : outaged_lines_)
    if (!ol.empty()) gens_only = false;
  if (raw_.lines.empty() && raw_.buses.size() == 1 && all_fixed && gens_only)
    return ModelKind::SingleBus;
  return ModelKind::Network;
}

NetworkMatrices build_matrices(const System& system) {
  const int nb = system.n_buses();
  const int nl = system.n_lines();
  NetworkMatrices m;
  m.incidence = Mat(nb, nl);
  m.branch_flow = Mat(nl, nb);
  for (int l = 0; l < nl; ++l) {
    const int f = system.line_from(l), t = system.line_to(l);
    m.incidence(f, l) = 1.0;
    m.incidence(t, l) = -1.0;
    const double susceptance = 1.0 / system.lines()[l].reactance;
    m.branch_flow(l, f) = susceptance;
    m.branch_flow(l, t) = -susceptance;
  }
  m.gen_map = Mat(nb, system.n_gens());
  for (int g = 0; g < system.n_gens(); ++g) m.gen_map(system.gen_bus(g), g) = 1.0;
  m.load_map = Mat(nb, system.n_loads());
  for (int j = 0; j < system.n_loads(); ++j) m.load_map(system.load_bus(j), j) = 1.0;
  return m;
}

std::vector<std::vector<int>> find_islands(const System& system,
                                           const std::vector<int>& line_in_service) {
  const int nb = system.n_buses();
  std::vector<std::vector<int>> adj(nb);
  for (int l = 0; l < system.n_lines(); ++l) {
    if (!line_in_service[l]) continue;
    adj[system.line_from(l)].push_back(system.line_to(l));
    adj[system.line_to(l)].push_back(system.line_from(l));
  }
  std::vector<int> comp(nb, -1);
  int n_comp = 0;
  for (int start = 0; start < nb; ++start) {
    if (comp[start] >= 0) continue;
    std::vector<int> stack{start};
    comp[start] = n_comp;
    while (!stack.empty()) {
      int b = stack.back();
      stack.pop_back();
      for (int nbr : adj[b]) {
        if (comp[nbr] < 0) {
          comp[nbr] = n_comp;
          stack.push_back(nbr);
        }
      }
    }
    ++n_comp;
  }
  std::vector<std::vector<int>> islands(n_comp);
  for (int b = 0; b < nb; ++b) islands[comp[b]].push_back(b);
  // Components are discovered in order of their smallest bus, and members are
  // pushed in index order within each DFS... not guaranteed; sort for a stable
  // contract.
  for (auto& isl : islands) std::sort(isl.begin(), isl.end());
  std::sort(islands.begin(), islands.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return islands;
}

ContingencyView contingency_view(const System& system, int k) {
  ContingencyView view;
  view.gen_available.assign(system.n_gens(), 1);
  for (int g : system.outaged_gens(k)) view.gen_available[g] = 0;
  view.line_in_service.assign(system.n_lines(), 1);
  for (int l : system.outaged_lines(k)) view.line_in_service[l] = 0;

  NetworkMatrices base = build_matrices(system);
  view.incidence = base.incidence;
  view.branch_flow = base.branch_flow;
  for (int l : system.outaged_lines(k)) {
    for (int b = 0; b < system.n_buses(); ++b) {
      view.incidence(b, l) = 0.0;
      view.branch_flow(l, b) = 0.0;
    }
  }
  view.islands = find_islands(system, view.line_in_service);
  return view;
}

}  // namespace ccm
