#include "ccm/io.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ccm/formulation.hpp"

namespace ccm {

namespace {

double get_num(const ordered_json& j, const std::string& key, const std::string& owner,
               std::optional<double> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw ParseError(owner + ": missing field '" + key + "'");
  }
  if (!j.at(key).is_number())
    throw ParseError(owner + ": field '" + key + "' must be a number");
  return j.at(key).get<double>();
}

std::string get_str(const ordered_json& j, const std::string& key,
                    const std::string& owner) {
  if (!j.contains(key) || !j.at(key).is_string())
    throw ParseError(owner + ": missing string field '" + key + "'");
  return j.at(key).get<std::string>();
}

}  // namespace

MarketSystem system_from_json(const ordered_json& j) {
  if (!j.is_object()) throw ParseError("top level must be an object");
  MarketSystem s;
  s.base_mva = get_num(j, "base_mva", "system", 100.0);
  s.period_hours = get_num(j, "period_hours", "system", 1.0);

  if (!j.contains("buses") || !j.at("buses").is_array())
    throw ParseError("system: missing array field 'buses'");
  for (const auto& bj : j.at("buses")) {
    Bus b;
    b.id = get_str(bj, "id", "bus");
    b.is_reference = bj.value("reference", false);
    s.buses.push_back(std::move(b));
  }
  for (const auto& lj : j.value("lines", ordered_json::array())) {
    Line l;
    l.id = get_str(lj, "id", "line");
    l.from_bus = get_str(lj, "from", "line '" + l.id + "'");
    l.to_bus = get_str(lj, "to", "line '" + l.id + "'");
    l.reactance = get_num(lj, "reactance", "line '" + l.id + "'");
    l.capacity = get_num(lj, "capacity", "line '" + l.id + "'");
    s.lines.push_back(std::move(l));
  }
  if (!j.contains("generators") || !j.at("generators").is_array())
    throw ParseError("system: missing array field 'generators'");
  for (const auto& gj : j.at("generators")) {
    Generator g;
    g.id = get_str(gj, "id", "generator");
    const std::string owner = "generator '" + g.id + "'";
    g.bus = get_str(gj, "bus", owner);
    g.g_max = get_num(gj, "g_max", owner);
    g.r_up_max = get_num(gj, "r_up_max", owner, 0.0);
    g.r_dn_max = get_num(gj, "r_dn_max", owner, 0.0);
    g.energy_offer = get_num(gj, "energy_offer", owner);
    g.up_offer = get_num(gj, "up_offer", owner, 0.0);
    g.dn_offer = get_num(gj, "dn_offer", owner, 0.0);
    s.generators.push_back(std::move(g));
  }
  for (const auto& dj : j.value("loads", ordered_json::array())) {
    Load d;
    d.id = get_str(dj, "id", "load");
    const std::string owner = "load '" + d.id + "'";
    d.bus = get_str(dj, "bus", owner);
    d.d_max = get_num(dj, "d_max", owner, 0.0);
    d.r_up_max = get_num(dj, "r_up_max", owner, 0.0);
    d.r_dn_max = get_num(dj, "r_dn_max", owner, 0.0);
    d.utility = get_num(dj, "utility", owner, 0.0);
    d.up_offer = get_num(dj, "up_offer", owner, 0.0);
    d.dn_offer = get_num(dj, "dn_offer", owner, 0.0);
    if (dj.contains("fixed_demand") && !dj.at("fixed_demand").is_null())
      d.fixed_demand = get_num(dj, "fixed_demand", owner);
    s.loads.push_back(std::move(d));
  }
  for (const auto& kj : j.value("contingencies", ordered_json::array())) {
    Contingency k;
    k.id = get_str(kj, "id", "contingency");
    for (const auto& g : kj.value("generators", ordered_json::array()))
      k.generators.push_back(g.get<std::string>());
    for (const auto& l : kj.value("lines", ordered_json::array()))
      k.lines.push_back(l.get<std::string>());
    s.contingencies.push_back(std::move(k));
  }
  return s;
}

ordered_json system_to_json(const MarketSystem& s) {
  ordered_json j;
  j["base_mva"] = s.base_mva;
  j["period_hours"] = s.period_hours;
  j["buses"] = ordered_json::array();
  for (const auto& b : s.buses) {
    ordered_json bj{{"id", b.id}};
    if (b.is_reference) bj["reference"] = true;
    j["buses"].push_back(std::move(bj));
  }
  j["lines"] = ordered_json::array();
  for (const auto& l : s.lines)
    j["lines"].push_back({{"id", l.id},
                          {"from", l.from_bus},
                          {"to", l.to_bus},
                          {"reactance", l.reactance},
                          {"capacity", l.capacity}});
  j["generators"] = ordered_json::array();
  for (const auto& g : s.generators)
    j["generators"].push_back({{"id", g.id},
                               {"bus", g.bus},
                               {"g_max", g.g_max},
                               {"r_up_max", g.r_up_max},
                               {"r_dn_max", g.r_dn_max},
                               {"energy_offer", g.energy_offer},
                               {"up_offer", g.up_offer},
                               {"dn_offer", g.dn_offer}});
  j["loads"] = ordered_json::array();
  for (const auto& d : s.loads) {
    ordered_json dj{{"id", d.id},
                    {"bus", d.bus},
                    {"d_max", d.d_max},
                    {"r_up_max", d.r_up_max},
                    {"r_dn_max", d.r_dn_max},
                    {"utility", d.utility},
                    {"up_offer", d.up_offer},
                    {"dn_offer", d.dn_offer}};
    if (d.fixed_demand) dj["fixed_demand"] = *d.fixed_demand;
    j["loads"].push_back(std::move(dj));
  }
  j["contingencies"] = ordered_json::array();
  for (const auto& k : s.contingencies)
    j["contingencies"].push_back(
        {{"id", k.id}, {"generators", k.generators}, {"lines", k.lines}});
  return j;
}

MarketSystem load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
  MarketSystem s = system_from_json(j);
  return validate_system(std::move(s));
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

namespace {

SchemeResult make_scheme_result(Scheme scheme, const DualSolution& dual,
                                const Schedules& sched, const System& system,
                                ModelKind kind, const Tolerances& tol) {
  SchemeResult r;
  if (scheme == Scheme::Baseline) {
    r.prices = price_baseline(dual, kind);
    r.settlement = settle(sched, r.prices, nullptr, system);
  } else {
    r.prices = price_proposed(dual, kind);
    r.charges = security_charges(dual, sched, system, kind);
    r.settlement = settle(sched, r.prices, &r.charges, system);
  }
  r.adequacy = verify_adequacy(r.settlement, tol.money);
  r.neutrality = verify_neutrality(r.settlement, kind, tol.money);
  return r;
}

}  // namespace

RunArchive run_scenario(const ScenarioConfig& config) {
  if (!config.run_baseline && !config.run_proposed)
    throw ParseError("no scheme selected (need baseline, proposed, or both)");
  RunArchive a;
  a.input_path = config.system_path;
  a.tol = config.tol;
  a.input_sha256 = sha256_file(config.system_path);
  const System system = System::validate(load_system(config.system_path));

  if (config.model_kind == "auto")
    a.kind = system.inferred_kind();
  else if (config.model_kind == "single-bus")
    a.kind = ModelKind::SingleBus;
  else if (config.model_kind == "network")
    a.kind = ModelKind::Network;
  else
    throw ParseError("unknown model kind '" + config.model_kind + "'");

  for (const auto& b : system.buses()) a.bus_ids.push_back(b.id);
  for (const auto& g : system.generators()) a.gen_ids.push_back(g.id);
  for (const auto& d : system.loads()) a.load_ids.push_back(d.id);
  for (const auto& l : system.lines()) a.line_ids.push_back(l.id);
  for (const auto& k : system.contingencies()) a.contingency_ids.push_back(k.id);

  const LpInstance lp = build_lp(system, a.kind);
  SolverOptions sopts;
  sopts.tol_feas = config.tol.feas;
  sopts.tol_gap = config.tol.gap;
  sopts.parallel = config.parallel_solver;
  const SolveResult sol = solve(lp, sopts);
  a.status = sol.status;
  a.iterations = sol.iterations;
  if (sol.status != SolveStatus::Optimal) {
    a.error = sol.diagnostics;
    return a;
  }
  a.objective = sol.primal.objective;

  KktTolerances ktol;
  ktol.feas = config.tol.feas;
  ktol.cs = config.tol.cs;
  ktol.gap_rel = config.tol.gap;
  a.certificate = check_kkt(lp, sol.primal, sol.dual, ktol);
  a.schedules = extract_schedules(system, lp, sol.primal.x);
  a.duals = sol.dual;

  if (config.run_baseline)
    a.baseline = make_scheme_result(Scheme::Baseline, a.duals, a.schedules, system,
                                    a.kind, config.tol);
  if (config.run_proposed)
    a.proposed = make_scheme_result(Scheme::Proposed, a.duals, a.schedules, system,
                                    a.kind, config.tol);
  a.verdicts_pass =
      !a.proposed || (a.proposed->adequacy.pass && a.proposed->neutrality.pass);

  if (config.stamp) {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%FT%TZ", &tm);
    a.stamp = buf;
  }
  return a;
}

std::vector<RunArchive> run_batch(const std::vector<ScenarioConfig>& configs, int jobs) {
  std::vector<RunArchive> out(configs.size());
  const int n = static_cast<int>(configs.size());
  if (jobs < 1) jobs = 1;
#pragma omp parallel for schedule(dynamic) num_threads(jobs) if (jobs > 1)
  for (int i = 0; i < n; ++i) {
    try {
      out[i] = run_scenario(configs[i]);
    } catch (const std::exception& e) {
      out[i].input_path = configs[i].system_path;
      out[i].error = e.what();
      out[i].failed_before_solve = true;
    }
  }
  return out;
}

int exit_code_for(const RunArchive& a) {
  if (a.failed_before_solve) return kExitInput;
  if (a.status != SolveStatus::Optimal) return kExitInfeasible;
  if (!a.verdicts_pass) return kExitVerdict;
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

ordered_json num_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

ordered_json mat_row(const Mat& m, int r) {
  ordered_json out = ordered_json::array();
  for (int c = 0; c < m.cols(); ++c) out.push_back(num_or_null(m(r, c)));
  return out;
}

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::NumericalFailure: return "numerical-failure";
  }
  return "?";
}

ordered_json scheme_to_json(const SchemeResult& r, ModelKind kind) {
  ordered_json j;
  const bool proposed = r.prices.scheme == Scheme::Proposed;
  ordered_json prices = ordered_json::array();
  for (size_t b = 0; b < r.prices.energy.size(); ++b) {
    ordered_json pj{{"energy", r.prices.energy[b]}};
    if (proposed) {
      pj["up"] = r.prices.up[b];
      pj["dn"] = r.prices.dn[b];
    } else {
      pj["security"] = r.prices.security[b];
    }
    prices.push_back(std::move(pj));
  }
  j["prices"] = std::move(prices);
  if (proposed && kind == ModelKind::Network) {
    ordered_json tr = ordered_json::array();
    for (size_t l = 0; l < r.prices.transmission.size(); ++l)
      tr.push_back({{"price", r.prices.transmission[l]},
                    {"by_state", mat_row(r.prices.transmission_by_state,
                                         static_cast<int>(l))}});
    j["transmission_prices"] = std::move(tr);
  }
  if (proposed) {
    ordered_json ch = ordered_json::array();
    for (size_t i = 0; i < r.charges.total.size(); ++i) {
      ordered_json items = ordered_json::array();
      for (const auto& [k, amount] : r.charges.by_contingency[i])
        items.push_back({{"contingency", k}, {"amount", amount}});
      ch.push_back({{"total", r.charges.total[i]}, {"items", std::move(items)}});
    }
    j["security_charges"] = std::move(ch);
  }

  ordered_json gens = ordered_json::array();
  for (const auto& g : r.settlement.generators) {
    gens.push_back({{"id", g.id},
                    {"r_energy", g.r_energy},
                    {"r_up", g.r_up},
                    {"r_dn", g.r_dn},
                    {"c_security", g.c_security},
                    {"r_total", g.r_total},
                    {"c_energy", g.c_energy},
                    {"c_up", g.c_up},
                    {"c_dn", g.c_dn},
                    {"c_total", g.c_total},
                    {"profit", g.profit}});
  }
  ordered_json cons = ordered_json::array();
  for (const auto& c : r.settlement.consumers) {
    cons.push_back({{"id", c.id},
                    {"elastic", c.elastic},
                    {"cp_energy", c.cp_energy},
                    {"r_up", c.r_up},
                    {"r_dn", c.r_dn},
                    {"payment", c.payment},
                    {"utility", c.utility},
                    {"c_up", c.c_up},
                    {"c_dn", c.c_dn},
                    {"c_total", c.c_total},
                    {"profit", c.profit}});
  }
  ordered_json trs = ordered_json::array();
  for (const auto& t : r.settlement.lines)
    trs.push_back({{"id", t.id}, {"price", t.price}, {"revenue", t.revenue}});
  j["settlement"] = {{"generators", std::move(gens)},
                     {"consumers", std::move(cons)},
                     {"transmission", std::move(trs)},
                     {"system",
                      {{"consumer_payment", r.settlement.system.consumer_payment},
                       {"generation_revenue", r.settlement.system.generation_revenue},
                       {"transmission_revenue", r.settlement.system.transmission_revenue},
                       {"balance", r.settlement.system.balance}}}};
  j["verdicts"] = {{"adequacy",
                    {{"pass", r.adequacy.pass},
                     {"min_profit", r.adequacy.min_profit},
                     {"violators", r.adequacy.violators}}},
                   {"neutrality",
                    {{"pass", r.neutrality.pass}, {"imbalance", r.neutrality.imbalance}}}};
  return j;
}

}  // namespace

ordered_json archive_to_json(const RunArchive& a) {
  ordered_json j;
  j["tool"] = {{"name", "ccmarket"}, {"version", "1.0.0"}};
  j["input"] = {{"path", a.input_path}, {"sha256", a.input_sha256}};
  if (!a.error.empty()) {
    j["error"] = a.error;
    j["status"] = status_name(a.status);
    return j;
  }
  j["model_kind"] = a.kind == ModelKind::SingleBus ? "single-bus" : "network";
  j["tolerances"] = {{"gap", a.tol.gap},
                     {"money", a.tol.money},
                     {"feas", a.tol.feas},
                     {"cs", a.tol.cs}};
  j["solver"] = {{"status", status_name(a.status)},
                 {"iterations", a.iterations},
                 {"objective", a.objective},
                 {"certificate",
                  {{"pass", a.certificate.pass},
                   {"duality_gap", a.certificate.duality_gap},
                   {"max_primal_infeasibility", a.certificate.max_primal_infeasibility},
                   {"max_stationarity_residual", a.certificate.max_stationarity_residual},
                   {"max_slackness_violation", a.certificate.max_slackness_violation},
                   {"max_sign_violation", a.certificate.max_sign_violation},
                   {"max_flow_dual_product", a.certificate.max_flow_dual_product},
                   {"max_post_balance_negativity",
                    a.certificate.max_post_balance_negativity}}}};
  j["contingencies"] = a.contingency_ids;

  ordered_json sched;
  ordered_json gj = ordered_json::array();
  for (size_t i = 0; i < a.schedules.g0.size(); ++i)
    gj.push_back({{"g0", a.schedules.g0[i]},
                  {"r_up", a.schedules.r_g_up[i]},
                  {"r_dn", a.schedules.r_g_dn[i]},
                  {"post", mat_row(a.schedules.g_k, static_cast<int>(i))}});
  sched["generators"] = std::move(gj);
  ordered_json dj = ordered_json::array();
  for (size_t jx = 0; jx < a.schedules.d0.size(); ++jx)
    dj.push_back({{"d0", a.schedules.d0[jx]},
                  {"r_up", a.schedules.r_d_up[jx]},
                  {"r_dn", a.schedules.r_d_dn[jx]},
                  {"post", mat_row(a.schedules.d_k, static_cast<int>(jx))}});
  sched["loads"] = std::move(dj);
  if (a.kind == ModelKind::Network) {
    ordered_json fj = ordered_json::array();
    for (int l = 0; l < a.schedules.flow.rows(); ++l) fj.push_back(mat_row(a.schedules.flow, l));
    sched["flows"] = std::move(fj);
    ordered_json tj = ordered_json::array();
    for (int b = 0; b < a.schedules.theta.rows(); ++b)
      tj.push_back(mat_row(a.schedules.theta, b));
    sched["angles"] = std::move(tj);
  }
  j["schedules"] = std::move(sched);

  ordered_json duals;
  ordered_json pj = ordered_json::array();
  for (int b = 0; b < a.duals.pi.rows(); ++b) pj.push_back(mat_row(a.duals.pi, b));
  duals["pi"] = std::move(pj);
  if (a.kind == ModelKind::Network) {
    ordered_json fp = ordered_json::array(), fm = ordered_json::array();
    for (int l = 0; l < a.duals.f_plus.rows(); ++l) {
      fp.push_back(mat_row(a.duals.f_plus, l));
      fm.push_back(mat_row(a.duals.f_minus, l));
    }
    duals["flow_plus"] = std::move(fp);
    duals["flow_minus"] = std::move(fm);
  }
  j["duals"] = std::move(duals);

  ordered_json schemes;
  if (a.baseline) schemes["baseline"] = scheme_to_json(*a.baseline, a.kind);
  if (a.proposed) schemes["proposed"] = scheme_to_json(*a.proposed, a.kind);
  j["schemes"] = std::move(schemes);
  j["verdicts_pass"] = a.verdicts_pass;
  if (!a.stamp.empty()) j["generated_at"] = a.stamp;
  return j;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

namespace {

std::string fmt_full(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Whole dollars with thousands separators, the way settlement tables read.
std::string fmt_money(double v) {
  if (std::isnan(v)) return "-";
  long long n = std::llround(v);
  if (n == 0) n = 0;  // normalize -0
  const bool neg = n < 0;
  unsigned long long u = neg ? -static_cast<unsigned long long>(n) : n;
  std::string digits = std::to_string(u);
  std::string out;
  int c = 0;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    if (c && c % 3 == 0) out.push_back(',');
    out.push_back(*it);
    ++c;
  }
  if (neg) out.push_back('-');
  std::reverse(out.begin(), out.end());
  return out;
}

// Quantities and prices: up to four decimals, trailing zeros trimmed.
std::string fmt_qty(double v) {
  if (std::isnan(v)) return "-";
  if (v == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  std::string s = buf;
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void render(std::ostream& os) const {
    std::vector<size_t> w(header.size(), 0);
    for (size_t c = 0; c < header.size(); ++c) w[c] = header[c].size();
    for (const auto& r : rows)
      for (size_t c = 0; c < r.size(); ++c) w[c] = std::max(w[c], r[c].size());
    auto put = [&](const std::vector<std::string>& r) {
      for (size_t c = 0; c < r.size(); ++c) {
        if (c) os << "  ";
        if (c == 0) {
          os << r[c] << std::string(w[c] - r[c].size(), ' ');
        } else {
          os << std::string(w[c] - r[c].size(), ' ') << r[c];
        }
      }
      os << "\n";
    };
    put(header);
    {
      std::vector<std::string> rule;
      for (size_t c = 0; c < header.size(); ++c) rule.push_back(std::string(w[c], '-'));
      put(rule);
    }
    for (const auto& r : rows) put(r);
  }
};

void render_scheme_prices(std::ostream& os, const RunArchive& a, const SchemeResult& r,
                          const std::string& name, const std::vector<std::string>& bus_ids,
                          const std::vector<std::string>& line_ids) {
  const bool proposed = r.prices.scheme == Scheme::Proposed;
  os << "== " << name << " prices ==\n";
  {
    Table t;
    t.header = proposed ? std::vector<std::string>{"bus", "energy", "up", "dn"}
                        : std::vector<std::string>{"bus", "energy", "security"};
    for (size_t b = 0; b < r.prices.energy.size(); ++b) {
      std::vector<std::string> row{bus_ids[b], fmt_qty(r.prices.energy[b])};
      if (proposed) {
        row.push_back(fmt_qty(r.prices.up[b]));
        row.push_back(fmt_qty(r.prices.dn[b]));
      } else {
        row.push_back(fmt_qty(r.prices.security[b]));
      }
      t.rows.push_back(std::move(row));
    }
    t.render(os);
  }
  if (proposed && !r.prices.transmission.empty()) {
    os << "\n== " << name << " transmission prices ==\n";
    Table t;
    t.header = {"line", "pre"};
    for (const auto& k : a.contingency_ids) t.header.push_back(k);
    t.header.push_back("price");
    for (size_t l = 0; l < r.prices.transmission.size(); ++l) {
      std::vector<std::string> row{line_ids[l]};
      for (int s = 0; s < r.prices.transmission_by_state.cols(); ++s)
        row.push_back(fmt_qty(r.prices.transmission_by_state(static_cast<int>(l), s)));
      row.push_back(fmt_qty(r.prices.transmission[l]));
      t.rows.push_back(std::move(row));
    }
    t.render(os);
  }
}

void render_scheme_settlement(std::ostream& os, const SchemeResult& r,
                              const std::string& name) {
  const bool proposed = r.prices.scheme == Scheme::Proposed;
  os << "== " << name << " generation settlement ($) ==\n";
  {
    Table t;
    t.header = {"generator", "R_energy", "R_up", "R_dn", "C_security",
                "R_total",   "C_energy", "C_up", "C_dn", "C_total",
                "profit"};
    GeneratorRow sum;
    for (const auto& g : r.settlement.generators) {
      t.rows.push_back({g.id, fmt_money(g.r_energy), fmt_money(g.r_up), fmt_money(g.r_dn),
                        proposed ? fmt_money(g.c_security) : "-", fmt_money(g.r_total),
                        fmt_money(g.c_energy), fmt_money(g.c_up), fmt_money(g.c_dn),
                        fmt_money(g.c_total), fmt_money(g.profit)});
      sum.r_energy += g.r_energy;
      sum.r_up += g.r_up;
      sum.r_dn += g.r_dn;
      sum.c_security += g.c_security;
      sum.r_total += g.r_total;
      sum.c_energy += g.c_energy;
      sum.c_up += g.c_up;
      sum.c_dn += g.c_dn;
      sum.c_total += g.c_total;
      sum.profit += g.profit;
    }
    t.rows.push_back({"total", fmt_money(sum.r_energy), fmt_money(sum.r_up),
                      fmt_money(sum.r_dn), proposed ? fmt_money(sum.c_security) : "-",
                      fmt_money(sum.r_total), fmt_money(sum.c_energy), fmt_money(sum.c_up),
                      fmt_money(sum.c_dn), fmt_money(sum.c_total), fmt_money(sum.profit)});
    t.render(os);
  }

  os << "\n== " << name << " consumer settlement ($) ==\n";
  {
    Table t;
    t.header = {"consumer", "CP_energy", "R_up", "R_dn", "CP",
                "utility",  "C_up",      "C_dn", "C_total", "profit"};
    ConsumerRow sum;
    bool any_elastic = false;
    for (const auto& c : r.settlement.consumers) {
      any_elastic = any_elastic || c.elastic;
      t.rows.push_back({c.id, fmt_money(c.cp_energy),
                        c.elastic ? fmt_money(c.r_up) : "-",
                        c.elastic ? fmt_money(c.r_dn) : "-", fmt_money(c.payment),
                        c.elastic ? fmt_money(c.utility) : "-",
                        c.elastic ? fmt_money(c.c_up) : "-",
                        c.elastic ? fmt_money(c.c_dn) : "-",
                        c.elastic ? fmt_money(c.c_total) : "-",
                        c.elastic ? fmt_money(c.profit) : "-"});
      sum.cp_energy += c.cp_energy;
      sum.r_up += c.r_up;
      sum.r_dn += c.r_dn;
      sum.payment += c.payment;
      sum.utility += c.utility;
      sum.c_up += c.c_up;
      sum.c_dn += c.c_dn;
      sum.c_total += c.c_total;
      sum.profit += c.profit;
    }
    t.rows.push_back({"total", fmt_money(sum.cp_energy),
                      any_elastic ? fmt_money(sum.r_up) : "-",
                      any_elastic ? fmt_money(sum.r_dn) : "-", fmt_money(sum.payment),
                      any_elastic ? fmt_money(sum.utility) : "-",
                      any_elastic ? fmt_money(sum.c_up) : "-",
                      any_elastic ? fmt_money(sum.c_dn) : "-",
                      any_elastic ? fmt_money(sum.c_total) : "-",
                      any_elastic ? fmt_money(sum.profit) : "-"});
    t.render(os);
  }

  if (!r.settlement.lines.empty()) {
    os << "\n== " << name << " transmission settlement ($) ==\n";
    Table t;
    t.header = {"line", "price", "revenue"};
    for (const auto& tr : r.settlement.lines)
      t.rows.push_back({tr.id, fmt_qty(tr.price), fmt_money(tr.revenue)});
    t.render(os);
  }

  os << "\n== " << name << " system settlement ($) ==\n";
  {
    Table t;
    t.header = {"item", "amount"};
    t.rows.push_back({"generation revenue", fmt_money(r.settlement.system.generation_revenue)});
    if (!r.settlement.lines.empty())
      t.rows.push_back(
          {"transmission revenue", fmt_money(r.settlement.system.transmission_revenue)});
    t.rows.push_back({"consumer payment", fmt_money(r.settlement.system.consumer_payment)});
    t.rows.push_back({"balance", fmt_money(r.settlement.system.balance)});
    t.render(os);
  }
}

void render_scheme_verdicts(std::ostream& os, const SchemeResult& r,
                            const std::string& name) {
  const bool proposed = r.prices.scheme == Scheme::Proposed;
  os << "== " << name << " verdicts ==\n";
  if (proposed) {
    os << "revenue adequacy:   " << (r.adequacy.pass ? "PASS" : "FAIL")
       << " (min profit " << fmt_qty(r.adequacy.min_profit) << ")";
    for (const auto& who : r.adequacy.violators) os << " [" << who << "]";
    os << "\n";
    os << "revenue neutrality: " << (r.neutrality.pass ? "PASS" : "FAIL")
       << " (imbalance " << fmt_qty(r.neutrality.imbalance) << ")\n";
  } else {
    os << "imbalance (reported only): " << fmt_qty(r.neutrality.imbalance) << "\n";
  }
}

std::string render_table(const RunArchive& a) {
  std::ostringstream os;
  os << "== run ==\n";
  os << "input:      " << std::filesystem::path(a.input_path).filename().string() << "\n";
  os << "sha256:     " << a.input_sha256 << "\n";
  if (!a.error.empty()) {
    os << "status:     " << status_name(a.status) << "\n";
    os << "error:      " << a.error << "\n";
    return os.str();
  }
  os << "model:      " << (a.kind == ModelKind::SingleBus ? "single-bus" : "network")
     << "\n";
  os << "status:     " << status_name(a.status) << "\n";
  os << "objective:  " << fmt_money(a.objective) << "\n";
  os << "iterations: " << a.iterations << "\n";
  os << "certificate: " << (a.certificate.pass ? "PASS" : "FAIL") << " (gap "
     << fmt_qty(a.certificate.duality_gap) << ")\n";

  const auto& bus_ids = a.bus_ids;
  const auto& line_ids = a.line_ids;
  const auto& gen_ids = a.gen_ids;
  const auto& load_ids = a.load_ids;

  os << "\n== schedules (MW) ==\n";
  {
    Table t;
    t.header = {"generator", "g0", "r_up", "r_dn"};
    for (const auto& k : a.contingency_ids) t.header.push_back(k);
    for (size_t i = 0; i < a.schedules.g0.size(); ++i) {
      std::vector<std::string> row{gen_ids[i], fmt_qty(a.schedules.g0[i]),
                                   fmt_qty(a.schedules.r_g_up[i]),
                                   fmt_qty(a.schedules.r_g_dn[i])};
      for (int k = 0; k < a.schedules.g_k.cols(); ++k)
        row.push_back(fmt_qty(a.schedules.g_k(static_cast<int>(i), k)));
      t.rows.push_back(std::move(row));
    }
    t.render(os);
  }
  {
    Table t;
    t.header = {"load", "d0", "r_up", "r_dn"};
    for (const auto& k : a.contingency_ids) t.header.push_back(k);
    for (size_t jx = 0; jx < a.schedules.d0.size(); ++jx) {
      std::vector<std::string> row{load_ids[jx], fmt_qty(a.schedules.d0[jx]),
                                   fmt_qty(a.schedules.r_d_up[jx]),
                                   fmt_qty(a.schedules.r_d_dn[jx])};
      for (int k = 0; k < a.schedules.d_k.cols(); ++k)
        row.push_back(fmt_qty(a.schedules.d_k(static_cast<int>(jx), k)));
      t.rows.push_back(std::move(row));
    }
    os << "\n";
    t.render(os);
  }
  if (a.kind == ModelKind::Network && a.schedules.flow.rows() > 0) {
    Table t;
    t.header = {"line flow", "pre"};
    for (const auto& k : a.contingency_ids) t.header.push_back(k);
    for (int l = 0; l < a.schedules.flow.rows(); ++l) {
      std::vector<std::string> row{line_ids[l]};
      for (int s = 0; s < a.schedules.flow.cols(); ++s)
        row.push_back(fmt_qty(a.schedules.flow(l, s)));
      t.rows.push_back(std::move(row));
    }
    os << "\n";
    t.render(os);
  }

  os << "\n== balance duals ==\n";
  {
    Table t;
    t.header = {"bus", "pre"};
    for (const auto& k : a.contingency_ids) t.header.push_back(k);
    for (int b = 0; b < a.duals.pi.rows(); ++b) {
      std::vector<std::string> row{bus_ids[b]};
      for (int s = 0; s < a.duals.pi.cols(); ++s) row.push_back(fmt_qty(a.duals.pi(b, s)));
      t.rows.push_back(std::move(row));
    }
    t.render(os);
  }

  auto full_scheme = [&](const SchemeResult& r, const std::string& name) {
    os << "\n";
    render_scheme_prices(os, a, r, name, bus_ids, line_ids);
    os << "\n";
    render_scheme_settlement(os, r, name);
    os << "\n";
    render_scheme_verdicts(os, r, name);
  };
  if (a.baseline) full_scheme(*a.baseline, "baseline");
  if (a.proposed) full_scheme(*a.proposed, "proposed");
  return os.str();
}

void csv_row(std::ostream& os, const std::string& section, const std::string& scheme,
             const std::string& id, const std::string& field, double value) {
  os << section << "," << scheme << "," << id << "," << field << "," << fmt_full(value)
     << "\n";
}

std::string render_csv(const RunArchive& a) {
  std::ostringstream os;
  os << "section,scheme,id,field,value\n";
  if (!a.error.empty()) return os.str();
  csv_row(os, "solver", "", "", "objective", a.objective);
  csv_row(os, "solver", "", "", "iterations", a.iterations);
  auto scheme_csv = [&](const SchemeResult& r, const std::string& name) {
    const bool proposed = r.prices.scheme == Scheme::Proposed;
    for (size_t b = 0; b < r.prices.energy.size(); ++b) {
      const std::string& id = a.bus_ids[b];
      csv_row(os, "prices", name, id, "energy", r.prices.energy[b]);
      if (proposed) {
        csv_row(os, "prices", name, id, "up", r.prices.up[b]);
        csv_row(os, "prices", name, id, "dn", r.prices.dn[b]);
      } else {
        csv_row(os, "prices", name, id, "security", r.prices.security[b]);
      }
    }
    for (size_t l = 0; l < r.prices.transmission.size(); ++l)
      csv_row(os, "prices", name, r.settlement.lines[l].id, "transmission",
              r.prices.transmission[l]);
    for (const auto& g : r.settlement.generators) {
      csv_row(os, "generation", name, g.id, "r_energy", g.r_energy);
      csv_row(os, "generation", name, g.id, "r_up", g.r_up);
      csv_row(os, "generation", name, g.id, "r_dn", g.r_dn);
      csv_row(os, "generation", name, g.id, "c_security", g.c_security);
      csv_row(os, "generation", name, g.id, "r_total", g.r_total);
      csv_row(os, "generation", name, g.id, "c_total", g.c_total);
      csv_row(os, "generation", name, g.id, "profit", g.profit);
    }
    for (const auto& c : r.settlement.consumers) {
      csv_row(os, "consumer", name, c.id, "cp_energy", c.cp_energy);
      csv_row(os, "consumer", name, c.id, "r_up", c.r_up);
      csv_row(os, "consumer", name, c.id, "r_dn", c.r_dn);
      csv_row(os, "consumer", name, c.id, "payment", c.payment);
      csv_row(os, "consumer", name, c.id, "profit", c.profit);
    }
    for (const auto& t : r.settlement.lines)
      csv_row(os, "transmission", name, t.id, "revenue", t.revenue);
    csv_row(os, "system", name, "", "consumer_payment", r.settlement.system.consumer_payment);
    csv_row(os, "system", name, "", "generation_revenue",
            r.settlement.system.generation_revenue);
    csv_row(os, "system", name, "", "transmission_revenue",
            r.settlement.system.transmission_revenue);
    csv_row(os, "system", name, "", "balance", r.settlement.system.balance);
  };
  if (a.baseline) scheme_csv(*a.baseline, "baseline");
  if (a.proposed) scheme_csv(*a.proposed, "proposed");
  return os.str();
}

}  // namespace

std::string emit_report(const RunArchive& archive, OutputFormat format) {
  switch (format) {
    case OutputFormat::Table:
      return render_table(archive);
    case OutputFormat::Json:
      return archive_to_json(archive).dump(2) + "\n";
    case OutputFormat::Csv:
      return render_csv(archive);
  }
  return {};
}

std::string to_lp_format(const LpInstance& lp) {
  std::ostringstream os;
  auto term = [&](double a, int j, bool first) {
    os << (a < 0 ? (first ? "- " : " - ") : (first ? "" : " + "));
    const double mag = std::abs(a);
    if (mag != 1.0) os << fmt_full(mag) << " ";
    os << "x" << j;
  };
  os << "Minimize\n obj:";
  bool first = true;
  for (int j = 0; j < lp.n_vars(); ++j) {
    if (lp.variables[j].cost == 0.0) continue;
    os << " ";
    term(lp.variables[j].cost, j, first);
    first = false;
  }
  if (first) os << " 0 x0";
  os << "\nSubject To\n";
  for (int i = 0; i < lp.n_rows(); ++i) {
    const auto& c = lp.constraints[i];
    std::string name = to_string(c.tag);
    for (char& ch : name)
      if (ch == '(' || ch == ')' || ch == ',' || ch == ' ') ch = '_';
    os << " " << name << ":";
    bool f = true;
    for (const auto& [j, a] : c.coeffs) {
      if (a == 0.0) continue;
      os << " ";
      term(a, j, f);
      f = false;
    }
    os << (c.sense == Sense::Eq ? " = " : c.sense == Sense::Le ? " <= " : " >= ")
       << fmt_full(c.rhs) << "\n";
  }
  os << "Bounds\n";
  for (int j = 0; j < lp.n_vars(); ++j) {
    if (std::isinf(lp.variables[j].lb))
      os << " x" << j << " free\n";
    // default 0 <= x < +inf needs no entry
  }
  os << "End\n";
  return os.str();
}

std::string render_prices(const RunArchive& a) {
  std::ostringstream os;
  if (a.baseline)
    render_scheme_prices(os, a, *a.baseline, "baseline", a.bus_ids, a.line_ids);
  if (a.proposed) {
    if (a.baseline) os << "\n";
    render_scheme_prices(os, a, *a.proposed, "proposed", a.bus_ids, a.line_ids);
  }
  return os.str();
}

std::string render_settlement(const RunArchive& a) {
  std::ostringstream os;
  if (a.baseline) render_scheme_settlement(os, *a.baseline, "baseline");
  if (a.proposed) {
    if (a.baseline) os << "\n";
    render_scheme_settlement(os, *a.proposed, "proposed");
  }
  return os.str();
}

std::string render_verdicts(const RunArchive& a) {
  std::ostringstream os;
  if (a.baseline) render_scheme_verdicts(os, *a.baseline, "baseline");
  if (a.proposed) {
    if (a.baseline) os << "\n";
    render_scheme_verdicts(os, *a.proposed, "proposed");
  }
  return os.str();
}

std::string render_compare(const RunArchive& a) {
  std::ostringstream os;
  if (!a.baseline || !a.proposed) {
    os << "compare requires both schemes\n";
    return os.str();
  }
  const SchemeDiff diff = compare_schemes(a.baseline->settlement, a.proposed->settlement);
  os << "== scheme comparison (proposed - baseline, $) ==\n";
  {
    Table t;
    t.header = {"generator", "dR_energy", "dR_up", "dR_dn", "dR_total", "dProfit"};
    for (const auto& d : diff.generators)
      t.rows.push_back({d.id, fmt_money(d.r_energy), fmt_money(d.r_up), fmt_money(d.r_dn),
                        fmt_money(d.r_total), fmt_money(d.profit)});
    t.render(os);
  }
  if (!diff.consumers.empty()) {
    os << "\n";
    Table t;
    t.header = {"consumer", "dCP_energy", "dR_up", "dR_dn", "dCP", "dProfit"};
    for (const auto& d : diff.consumers)
      t.rows.push_back({d.id, fmt_money(d.cp_energy), fmt_money(d.r_up), fmt_money(d.r_dn),
                        fmt_money(d.payment), fmt_money(d.profit)});
    t.render(os);
  }
  os << "\nsum of security charges:    " << fmt_money(diff.sum_security_charges) << "\n";
  os << "baseline missing money:     " << fmt_money(diff.baseline_missing_money) << "\n";
  os << "proposed missing money:     " << fmt_money(diff.proposed_missing_money) << "\n";
  return os.str();
}

}  // namespace ccm
