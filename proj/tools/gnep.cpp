// gnep: minimum-disequilibrium solver front end.
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gnep/io.hpp"
#include "gnep/reproduce.hpp"

using namespace gnep;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNegative = 2;  // certified no equilibrium / not an equilibrium

struct Config {
  std::string instance;
  std::string point;
  std::string experiment;
  double eps = 1e-6;
  double eps_cert = 1e-6;
  double eps_eq = 1e-6;
  int max_iter = 0;  // 0: command default
  std::vector<double> seed_x0;
  std::string trace;
  std::string out;
  std::string format = "table";
  bool eps_set = false;
  bool assemble = false;
};

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::string vec(const std::vector<double>& v) {
  std::string s = "(";
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + num(v[k]);
  return s + ")";
}

std::string ext(const ExtendedReal& v) {
  if (v.is_plus_infinity()) return "+inf";
  if (v.is_minus_infinity()) return "-inf";
  return num(v.value());
}

Json envelope(const std::string& command, const GameInstance* g, Json result) {
  Json o;
  o["schema"] = kSchemaVersion;
  o["command"] = command;
  if (g) o["instance"] = g->name;
  o["result"] = std::move(result);
  return o;
}

void emit(const Config& c, const Json& report, const std::string& table) {
  if (!c.out.empty()) write_text_file(c.out, dump(report));
  std::cout << (c.format == "json" ? dump(report) : table);
}

// ---- solve-md -----------------------------------------------------------------

int cmd_solve_md(const Config& c) {
  const auto g = load_game(c.instance);
  const auto bindings = bind_all(g);
  PoolInit init;
  init.x0 = c.seed_x0;
  RunOptions o;
  o.eps = c.eps;
  o.eps_cert = c.eps_cert;
  o.eps_eq = c.eps_eq;
  if (c.max_iter > 0) o.max_iter = c.max_iter;
  const auto r = run(g, bindings, initialize_pools(g, bindings, init), o);

  if (!c.trace.empty()) {
    std::ofstream t(c.trace);
    if (!t) throw std::runtime_error("cannot write " + c.trace);
    for (const auto& it : r.trace) t << iteration_to_json(it).dump() << "\n";
  }

  std::ostringstream tb;
  tb << "instance      " << g.name << "\n";
  tb << "status        " << to_string(r.status) << (r.no_equilibrium_certified ? " (NO_EQUILIBRIUM_CERTIFIED)" : "")
     << "\n";
  tb << "delta bounds  [" << num(r.delta_lower) << ", " << num(r.delta_upper) << "]\n";
  tb << "iterations    " << r.iterations << "  oracle calls " << r.oracle_calls << "  time "
     << num(r.seconds) << " s\n";
  if (r.has_point) {
    tb << "x             " << vec(r.point.x) << "\n";
    tb << "player  gap           y\n";
    for (int i = 0; i < g.num_players(); ++i)
      tb << std::left << std::setw(8) << i << std::setw(14) << num(r.gaps[i]) << " " << vec(r.point.y[i]) << "\n";
  }
  if (!r.message.empty()) tb << "note          " << r.message << "\n";
  emit(c, envelope("solve-md", &g, report_to_json(r)), tb.str());

  if (r.status == RunStatus::no_equilibrium_certified || r.no_equilibrium_certified) return kExitNegative;
  switch (r.status) {
    case RunStatus::equilibrium_found:
    case RunStatus::md_exact:
    case RunStatus::md_eps_optimal: return kExitOk;
    default: return kExitError;
  }
}

// ---- certify ------------------------------------------------------------------

int cmd_certify(const Config& c) {
  const auto g = load_game(c.instance);
  const auto pt = point_from_json(read_json_file(c.point));
  check_dimensions(g, pt);
  const auto chk = certify_equilibrium(g, pt, bind_all(g), c.eps_eq);

  std::ostringstream tb;
  tb << "feasible      " << (chk.feasible ? "yes" : "no") << "  max residual " << num(chk.max_residual) << "\n";
  tb << "player  gap           g_i*(x)\n";
  for (std::size_t i = 0; i < chk.gaps.size(); ++i)
    tb << std::left << std::setw(8) << i << std::setw(14) << ext(chk.gaps[i]) << " "
       << (i < chk.best_response_value.size() ? num(chk.best_response_value[i]) : "") << "\n";
  tb << "delta         " << ext(chk.delta) << "\n";
  tb << "verdict       " << (chk.is_equilibrium ? "EQUILIBRIUM" : "NOT_AN_EQUILIBRIUM") << " (eps_eq "
     << num(c.eps_eq) << ")\n";
  if (!chk.message.empty()) tb << "note          " << chk.message << "\n";
  emit(c, envelope("certify", &g, check_to_json(chk)), tb.str());
  return chk.is_equilibrium ? kExitOk : kExitNegative;
}

// ---- price-taking -------------------------------------------------------------

PriceTakingGame price_taking(const GameInstance& g) {
  auto d = detect_price_taking(g);
  if (!d.accepted()) throw std::runtime_error("not a price-taking game: " + d.reason);
  return std::move(*d.ptg);
}

std::string primal_table(const PrimalResult& p) {
  std::ostringstream tb;
  tb << "primal        " << to_string(p.status) << "  value " << num(p.value) << "  method " << p.method
     << (p.certified ? "  certified" : "  not certified") << "  nodes " << p.nodes << "\n";
  for (std::size_t i = 0; i < p.y.size(); ++i) tb << "  y_" << i << "  " << vec(p.y[i]) << "\n";
  if (!p.message.empty()) tb << "note          " << p.message << "\n";
  return tb.str();
}

int cmd_primal(const Config& c) {
  const auto g = load_game(c.instance);
  const auto ptg = price_taking(g);
  const auto p = solve_primal(ptg);
  emit(c, envelope("primal", &g, primal_to_json(p)), primal_table(p));
  return p.status == SolveStatus::optimal ? kExitOk : kExitError;
}

int cmd_dual(const Config& c) {
  const auto g = load_game(c.instance);
  const auto ptg = price_taking(g);
  const auto b = bind_all(g);
  DualOptions o;
  o.tol = c.eps;
  if (c.max_iter > 0) o.max_iter = c.max_iter;
  if (!c.seed_x0.empty()) o.x0 = c.seed_x0;
  const auto d = dual_cutting_plane(ptg, b, o);

  if (!c.trace.empty()) {
    std::ofstream t(c.trace);
    if (!t) throw std::runtime_error("cannot write " + c.trace);
    for (const auto& it : d.trace) t << dual_iteration_to_json(it).dump() << "\n";
  }

  std::ostringstream tb;
  tb << "dual          " << to_string(d.status) << "  value " << num(d.value) << "  upper " << num(d.upper)
     << "  gap " << num(d.upper - d.value) << "\n";
  tb << "iterations    " << d.iterations << "  time " << num(d.seconds) << " s"
     << (d.attained ? "" : "  (supremum not attained)") << (d.box_edge_active ? "  (price box edge active)" : "")
     << "\n";
  tb << "x             " << vec(d.x) << "\n";
  if (!d.message.empty()) tb << "note          " << d.message << "\n";

  Json result = dual_to_json(d, false);
  int code = d.status == SolveStatus::optimal ? kExitOk : kExitError;
  if (c.assemble && code == kExitOk) {
    const auto p = solve_primal(ptg);
    tb << primal_table(p);
    if (p.status != SolveStatus::optimal) {
      code = kExitError;
    } else {
      const auto a = assemble_min_disequilibrium(ptg, p, d, b, c.eps_eq);
      tb << "delta         " << num(a.delta) << " = " << num(a.primal_value) << " - " << num(a.dual_value) << "\n";
      tb << "verdict       " << (a.equilibrium ? "EQUILIBRIUM" : "NOT_AN_EQUILIBRIUM") << "\n";
      if (!a.message.empty()) tb << "note          " << a.message << "\n";
      Json both;
      both["dual"] = result;
      both["primal"] = primal_to_json(p);
      both["assembly"] = primal_dual_to_json(a);
      result = both;
      if (!a.equilibrium) code = kExitNegative;
    }
  }
  emit(c, envelope("dual", &g, result), tb.str());
  return code;
}

// ---- reproduce ----------------------------------------------------------------

int cmd_reproduce(const Config& c) {
  ReproduceOptions o;
  o.run.eps = c.eps;
  o.run.eps_cert = c.eps_cert;
  o.run.eps_eq = c.eps_eq;
  if (c.max_iter > 0) {
    o.run.max_iter = c.max_iter;
    o.dual_max_iter = c.max_iter;
  }
  if (c.eps_set) o.dual_tol = c.eps;
  const auto r = reproduce(c.experiment, o);

  if (!c.trace.empty()) {
    std::ofstream t(c.trace);
    if (!t) throw std::runtime_error("cannot write " + c.trace);
    if (r.report)
      for (const auto& it : r.report->trace) t << iteration_to_json(it).dump() << "\n";
    if (r.dual)
      for (const auto& it : r.dual->trace) t << dual_iteration_to_json(it).dump() << "\n";
  }

  std::ostringstream tb;
  for (const auto& q : r.comparisons) {
    tb << (q.pass ? "PASS " : (q.informational ? "INFO " : "FAIL ")) << std::left << std::setw(34) << q.quantity;
    if (q.rule == "flag") {
      tb << (q.pass ? "ok" : "not satisfied");
    } else if (q.computed.size() == 1) {
      tb << num(q.computed[0]) << (q.rule == "max" ? "  limit " : "  expected ") << num(q.expected.at(0));
      if (q.rule == "abs") tb << " +- " << num(q.tolerance);
    } else {
      tb << "max deviation " << num(q.worst) << "  tolerance " << num(q.tolerance);
    }
    tb << "  [" << to_string(q.provenance) << "]\n";
  }
  tb << (r.pass() ? "PASS" : "FAIL") << " reproduce " << r.name << " (" << num(r.seconds) << " s)\n";
  emit(c, reproduction_to_json(r), tb.str());
  return r.pass() ? kExitOk : kExitError;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument("bad number '" + tok + "' in --seed-x0");
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum-disequilibrium solver for generalized Nash games"};
  app.require_subcommand(1);
  Config c;
  std::string seed;

  auto common = [&](CLI::App* s) {
    s->add_option("--eps", c.eps, "Optimality tolerance (dual: absolute gap)")->check(CLI::PositiveNumber)->each([&](const std::string&) { c.eps_set = true; });
    s->add_option("--eps-cert", c.eps_cert, "Threshold for certifying that no equilibrium exists")->check(CLI::PositiveNumber);
    s->add_option("--eps-eq", c.eps_eq, "Gap tolerance for declaring an equilibrium")->check(CLI::PositiveNumber);
    s->add_option("--max-iter", c.max_iter, "Iteration cap")->check(CLI::PositiveNumber);
    s->add_option("--seed-x0", seed, "Comma-separated x used to seed pools / start the dual");
    s->add_option("--trace", c.trace, "Write per-iteration records as JSON lines");
    s->add_option("--out", c.out, "Write the JSON report to this path");
    s->add_option("--format", c.format, "Standard output format")->check(CLI::IsMember({"json", "table"}));
  };

  auto* solve = app.add_subcommand("solve-md", "Minimize disequilibrium by constraint generation");
  solve->add_option("instance", c.instance, "Instance JSON")->required();
  common(solve);

  auto* certify = app.add_subcommand("certify", "Check whether a point is an equilibrium");
  certify->add_option("instance", c.instance, "Instance JSON")->required();
  certify->add_option("point", c.point, "Point JSON {\"x\": [...], \"y\": [[...], ...]}")->required();
  common(certify);

  auto* dual = app.add_subcommand("dual", "Dual cutting plane for a price-taking game");
  dual->add_option("instance", c.instance, "Instance JSON")->required();
  dual->add_flag("--assemble", c.assemble, "Also solve the primal and report delta = primal - dual");
  common(dual);

  auto* primal = app.add_subcommand("primal", "Solve the primal of a price-taking game");
  primal->add_option("instance", c.instance, "Instance JSON")->required();
  common(primal);

  auto* repro = app.add_subcommand("reproduce", "Rerun a bundled experiment and diff against expectations");
  repro->add_option("name", c.experiment, "cournot, uc or gas")->required()->check(CLI::IsMember({"cournot", "uc", "gas"}));
  common(repro);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  try {
    if (!seed.empty()) c.seed_x0 = parse_list(seed);
    if (*solve) return cmd_solve_md(c);
    if (*certify) return cmd_certify(c);
    if (*dual) return cmd_dual(c);
    if (*primal) return cmd_primal(c);
    if (*repro) return cmd_reproduce(c);
  } catch (const std::exception& e) {
    std::cerr << "gnep: error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
