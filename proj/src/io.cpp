#include "gnep/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace gnep {

namespace {

std::string idx(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }
std::string key(const std::string& path, const std::string& k) { return path.empty() ? k : path + "." + k; }

const Json& field(const Json& j, const std::string& path, const std::string& k) {
  if (!j.is_object()) throw FormatError(path, "expected an object");
  auto it = j.find(k);
  if (it == j.end()) throw FormatError(key(path, k), "missing field");
  return *it;
}

const Json* optional_field(const Json& j, const std::string& k) {
  auto it = j.find(k);
  return it == j.end() || it->is_null() ? nullptr : &*it;
}

int int_from(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw FormatError(path, "expected an integer");
  return j.get<int>();
}

std::string string_from(const Json& j, const std::string& path) {
  if (!j.is_string()) throw FormatError(path, "expected a string");
  return j.get<std::string>();
}

const Json& array_from(const Json& j, const std::string& path) {
  if (!j.is_array()) throw FormatError(path, "expected an array");
  return j;
}

std::vector<double> reals_from(const Json& j, const std::string& path) {
  array_from(j, path);
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(real_from_json(j[i], idx(path, i)));
  return out;
}

Json reals_to_json(std::span<const double> v) {
  Json a = Json::array();
  for (double d : v) a.push_back(real_to_json(d));
  return a;
}

Json blocks_to_json(const std::vector<std::vector<double>>& y) {
  Json a = Json::array();
  for (const auto& b : y) a.push_back(reals_to_json(b));
  return a;
}

std::vector<std::vector<double>> blocks_from(const Json& j, const std::string& path) {
  array_from(j, path);
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(reals_from(j[i], idx(path, i)));
  return out;
}

std::string sense_to_string(Sense s) { return s == Sense::eq ? "=" : "<="; }

Sense sense_from(const Json& j, const std::string& path) {
  const auto s = string_from(j, path);
  if (s == "=" || s == "==") return Sense::eq;
  if (s == "<=") return Sense::le;
  throw FormatError(path, "sense must be \"<=\" or \"=\"");
}

Json linear_row_to_json(const LinearConstraint& r) {
  Json o;
  o["kind"] = "linear";
  if (!r.name.empty()) o["name"] = r.name;
  o["coefs"] = reals_to_json(r.coefs);
  o["sense"] = sense_to_string(r.sense);
  o["rhs"] = real_to_json(r.rhs);
  return o;
}

Json nonlinear_row_to_json(const NonlinearConstraint& r) {
  Json o;
  o["kind"] = "nonlinear";
  if (!r.name.empty()) o["name"] = r.name;
  o["lhs"] = expression_to_json(r.lhs);
  o["sense"] = sense_to_string(r.sense);
  o["rhs"] = real_to_json(r.rhs);
  return o;
}

std::string name_from(const Json& j, const std::string& path) {
  const Json* n = optional_field(j, "name");
  return n ? string_from(*n, key(path, "name")) : std::string();
}

LinearConstraint linear_row_from(const Json& j, const std::string& path) {
  LinearConstraint r;
  r.name = name_from(j, path);
  r.coefs = reals_from(field(j, path, "coefs"), key(path, "coefs"));
  r.sense = sense_from(field(j, path, "sense"), key(path, "sense"));
  r.rhs = real_from_json(field(j, path, "rhs"), key(path, "rhs"));
  return r;
}

NonlinearConstraint nonlinear_row_from(const Json& j, const std::string& path) {
  NonlinearConstraint r;
  r.name = name_from(j, path);
  r.lhs = expression_from_json(field(j, path, "lhs"), key(path, "lhs"));
  r.sense = sense_from(field(j, path, "sense"), key(path, "sense"));
  r.rhs = real_from_json(field(j, path, "rhs"), key(path, "rhs"));
  return r;
}

Json set_to_json(const FeasibleSet& s) {
  Json o;
  o["n"] = s.n;
  o["lower"] = reals_to_json(s.lower);
  o["upper"] = reals_to_json(s.upper);
  Json ints = Json::array();
  for (int j = 0; j < s.n; ++j)
    if (s.integral[j]) ints.push_back(j);
  o["integral"] = ints;
  Json rows = Json::array();
  for (const auto& r : s.linear) rows.push_back(linear_row_to_json(r));
  for (const auto& r : s.nonlinear) rows.push_back(nonlinear_row_to_json(r));
  o["constraints"] = rows;
  return o;
}

// Missing bounds default to a free block.
FeasibleSet set_from(const Json& j, int owner, int n, const std::string& path) {
  if (!j.is_object()) throw FormatError(path, "expected an object");
  if (const Json* jn = optional_field(j, "n"); jn && int_from(*jn, key(path, "n")) != n)
    throw FormatError(key(path, "n"), "dimension " + jn->dump() + " does not match " + std::to_string(n));
  FeasibleSet s = FeasibleSet::free(owner, n);
  if (const Json* lo = optional_field(j, "lower")) s.lower = reals_from(*lo, key(path, "lower"));
  if (const Json* hi = optional_field(j, "upper")) s.upper = reals_from(*hi, key(path, "upper"));
  if (static_cast<int>(s.lower.size()) != n) throw FormatError(key(path, "lower"), "expected " + std::to_string(n) + " entries");
  if (static_cast<int>(s.upper.size()) != n) throw FormatError(key(path, "upper"), "expected " + std::to_string(n) + " entries");
  if (const Json* ints = optional_field(j, "integral")) {
    const auto p = key(path, "integral");
    array_from(*ints, p);
    for (std::size_t i = 0; i < ints->size(); ++i) {
      const int v = int_from((*ints)[i], idx(p, i));
      if (v < 0 || v >= n) throw FormatError(idx(p, i), "index out of range");
      s.integral[v] = true;
    }
  }
  if (const Json* rows = optional_field(j, "constraints")) {
    const auto p = key(path, "constraints");
    array_from(*rows, p);
    for (std::size_t i = 0; i < rows->size(); ++i) {
      const auto rp = idx(p, i);
      const auto kind = string_from(field((*rows)[i], rp, "kind"), key(rp, "kind"));
      if (kind == "linear") {
        s.linear.push_back(linear_row_from((*rows)[i], rp));
      } else if (kind == "nonlinear") {
        s.nonlinear.push_back(nonlinear_row_from((*rows)[i], rp));
      } else {
        throw FormatError(key(rp, "kind"), "expected \"linear\" or \"nonlinear\"");
      }
    }
  }
  return s;
}

Json mu_to_json(const MuMeasure& mu) {
  switch (mu.kind) {
    case MuMeasure::Kind::sum: return "sum";
    case MuMeasure::Kind::max: return "max";
    case MuMeasure::Kind::weighted_sum: {
      Json o;
      o["kind"] = "weighted_sum";
      o["weights"] = reals_to_json(mu.weights);
      return o;
    }
  }
  return "sum";
}

MuMeasure mu_from(const Json& j, const std::string& path) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "sum") return MuMeasure::sum();
    if (s == "max") return MuMeasure::max();
    throw FormatError(path, "unknown measure '" + s + "'");
  }
  const auto kind = string_from(field(j, path, "kind"), key(path, "kind"));
  if (kind != "weighted_sum") throw FormatError(key(path, "kind"), "expected \"weighted_sum\"");
  return MuMeasure::weighted(reals_from(field(j, path, "weights"), key(path, "weights")));
}

std::string ordinal_status(SolveStatus s) { return to_string(s); }

}  // namespace

// ---- scalars -------------------------------------------------------------------

Json real_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

double real_from_json(const Json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw FormatError(path, "expected a number, \"inf\" or \"-inf\"");
}

Json extended_to_json(const ExtendedReal& v) {
  if (v.is_plus_infinity()) return "inf";
  if (v.is_minus_infinity()) return "-inf";
  return v.value();
}

// ---- expressions ---------------------------------------------------------------

Json expression_to_json(const Expression& e) {
  switch (e.kind()) {
    case Expression::Kind::constant: return Json::array({"const", real_to_json(e.constant_value())});
    case Expression::Kind::shared_var: return Json::array({"svar", e.var().index});
    case Expression::Kind::player_var: return Json::array({"pvar", e.var().player, e.var().index});
    case Expression::Kind::square: return Json::array({"square", expression_to_json(e.children()[0])});
    case Expression::Kind::add:
    case Expression::Kind::mul: {
      Json a = Json::array({e.kind() == Expression::Kind::add ? "add" : "mul"});
      for (const auto& c : e.children()) a.push_back(expression_to_json(c));
      return a;
    }
  }
  return Json::array({"const", 0});
}

Expression expression_from_json(const Json& j, const std::string& path) {
  if (j.is_number()) return Expression::constant(j.get<double>());
  if (!j.is_array() || j.empty() || !j[0].is_string())
    throw FormatError(path, "expected [\"op\", ...] with op in const/svar/pvar/add/mul/square");
  const auto op = j[0].get<std::string>();
  auto arity = [&](std::size_t n) {
    if (j.size() != n + 1) throw FormatError(path, "'" + op + "' takes " + std::to_string(n) + " argument(s)");
  };
  auto nonneg = [&](std::size_t i) {
    const int v = int_from(j[i], idx(path, i));
    if (v < 0) throw FormatError(idx(path, i), "index must be nonnegative");
    return v;
  };
  if (op == "const") {
    arity(1);
    return Expression::constant(real_from_json(j[1], idx(path, 1)));
  }
  if (op == "svar") {
    arity(1);
    return Expression::shared_var(nonneg(1));
  }
  if (op == "pvar") {
    arity(2);
    return Expression::player_var(nonneg(1), nonneg(2));
  }
  if (op == "square") {
    arity(1);
    return Expression::square(expression_from_json(j[1], idx(path, 1)));
  }
  if (op == "add" || op == "mul") {
    if (j.size() < 2) throw FormatError(path, "'" + op + "' needs at least one argument");
    std::vector<Expression> kids;
    for (std::size_t i = 1; i < j.size(); ++i) kids.push_back(expression_from_json(j[i], idx(path, i)));
    return op == "add" ? Expression::add(std::move(kids)) : Expression::mul(std::move(kids));
  }
  throw FormatError(path, "unknown operator '" + op + "'");
}

// ---- games ---------------------------------------------------------------------

Json game_to_json(const GameInstance& g) {
  Json o;
  o["schema"] = kSchemaVersion;
  o["name"] = g.name;
  o["n0"] = g.n0;
  o["x_set"] = set_to_json(g.shared_set);
  Json players = Json::array();
  for (const auto& p : g.players) {
    Json jp;
    jp["n"] = p.n;
    jp["objective"] = expression_to_json(p.objective);
    jp["feasible_set"] = set_to_json(p.feasible_set);
    jp["oracle"] = p.oracle;
    if (p.price_taking_form) {
      jp["form"] = "price_taking";
      jp["base"] = expression_to_json(p.price_taking_form->base);
      Json slopes = Json::array();
      for (const auto& s : p.price_taking_form->slopes) slopes.push_back(expression_to_json(s));
      jp["slopes"] = slopes;
    }
    players.push_back(jp);
  }
  o["players"] = players;
  Json rows = Json::array();
  for (const auto& r : g.global_linear) rows.push_back(linear_row_to_json(r));
  for (const auto& r : g.global_nonlinear) rows.push_back(nonlinear_row_to_json(r));
  o["global_constraints"] = rows;
  o["mu"] = mu_to_json(g.mu);
  o["tolerances"] = Json{{"linear", g.tol.linear}, {"nonlinear", g.tol.nonlinear}};
  if (g.price_box) o["price_box"] = Json{{"lower", reals_to_json(g.price_box->lower)}, {"upper", reals_to_json(g.price_box->upper)}};
  return o;
}

GameInstance game_from_json(const Json& j) {
  if (!j.is_object()) throw FormatError("", "instance must be a JSON object");
  if (const Json* s = optional_field(j, "schema"); s && int_from(*s, "schema") != kSchemaVersion)
    throw FormatError("schema", "unsupported schema version " + s->dump());
  GameInstance g;
  if (const Json* n = optional_field(j, "name")) g.name = string_from(*n, "name");
  g.n0 = int_from(field(j, "", "n0"), "n0");
  if (g.n0 < 0) throw FormatError("n0", "must be nonnegative");
  if (const Json* xs = optional_field(j, "x_set")) {
    g.shared_set = set_from(*xs, -1, g.n0, "x_set");
  } else {
    g.shared_set = FeasibleSet::free(-1, g.n0);
  }
  const auto& players = array_from(field(j, "", "players"), "players");
  for (std::size_t i = 0; i < players.size(); ++i) {
    const auto path = idx("players", i);
    const auto& jp = players[i];
    Player p;
    p.id = static_cast<int>(i);
    p.n = int_from(field(jp, path, "n"), key(path, "n"));
    if (p.n < 0) throw FormatError(key(path, "n"), "must be nonnegative");
    p.objective = expression_from_json(field(jp, path, "objective"), key(path, "objective"));
    if (const Json* fs = optional_field(jp, "feasible_set")) {
      p.feasible_set = set_from(*fs, p.id, p.n, key(path, "feasible_set"));
    } else {
      p.feasible_set = FeasibleSet::free(p.id, p.n);
    }
    if (const Json* o = optional_field(jp, "oracle")) p.oracle = string_from(*o, key(path, "oracle"));
    if (const Json* form = optional_field(jp, "form")) {
      if (string_from(*form, key(path, "form")) != "price_taking")
        throw FormatError(key(path, "form"), "only \"price_taking\" is recognised");
      PriceTakingForm f;
      f.base = expression_from_json(field(jp, path, "base"), key(path, "base"));
      const auto sp = key(path, "slopes");
      const auto& slopes = array_from(field(jp, path, "slopes"), sp);
      for (std::size_t k = 0; k < slopes.size(); ++k) f.slopes.push_back(expression_from_json(slopes[k], idx(sp, k)));
      p.price_taking_form = std::move(f);
    }
    g.players.push_back(std::move(p));
  }
  if (const Json* rows = optional_field(j, "global_constraints")) {
    array_from(*rows, "global_constraints");
    for (std::size_t i = 0; i < rows->size(); ++i) {
      const auto rp = idx("global_constraints", i);
      const auto kind = string_from(field((*rows)[i], rp, "kind"), key(rp, "kind"));
      if (kind == "linear") {
        g.global_linear.push_back(linear_row_from((*rows)[i], rp));
      } else if (kind == "nonlinear") {
        g.global_nonlinear.push_back(nonlinear_row_from((*rows)[i], rp));
      } else {
        throw FormatError(key(rp, "kind"), "expected \"linear\" or \"nonlinear\"");
      }
    }
  }
  if (const Json* mu = optional_field(j, "mu")) g.mu = mu_from(*mu, "mu");
  if (const Json* t = optional_field(j, "tolerances")) {
    if (const Json* v = optional_field(*t, "linear")) g.tol.linear = real_from_json(*v, "tolerances.linear");
    if (const Json* v = optional_field(*t, "nonlinear")) g.tol.nonlinear = real_from_json(*v, "tolerances.nonlinear");
  }
  if (const Json* pb = optional_field(j, "price_box")) {
    PriceBox b;
    b.lower = reals_from(field(*pb, "price_box", "lower"), "price_box.lower");
    b.upper = reals_from(field(*pb, "price_box", "upper"), "price_box.upper");
    g.price_box = std::move(b);
  }
  try {
    g.validate();
  } catch (const std::exception& e) {
    throw FormatError("", std::string("invalid instance: ") + e.what());
  }
  return g;
}

Json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // Byte offset to line/column.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw FormatError(source + ":" + std::to_string(line) + ":" + std::to_string(col), "JSON syntax error");
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

GameInstance load_game(const std::string& path) {
  const Json j = read_json_file(path);
  try {
    return game_from_json(j);
  } catch (const FormatError& e) {
    throw FormatError(path + (e.path().empty() ? "" : ": " + e.path()),
                      std::string(e.what()).substr(e.path().empty() ? 0 : e.path().size() + 2));
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---- points and reports --------------------------------------------------------

Json point_to_json(const GamePoint& p) { return Json{{"x", reals_to_json(p.x)}, {"y", blocks_to_json(p.y)}}; }

GamePoint point_from_json(const Json& j) {
  GamePoint p;
  p.x = reals_from(field(j, "", "x"), "x");
  p.y = blocks_from(field(j, "", "y"), "y");
  return p;
}

Json iteration_to_json(const IterationRecord& r) {
  Json o;
  o["iteration"] = r.iteration;
  o["lower"] = real_to_json(r.lower);
  o["upper"] = real_to_json(r.upper);
  o["candidate_value"] = real_to_json(r.candidate_value);
  o["action"] = to_string(r.action);
  o["x"] = reals_to_json(r.candidate.x);
  o["y"] = blocks_to_json(r.candidate.y);
  o["w"] = reals_to_json(r.w);
  o["best_response_value"] = reals_to_json(r.best_response_value);
  o["best_response"] = blocks_to_json(r.best_response);
  return o;
}

Json report_to_json(const SolveReport& r) {
  Json o;
  o["status"] = to_string(r.status);
  o["no_equilibrium_certified"] = r.no_equilibrium_certified;
  o["delta"] = r.has_point ? real_to_json(r.delta()) : Json(nullptr);
  o["delta_lower"] = real_to_json(r.delta_lower);
  o["delta_upper"] = real_to_json(r.delta_upper);
  o["point"] = r.has_point ? point_to_json(r.point) : Json(nullptr);
  o["gaps"] = reals_to_json(r.gaps);
  o["iterations"] = r.iterations;
  o["oracle_calls"] = r.oracle_calls;
  o["lower_bound_calls"] = r.lower_bound_calls;
  o["lower_sequence"] = reals_to_json(r.lower_sequence);
  o["upper_sequence"] = reals_to_json(r.upper_sequence);
  o["tolerances"] = Json{{"eps", r.eps}, {"eps_cert", r.eps_cert}, {"eps_eq", r.eps_eq}};
  Json pools = Json::array();
  for (const auto& p : r.pools.points) pools.push_back(blocks_to_json(p));
  o["pools"] = pools;
  o["message"] = r.message;
  return o;
}

Json check_to_json(const EquilibriumCheck& c) {
  Json o;
  o["is_equilibrium"] = c.is_equilibrium;
  o["feasible"] = c.feasible;
  o["max_residual"] = real_to_json(c.max_residual);
  Json gaps = Json::array();
  for (const auto& g : c.gaps) gaps.push_back(extended_to_json(g));
  o["gaps"] = gaps;
  o["best_response_value"] = reals_to_json(c.best_response_value);
  o["delta"] = extended_to_json(c.delta);
  o["message"] = c.message;
  return o;
}

Json primal_to_json(const PrimalResult& r) {
  Json o;
  o["status"] = ordinal_status(r.status);
  o["value"] = real_to_json(r.value);
  o["certified"] = r.certified;
  o["lower_bound"] = real_to_json(r.lower_bound);
  o["method"] = r.method;
  o["max_residual"] = real_to_json(r.max_residual);
  o["nodes"] = r.nodes;
  o["y"] = blocks_to_json(r.y);
  o["message"] = r.message;
  return o;
}

Json dual_iteration_to_json(const DualIteration& it) {
  return Json{{"iteration", it.iteration},     {"lp_value", real_to_json(it.lp_value)},
              {"upper", real_to_json(it.upper)}, {"value", real_to_json(it.value)},
              {"best", real_to_json(it.best)},   {"x", reals_to_json(it.x)}};
}

Json dual_to_json(const DualResult& r, bool with_trace) {
  Json o;
  o["status"] = ordinal_status(r.status);
  o["value"] = real_to_json(r.value);
  o["upper"] = real_to_json(r.upper);
  o["gap"] = real_to_json(r.upper - r.value);
  o["x"] = reals_to_json(r.x);
  o["attained"] = r.attained;
  o["box_edge_active"] = r.box_edge_active;
  o["active_edges"] = r.active_edges;
  o["iterations"] = r.iterations;
  o["lagrangian_minimizers"] = blocks_to_json(r.responses);
  if (with_trace) {
    Json t = Json::array();
    for (const auto& it : r.trace) t.push_back(dual_iteration_to_json(it));
    o["trace"] = t;
  }
  o["message"] = r.message;
  return o;
}

Json primal_dual_to_json(const PrimalDualResult& r) {
  Json o;
  o["primal_value"] = real_to_json(r.primal_value);
  o["dual_value"] = real_to_json(r.dual_value);
  o["delta"] = real_to_json(r.delta);
  o["equilibrium"] = r.equilibrium;
  o["dual_attained"] = r.dual_attained;
  o["negative_gap"] = r.negative_gap;
  o["point"] = point_to_json(r.point);
  o["lagrangian_minimizers"] = blocks_to_json(r.lagrangian_minimizers);
  o["check"] = r.check ? check_to_json(*r.check) : Json(nullptr);
  o["message"] = r.message;
  return o;
}

Json expected_to_json(const ExpectedValues& e) {
  Json o;
  o["instance"] = e.instance;
  Json entries = Json::array();
  for (const auto& x : e.entries)
    entries.push_back(Json{{"name", x.name},
                           {"values", reals_to_json(x.values)},
                           {"tolerance", x.tolerance},
                           {"provenance", to_string(x.provenance)},
                           {"citation", x.citation}});
  o["entries"] = entries;
  return o;
}

}  // namespace gnep
