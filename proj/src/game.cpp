#include "gnep/game.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gnep {

void MuMeasure::validate(std::size_t players) const {
  if (kind != Kind::weighted_sum) return;
  if (weights.size() != players) throw std::invalid_argument("mu: weight count must equal player count");
  for (double w : weights)
    if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("mu: weights must be finite and positive");
}

ExtendedReal MuMeasure::apply(std::span<const ExtendedReal> gaps) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    const auto& g = gaps[i];
    if (g.is_minus_infinity()) throw std::domain_error("mu: negative infinite gap");
    if (g.is_plus_infinity()) return ExtendedReal::plus_infinity();
    const double v = g.value();
    switch (kind) {
      case Kind::sum: acc += v; break;
      case Kind::weighted_sum: acc += weights.at(i) * v; break;
      case Kind::max: acc = std::max(acc, v); break;
    }
  }
  return ExtendedReal::finite(acc);
}

double MuMeasure::apply(std::span<const double> gaps) const {
  std::vector<ExtendedReal> ext;
  ext.reserve(gaps.size());
  for (double g : gaps) {
    if (std::isinf(g)) ext.push_back(g > 0 ? ExtendedReal::plus_infinity() : ExtendedReal::minus_infinity());
    else ext.push_back(ExtendedReal::finite(g));
  }
  return apply(ext).to_double();
}

int GameInstance::total_dimension() const {
  int d = n0;
  for (const auto& p : players) d += p.n;
  return d;
}

int GameInstance::block_offset(int player) const {
  int d = n0;
  for (int i = 0; i < player; ++i) d += players.at(i).n;
  return d;
}

void GameInstance::validate() const {
  if (n0 < 0) throw std::invalid_argument("game: n0 must be nonnegative");
  if (shared_set.n != n0 || shared_set.owner != -1) throw std::invalid_argument("game: shared set must have n0 variables");
  shared_set.validate();
  for (int i = 0; i < num_players(); ++i) {
    const auto& p = players[i];
    if (p.id != i) throw std::invalid_argument("game: player ids must be 0..m-1 in order");
    if (p.feasible_set.n != p.n || p.feasible_set.owner != i)
      throw std::invalid_argument("game: player " + std::to_string(i) + " feasible set does not match its block");
    p.feasible_set.validate();
    int se = 0;
    std::map<int, int> pe;
    p.objective.collect_extents(se, pe);
    if (se > n0) throw std::invalid_argument("game: player " + std::to_string(i) + " objective references x beyond n0");
    for (const auto& [q, e] : pe)
      if (q != i || e > p.n)
        throw std::invalid_argument("game: player " + std::to_string(i) + " objective references foreign variables");
    if (p.price_taking_form) {
      if (static_cast<int>(p.price_taking_form->slopes.size()) != n0)
        throw std::invalid_argument("game: price-taking form needs one slope per shared coordinate");
    }
  }
  const int dim = total_dimension();
  for (const auto& row : global_linear)
    if (static_cast<int>(row.coefs.size()) != dim)
      throw std::invalid_argument("game: global linear row '" + row.name + "' has wrong width");
  for (const auto& row : global_nonlinear) {
    int se = 0;
    std::map<int, int> pe;
    row.lhs.collect_extents(se, pe);
    if (se > n0) throw std::invalid_argument("game: global constraint references x beyond n0");
    for (const auto& [q, e] : pe)
      if (q >= num_players() || e > players[q].n)
        throw std::invalid_argument("game: global constraint references an unknown player variable");
  }
  mu.validate(players.size());
  if (price_box) {
    if (static_cast<int>(price_box->lower.size()) != n0 || static_cast<int>(price_box->upper.size()) != n0)
      throw std::invalid_argument("game: price box must have n0 entries");
    for (int k = 0; k < n0; ++k)
      if (!std::isfinite(price_box->lower[k]) || !std::isfinite(price_box->upper[k]) ||
          price_box->lower[k] > price_box->upper[k])
        throw std::invalid_argument("game: price box must be finite and ordered");
  }
}

bool GameInstance::has_constant_feasible_sets() const {
  return std::none_of(players.begin(), players.end(),
                      [](const Player& p) { return p.depends_on_shared_feasibility(); });
}

std::vector<double> GamePoint::flatten() const {
  std::vector<double> v = x;
  for (const auto& b : y) v.insert(v.end(), b.begin(), b.end());
  return v;
}

GamePoint GamePoint::unflatten(const GameInstance& game, std::span<const double> v) {
  if (static_cast<int>(v.size()) != game.total_dimension()) throw std::invalid_argument("point: wrong flat length");
  GamePoint p;
  p.x.assign(v.begin(), v.begin() + game.n0);
  int off = game.n0;
  for (const auto& pl : game.players) {
    p.y.emplace_back(v.begin() + off, v.begin() + off + pl.n);
    off += pl.n;
  }
  return p;
}

void check_dimensions(const GameInstance& game, const GamePoint& point) {
  if (static_cast<int>(point.x.size()) != game.n0) throw std::invalid_argument("point: x has wrong dimension");
  if (point.y.size() != game.players.size()) throw std::invalid_argument("point: wrong number of player blocks");
  for (std::size_t i = 0; i < point.y.size(); ++i)
    if (static_cast<int>(point.y[i].size()) != game.players[i].n)
      throw std::invalid_argument("point: block " + std::to_string(i) + " has wrong dimension");
}

double evaluate_player_objective(const GameInstance& game, int player, const GamePoint& point) {
  if (player < 0 || player >= game.num_players()) throw std::out_of_range("player index out of range");
  check_dimensions(game, point);
  return game.players[player].objective.evaluate_local(point.x, player, point.y[player]);
}

double evaluate_player_objective(const GameInstance& game, int player, std::span<const double> x,
                                 std::span<const double> z) {
  if (player < 0 || player >= game.num_players()) throw std::out_of_range("player index out of range");
  return game.players[player].objective.evaluate_local(x, player, z);
}

double FeasibilityReport::max_residual() const {
  double r = 0.0;
  for (const auto& v : violations) r = std::max(r, v.residual);
  return r;
}

FeasibilityReport check_point_feasible(const GameInstance& game, const GamePoint& point) {
  return check_point_feasible(game, point, game.tol);
}

FeasibilityReport check_point_feasible(const GameInstance& game, const GamePoint& point, const Tolerances& tol) {
  FeasibilityReport rep;
  try {
    check_dimensions(game, point);
  } catch (const std::invalid_argument& e) {
    rep.violations.push_back({e.what(), kInf});
    return rep;
  }
  for (auto& v : game.shared_set.violations(point.x, point.x, tol)) {
    v.what = "X: " + v.what;
    rep.violations.push_back(std::move(v));
  }
  for (int i = 0; i < game.num_players(); ++i) {
    for (auto& v : game.players[i].feasible_set.violations(point.y[i], point.x, tol)) {
      v.what = "Y_" + std::to_string(i) + ": " + v.what;
      rep.violations.push_back(std::move(v));
    }
  }
  const auto flat = point.flatten();
  for (std::size_t r = 0; r < game.global_linear.size(); ++r) {
    const auto& row = game.global_linear[r];
    const double act = row_activity(row.coefs, flat) - row.rhs;
    const double res = row.sense == Sense::eq ? std::abs(act) : std::max(0.0, act);
    if (res > tol.linear) rep.violations.push_back({"G: " + (row.name.empty() ? std::to_string(r) : row.name), res});
  }
  for (std::size_t r = 0; r < game.global_nonlinear.size(); ++r) {
    const auto& row = game.global_nonlinear[r];
    const double act = row.lhs.evaluate(point.x, point.y) - row.rhs;
    const double res = row.sense == Sense::eq ? std::abs(act) : std::max(0.0, act);
    if (res > tol.nonlinear)
      rep.violations.push_back({"G: " + (row.name.empty() ? "nonlinear " + std::to_string(r) : row.name), res});
  }
  return rep;
}

namespace {

std::vector<ExtendedReal> gaps_of(const GameInstance& game, const GamePoint& point,
                                  std::span<const ExtendedReal> opt) {
  check_dimensions(game, point);
  if (opt.size() != game.players.size()) throw std::invalid_argument("need one optimal value per player");
  std::vector<ExtendedReal> gaps;
  for (int i = 0; i < game.num_players(); ++i) {
    const double g = evaluate_player_objective(game, i, point);
    const auto& s = opt[i];
    if (s.is_minus_infinity()) {
      gaps.push_back(ExtendedReal::plus_infinity());
      continue;
    }
    if (s.is_plus_infinity())
      throw std::domain_error("player " + std::to_string(i) + " reported infeasible at a point where its block is feasible");
    const double gap = g - s.value();
    if (gap < -1e-7 * (1.0 + std::abs(s.value())))
      throw std::domain_error("player " + std::to_string(i) + " optimal value exceeds a feasible objective value (" +
                              std::to_string(gap) + "): optimal value is not global");
    gaps.push_back(ExtendedReal::finite(std::max(gap, 0.0)));
  }
  return gaps;
}

}  // namespace

double disequilibrium_value(const GameInstance& game, const GamePoint& point,
                            std::span<const ExtendedReal> player_opt_values) {
  const auto gaps = gaps_of(game, point, player_opt_values);
  return game.mu.apply(gaps).to_double();
}

double ni_phi(const GameInstance& game, const GamePoint& point, std::span<const ExtendedReal> player_opt_values) {
  if (game.mu.kind != MuMeasure::Kind::sum) throw std::invalid_argument("ni_phi requires mu = sum");
  check_dimensions(game, point);
  if (player_opt_values.size() != game.players.size()) throw std::invalid_argument("need one optimal value per player");
  double total_g = 0.0;
  double total_opt = 0.0;
  for (int i = 0; i < game.num_players(); ++i) {
    total_g += evaluate_player_objective(game, i, point);
    if (!player_opt_values[i].is_finite()) return player_opt_values[i].is_minus_infinity() ? kInf : -kInf;
    total_opt += player_opt_values[i].value();
  }
  return total_g - total_opt;
}

std::vector<Polynomial> expand_objectives(const GameInstance& game) {
  std::vector<Polynomial> out;
  out.reserve(game.players.size());
  for (const auto& p : game.players) out.push_back(p.objective.expand());
  return out;
}

}  // namespace gnep
