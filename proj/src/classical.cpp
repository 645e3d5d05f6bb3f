#include "gnep/classical.hpp"

#include <cmath>
#include <stdexcept>

namespace gnep {

bool ClassicalGame::feasible_for(int i, std::span<const std::vector<double>> u) const {
  const auto& p = players.at(i);
  // Own-block nonlinear rows use player_var(i, .); evaluate them with the full
  // assignment so coupling and own rows share one code path.
  FeasibleSet own_box = p.own;
  own_box.nonlinear.clear();
  if (!own_box.contains(u[i], {}, tol)) return false;
  auto check = [&](const NonlinearConstraint& row) {
    const double act = row.lhs.evaluate({}, u) - row.rhs;
    return row.sense == Sense::eq ? std::abs(act) <= tol.nonlinear : act <= tol.nonlinear;
  };
  for (const auto& row : p.own.nonlinear)
    if (!check(row)) return false;
  for (const auto& row : p.coupling)
    if (!check(row)) return false;
  return true;
}

namespace {

// Shared-form variable -> classical variable: x_k -> u_0[k], y_i[j] -> u_{i+1}[j].
Expression shift_to_classical(const Expression& e) {
  return e.remap([](VarRef v) {
    return v.is_shared() ? Expression::player_var(0, v.index) : Expression::player_var(v.player + 1, v.index);
  });
}

}  // namespace

ClassicalGame to_classical_gnep(const GameInstance& game) {
  game.validate();
  ClassicalGame out;
  out.tol = game.tol;

  ClassicalPlayer feas;
  feas.n = game.n0;
  feas.objective = Expression::constant(0.0);
  feas.own = game.shared_set;
  feas.own.owner = 0;
  feas.own.nonlinear.clear();
  for (const auto& row : game.shared_set.nonlinear)
    feas.own.nonlinear.push_back({shift_to_classical(row.lhs), row.sense, row.rhs, row.name});
  // Linear rows of G become coupling rows over every block.
  for (const auto& row : game.global_linear) {
    std::vector<Expression> terms;
    int off = 0;
    for (int k = 0; k < game.n0; ++k, ++off)
      if (row.coefs[off] != 0.0) terms.push_back(row.coefs[off] * Expression::player_var(0, k));
    for (int i = 0; i < game.num_players(); ++i)
      for (int j = 0; j < game.players[i].n; ++j, ++off)
        if (row.coefs[off] != 0.0) terms.push_back(row.coefs[off] * Expression::player_var(i + 1, j));
    feas.coupling.push_back({Expression::add(std::move(terms)), row.sense, row.rhs, row.name});
  }
  for (const auto& row : game.global_nonlinear)
    feas.coupling.push_back({shift_to_classical(row.lhs), row.sense, row.rhs, row.name});
  out.players.push_back(std::move(feas));

  for (int i = 0; i < game.num_players(); ++i) {
    const auto& p = game.players[i];
    ClassicalPlayer cp;
    cp.n = p.n;
    cp.objective = shift_to_classical(p.objective);
    cp.own = p.feasible_set;
    cp.own.owner = i + 1;
    cp.own.nonlinear.clear();
    for (const auto& row : p.feasible_set.nonlinear) {
      NonlinearConstraint shifted{shift_to_classical(row.lhs), row.sense, row.rhs, row.name};
      if (row.lhs.references_shared())
        cp.coupling.push_back(std::move(shifted));
      else
        cp.own.nonlinear.push_back(std::move(shifted));
    }
    out.players.push_back(std::move(cp));
  }
  return out;
}

GameInstance from_classical_gnep(const ClassicalGame& classical) {
  const int m = classical.num_players();
  std::vector<int> offset(m + 1, 0);
  for (int i = 0; i < m; ++i) offset[i + 1] = offset[i] + classical.players[i].n;

  GameInstance g;
  g.name = "copy-form";
  g.n0 = offset[m];
  g.tol = classical.tol;
  g.shared_set = FeasibleSet::free(-1, g.n0);
  for (int i = 0; i < m; ++i) {
    const auto& own = classical.players[i].own;
    for (int j = 0; j < own.n; ++j) {
      g.shared_set.lower[offset[i] + j] = own.lower[j];
      g.shared_set.upper[offset[i] + j] = own.upper[j];
      g.shared_set.integral[offset[i] + j] = own.integral[j];
    }
  }

  for (int i = 0; i < m; ++i) {
    const auto& cp = classical.players[i];
    // u_j (j != i) -> x block j; u_i -> y_i.
    auto to_shared_form = [&](const Expression& e) {
      return e.remap([&, i](VarRef v) {
        if (v.player == i) return Expression::player_var(i, v.index);
        return Expression::shared_var(offset[v.player] + v.index);
      });
    };
    Player p;
    p.id = i;
    p.n = cp.n;
    p.objective = to_shared_form(cp.objective);
    p.feasible_set = cp.own;
    p.feasible_set.owner = i;
    p.feasible_set.nonlinear.clear();
    for (const auto& row : cp.own.nonlinear)
      p.feasible_set.nonlinear.push_back({to_shared_form(row.lhs), row.sense, row.rhs, row.name});
    for (const auto& row : cp.coupling)
      p.feasible_set.nonlinear.push_back({to_shared_form(row.lhs), row.sense, row.rhs, row.name});
    g.players.push_back(std::move(p));
  }

  const int dim = g.total_dimension();
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < classical.players[i].n; ++j) {
      LinearConstraint row;
      row.coefs.assign(dim, 0.0);
      row.coefs[offset[i] + j] = 1.0;
      row.coefs[g.block_offset(i) + j] = -1.0;
      row.sense = Sense::eq;
      row.rhs = 0.0;
      row.name = "copy x" + std::to_string(offset[i] + j) + " = y" + std::to_string(i) + "[" + std::to_string(j) + "]";
      g.global_linear.push_back(std::move(row));
    }
  }
  g.validate();
  return g;
}

std::vector<std::vector<double>> to_classical_point(const GamePoint& p) {
  std::vector<std::vector<double>> u;
  u.push_back(p.x);
  for (const auto& b : p.y) u.push_back(b);
  return u;
}

GamePoint from_classical_point(const GameInstance& game, const std::vector<std::vector<double>>& u) {
  GamePoint p;
  for (const auto& b : u) p.x.insert(p.x.end(), b.begin(), b.end());
  p.y = u;
  if (static_cast<int>(p.x.size()) != game.n0) throw std::invalid_argument("classical point does not match game");
  return p;
}

}  // namespace gnep
