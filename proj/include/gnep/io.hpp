#pragma once

#include <stdexcept>
#include <string>

#include "json.hpp"

#include "gnep/cga.hpp"
#include "gnep/game.hpp"
#include "gnep/instances.hpp"
#include "gnep/pricetaking.hpp"

namespace gnep {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Malformed document. `path` names the offending field, e.g.
/// "players[1].feasible_set.lower[0]"; syntax errors carry line/column.
class FormatError : public std::runtime_error {
 public:
  FormatError(std::string path, const std::string& what)
      : std::runtime_error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Expressions: ["const", v], ["svar", k], ["pvar", i, j], ["add", e...],
// ["mul", e...], ["square", e].
Json expression_to_json(const Expression& e);
Expression expression_from_json(const Json& j, const std::string& path = "expr");

/// Reals with infinities as the strings "inf" / "-inf".
Json real_to_json(double v);
double real_from_json(const Json& j, const std::string& path);
Json extended_to_json(const ExtendedReal& v);

Json game_to_json(const GameInstance& g);
/// Validates the result; validation failures are rethrown as FormatError.
GameInstance game_from_json(const Json& j);

/// Parses text; syntax errors report line and column.
Json parse_json_text(const std::string& text, const std::string& source = "input");
Json read_json_file(const std::string& path);
GameInstance load_game(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

Json point_to_json(const GamePoint& p);
GamePoint point_from_json(const Json& j);

Json iteration_to_json(const IterationRecord& r);
Json report_to_json(const SolveReport& r);
Json check_to_json(const EquilibriumCheck& c);
Json primal_to_json(const PrimalResult& r);
Json dual_iteration_to_json(const DualIteration& it);
Json dual_to_json(const DualResult& r, bool with_trace);
Json primal_dual_to_json(const PrimalDualResult& r);
Json expected_to_json(const ExpectedValues& e);

/// Stable text form: two-space indent, trailing newline.
std::string dump(const Json& j);

}  // namespace gnep
