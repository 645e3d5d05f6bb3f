// Writes the bundled instances and expectation tables as JSON.
#include <filesystem>
#include <iostream>

#include "gnep/io.hpp"

int main(int argc, char** argv) {
  using namespace gnep;
  const std::filesystem::path dir = argc > 1 ? argv[1] : "instances";
  std::filesystem::create_directories(dir / "expected");
  write_text_file((dir / "cournot.json").string(), dump(game_to_json(cournot_game())));
  write_text_file((dir / "uc.json").string(), dump(game_to_json(unit_commitment_game())));
  write_text_file((dir / "gas.json").string(), dump(game_to_json(gas_network_game())));
  write_text_file((dir / "toy.json").string(), dump(game_to_json(producer_consumer_toy())));
  write_text_file((dir / "expected" / "cournot.json").string(), dump(expected_to_json(expected_cournot())));
  write_text_file((dir / "expected" / "uc.json").string(), dump(expected_to_json(expected_uc())));
  write_text_file((dir / "expected" / "gas.json").string(), dump(expected_to_json(expected_gas())));
  write_text_file((dir / "expected" / "cournot_point.json").string(),
                  dump(point_to_json(GamePoint{{1.0, 1.0}, {{1.0}, {1.0}}})));
  const auto uc = expected_uc();
  const auto& uc_x = uc.at("x").values;
  const auto& uc_y = uc.at("y").values;
  write_text_file((dir / "expected" / "uc_point.json").string(),
                  dump(point_to_json(GamePoint{uc_x, {{uc_y[0], uc_y[1]}, {uc_y[2], uc_y[3]}, {uc_y[4], uc_y[5]}}})));
  Json pub = point_to_json(gas_published_point());
  write_text_file((dir / "expected" / "gas_point.json").string(), dump(pub));
  std::cout << "wrote " << dir.string() << "\n";
  return 0;
}
