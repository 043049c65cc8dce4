#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "imids/energy.hpp"
#include "imids/types.hpp"

namespace imids {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode { Imids, Itids, ImidsNoSectors };

std::string_view to_string(Mode m);
Mode parse_mode(std::string_view s);  // throws ConfigError

struct DeploymentConfig {
  int node_count = 70;  // including the sink
  double area_width = 80.0;
  double area_height = 100.0;
  Position sink{40.0, 50.0};
  double transmission_range = 60.0;
  double sector_radius = 30.0;
  double leader_fraction = 0.35;
  double leader_energy = 0.1;
  double follower_energy = 0.05;
  double energy_jitter = 0.1;
  double leader_energy_threshold = 0.075;
  // Optional explicit layout for non-sink nodes (ids 1..n-1 in order).
  std::vector<Position> positions;
  std::vector<double> energies;
};

struct AttackConfig {
  std::vector<NodeId> attacker_ids;  // explicit set wins over the count
  int attacker_count = 3;
  int fake_msgs_per_round = 10;
  int flood_packets_per_slot = 1;
  int start_round = 0;
};

struct IdsParams {
  int window = 5;
  int k_strikes = 3;
  int trust_floor = 8;
  double rate_threshold = 1.5;
  double count_threshold = 2.0;
  int reputation_threshold = 8;
  int penalty_step = 1;
  int reward_step = 1;
  bool token_rule = true;
};

struct ItidsConfig {
  double monitor_fraction = 0.5;
};

struct TrafficConfig {
  int data_bytes = 32;
  int control_bytes = 16;
  int sense_every = 1;  // rounds between sensing reports
};

struct InjectedStrike {
  NodeId node = kNoNode;
  int round = 0;
};

struct ScenarioConfig {
  std::optional<std::uint64_t> seed;
  Mode mode = Mode::Imids;
  int rounds = 300;
  int slots_per_round = 20;
  double seconds_per_round = 1.0;
  DeploymentConfig deployment;
  EnergyParams energy;
  AttackConfig attack;
  IdsParams ids;
  ItidsConfig itids;
  TrafficConfig traffic;
  std::vector<InjectedStrike> injected_strikes;

  /// Throws ConfigError on the first violated constraint.
  void validate() const;
  std::uint64_t require_seed() const;
};

}  // namespace imids
