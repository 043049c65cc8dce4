#pragma once

#include <cstdint>
#include <vector>

#include "imids/config.hpp"
#include "imids/ids.hpp"
#include "imids/topology.hpp"
#include "imids/types.hpp"

namespace imids {

struct RoundReport {
  int round = 0;
  int alive_count = 0;  // non-sink nodes alive at the end of the round
  double energy_spent_total = 0.0;
  std::vector<double> energy_spent;  // per node; the sink is not metered
  int packets_sent = 0;
  int packets_delivered = 0;
  int packets_dropped = 0;
  std::vector<NodeId> new_suspects;
  std::vector<NodeId> new_quarantines;
  std::vector<ReconfigEvent> reconfigurations;
  Confusion confusion;  // running classification at the end of the round
};

/// Mutable state of one run. Owned exclusively by its round loop.
struct SimulationState {
  ScenarioConfig config;
  std::uint64_t seed = 0;
  Network net;
  IdsLedgers ids;
  std::vector<NodeId> attackers;
  std::vector<bool> monitor;  // ITIDS monitor flags
  std::vector<bool> ever_alive;
  std::vector<double> init_spent;
  int round = 0;

  int alive_count() const;
  bool extinct() const { return alive_count() == 0; }
  int control_slot() const { return config.slots_per_round - 1; }
};

struct SimulationTrace {
  ScenarioConfig config;
  std::vector<NodeId> attackers;
  std::vector<double> initial_energy;
  std::vector<double> init_spent;
  std::vector<double> final_residual;
  std::vector<Role> final_roles;
  int initial_alive = 0;
  std::vector<RoundReport> rounds;
  Confusion confusion;
  IdsLedgers ledgers;
  bool truncated = false;  // every non-sink node died before the horizon
};

/// Deployment, sink census, classification, elections, schedule
/// assignment and IDS activation. Control traffic is charged. Throws
/// ConfigError or TopologyError.
SimulationState initialize(const ScenarioConfig& config);

/// One TDMA round in the configured mode; advances state.round.
RoundReport run_round(SimulationState& state);

/// Initialization followed by rounds until the horizon or extinction.
SimulationTrace run_simulation(const ScenarioConfig& config);

/// Normal profile the detectors hold for a node under its current duty.
NormalProfile profile_for(const SimulationState& state, NodeId node);

/// Expected per-round energy of a sensing leaf whose data link is
/// `link_distance` long.
double expected_leaf_energy(const ScenarioConfig& config, double link_distance, bool always_listening);

}  // namespace imids
