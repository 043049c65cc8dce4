#pragma once

// Phases shared by the IMIDS round and the ITIDS baseline round.

#include <optional>
#include <vector>

#include "imids/energy.hpp"
#include "imids/engine.hpp"
#include "imids/ids.hpp"

namespace imids::detail {

struct RoundScratch {
  int slots = 0;
  bool sensing_round = true;
  std::vector<double> before;  // residual at round start
  std::vector<bool> alive_at_start;
  std::vector<SlotPlan> plans;
  std::vector<Observation> obs;
  std::vector<std::vector<Packet>> inbox;  // data packets per receiver
  RoundReport report;
};

RoundScratch begin_round(const SimulationState& state);

/// Detector duties per mode: which extra slots a node must be awake in.
void draw_plans(const SimulationState& state, RoundScratch& scratch);

/// Node that receives `node`'s sensor data (SC, or CC in flat modes).
NodeId data_receiver(const SimulationState& state, NodeId node);

void attack_phase(SimulationState& state, RoundScratch& scratch);
void data_phase(SimulationState& state, RoundScratch& scratch);
void idle_phase(SimulationState& state, RoundScratch& scratch);

/// Multi-hop unicast over alive, non-quarantined relays; every hop pays
/// tx and rx. Returns the path actually completed (empty if none).
bool route(SimulationState& state, RoundScratch& scratch, NodeId from, NodeId to, long bits,
           std::vector<NodeId>* path_out = nullptr);

/// Broadcast at `radius`: the sender pays one transmission, every alive
/// neighbour within the radius pays a reception.
void broadcast(SimulationState& state, NodeId from, double radius, long bits);

/// Observation as seen by `detector`; nullopt when the node is out of the
/// detector's radio range.
std::optional<Observation> observe(const SimulationState& state, const RoundScratch& scratch,
                                   NodeId detector, NodeId node);

void apply_injected_strikes(SimulationState& state, RoundScratch& scratch, bool isolate_immediately);

RoundReport finish_round(SimulationState& state, RoundScratch& scratch);

inline long bytes_to_bits(int bytes) { return static_cast<long>(bytes) * 8; }

}  // namespace imids::detail
