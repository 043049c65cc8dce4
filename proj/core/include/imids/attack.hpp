#pragma once

#include <span>
#include <vector>

#include "imids/config.hpp"
#include "imids/energy.hpp"
#include "imids/rng.hpp"
#include "imids/topology.hpp"
#include "imids/types.hpp"

namespace imids {

/// Packets one sleep-deprivation attacker emits in a round: fake control
/// messages with forged tokens to random alive neighbours, and a per-slot
/// flood of bogus sensor data at `flood_target` (its coordinator). Every
/// packet carries an invalid token. Dead attackers and rounds before
/// start_round yield nothing.
std::vector<Packet> emit_attack_traffic(const SensorNode& attacker, std::span<const SensorNode> nodes,
                                        const TransmissionGraph& g, NodeId flood_target,
                                        const AttackConfig& attack, const TrafficConfig& traffic,
                                        int slots, int round, SeededRng& rng);

/// Delivery of one packet to a victim in range: a sleeping slot is turned
/// into a listening slot and the reception is paid. Returns the rx energy
/// removed. Dead victims are untouched.
double apply_deprivation(const EnergyParams& p, SensorNode& victim, const Packet& pkt, SlotPlan& plan);

/// Attack victims per attacker are drawn from this stream, so a given
/// (seed, attacker, round) always produces the same traffic.
inline SeededRng attack_stream(std::uint64_t seed, NodeId attacker, int round) {
  return stream(seed, Stream::Attack, attacker, static_cast<std::uint64_t>(round));
}

/// Picks the attacker set: the explicit ids, or `attacker_count` distinct
/// non-sink nodes drawn from the seed.
std::vector<NodeId> choose_attackers(const AttackConfig& attack, int node_count, std::uint64_t seed);

}  // namespace imids
