#include "imids/attack.hpp"

#include <algorithm>
#include <numeric>

namespace imids {

std::vector<Packet> emit_attack_traffic(const SensorNode& attacker, std::span<const SensorNode> nodes,
                                        const TransmissionGraph& g, NodeId flood_target,
                                        const AttackConfig& attack, const TrafficConfig& traffic,
                                        int slots, int round, SeededRng& rng) {
  std::vector<Packet> out;
  if (!is_alive(attacker) || round < attack.start_round) return out;

  const WakeupToken forged{attacker.id, false};
  std::vector<NodeId> victims;
  for (NodeId v : g.adjacency[attacker.id]) {
    if (is_alive(nodes[v]) && nodes[v].cls != NodeClass::Sink) victims.push_back(v);
  }
  if (!victims.empty()) {
    for (int i = 0; i < attack.fake_msgs_per_round; ++i) {
      Packet p;
      p.src = attacker.id;
      p.dst = victims[rng.below(victims.size())];
      p.kind = PacketKind::FakeControl;
      p.token = forged;
      p.slot = static_cast<int>(rng.below(static_cast<std::uint64_t>(slots)));
      p.payload_size = traffic.control_bytes;
      out.push_back(p);
    }
  }
  if (flood_target != kNoNode && flood_target != attacker.id) {
    for (int s = 0; s < slots; ++s) {
      for (int i = 0; i < attack.flood_packets_per_slot; ++i) {
        out.push_back({attacker.id, flood_target, PacketKind::SensorData, forged, s, traffic.data_bytes});
      }
    }
  }
  return out;
}

double apply_deprivation(const EnergyParams& p, SensorNode& victim, const Packet& pkt, SlotPlan& plan) {
  if (!is_alive(victim)) return 0.0;
  if (pkt.slot >= 0 && static_cast<std::size_t>(pkt.slot) < plan.states.size() &&
      plan.states[static_cast<std::size_t>(pkt.slot)] == NodeState::Sleep) {
    plan.states[static_cast<std::size_t>(pkt.slot)] = NodeState::Listen;
  }
  return consume(victim, rx_cost(p, static_cast<long>(pkt.payload_size) * 8));
}

std::vector<NodeId> choose_attackers(const AttackConfig& attack, int node_count, std::uint64_t seed) {
  if (!attack.attacker_ids.empty()) {
    auto ids = attack.attacker_ids;
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
  }
  std::vector<NodeId> pool(static_cast<std::size_t>(node_count - 1));
  std::iota(pool.begin(), pool.end(), NodeId{1});
  auto rng = stream(seed, Stream::AttackerPick);
  rng.shuffle(pool);
  pool.resize(std::min<std::size_t>(pool.size(), static_cast<std::size_t>(attack.attacker_count)));
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace imids
