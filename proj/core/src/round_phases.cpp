#include "round_phases.hpp"

#include <algorithm>

#include "imids/attack.hpp"
#include "imids/rng.hpp"

namespace imids::detail {

namespace {

void wake(SlotPlan& plan, int slot) {
  if (slot < 0 || static_cast<std::size_t>(slot) >= plan.states.size()) return;
  auto& st = plan.states[static_cast<std::size_t>(slot)];
  if (st != NodeState::Transmit) st = NodeState::Listen;
}

void transmit(SlotPlan& plan, int slot) {
  if (slot < 0 || static_cast<std::size_t>(slot) >= plan.states.size()) return;
  plan.states[static_cast<std::size_t>(slot)] = NodeState::Transmit;
}

void note_tx(Observation& o, int slot, bool valid_token) {
  if (std::find(o.tx_slots.begin(), o.tx_slots.end(), slot) == o.tx_slots.end()) {
    o.tx_slots.push_back(slot);
  }
  ++o.packets_sent;
  if (!valid_token) o.invalid_token = true;
}

}  // namespace

RoundScratch begin_round(const SimulationState& state) {
  RoundScratch s;
  const auto n = state.net.nodes.size();
  s.slots = state.config.slots_per_round;
  s.sensing_round = state.round % state.config.traffic.sense_every == 0;
  s.before.resize(n);
  s.alive_at_start.resize(n);
  s.obs.resize(n);
  s.inbox.resize(n);
  s.plans.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.before[i] = state.net.nodes[i].energy.residual;
    s.alive_at_start[i] = is_alive(state.net.nodes[i]);
    s.obs[i].node = static_cast<NodeId>(i);
  }
  s.report.round = state.round;
  s.report.energy_spent.assign(n, 0.0);
  return s;
}

void draw_plans(const SimulationState& state, RoundScratch& scratch) {
  const auto& net = state.net;
  const int ctrl = state.control_slot();
  for (const auto& node : net.nodes) {
    if (node.id == net.sink || !is_alive(node)) continue;
    auto rng = stream(state.seed, Stream::Schedule, node.id, static_cast<std::uint64_t>(state.round));
    auto& plan = scratch.plans[node.id];
    plan.states.resize(static_cast<std::size_t>(scratch.slots));
    for (auto& st : plan.states) {
      st = rng.bernoulli(node.schedule.sleep_probability) ? NodeState::Sleep : NodeState::Listen;
    }
    if (scratch.sensing_round && node.schedule.tx_slot >= 0) transmit(plan, node.schedule.tx_slot);
  }

  auto plan_of = [&](NodeId n) -> SlotPlan* {
    return is_alive(net.nodes[n]) && n != net.sink ? &scratch.plans[n] : nullptr;
  };
  for (const auto& c : net.clusters) {
    if (auto* p = plan_of(c.coordinator)) {
      if (net.sectorized) {
        wake(*p, ctrl);
      } else {
        for (NodeId m : c.members) {
          if (scratch.sensing_round) wake(*p, net.nodes[m].schedule.tx_slot);
        }
        if (scratch.sensing_round) transmit(*p, ctrl);
      }
    }
    if (!net.sectorized) continue;
    if (c.fsh) {
      if (auto* p = plan_of(*c.fsh)) wake(*p, ctrl);
    }
    for (const auto& s : c.sectors) {
      if (auto* p = plan_of(s.coordinator)) {
        if (scratch.sensing_round) {
          for (NodeId l : s.leaves) wake(*p, net.nodes[l].schedule.tx_slot);
          transmit(*p, ctrl);
        }
      }
      for (NodeId m : s.monitors) {
        if (auto* p = plan_of(m)) wake(*p, ctrl);
      }
    }
  }
  if (state.config.mode == Mode::Itids) {
    for (const auto& node : net.nodes) {
      if (!state.monitor[node.id]) continue;
      if (auto* p = plan_of(node.id)) {
        for (int s = 0; s < scratch.slots; ++s) wake(*p, s);
      }
    }
  }
}

NodeId data_receiver(const SimulationState& state, NodeId node) {
  const auto& net = state.net;
  const Cluster* c = net.cluster_of(node);
  if (!c) return kNoNode;
  if (net.sectorized) {
    const Sector* s = net.sector_of(node);
    if (!s || s->coordinator == node) return kNoNode;
    return s->coordinator;
  }
  return c->coordinator == node ? kNoNode : c->coordinator;
}

namespace {

NodeId flood_target(const SimulationState& state, NodeId attacker) {
  const auto& net = state.net;
  const Cluster* c = net.cluster_of(attacker);
  if (!c) return kNoNode;
  if (net.sectorized) {
    const Sector* s = net.sector_of(attacker);
    if (s && s->coordinator != attacker) return s->coordinator;
  }
  return c->coordinator == attacker ? kNoNode : c->coordinator;
}

}  // namespace

void attack_phase(SimulationState& state, RoundScratch& scratch) {
  auto& nodes = state.net.nodes;
  const auto& p = state.config.energy;
  for (NodeId a : state.attackers) {
    if (!is_alive(nodes[a])) continue;
    auto rng = attack_stream(state.seed, a, state.round);
    const auto packets = emit_attack_traffic(nodes[a], nodes, state.net.graph, flood_target(state, a),
                                             state.config.attack, state.config.traffic,
                                             scratch.slots, state.round, rng);
    const bool filtered = state.ids.is_quarantined(a);
    for (const auto& pkt : packets) {
      if (!is_alive(nodes[a])) break;
      const long bits = bytes_to_bits(pkt.payload_size);
      consume(nodes[a], tx_cost(p, bits, distance(nodes[a].pos, nodes[pkt.dst].pos)));
      ++scratch.report.packets_sent;
      note_tx(scratch.obs[a], pkt.slot, pkt.token.valid);
      auto& victim = nodes[pkt.dst];
      if (filtered || !is_alive(victim) || !state.net.graph.has_edge(a, pkt.dst)) {
        ++scratch.report.packets_dropped;
        continue;
      }
      apply_deprivation(p, victim, pkt, scratch.plans[pkt.dst]);
      ++scratch.report.packets_delivered;
    }
  }
}

void data_phase(SimulationState& state, RoundScratch& scratch) {
  if (!scratch.sensing_round) return;
  auto& nodes = state.net.nodes;
  const auto& p = state.config.energy;
  const long bits = bytes_to_bits(state.config.traffic.data_bytes);
  for (auto& node : nodes) {
    if (node.id == state.net.sink || !is_alive(node) || node.schedule.tx_slot < 0) continue;
    if (state.ids.is_quarantined(node.id)) continue;
    const NodeId rcv = data_receiver(state, node.id);
    if (rcv == kNoNode) continue;
    Packet pkt{node.id, rcv, PacketKind::SensorData, {node.id, !node.malicious}, node.schedule.tx_slot,
               state.config.traffic.data_bytes};
    consume(node, tx_cost(p, bits, distance(node.pos, nodes[rcv].pos)));
    ++scratch.report.packets_sent;
    note_tx(scratch.obs[node.id], pkt.slot, pkt.token.valid);
    if (!is_alive(nodes[rcv]) || !state.net.graph.has_edge(node.id, rcv)) {
      ++scratch.report.packets_dropped;
      continue;
    }
    consume(nodes[rcv], rx_cost(p, bits));
    scratch.inbox[rcv].push_back(pkt);
    ++scratch.report.packets_delivered;
  }
}

void idle_phase(SimulationState& state, RoundScratch& scratch) {
  auto& nodes = state.net.nodes;
  for (auto& node : nodes) {
    if (node.id == state.net.sink || !scratch.alive_at_start[node.id]) continue;
    charge_slots(state.config.energy, node, scratch.plans[node.id]);
    scratch.obs[node.id].energy_spent = scratch.before[node.id] - node.energy.residual;
  }
}

bool route(SimulationState& state, RoundScratch& scratch, NodeId from, NodeId to, long bits,
           std::vector<NodeId>* path_out) {
  auto& nodes = state.net.nodes;
  const auto& p = state.config.energy;
  const NodeId sink = state.net.sink;
  auto path = shortest_path(state.net.graph, from, to, [&](NodeId n) {
    return n != sink && is_alive(nodes[n]) && !state.ids.is_quarantined(n);
  });
  if (path_out) *path_out = path;
  if (path.size() < 2) {
    ++scratch.report.packets_dropped;
    return from == to;
  }
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const NodeId u = path[i];
    const NodeId v = path[i + 1];
    if (!is_alive(nodes[u])) {
      ++scratch.report.packets_dropped;
      return false;
    }
    if (u != sink) consume(nodes[u], tx_cost(p, bits, distance(nodes[u].pos, nodes[v].pos)));
    ++scratch.report.packets_sent;
    if (v == sink) {
      ++scratch.report.packets_delivered;
      continue;
    }
    if (!is_alive(nodes[v])) {
      ++scratch.report.packets_dropped;
      return false;
    }
    consume(nodes[v], rx_cost(p, bits));
    ++scratch.report.packets_delivered;
  }
  return true;
}

void broadcast(SimulationState& state, NodeId from, double radius, long bits) {
  auto& nodes = state.net.nodes;
  const auto& p = state.config.energy;
  if (!is_alive(nodes[from])) return;
  if (from != state.net.sink) consume(nodes[from], tx_cost(p, bits, radius));
  for (NodeId v : state.net.graph.adjacency[from]) {
    if (v == state.net.sink || !is_alive(nodes[v])) continue;
    if (distance(nodes[from].pos, nodes[v].pos) <= radius) consume(nodes[v], rx_cost(p, bits));
  }
}

std::optional<Observation> observe(const SimulationState& state, const RoundScratch& scratch,
                                   NodeId detector, NodeId node) {
  if (!state.net.graph.has_edge(detector, node)) return std::nullopt;
  return scratch.obs[node];
}

void apply_injected_strikes(SimulationState& state, RoundScratch& scratch, bool isolate_immediately) {
  for (const auto& s : state.config.injected_strikes) {
    if (s.round != state.round) continue;
    auto& node = state.net.nodes[s.node];
    if (!is_alive(node) || state.ids.is_quarantined(s.node)) continue;
    node.trust = trust_penalize(node.trust, state.config.ids.penalty_step);
    state.ids.record_strike(s.node, state.round, ReasonSet{SidsReason::EnergyRate});
    if (isolate_immediately) {
      quarantine(state.ids, s.node, state.round);
      scratch.report.new_quarantines.push_back(s.node);
    }
  }
}

RoundReport finish_round(SimulationState& state, RoundScratch& scratch) {
  auto& report = scratch.report;
  auto& nodes = state.net.nodes;
  bool deaths = false;
  for (const auto& node : nodes) {
    if (node.id == state.net.sink) continue;
    report.energy_spent[node.id] = scratch.before[node.id] - node.energy.residual;
    report.energy_spent_total += report.energy_spent[node.id];
    deaths = deaths || (scratch.alive_at_start[node.id] && !is_alive(node));
  }
  for (const auto& [round, node] : state.ids.strike_log) {
    if (round == state.round) report.new_suspects.push_back(node);
  }
  std::sort(report.new_suspects.begin(), report.new_suspects.end());
  report.new_suspects.erase(std::unique(report.new_suspects.begin(), report.new_suspects.end()),
                            report.new_suspects.end());
  std::sort(report.new_quarantines.begin(), report.new_quarantines.end());
  report.alive_count = state.alive_count();
  report.confusion = compute_confusion(nodes, state.ids, state.ever_alive, state.net.sink);
  if (deaths) state.net.rebuild_graph();
  ++state.round;
  return std::move(report);
}

}  // namespace imids::detail
