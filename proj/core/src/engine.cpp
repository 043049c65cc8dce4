#include "imids/engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "imids/attack.hpp"
#include "imids/itids.hpp"
#include "imids/rng.hpp"
#include "round_phases.hpp"

namespace imids {

using detail::bytes_to_bits;
using detail::RoundScratch;

int SimulationState::alive_count() const {
  int n = 0;
  for (const auto& node : net.nodes) {
    if (node.id != net.sink && is_alive(node)) ++n;
  }
  return n;
}

double expected_leaf_energy(const ScenarioConfig& config, double link_distance, bool always_listening) {
  const auto& p = config.energy;
  const int s = config.slots_per_round;
  const double idle = always_listening ? p.p_listen : 0.5 * (p.p_listen + p.p_sleep);
  const double tx = tx_cost(p, bytes_to_bits(config.traffic.data_bytes), link_distance);
  const double f = 1.0 / config.traffic.sense_every;
  return f * (tx + (s - 1) * idle) + (1.0 - f) * s * idle;
}

NormalProfile profile_for(const SimulationState& state, NodeId id) {
  const auto& node = state.net.nodes[id];
  NormalProfile prof;
  if (node.schedule.tx_slot >= 0) prof.allowed_slots.push_back(node.schedule.tx_slot);
  if (node.role != Role::LN) prof.allowed_slots.push_back(state.control_slot());
  const NodeId rcv = detail::data_receiver(state, id);
  if (node.role == Role::LN && node.schedule.tx_slot >= 0 && rcv != kNoNode) {
    const bool mon = !state.monitor.empty() && state.monitor[id];
    const double link = distance(node.pos, state.net.nodes[rcv].pos);
    prof.expected_energy = expected_leaf_energy(state.config, link, mon);
  }
  if (node.role == Role::FSH) {
    if (const Cluster* c = state.net.cluster_of(id)) {
      prof.expected_packets = std::max<double>(1.0, static_cast<double>(c->sectors.size()));
    }
  }
  return prof;
}

SimulationState initialize(const ScenarioConfig& config) {
  config.validate();
  SimulationState st;
  st.config = config;
  st.seed = config.require_seed();
  const auto& dep = config.deployment;

  auto deploy_rng = stream(st.seed, Stream::Deploy);
  auto& net = st.net;
  net.nodes = deploy(dep, deploy_rng);
  net.sink = 0;
  net.sector_radius = dep.sector_radius;
  net.sectorized = config.mode == Mode::Imids;
  net.election = ElectionParams{net.sink, config.ids.reputation_threshold};
  net.graph = build_graph(net.nodes, dep.transmission_range);
  grant_detection_budget(net.nodes[net.sink]);

  st.attackers = choose_attackers(config.attack, dep.node_count, st.seed);
  for (NodeId a : st.attackers) net.nodes[a].malicious = true;

  std::vector<double> before;
  for (const auto& n : net.nodes) before.push_back(n.energy.residual);

  const auto& p = config.energy;
  const long ctl = bytes_to_bits(config.traffic.control_bytes);
  // Sink census: query, then one reply per node in range.
  for (NodeId v : net.graph.adjacency[net.sink]) {
    auto& node = net.nodes[v];
    consume(node, rx_cost(p, ctl));
    consume(node, tx_cost(p, ctl, distance(node.pos, net.nodes[net.sink].pos)));
  }

  auto cluster_rng = stream(st.seed, Stream::Clusters);
  build_hierarchy(net, cluster_rng);

  for (const auto& c : net.clusters) {
    detail::broadcast(st, c.coordinator, dep.transmission_range, ctl);
    for (NodeId m : c.members) {
      consume(net.nodes[m], tx_cost(p, ctl, distance(net.nodes[m].pos, net.nodes[c.coordinator].pos)));
      consume(net.nodes[c.coordinator], rx_cost(p, ctl));
    }
    for (const auto& s : c.sectors) detail::broadcast(st, s.coordinator, dep.sector_radius, ctl);
  }
  assign_schedules(net, config.slots_per_round);

  st.monitor.assign(net.nodes.size(), false);
  if (config.mode == Mode::Itids) st.monitor = choose_itids_monitors(net, config.itids.monitor_fraction);

  st.init_spent.assign(net.nodes.size(), 0.0);
  st.ever_alive.assign(net.nodes.size(), false);
  for (const auto& n : net.nodes) {
    if (n.id == net.sink) continue;
    st.init_spent[n.id] = before[n.id] - n.energy.residual;
    st.ever_alive[n.id] = true;
  }
  net.rebuild_graph();
  return st;
}

namespace {

bool usable_detector(const SimulationState& st, NodeId n, NodeId exclude = kNoNode) {
  if (n == kNoNode || n == exclude) return false;
  const auto& node = st.net.nodes[n];
  return is_alive(node) && !node.energy.ids_disabled && !st.ids.is_quarantined(n) &&
         is_detector_role(node.role);
}

// One SIDS pass of `detector` over `targets` (skipping out-of-range,
// dead and quarantined nodes).
void run_sids(SimulationState& st, RoundScratch& scratch, NodeId detector,
              const std::vector<NodeId>& targets) {
  std::vector<Observation> obs;
  std::vector<NormalProfile> profiles;
  for (NodeId t : targets) {
    if (t == detector || t == st.net.sink) continue;
    if (!scratch.alive_at_start[t] || st.ids.is_quarantined(t)) continue;
    auto o = detail::observe(st, scratch, detector, t);
    if (!o) continue;
    obs.push_back(*o);
    profiles.push_back(profile_for(st, t));
  }
  if (obs.empty()) return;
  sids_check(st.config.energy, st.net.nodes[detector], st.net.nodes, obs, profiles, st.config.ids, st.ids,
             st.round);
}

// Cluster-scope validation of packets arriving at `cc`; accepted ones are
// returned for delivery to the sink.
std::vector<Packet> validate_at_cc(SimulationState& st, NodeId cc, const std::vector<Packet>& packets) {
  std::vector<Packet> accepted;
  std::map<NodeId, int> per_origin;
  for (const auto& pkt : packets) ++per_origin[pkt.src];
  auto& cc_node = st.net.nodes[cc];
  for (const auto& pkt : packets) {
    if (!is_alive(cc_node)) break;
    if (cc_node.energy.ids_disabled) {
      if (st.ids.is_quarantined(pkt.src)) continue;
      st.ids.valid_list.push_back({st.round, pkt.src, cc});
      accepted.push_back(pkt);
      continue;
    }
    if (cc_validate(st.config.energy, cc_node, pkt, profile_for(st, pkt.src), per_origin[pkt.src],
                    st.config.ids, st.ids, st.round) == CcVerdict::Accept) {
      accepted.push_back(pkt);
    }
  }
  return accepted;
}

void deliver_to_sink(SimulationState& st, RoundScratch& scratch, NodeId cc,
                     const std::vector<Packet>& accepted) {
  if (!scratch.sensing_round || !is_alive(st.net.nodes[cc])) return;
  const long bits = bytes_to_bits(st.config.traffic.data_bytes);
  if (detail::route(st, scratch, cc, st.net.sink, bits)) {
    for (const auto& pkt : accepted) st.ids.sink_log.push_back({st.round, pkt.src, cc});
  }
}

// The CC's own watcher: an SM of its cluster, else the sink when adjacent.
void watch_cc(SimulationState& st, RoundScratch& scratch, const Cluster& c) {
  const NodeId cc = c.coordinator;
  if (!scratch.alive_at_start[cc]) return;
  NodeId watcher = kNoNode;
  for (const auto& s : c.sectors) {
    for (NodeId m : s.monitors) {
      if (watcher == kNoNode && usable_detector(st, m, cc) && st.net.graph.has_edge(m, cc)) watcher = m;
    }
  }
  if (watcher == kNoNode) {
    for (NodeId m : c.members) {
      if (st.net.nodes[m].role == Role::SM && usable_detector(st, m, cc) && st.net.graph.has_edge(m, cc)) {
        watcher = m;
        break;
      }
    }
  }
  if (watcher == kNoNode && st.net.graph.has_edge(st.net.sink, cc)) watcher = st.net.sink;
  if (watcher != kNoNode) run_sids(st, scratch, watcher, {cc});
}

void sector_detection(SimulationState& st, RoundScratch& scratch) {
  auto& net = st.net;
  const int ctrl = st.control_slot();
  const long bits = bytes_to_bits(st.config.traffic.data_bytes);
  for (std::size_t k = 0; k < net.clusters.size(); ++k) {
    const Cluster c = net.clusters[k];
    const NodeId cc = c.coordinator;
    std::vector<Packet> at_cc;
    for (const auto& s : c.sectors) {
      const NodeId sc = s.coordinator;
      auto& sc_node = net.nodes[sc];
      if (!is_alive(sc_node)) continue;
      std::vector<Packet> forwarded;
      if (sc_node.malicious || sc_node.energy.ids_disabled || st.ids.is_quarantined(sc)) {
        forwarded = scratch.inbox[sc];
      } else {
        run_sids(st, scratch, sc, s.leaves);
        for (const auto& pkt : scratch.inbox[sc]) {
          if (st.ids.is_quarantined(pkt.src) || !pkt.token.valid) continue;
          const auto prof = profile_for(st, pkt.src);
          if (std::find(prof.allowed_slots.begin(), prof.allowed_slots.end(), pkt.slot) ==
              prof.allowed_slots.end()) {
            continue;
          }
          forwarded.push_back(pkt);
        }
      }
      if (!scratch.sensing_round) continue;
      forwarded.push_back(Packet{sc, cc, PacketKind::SensorData, {sc, !sc_node.malicious}, ctrl,
                                 st.config.traffic.data_bytes});
      bool arrived = false;
      const bool via_fsh = c.fsh && is_alive(net.nodes[*c.fsh]) && !st.ids.is_quarantined(*c.fsh);
      if (via_fsh) {
        arrived = detail::route(st, scratch, sc, *c.fsh, bits) &&
                  detail::route(st, scratch, *c.fsh, cc, bits);
        if (arrived) {
          for (const auto& pkt : forwarded) st.ids.forwarding_table.push_back({st.round, pkt.src, *c.fsh});
        }
      } else {
        arrived = detail::route(st, scratch, sc, cc, bits);
      }
      if (arrived) at_cc.insert(at_cc.end(), forwarded.begin(), forwarded.end());
    }
    if (!is_alive(net.nodes[cc])) continue;
    const auto accepted = validate_at_cc(st, cc, at_cc);

    if (usable_detector(st, cc)) {
      std::vector<NodeId> holders;
      for (NodeId m : c.members) {
        if (net.nodes[m].role != Role::LN) holders.push_back(m);
      }
      run_sids(st, scratch, cc, holders);
    }
    watch_cc(st, scratch, c);
    deliver_to_sink(st, scratch, cc, accepted);
  }
}

void flat_detection(SimulationState& st, RoundScratch& scratch) {
  auto& net = st.net;
  for (std::size_t k = 0; k < net.clusters.size(); ++k) {
    const Cluster c = net.clusters[k];
    const NodeId cc = c.coordinator;
    if (!is_alive(net.nodes[cc])) continue;
    if (usable_detector(st, cc)) run_sids(st, scratch, cc, c.members);
    const auto accepted = validate_at_cc(st, cc, scratch.inbox[cc]);
    watch_cc(st, scratch, c);
    deliver_to_sink(st, scratch, cc, accepted);
  }
}

NodeId choose_decider(const SimulationState& st, NodeId suspect) {
  const auto& net = st.net;
  if (const Cluster* c = net.cluster_of(suspect)) {
    if (net.sectorized) {
      if (const Sector* s = net.sector_of(suspect)) {
        for (NodeId m : s->monitors) {
          if (usable_detector(st, m, suspect)) return m;
        }
      }
      for (const auto& s : c->sectors) {
        for (NodeId m : s.monitors) {
          if (usable_detector(st, m, suspect)) return m;
        }
      }
      for (NodeId m : c->members) {
        if (net.nodes[m].role == Role::SM && usable_detector(st, m, suspect)) return m;
      }
    }
    if (usable_detector(st, c->coordinator, suspect)) return c->coordinator;
  }
  return usable_detector(st, net.sink, suspect) ? net.sink : kNoNode;
}

void exids_phase(SimulationState& st, RoundScratch& scratch) {
  std::vector<NodeId> suspects;
  for (const auto& [n, e] : st.ids.suspected) suspects.push_back(n);
  for (NodeId n : suspects) {
    if (st.ids.is_quarantined(n) || !is_alive(st.net.nodes[n])) continue;
    const NodeId decider = choose_decider(st, n);
    if (decider == kNoNode) continue;
    const auto d = exids_decide(st.config.energy, st.net.nodes[decider], st.net.nodes[n], st.config.ids,
                                st.ids, st.round);
    if (d == ExidsDecision::Malicious) {
      quarantine(st.ids, n, st.round);
      scratch.report.new_quarantines.push_back(n);
    }
  }
}

// A role holder that can no longer serve: dead, quarantined, or (for
// detector roles) out of detection budget.
NodeId find_failed_role(const SimulationState& st) {
  const auto& nodes = st.net.nodes;
  auto failed = [&](NodeId n, bool needs_ids) {
    return !is_alive(nodes[n]) || st.ids.is_quarantined(n) || (needs_ids && nodes[n].energy.ids_disabled);
  };
  for (const auto& c : st.net.clusters) {
    if (failed(c.coordinator, true)) return c.coordinator;
  }
  if (!st.net.sectorized) return kNoNode;
  for (const auto& c : st.net.clusters) {
    for (const auto& s : c.sectors) {
      if (failed(s.coordinator, true)) return s.coordinator;
    }
    if (c.fsh && failed(*c.fsh, false)) return *c.fsh;
    for (const auto& s : c.sectors) {
      for (NodeId m : s.monitors) {
        if (failed(m, true)) return m;
      }
    }
  }
  return kNoNode;
}

void reconfiguration_phase(SimulationState& st, RoundScratch& scratch) {
  const NodePredicate eligible = [&st](NodeId n) { return !st.ids.is_quarantined(n); };
  const long ctl = bytes_to_bits(st.config.traffic.control_bytes);
  const auto& dep = st.config.deployment;
  bool changed = false;
  for (std::uint64_t attempt = 0; attempt < st.net.nodes.size() * 4; ++attempt) {
    const NodeId failed = find_failed_role(st);
    if (failed == kNoNode) break;
    auto rng = stream(st.seed, Stream::Reconfig, static_cast<std::uint64_t>(st.round), attempt);
    auto ev = try_reconfigure(st.net, failed, rng, eligible);
    for (NodeId r : ev.replacements) {
      const double radius = st.net.nodes[r].role == Role::SC ? dep.sector_radius : dep.transmission_range;
      detail::broadcast(st, r, radius, ctl);
    }
    scratch.report.reconfigurations.push_back(std::move(ev));
    changed = true;
  }
  prune_membership(st.net, eligible);
  if (changed) assign_schedules(st.net, st.config.slots_per_round);
}

}  // namespace

RoundReport run_round(SimulationState& state) {
  if (state.config.mode == Mode::Itids) return itids_step(state);
  auto scratch = detail::begin_round(state);
  detail::draw_plans(state, scratch);
  detail::attack_phase(state, scratch);
  detail::data_phase(state, scratch);
  detail::idle_phase(state, scratch);
  if (state.net.sectorized) {
    sector_detection(state, scratch);
  } else {
    flat_detection(state, scratch);
  }
  detail::apply_injected_strikes(state, scratch, false);
  exids_phase(state, scratch);
  reconfiguration_phase(state, scratch);
  return detail::finish_round(state, scratch);
}

SimulationTrace run_simulation(const ScenarioConfig& config) {
  auto state = initialize(config);
  SimulationTrace trace;
  trace.config = state.config;
  trace.attackers = state.attackers;
  trace.init_spent = state.init_spent;
  for (const auto& n : state.net.nodes) trace.initial_energy.push_back(n.energy.initial);
  trace.initial_alive = state.alive_count();
  for (int r = 0; r < config.rounds; ++r) {
    if (state.extinct()) {
      trace.truncated = true;
      break;
    }
    trace.rounds.push_back(run_round(state));
  }
  for (const auto& n : state.net.nodes) {
    trace.final_residual.push_back(n.energy.residual);
    trace.final_roles.push_back(n.role);
  }
  trace.confusion = compute_confusion(state.net.nodes, state.ids, state.ever_alive, state.net.sink);
  trace.ledgers = std::move(state.ids);
  return trace;
}

}  // namespace imids
