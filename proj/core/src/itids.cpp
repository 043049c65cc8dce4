#include "imids/itids.hpp"

#include <algorithm>
#include <cmath>

#include "round_phases.hpp"

namespace imids {

std::vector<bool> choose_itids_monitors(const Network& net, double monitor_fraction) {
  std::vector<bool> mon(net.nodes.size(), false);
  std::size_t population = 0;
  std::vector<std::vector<NodeId>> sensing(net.clusters.size());
  std::size_t followers = 0;
  for (std::size_t k = 0; k < net.clusters.size(); ++k) {
    const auto& c = net.clusters[k];
    population += 1 + c.members.size();
    for (NodeId m : c.members) {
      if (net.nodes[m].cls == NodeClass::Follower) sensing[k].push_back(m);
    }
    std::sort(sensing[k].begin(), sensing[k].end(), [&](NodeId a, NodeId b) {
      const double ea = net.nodes[a].energy.initial;
      const double eb = net.nodes[b].energy.initial;
      return ea != eb ? ea < eb : a < b;
    });
    followers += sensing[k].size();
  }
  if (followers == 0) return mon;

  // Network-wide quota, apportioned by largest remainder over the clusters'
  // sensing members.
  const auto total = std::min<std::size_t>(
      followers, static_cast<std::size_t>(std::lround(monitor_fraction * static_cast<double>(population))));
  std::vector<std::size_t> take(sensing.size());
  std::vector<std::pair<double, std::size_t>> remainder;
  std::size_t given = 0;
  for (std::size_t k = 0; k < sensing.size(); ++k) {
    const double share = static_cast<double>(total) * static_cast<double>(sensing[k].size()) /
                         static_cast<double>(followers);
    take[k] = static_cast<std::size_t>(std::floor(share));
    given += take[k];
    remainder.emplace_back(share - std::floor(share), k);
  }
  std::stable_sort(remainder.begin(), remainder.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; given < total && i < remainder.size(); ++i) {
    const std::size_t k = remainder[i].second;
    if (take[k] < sensing[k].size()) {
      ++take[k];
      ++given;
    }
  }
  for (std::size_t k = 0; k < sensing.size(); ++k) {
    for (std::size_t i = 0; i < take[k]; ++i) mon[sensing[k][i]] = true;
  }
  return mon;
}

RoundReport itids_step(SimulationState& st) {
  auto scratch = detail::begin_round(st);
  detail::draw_plans(st, scratch);
  detail::attack_phase(st, scratch);
  detail::data_phase(st, scratch);
  detail::idle_phase(st, scratch);

  auto& net = st.net;
  const auto& p = st.config.energy;
  std::vector<bool> judged(net.nodes.size(), false);
  for (auto& m : net.nodes) {
    if (!st.monitor[m.id] || !is_alive(m) || st.ids.is_quarantined(m.id)) continue;
    const Cluster* c = net.cluster_of(m.id);
    if (!c) continue;
    for (NodeId v : net.graph.adjacency[m.id]) {
      if (v == net.sink || net.cluster_of(v) != c) continue;
      if (!scratch.alive_at_start[v] || st.ids.is_quarantined(v)) continue;
      if (!is_alive(m)) break;
      consume(m, p.e_detect);
      const auto verdict = evaluate_sids_rules(scratch.obs[v], profile_for(st, v), st.config.ids);
      auto& target = net.nodes[v];
      if (verdict.status == SidsStatus::Suspected) {
        target.trust = trust_penalize(target.trust, st.config.ids.penalty_step);
        st.ids.record_strike(v, st.round, verdict.reasons);
        quarantine(st.ids, v, st.round);
        scratch.report.new_quarantines.push_back(v);
      } else if (!judged[v]) {
        target.trust = trust_reward(target.trust, st.config.ids.reward_step);
      }
      judged[v] = true;
    }
  }

  const long bits = detail::bytes_to_bits(st.config.traffic.data_bytes);
  for (const auto& c : net.clusters) {
    const NodeId cc = c.coordinator;
    if (!is_alive(net.nodes[cc]) || !scratch.sensing_round) continue;
    std::vector<NodeId> accepted;
    for (const auto& pkt : scratch.inbox[cc]) {
      if (st.ids.is_quarantined(pkt.src)) continue;
      st.ids.valid_list.push_back({st.round, pkt.src, cc});
      accepted.push_back(pkt.src);
    }
    if (detail::route(st, scratch, cc, net.sink, bits)) {
      for (NodeId src : accepted) st.ids.sink_log.push_back({st.round, src, cc});
    }
  }
  detail::apply_injected_strikes(st, scratch, true);
  return detail::finish_round(st, scratch);
}

}  // namespace imids
