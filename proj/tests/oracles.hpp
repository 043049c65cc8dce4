#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "imids/topology.hpp"

namespace imids::test {

inline bool within(const SensorNode& a, const SensorNode& b, double r) {
  const double dx = a.pos.x - b.pos.x, dy = a.pos.y - b.pos.y;
  return dx * dx + dy * dy <= r * r;
}

/// Coordinator election by exhaustive rescan: each step scores every
/// remaining eligible leader from raw positions and takes the best one that
/// still covers an uncovered node.
inline std::vector<NodeId> election_oracle(const std::vector<SensorNode>& nodes, double range, int reputation,
                                           NodeId sink = 0) {
  std::vector<NodeId> leaders;
  std::map<NodeId, double> score;
  for (const auto& n : nodes) {
    if (n.id == sink || n.cls != NodeClass::Leader || n.energy.residual <= 0) continue;
    if (n.trust.nibble < reputation || n.energy.ids_disabled) continue;
    int deg = 0;
    for (const auto& m : nodes) {
      if (m.id != n.id && m.energy.residual > 0 && within(n, m, range)) ++deg;
    }
    score[n.id] = deg * (n.energy.residual / n.energy.initial);
    leaders.push_back(n.id);
  }
  std::set<NodeId> uncovered;
  for (const auto& n : nodes) {
    if (n.id != sink && n.energy.residual > 0) uncovered.insert(n.id);
  }
  std::vector<NodeId> picked;
  std::set<NodeId> used;
  for (;;) {
    NodeId best = kNoNode;
    for (NodeId l : leaders) {
      if (used.count(l)) continue;
      bool gains = false;
      for (NodeId u : uncovered) gains = gains || u == l || within(nodes[l], nodes[u], range);
      if (!gains) continue;
      if (best == kNoNode) {
        best = l;
        continue;
      }
      const double dl = distance(nodes[l].pos, nodes[sink].pos), db = distance(nodes[best].pos, nodes[sink].pos);
      if (std::tuple(-score[l], dl, l) < std::tuple(-score[best], db, best)) best = l;
    }
    if (best == kNoNode) break;
    used.insert(best);
    picked.push_back(best);
    for (auto it = uncovered.begin(); it != uncovered.end();) {
      it = (*it == best || within(nodes[best], nodes[*it], range)) ? uncovered.erase(it) : std::next(it);
    }
  }
  return picked;
}

/// Hop counts over raw distances, independent of TransmissionGraph.
inline std::vector<int> bfs_oracle(const std::vector<SensorNode>& nodes, double range, NodeId root) {
  std::vector<int> d(nodes.size(), -1);
  std::deque<NodeId> q{root};
  d[root] = 0;
  while (!q.empty()) {
    NodeId u = q.front();
    q.pop_front();
    for (const auto& v : nodes) {
      if (d[v.id] != -1 || v.energy.residual <= 0 || !within(nodes[u], v, range)) continue;
      d[v.id] = d[u] + 1;
      q.push_back(v.id);
    }
  }
  return d;
}

/// First violated structural invariant of a hierarchy, if any. With
/// `full_cover` every alive non-sink node must sit in exactly one cluster;
/// otherwise (mid-run) nodes may be orphaned but never doubly owned.
inline std::optional<std::string> hierarchy_violation(const Network& net, bool full_cover,
                                                      const std::set<NodeId>& excluded = {}) {
  std::ostringstream why;
  std::vector<int> owner(net.nodes.size(), 0);
  for (const auto& c : net.clusters) {
    ++owner[c.coordinator];
    for (NodeId m : c.members) ++owner[m];

    std::multiset<NodeId> sectored;
    for (const auto& s : c.sectors) {
      sectored.insert(s.coordinator);
      sectored.insert(s.leaves.begin(), s.leaves.end());
    }
    for (NodeId x : sectored) {
      if (sectored.count(x) > 1) {
        why << "node " << x << " in two sectors of cluster " << c.id;
        return why.str();
      }
    }
    if (net.sectorized) {
      std::set<NodeId> followers;
      for (NodeId m : c.members) {
        const auto& n = net.nodes[m];
        if (n.cls == NodeClass::Follower && is_alive(n) && !excluded.count(m)) followers.insert(m);
      }
      for (NodeId f : followers) {
        if (!sectored.count(f)) {
          why << "follower " << f << " of cluster " << c.id << " is in no sector";
          return why.str();
        }
      }
      for (NodeId x : sectored) {
        if (std::find(c.members.begin(), c.members.end(), x) == c.members.end()) {
          why << "sector node " << x << " is not a member of cluster " << c.id;
          return why.str();
        }
      }
    } else if (!c.sectors.empty()) {
      return std::string("flat cluster with sectors");
    }
  }
  int sinks = 0;
  for (const auto& n : net.nodes) {
    sinks += n.role == Role::SN;
    if (n.id == net.sink) continue;
    if (owner[n.id] > 1) {
      why << "node " << n.id << " in " << owner[n.id] << " clusters";
      return why.str();
    }
    if (full_cover && is_alive(n) && !excluded.count(n.id) && owner[n.id] != 1) {
      why << "node " << n.id << " uncovered";
      return why.str();
    }
    const bool flat_leader = !net.sectorized && n.role == Role::LN;
    if (!role_fits_class(n.role, n.cls) && !flat_leader) {
      why << "node " << n.id << " role " << to_string(n.role) << " on class " << to_string(n.cls);
      return why.str();
    }
    if ((n.role == Role::LN || n.role == Role::FSH) && n.energy.detection_budget != 0.0) {
      why << "node " << n.id << " has a detection budget without detection duty";
      return why.str();
    }
  }
  if (sinks != 1) return std::string("sink count ") + std::to_string(sinks);
  return std::nullopt;
}

}  // namespace imids::test
