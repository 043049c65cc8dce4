#pragma once

#include <vector>

#include "imids/config.hpp"
#include "imids/rng.hpp"
#include "imids/topology.hpp"
#include "imids/types.hpp"

namespace imids::test {

inline SensorNode make_node(NodeId id, double x, double y, double energy = 1.0,
                            NodeClass cls = NodeClass::Follower) {
  SensorNode n;
  n.id = id;
  n.pos = {x, y};
  n.cls = cls;
  n.role = cls == NodeClass::Sink ? Role::SN : (cls == NodeClass::Leader ? Role::SM : Role::LN);
  n.energy.initial = energy;
  n.energy.residual = energy;
  return n;
}

/// Sink at index 0 plus `n - 1` nodes placed and energised from `rng`.
inline std::vector<SensorNode> random_nodes(SeededRng& rng, int n, double side, double leader_share = 0.4) {
  std::vector<SensorNode> nodes;
  nodes.push_back(make_node(0, side / 2, side / 2, 1e6, NodeClass::Sink));
  for (int i = 1; i < n; ++i) {
    const bool leader = i == 1 || rng.uniform() < leader_share;
    const double e = leader ? rng.uniform(1.5, 2.5) : rng.uniform(0.5, 1.0);
    nodes.push_back(make_node(static_cast<NodeId>(i), rng.uniform(0, side), rng.uniform(0, side), e,
                              leader ? NodeClass::Leader : NodeClass::Follower));
  }
  return nodes;
}

inline ScenarioConfig small_scenario(std::uint64_t seed, int nodes = 30, Mode mode = Mode::Imids) {
  ScenarioConfig c;
  c.seed = seed;
  c.mode = mode;
  c.rounds = 40;
  c.deployment.node_count = nodes;
  return c;
}

}  // namespace imids::test
