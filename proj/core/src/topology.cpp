#include "imids/topology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <sstream>

#include "imids/energy.hpp"

namespace imids {

namespace {

std::string describe_uncovered(const std::vector<NodeId>& ids) {
  std::ostringstream os;
  os << "coverage failure: " << ids.size() << " node(s) uncoverable";
  if (!ids.empty()) {
    os << " (";
    for (std::size_t i = 0; i < ids.size() && i < 8; ++i) os << (i ? "," : "") << ids[i];
    if (ids.size() > 8) os << ",...";
    os << ")";
  }
  return os.str();
}

bool accepts(const NodePredicate& p, NodeId n) { return !p || p(n); }

constexpr double kSinkEnergy = 1e6;

}  // namespace

CoverageFailure::CoverageFailure(std::vector<NodeId> uncovered)
    : TopologyError(describe_uncovered(uncovered)), uncovered_(std::move(uncovered)) {}

UnreachableNode::UnreachableNode(NodeId node)
    : TopologyError("node " + std::to_string(node) + " has no coordinator in range"), node_(node) {}

bool TransmissionGraph::has_edge(NodeId a, NodeId b) const {
  if (a >= adjacency.size() || b >= adjacency.size()) return false;
  const auto& row = adjacency[a];
  return std::binary_search(row.begin(), row.end(), b);
}

TransmissionGraph build_graph(std::span<const SensorNode> nodes, double range) {
  TransmissionGraph g;
  g.range = range;
  g.adjacency.assign(nodes.size(), {});
  const double r2 = range * range;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!is_alive(nodes[i])) continue;
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      if (!is_alive(nodes[j])) continue;
      if (distance_squared(nodes[i].pos, nodes[j].pos) <= r2) {
        g.adjacency[i].push_back(static_cast<NodeId>(j));
        g.adjacency[j].push_back(static_cast<NodeId>(i));
      }
    }
  }
  for (auto& row : g.adjacency) std::sort(row.begin(), row.end());
  return g;
}

std::vector<int> hop_distances(const TransmissionGraph& g, NodeId root,
                               const std::function<bool(NodeId)>& traversable) {
  std::vector<int> dist(g.size(), -1);
  if (root >= g.size()) return dist;
  std::deque<NodeId> queue{root};
  dist[root] = 0;
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    if (u != root && !accepts(traversable, u)) continue;
    for (NodeId v : g.adjacency[u]) {
      if (dist[v] == -1) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

std::vector<NodeId> shortest_path(const TransmissionGraph& g, NodeId src, NodeId dst,
                                  const std::function<bool(NodeId)>& traversable) {
  if (src >= g.size() || dst >= g.size()) return {};
  if (src == dst) return {src};
  std::vector<NodeId> parent(g.size(), kNoNode);
  std::vector<bool> seen(g.size(), false);
  std::deque<NodeId> queue{src};
  seen[src] = true;
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (NodeId v : g.adjacency[u]) {
      if (seen[v]) continue;
      if (v != dst && !accepts(traversable, v)) continue;
      seen[v] = true;
      parent[v] = u;
      if (v == dst) {
        std::vector<NodeId> path{dst};
        for (NodeId p = u; p != kNoNode; p = parent[p]) path.push_back(p);
        std::reverse(path.begin(), path.end());
        return path;
      }
      queue.push_back(v);
    }
  }
  return {};
}

std::vector<SensorNode> deploy(const DeploymentConfig& config, SeededRng& rng) {
  if (config.node_count < 3) throw TopologyError("deploy: node_count must be >= 3");
  if (!(config.area_width > 0) || !(config.area_height > 0)) {
    throw TopologyError("deploy: deployment area must be non-empty");
  }
  const auto n = static_cast<std::size_t>(config.node_count);
  std::vector<SensorNode> nodes(n);

  nodes[0].id = 0;
  nodes[0].pos = config.sink;
  nodes[0].cls = NodeClass::Sink;
  nodes[0].role = Role::SN;
  nodes[0].state = NodeState::Listen;
  nodes[0].energy = {kSinkEnergy, kSinkEnergy, 0.0, 0.0, false};

  for (std::size_t i = 1; i < n; ++i) {
    nodes[i].id = static_cast<NodeId>(i);
    if (!config.positions.empty()) {
      nodes[i].pos = config.positions[i - 1];
    } else {
      const double x = rng.uniform(0.0, config.area_width);
      const double y = rng.uniform(0.0, config.area_height);
      nodes[i].pos = {x, y};
    }
  }

  if (!config.energies.empty()) {
    for (std::size_t i = 1; i < n; ++i) nodes[i].energy.initial = config.energies[i - 1];
  } else {
    std::vector<NodeId> order(n - 1);
    std::iota(order.begin(), order.end(), NodeId{1});
    rng.shuffle(order);
    const auto leaders = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::lround(config.leader_fraction * static_cast<double>(n - 1))));
    for (std::size_t k = 0; k < order.size(); ++k) {
      const double base = k < leaders ? config.leader_energy : config.follower_energy;
      const double jitter = config.energy_jitter * rng.uniform(-1.0, 1.0);
      nodes[order[k]].energy.initial = base * (1.0 + jitter);
    }
  }
  for (std::size_t i = 1; i < n; ++i) nodes[i].energy.residual = nodes[i].energy.initial;

  const auto classes = classify_nodes(nodes, 0, config.leader_energy_threshold);
  for (std::size_t i = 1; i < n; ++i) {
    nodes[i].cls = classes[i];
    nodes[i].role = classes[i] == NodeClass::Leader ? Role::SM : Role::LN;
    if (detection_fraction(nodes[i].role) > 0.0) grant_detection_budget(nodes[i]);
  }
  return nodes;
}

std::vector<NodeClass> classify_nodes(std::span<const SensorNode> nodes, NodeId sink,
                                      double leader_energy_threshold) {
  std::vector<NodeClass> out(nodes.size(), NodeClass::Follower);
  bool any_leader = false;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i == sink) {
      out[i] = NodeClass::Sink;
    } else if (nodes[i].energy.initial >= leader_energy_threshold) {
      out[i] = NodeClass::Leader;
      any_leader = true;
    }
  }
  if (!any_leader) throw TopologyError("classify: no node qualifies as a Leader");
  return out;
}

double capacity(const SensorNode& n, const TransmissionGraph& g) {
  const double degree = static_cast<double>(g.degree(n.id));
  return degree * (n.energy.residual / n.energy.initial);
}

ElectionResult elect_coordinators(std::span<const SensorNode> nodes, const TransmissionGraph& g,
                                  const ElectionParams& params, std::span<const NodeId> targets,
                                  const NodePredicate& eligible) {
  std::vector<bool> is_target(nodes.size(), false);
  for (NodeId t : targets) is_target[t] = true;
  std::vector<bool> covered(nodes.size(), false);

  struct Candidate {
    NodeId id;
    double cap;
    double sink_dist;
  };
  std::vector<Candidate> candidates;
  const Position sink_pos = nodes[params.sink].pos;
  for (const auto& n : nodes) {
    if (n.id == params.sink || n.cls != NodeClass::Leader || !is_alive(n)) continue;
    if (n.trust.nibble < params.reputation_threshold) continue;
    if (n.energy.ids_disabled || !accepts(eligible, n.id)) continue;
    candidates.push_back({n.id, capacity(n, g), distance(n.pos, sink_pos)});
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.cap != b.cap) return a.cap > b.cap;
    if (a.sink_dist != b.sink_dist) return a.sink_dist < b.sink_dist;
    return a.id < b.id;
  });

  ElectionResult result;
  for (const auto& c : candidates) {
    bool gains = is_target[c.id] && !covered[c.id];
    for (NodeId v : g.adjacency[c.id]) gains = gains || (is_target[v] && !covered[v]);
    if (!gains) continue;
    result.coordinators.push_back(c.id);
    covered[c.id] = true;
    for (NodeId v : g.adjacency[c.id]) covered[v] = true;
  }
  for (NodeId t : targets) {
    if (!covered[t]) result.uncovered.push_back(t);
  }
  return result;
}

std::vector<NodeId> select_cluster_coordinators(std::span<const SensorNode> nodes,
                                                const TransmissionGraph& g,
                                                const ElectionParams& params,
                                                const NodePredicate& eligible) {
  std::vector<NodeId> targets;
  for (const auto& n : nodes) {
    if (n.id != params.sink && is_alive(n) && accepts(eligible, n.id)) targets.push_back(n.id);
  }
  auto result = elect_coordinators(nodes, g, params, targets, eligible);
  if (!result.uncovered.empty()) throw CoverageFailure(std::move(result.uncovered));
  return result.coordinators;
}

std::vector<Cluster> form_clusters(std::span<const SensorNode> nodes, std::span<const NodeId> ccs,
                                   std::span<const NodeId> joiners, const TransmissionGraph& g,
                                   SeededRng& rng) {
  if (ccs.empty()) throw TopologyError("form_clusters: no coordinators");
  std::vector<Cluster> clusters(ccs.size());
  std::vector<int> slot_of(nodes.size(), -1);
  for (std::size_t k = 0; k < ccs.size(); ++k) {
    clusters[k].id = static_cast<int>(k);
    clusters[k].coordinator = ccs[k];
    slot_of[ccs[k]] = static_cast<int>(k);
  }

  std::vector<NodeId> order(joiners.begin(), joiners.end());
  std::sort(order.begin(), order.end());
  for (NodeId n : order) {
    if (slot_of[n] >= 0 && clusters[slot_of[n]].coordinator == n) continue;
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> tied;
    for (std::size_t k = 0; k < ccs.size(); ++k) {
      if (!g.has_edge(n, ccs[k])) continue;
      const double d2 = distance_squared(nodes[n].pos, nodes[ccs[k]].pos);
      if (d2 < best) {
        best = d2;
        tied.assign(1, static_cast<int>(k));
      } else if (d2 == best) {
        tied.push_back(static_cast<int>(k));
      }
    }
    if (tied.empty()) throw UnreachableNode(n);
    const int pick = tied.size() == 1 ? tied[0] : tied[rng.below(tied.size())];
    clusters[pick].members.push_back(n);
  }
  return clusters;
}

std::vector<Sector> form_sectors(std::span<const SensorNode> nodes, const Cluster& cluster,
                                 double radius, const NodePredicate& can_coordinate) {
  std::vector<NodeId> followers;
  for (NodeId m : cluster.members) {
    if (nodes[m].cls == NodeClass::Follower && is_alive(nodes[m])) followers.push_back(m);
  }
  std::sort(followers.begin(), followers.end(), [&](NodeId a, NodeId b) {
    if (nodes[a].energy.residual != nodes[b].energy.residual) {
      return nodes[a].energy.residual > nodes[b].energy.residual;
    }
    return a < b;
  });

  std::vector<Sector> sectors;
  std::vector<bool> assigned(nodes.size(), false);
  const double r2 = radius * radius;
  for (NodeId head : followers) {
    if (assigned[head]) continue;
    if (nodes[head].energy.ids_disabled || !accepts(can_coordinate, head)) continue;
    Sector s;
    s.id = static_cast<int>(sectors.size());
    s.coordinator = head;
    assigned[head] = true;
    for (NodeId f : followers) {
      if (assigned[f]) continue;
      if (distance_squared(nodes[head].pos, nodes[f].pos) <= r2) {
        s.leaves.push_back(f);
        assigned[f] = true;
      }
    }
    std::sort(s.leaves.begin(), s.leaves.end());
    sectors.push_back(std::move(s));
  }

  // Followers that may not coordinate and found no sector join the nearest one.
  if (!sectors.empty()) {
    for (NodeId f : followers) {
      if (assigned[f]) continue;
      auto nearest = std::min_element(sectors.begin(), sectors.end(), [&](const Sector& a, const Sector& b) {
        return distance_squared(nodes[f].pos, nodes[a.coordinator].pos) <
               distance_squared(nodes[f].pos, nodes[b.coordinator].pos);
      });
      nearest->leaves.push_back(f);
      std::sort(nearest->leaves.begin(), nearest->leaves.end());
      assigned[f] = true;
    }
  }
  return sectors;
}

namespace {

std::vector<NodeId> eligible_leaders(std::span<const SensorNode> nodes, const Cluster& cluster,
                                     const NodePredicate& eligible) {
  std::vector<NodeId> out;
  for (NodeId m : cluster.members) {
    const auto& n = nodes[m];
    if (n.cls == NodeClass::Leader && is_alive(n) && accepts(eligible, m)) out.push_back(m);
  }
  return out;
}

}  // namespace

std::vector<NodeId> select_sector_monitor(std::span<const SensorNode> nodes, const Cluster& cluster,
                                          const Sector& sector, const TransmissionGraph& g,
                                          const NodePredicate& eligible) {
  std::vector<NodeId> leaders;
  for (NodeId l : eligible_leaders(nodes, cluster, eligible)) {
    if (!nodes[l].energy.ids_disabled) leaders.push_back(l);
  }
  if (leaders.empty()) {
    throw MonitorUnavailable("cluster " + std::to_string(cluster.id) + " has no eligible monitor");
  }
  std::vector<NodeId> adjacent;
  for (NodeId l : leaders) {
    bool near = g.has_edge(l, sector.coordinator);
    for (NodeId leaf : sector.leaves) near = near || g.has_edge(l, leaf);
    if (near) adjacent.push_back(l);
  }
  const auto& pool = adjacent.empty() ? leaders : adjacent;

  auto budget = [&](NodeId l) { return detection_fraction(Role::SM) * nodes[l].energy.residual; };
  double best = -1.0;
  for (NodeId l : pool) best = std::max(best, budget(l));
  std::vector<NodeId> out;
  for (NodeId l : pool) {
    if (budget(l) == best) out.push_back(l);
  }
  std::sort(out.begin(), out.end());
  return out;
}

NodeId select_fsh(std::span<const SensorNode> nodes, const Cluster& cluster,
                  const TransmissionGraph& g, const NodePredicate& eligible) {
  const auto leaders = eligible_leaders(nodes, cluster, eligible);
  if (leaders.empty()) {
    throw MonitorUnavailable("cluster " + std::to_string(cluster.id) + " has no forwarding candidate");
  }
  const auto hops = hop_distances(g, cluster.coordinator);
  const Position cc = nodes[cluster.coordinator].pos;
  auto key = [&](NodeId l) {
    const int h = hops[l] < 0 ? std::numeric_limits<int>::max() : hops[l];
    return std::tuple(h, distance(nodes[l].pos, cc), l);
  };
  return *std::min_element(leaders.begin(), leaders.end(),
                           [&](NodeId a, NodeId b) { return key(a) < key(b); });
}

// ---------------------------------------------------------------------------
// Network

void Network::reindex() {
  cluster_index.assign(nodes.size(), -1);
  sector_index.assign(nodes.size(), -1);
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    const auto& c = clusters[k];
    cluster_index[c.coordinator] = static_cast<int>(k);
    for (NodeId m : c.members) cluster_index[m] = static_cast<int>(k);
    for (std::size_t s = 0; s < c.sectors.size(); ++s) {
      sector_index[c.sectors[s].coordinator] = static_cast<int>(s);
      for (NodeId l : c.sectors[s].leaves) sector_index[l] = static_cast<int>(s);
    }
  }
}

const Cluster* Network::cluster_of(NodeId n) const {
  const int k = n < cluster_index.size() ? cluster_index[n] : -1;
  return k < 0 ? nullptr : &clusters[static_cast<std::size_t>(k)];
}

Cluster* Network::cluster_of(NodeId n) {
  const int k = n < cluster_index.size() ? cluster_index[n] : -1;
  return k < 0 ? nullptr : &clusters[static_cast<std::size_t>(k)];
}

const Sector* Network::sector_of(NodeId n) const {
  const Cluster* c = cluster_of(n);
  if (!c || sector_index[n] < 0) return nullptr;
  return &c->sectors[static_cast<std::size_t>(sector_index[n])];
}

namespace {

void set_role(SensorNode& n, Role r) {
  if (n.role == r) return;
  n.role = r;
  if (detection_fraction(r) > 0.0 && !n.energy.ids_disabled) {
    grant_detection_budget(n);
  } else if (detection_fraction(r) == 0.0) {
    n.energy.detection_budget = 0.0;
    n.energy.detection_initial = 0.0;
  }
}

// Leaders that hold no duty are standby monitors.
Role idle_role(const SensorNode& n) { return n.cls == NodeClass::Leader ? Role::SM : Role::LN; }

bool is_active_monitor(const Cluster& c, NodeId n) {
  for (const auto& s : c.sectors) {
    if (std::find(s.monitors.begin(), s.monitors.end(), n) != s.monitors.end()) return true;
  }
  return false;
}

void choose_fsh(Network& net, Cluster& c, const NodePredicate& eligible) {
  c.fsh.reset();
  try {
    c.fsh = select_fsh(net.nodes, c, net.graph, [&](NodeId l) {
      return accepts(eligible, l) && !is_active_monitor(c, l);
    });
  } catch (const MonitorUnavailable&) {
  }
  for (auto& s : c.sectors) s.fsh = c.fsh;
}

void choose_monitors(Network& net, Cluster& c, Sector& s, const NodePredicate& eligible) {
  s.monitors.clear();
  try {
    s.monitors = select_sector_monitor(net.nodes, c, s, net.graph, [&](NodeId l) {
      return accepts(eligible, l) && (!c.fsh || *c.fsh != l);
    });
  } catch (const MonitorUnavailable&) {
  }
}

void apply_cluster_roles(Network& net, Cluster& c) {
  set_role(net.nodes[c.coordinator], Role::CC);
  for (NodeId m : c.members) {
    auto& n = net.nodes[m];
    if (!net.sectorized) {
      set_role(n, Role::LN);
      continue;
    }
    Role r = idle_role(n);
    if (c.fsh && *c.fsh == m) r = Role::FSH;
    set_role(n, r);
  }
  for (const auto& s : c.sectors) set_role(net.nodes[s.coordinator], Role::SC);
}

}  // namespace

void build_cluster_internals(Network& net, Cluster& cluster, const NodePredicate& eligible) {
  cluster.sectors.clear();
  cluster.fsh.reset();
  if (net.sectorized) {
    cluster.sectors = form_sectors(net.nodes, cluster, net.sector_radius, eligible);
    for (auto& s : cluster.sectors) choose_monitors(net, cluster, s, eligible);
    choose_fsh(net, cluster, eligible);
  }
  apply_cluster_roles(net, cluster);
}

void build_hierarchy(Network& net, SeededRng& rng, const NodePredicate& eligible) {
  std::vector<NodeId> targets;
  for (const auto& n : net.nodes) {
    if (n.id != net.sink && is_alive(n) && accepts(eligible, n.id)) targets.push_back(n.id);
  }
  auto election = elect_coordinators(net.nodes, net.graph, net.election, targets, eligible);
  if (!election.uncovered.empty()) throw CoverageFailure(election.uncovered);

  net.clusters = form_clusters(net.nodes, election.coordinators, targets, net.graph, rng);
  net.next_cluster_id = static_cast<int>(net.clusters.size());
  net.orphans.clear();
  for (auto& c : net.clusters) build_cluster_internals(net, c, eligible);
  net.reindex();
}

void assign_schedules(Network& net, int slots) {
  const int data_slots = std::max(1, slots - 1);
  for (auto& n : net.nodes) {
    n.schedule.tx_slot = -1;
    n.schedule.sleep_probability = 0.5;
  }
  auto give = [&](std::vector<NodeId> ids) {
    std::sort(ids.begin(), ids.end());
    int next = 0;
    for (NodeId id : ids) {
      net.nodes[id].schedule.tx_slot = next % data_slots;
      ++next;
    }
  };
  for (const auto& c : net.clusters) {
    if (net.sectorized) {
      for (const auto& s : c.sectors) give(s.leaves);
    } else {
      std::vector<NodeId> sensing;
      for (NodeId m : c.members) {
        if (net.nodes[m].cls == NodeClass::Follower) sensing.push_back(m);
      }
      give(std::move(sensing));
    }
  }
  for (auto& n : net.nodes) {
    n.schedule.wake_slots.clear();
    if (n.schedule.tx_slot >= 0) n.schedule.wake_slots.push_back(n.schedule.tx_slot);
  }
}

void prune_membership(Network& net, const NodePredicate& eligible) {
  auto keep = [&](NodeId n) { return is_alive(net.nodes[n]) && accepts(eligible, n); };
  for (auto& c : net.clusters) {
    std::erase_if(c.members, [&](NodeId m) {
      if (keep(m)) return false;
      // Role holders leave through reconfigure().
      const Role r = net.nodes[m].role;
      const bool duty = r == Role::SC || (r == Role::FSH) || (r == Role::SM && is_active_monitor(c, m));
      return !duty;
    });
    for (auto& s : c.sectors) std::erase_if(s.leaves, [&](NodeId l) { return !keep(l); });
  }
  std::erase_if(net.orphans, [&](NodeId n) { return !keep(n); });
  net.reindex();
}

namespace {

void remove_member(Cluster& c, NodeId n) { std::erase(c.members, n); }

ReconfigEvent replace_cc(Network& net, std::size_t k, NodeId failed, SeededRng& rng,
                         const NodePredicate& eligible) {
  ReconfigEvent ev{failed, Role::CC, {}, {}};
  Cluster old = net.clusters[k];
  net.clusters.erase(net.clusters.begin() + static_cast<std::ptrdiff_t>(k));

  auto usable = [&](NodeId n) { return is_alive(net.nodes[n]) && accepts(eligible, n); };
  std::vector<NodeId> targets;
  for (NodeId m : old.members) {
    if (usable(m)) targets.push_back(m);
  }
  set_role(net.nodes[failed], idle_role(net.nodes[failed]));
  if (usable(failed)) targets.push_back(failed);
  std::sort(targets.begin(), targets.end());

  // Only the vacated cluster's own members may stand.
  const NodePredicate local = [&](NodeId n) {
    return accepts(eligible, n) && std::binary_search(targets.begin(), targets.end(), n);
  };
  auto election = elect_coordinators(net.nodes, net.graph, net.election, targets, local);
  std::vector<NodeId> joiners;
  std::vector<NodeId> leftovers;
  for (NodeId t : targets) {
    bool reach = false;
    for (NodeId cc : election.coordinators) reach = reach || t == cc || net.graph.has_edge(t, cc);
    (reach ? joiners : leftovers).push_back(t);
  }

  std::vector<std::size_t> touched;
  if (!election.coordinators.empty()) {
    auto fresh = form_clusters(net.nodes, election.coordinators, joiners, net.graph, rng);
    for (auto& c : fresh) {
      c.id = net.next_cluster_id++;
      ev.replacements.push_back(c.coordinator);
      net.clusters.push_back(std::move(c));
      touched.push_back(net.clusters.size() - 1);
    }
  }
  // Remaining nodes fall back to any other coordinator in range.
  for (NodeId t : leftovers) {
    std::size_t best = net.clusters.size();
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < net.clusters.size(); ++j) {
      const NodeId cc = net.clusters[j].coordinator;
      if (!net.graph.has_edge(t, cc)) continue;
      const double d2 = distance_squared(net.nodes[t].pos, net.nodes[cc].pos);
      if (d2 < best_d2) {
        best_d2 = d2;
        best = j;
      }
    }
    if (best == net.clusters.size()) {
      ev.orphaned.push_back(t);
      set_role(net.nodes[t], idle_role(net.nodes[t]));
      net.orphans.push_back(t);
    } else {
      net.clusters[best].members.push_back(t);
      touched.push_back(best);
    }
  }
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  for (std::size_t j : touched) {
    std::sort(net.clusters[j].members.begin(), net.clusters[j].members.end());
    build_cluster_internals(net, net.clusters[j], eligible);
  }
  return ev;
}

ReconfigEvent replace_sc(Network& net, Cluster& c, std::size_t s_idx, NodeId failed,
                         const NodePredicate& eligible) {
  ReconfigEvent ev{failed, Role::SC, {}, {}};
  Sector& s = c.sectors[s_idx];
  const bool keeps = is_alive(net.nodes[failed]) && accepts(eligible, failed);
  set_role(net.nodes[failed], Role::LN);
  if (keeps) {
    s.leaves.push_back(failed);
  } else {
    remove_member(c, failed);
  }

  NodeId best = kNoNode;
  for (NodeId l : s.leaves) {
    const auto& n = net.nodes[l];
    if (!is_alive(n) || n.energy.ids_disabled || !accepts(eligible, l)) continue;
    if (best == kNoNode || n.energy.residual > net.nodes[best].energy.residual ||
        (n.energy.residual == net.nodes[best].energy.residual && l < best)) {
      best = l;
    }
  }
  if (best != kNoNode) {
    std::erase(s.leaves, best);
    s.coordinator = best;
    set_role(net.nodes[best], Role::SC);
    std::sort(s.leaves.begin(), s.leaves.end());
    if (s.monitors.empty()) choose_monitors(net, c, s, eligible);
    ev.replacements.push_back(best);
    return ev;
  }

  // No coordinator left: fold the remaining leaves into the nearest sector.
  std::vector<NodeId> rest = std::move(s.leaves);
  c.sectors.erase(c.sectors.begin() + static_cast<std::ptrdiff_t>(s_idx));
  for (std::size_t i = 0; i < c.sectors.size(); ++i) c.sectors[i].id = static_cast<int>(i);
  for (NodeId l : rest) {
    if (c.sectors.empty()) {
      // Nobody left to coordinate a sector: the follower loses its cluster.
      remove_member(c, l);
      net.orphans.push_back(l);
      ev.orphaned.push_back(l);
      continue;
    }
    auto nearest = std::min_element(c.sectors.begin(), c.sectors.end(), [&](const Sector& a, const Sector& b) {
      return distance_squared(net.nodes[l].pos, net.nodes[a.coordinator].pos) <
             distance_squared(net.nodes[l].pos, net.nodes[b.coordinator].pos);
    });
    nearest->leaves.push_back(l);
    std::sort(nearest->leaves.begin(), nearest->leaves.end());
  }
  return ev;
}

ReconfigEvent replace_sm(Network& net, Cluster& c, NodeId failed, const NodePredicate& eligible) {
  ReconfigEvent ev{failed, Role::SM, {}, {}};
  if (!is_alive(net.nodes[failed]) || !accepts(eligible, failed)) remove_member(c, failed);
  auto still_ok = [&](NodeId l) { return l != failed && accepts(eligible, l); };
  for (auto& s : c.sectors) {
    const auto before = s.monitors.size();
    std::erase(s.monitors, failed);
    if (s.monitors.size() == before || !s.monitors.empty()) continue;
    choose_monitors(net, c, s, still_ok);
    for (NodeId m : s.monitors) {
      if (std::find(ev.replacements.begin(), ev.replacements.end(), m) == ev.replacements.end()) {
        ev.replacements.push_back(m);
      }
    }
  }
  // A monitor promoted out of the FSH slot would be a conflict; choose_monitors excludes it.
  return ev;
}

ReconfigEvent replace_fsh(Network& net, Cluster& c, NodeId failed, const NodePredicate& eligible) {
  ReconfigEvent ev{failed, Role::FSH, {}, {}};
  set_role(net.nodes[failed], Role::SM);
  if (!is_alive(net.nodes[failed]) || !accepts(eligible, failed)) remove_member(c, failed);
  choose_fsh(net, c, [&](NodeId l) { return l != failed && accepts(eligible, l); });
  if (c.fsh) ev.replacements.push_back(*c.fsh);
  return ev;
}

}  // namespace

ReconfigEvent reconfigure(Network& net, NodeId failed, SeededRng& rng, const NodePredicate& eligible) {
  auto ev = try_reconfigure(net, failed, rng, eligible);
  if (!ev.orphaned.empty()) throw CoverageFailure(ev.orphaned);
  return ev;
}

ReconfigEvent try_reconfigure(Network& net, NodeId failed, SeededRng& rng,
                              const NodePredicate& eligible) {
  net.reindex();
  const int k = net.cluster_index[failed];
  if (k < 0) throw TopologyError("reconfigure: node " + std::to_string(failed) + " is in no cluster");
  Cluster& c = net.clusters[static_cast<std::size_t>(k)];
  const Role role = net.nodes[failed].role;

  ReconfigEvent ev;
  if (c.coordinator == failed) {
    ev = replace_cc(net, static_cast<std::size_t>(k), failed, rng, eligible);
  } else if (role == Role::SC && net.sector_index[failed] >= 0 &&
             c.sectors[static_cast<std::size_t>(net.sector_index[failed])].coordinator == failed) {
    ev = replace_sc(net, c, static_cast<std::size_t>(net.sector_index[failed]), failed, eligible);
    apply_cluster_roles(net, c);
  } else if (role == Role::FSH) {
    ev = replace_fsh(net, c, failed, eligible);
    apply_cluster_roles(net, c);
  } else if (role == Role::SM) {
    ev = replace_sm(net, c, failed, eligible);
    apply_cluster_roles(net, c);
  } else {
    throw TopologyError("reconfigure: node " + std::to_string(failed) + " holds no coordinating role");
  }
  net.reindex();
  return ev;
}

}  // namespace imids
