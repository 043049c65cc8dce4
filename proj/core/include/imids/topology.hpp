#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "imids/config.hpp"
#include "imids/rng.hpp"
#include "imids/types.hpp"

namespace imids {

class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CoverageFailure : public TopologyError {
 public:
  explicit CoverageFailure(std::vector<NodeId> uncovered);
  const std::vector<NodeId>& uncovered() const { return uncovered_; }

 private:
  std::vector<NodeId> uncovered_;
};

class UnreachableNode : public TopologyError {
 public:
  explicit UnreachableNode(NodeId node);
  NodeId node() const { return node_; }

 private:
  NodeId node_;
};

class MonitorUnavailable : public TopologyError {
 public:
  using TopologyError::TopologyError;
};

/// Undirected unit-disk graph: edge (i,j) iff both alive and D(i,j) <= range.
struct TransmissionGraph {
  double range = 0.0;
  std::vector<std::vector<NodeId>> adjacency;  // sorted ascending

  std::size_t size() const { return adjacency.size(); }
  bool has_edge(NodeId a, NodeId b) const;
  std::size_t degree(NodeId n) const { return adjacency[n].size(); }
};

TransmissionGraph build_graph(std::span<const SensorNode> nodes, double range);

/// BFS hop counts from root; -1 for unreachable. Only nodes accepted by
/// `traversable` are expanded (the root always is).
std::vector<int> hop_distances(const TransmissionGraph& g, NodeId root,
                               const std::function<bool(NodeId)>& traversable = {});

/// Minimum-hop path src..dst (inclusive), BFS in ascending id order so the
/// result is deterministic. Empty when unreachable.
std::vector<NodeId> shortest_path(const TransmissionGraph& g, NodeId src, NodeId dst,
                                  const std::function<bool(NodeId)>& traversable = {});

/// Places the sink as node 0 and the remaining nodes uniformly (or from the
/// explicit layout). Initial energies come from the leader/follower split.
std::vector<SensorNode> deploy(const DeploymentConfig& config, SeededRng& rng);

/// Leader iff initial energy >= threshold. Throws TopologyError when no
/// node qualifies as a Leader.
std::vector<NodeClass> classify_nodes(std::span<const SensorNode> nodes, NodeId sink,
                                      double leader_energy_threshold);

/// (degree / initial energy) * residual energy.
double capacity(const SensorNode& n, const TransmissionGraph& g);

using NodePredicate = std::function<bool(NodeId)>;

struct ElectionParams {
  NodeId sink = 0;
  int reputation_threshold = 8;
};

struct ElectionResult {
  std::vector<NodeId> coordinators;  // in pick order
  std::vector<NodeId> uncovered;
};

/// Greedy coordinator election. Candidates are eligible, alive, trusted
/// Leaders ordered by capacity (desc), distance to sink (asc), id (asc);
/// a candidate is picked when it covers at least one uncovered target.
ElectionResult elect_coordinators(std::span<const SensorNode> nodes, const TransmissionGraph& g,
                                  const ElectionParams& params, std::span<const NodeId> targets,
                                  const NodePredicate& eligible = {});

/// Covers every alive non-sink node accepted by `eligible`; throws
/// CoverageFailure when some cannot be covered.
std::vector<NodeId> select_cluster_coordinators(std::span<const SensorNode> nodes,
                                                const TransmissionGraph& g,
                                                const ElectionParams& params,
                                                const NodePredicate& eligible = {});

struct Sector {
  int id = 0;
  NodeId coordinator = kNoNode;
  std::vector<NodeId> monitors;  // may be empty when no Leader is available
  std::optional<NodeId> fsh;
  std::vector<NodeId> leaves;
};

struct Cluster {
  int id = 0;
  NodeId coordinator = kNoNode;
  std::vector<NodeId> members;  // excludes the coordinator
  std::vector<Sector> sectors;
  std::optional<NodeId> fsh;
};

/// Each node in `joiners` joins the in-range coordinator with the strongest
/// modeled RSSI (1/D^2); exact ties are broken by `rng`. Throws
/// UnreachableNode when a joiner has no coordinator in range.
std::vector<Cluster> form_clusters(std::span<const SensorNode> nodes, std::span<const NodeId> ccs,
                                   std::span<const NodeId> joiners, const TransmissionGraph& g,
                                   SeededRng& rng);

/// Greedy disjoint partition of the cluster's Followers: the highest-energy
/// unassigned eligible Follower becomes SC and claims every unassigned
/// Follower within `radius`. Ineligible Followers never coordinate; if some
/// are left without any sector they are attached to the nearest sector.
std::vector<Sector> form_sectors(std::span<const SensorNode> nodes, const Cluster& cluster,
                                 double radius, const NodePredicate& can_coordinate = {});

/// Non-CC Leaders of the cluster adjacent to the sector (all of them if
/// none is adjacent) with maximal detection budget; ties all qualify.
std::vector<NodeId> select_sector_monitor(std::span<const SensorNode> nodes, const Cluster& cluster,
                                          const Sector& sector, const TransmissionGraph& g,
                                          const NodePredicate& eligible = {});

/// Non-CC Leader with minimum BFS hop count to the CC, then Euclidean
/// distance, then id.
NodeId select_fsh(std::span<const SensorNode> nodes, const Cluster& cluster,
                  const TransmissionGraph& g, const NodePredicate& eligible = {});

/// The deployed network together with its current hierarchy.
struct Network {
  std::vector<SensorNode> nodes;
  NodeId sink = 0;
  double sector_radius = 0.0;
  bool sectorized = true;
  ElectionParams election;
  TransmissionGraph graph;
  std::vector<Cluster> clusters;
  std::vector<NodeId> orphans;  // alive nodes in no cluster
  int next_cluster_id = 0;

  // Derived indices, refreshed by reindex().
  std::vector<int> cluster_index;  // -1 when none
  std::vector<int> sector_index;   // -1 when none

  void reindex();
  void rebuild_graph() { graph = build_graph(nodes, graph.range); }
  const Cluster* cluster_of(NodeId n) const;
  Cluster* cluster_of(NodeId n);
  const Sector* sector_of(NodeId n) const;
};

/// Hierarchy construction for the nodes accepted by `eligible`: CC
/// election, cluster formation and, when sectorized, sectors, monitors and
/// the forwarding head. Assigns roles and detection budgets.
void build_hierarchy(Network& net, SeededRng& rng, const NodePredicate& eligible = {});

/// Sectors, monitors and FSH for one cluster (sectorized networks), or the
/// flat membership roles otherwise.
void build_cluster_internals(Network& net, Cluster& cluster, const NodePredicate& eligible);

/// TDMA transmit slot per sensing Follower. Slot `slots - 1` is reserved for
/// control and aggregate traffic.
void assign_schedules(Network& net, int slots);

struct ReconfigEvent {
  NodeId failed = kNoNode;
  Role role = Role::LN;
  std::vector<NodeId> replacements;
  std::vector<NodeId> orphaned;
};

/// Demotes `failed` and re-elects its role over the remaining eligible
/// nodes. Monitor/FSH vacancies without a candidate are left empty (the CC
/// takes over). Throws CoverageFailure when a vacated cluster leaves nodes
/// uncoverable; the network is consistent either way (the event's orphans
/// are recorded in net.orphans).
ReconfigEvent reconfigure(Network& net, NodeId failed, SeededRng& rng,
                          const NodePredicate& eligible = {});

/// Same as reconfigure() but reports uncoverable nodes in the event
/// instead of throwing.
ReconfigEvent try_reconfigure(Network& net, NodeId failed, SeededRng& rng,
                              const NodePredicate& eligible = {});

/// Drops dead or ineligible non-coordinator nodes from membership lists.
void prune_membership(Network& net, const NodePredicate& eligible);

}  // namespace imids
