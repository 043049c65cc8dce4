#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace imids {

using NodeId = std::uint32_t;

inline constexpr NodeId kNoNode = static_cast<NodeId>(-1);

struct Position {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline double distance_squared(const Position& a, const Position& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

enum class NodeClass { Leader, Follower, Sink };

// LN leaf, SC sector coordinator, SM sector monitor, FSH forwarding sector
// head, CC cluster coordinator, SN sink.
enum class Role { LN, SC, SM, FSH, CC, SN };

enum class NodeState { Sleep, Listen, Transmit, Receive, Dead };

std::string_view to_string(NodeClass c);
std::string_view to_string(Role r);
std::string_view to_string(NodeState s);

/// Fraction of initial energy a role reserves for intrusion detection.
/// Leaves and forwarding heads do no detection work.
double detection_fraction(Role role);

inline constexpr bool is_detector_role(Role role) {
  return role == Role::SC || role == Role::SM || role == Role::CC || role == Role::SN;
}

/// Role/class compatibility in the sectorized hierarchy.
bool role_fits_class(Role role, NodeClass cls);

/// 4-bit saturating trust counter. A fresh node starts fully trusted.
struct TrustState {
  static constexpr int kMax = 15;
  int nibble = kMax;

  double belief() const { return static_cast<double>(nibble) / kMax; }
  friend bool operator==(const TrustState&, const TrustState&) = default;
};

TrustState trust_penalize(TrustState t, int step = 1);
TrustState trust_reward(TrustState t, int step = 1);

struct EnergyAccount {
  double initial = 0.0;
  double residual = 0.0;
  double detection_budget = 0.0;
  // Budget granted when the current detection role was assigned.
  double detection_initial = 0.0;
  bool ids_disabled = false;
};

struct DutySchedule {
  // TDMA transmit slot; -1 when the node does not sense.
  int tx_slot = -1;
  double sleep_probability = 0.5;
  std::vector<int> wake_slots;
};

struct WakeupToken {
  NodeId owner = kNoNode;
  bool valid = true;
};

enum class PacketKind { SensorData, Join, Advert, Query, FakeControl };

std::string_view to_string(PacketKind k);

struct Packet {
  NodeId src = kNoNode;
  NodeId dst = kNoNode;
  PacketKind kind = PacketKind::SensorData;
  WakeupToken token;
  int slot = 0;
  int payload_size = 0;  // bytes
};

struct SensorNode {
  NodeId id = kNoNode;
  Position pos;
  NodeClass cls = NodeClass::Follower;
  Role role = Role::LN;
  NodeState state = NodeState::Sleep;
  EnergyAccount energy;
  TrustState trust;
  DutySchedule schedule;
  // Ground truth. Detection logic must not read this.
  bool malicious = false;
};

inline bool is_alive(const SensorNode& n) { return n.energy.residual > 0.0; }

}  // namespace imids
