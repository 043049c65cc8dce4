#include "imids/types.hpp"

#include <algorithm>

namespace imids {

std::string_view to_string(NodeClass c) {
  switch (c) {
    case NodeClass::Leader: return "leader";
    case NodeClass::Follower: return "follower";
    case NodeClass::Sink: return "sink";
  }
  return "?";
}

std::string_view to_string(Role r) {
  switch (r) {
    case Role::LN: return "LN";
    case Role::SC: return "SC";
    case Role::SM: return "SM";
    case Role::FSH: return "FSH";
    case Role::CC: return "CC";
    case Role::SN: return "SN";
  }
  return "?";
}

std::string_view to_string(NodeState s) {
  switch (s) {
    case NodeState::Sleep: return "sleep";
    case NodeState::Listen: return "listen";
    case NodeState::Transmit: return "transmit";
    case NodeState::Receive: return "receive";
    case NodeState::Dead: return "dead";
  }
  return "?";
}

std::string_view to_string(PacketKind k) {
  switch (k) {
    case PacketKind::SensorData: return "data";
    case PacketKind::Join: return "join";
    case PacketKind::Advert: return "advert";
    case PacketKind::Query: return "query";
    case PacketKind::FakeControl: return "fake";
  }
  return "?";
}

double detection_fraction(Role role) {
  switch (role) {
    case Role::LN:
    case Role::FSH: return 0.0;
    case Role::SC:
    case Role::CC:
    case Role::SN: return 0.5;
    case Role::SM: return 0.8;
  }
  return 0.0;
}

bool role_fits_class(Role role, NodeClass cls) {
  switch (role) {
    case Role::SN: return cls == NodeClass::Sink;
    case Role::CC:
    case Role::SM:
    case Role::FSH: return cls == NodeClass::Leader;
    case Role::SC:
    case Role::LN: return cls == NodeClass::Follower;
  }
  return false;
}

TrustState trust_penalize(TrustState t, int step) {
  t.nibble = std::max(0, t.nibble - step);
  return t;
}

TrustState trust_reward(TrustState t, int step) {
  t.nibble = std::min(TrustState::kMax, t.nibble + step);
  return t;
}

}  // namespace imids
