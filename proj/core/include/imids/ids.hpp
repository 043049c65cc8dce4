#pragma once

#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "imids/config.hpp"
#include "imids/energy.hpp"
#include "imids/types.hpp"

namespace imids {

enum class SidsReason : unsigned {
  EnergyRate = 1u << 0,
  ScheduleViolation = 1u << 1,
  InvalidToken = 1u << 2,
  PacketFlood = 1u << 3,
};

std::string_view to_string(SidsReason r);

class ReasonSet {
 public:
  constexpr ReasonSet() = default;
  constexpr ReasonSet(std::initializer_list<SidsReason> rs) {
    for (auto r : rs) add(r);
  }
  constexpr void add(SidsReason r) { bits_ |= static_cast<unsigned>(r); }
  constexpr bool has(SidsReason r) const { return (bits_ & static_cast<unsigned>(r)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr unsigned bits() const { return bits_; }
  std::string str() const;  // "energy|token"
  friend constexpr bool operator==(ReasonSet, ReasonSet) = default;

 private:
  unsigned bits_ = 0;
};

/// Expected behaviour of one node. An infinite expected energy disables
/// the energy-rate rule (coordinators have role-dependent load).
struct NormalProfile {
  double expected_energy = std::numeric_limits<double>::infinity();  // J/round
  std::vector<int> allowed_slots;
  double expected_packets = 1.0;  // per round
  bool require_valid_token = true;
};

/// What a detector saw of one node during the current round.
struct Observation {
  NodeId node = kNoNode;
  double energy_spent = 0.0;
  std::vector<int> tx_slots;
  int packets_sent = 0;
  bool invalid_token = false;
};

enum class SidsStatus { Normal, Suspected };

struct SidsVerdict {
  NodeId node = kNoNode;
  SidsStatus status = SidsStatus::Normal;
  ReasonSet reasons;
};

/// The four anomaly rules, evaluated without side effects.
SidsVerdict evaluate_sids_rules(const Observation& obs, const NormalProfile& profile,
                                const IdsParams& params);

struct SuspectedEntry {
  NodeId node = kNoNode;
  int first_round = 0;
  int last_strike_round = 0;
  int strike_count = 0;
  std::vector<ReasonSet> reasons;
};

struct ValidEntry {
  int round = 0;
  NodeId src = kNoNode;
  NodeId cc = kNoNode;
};

struct ForwardEntry {
  int round = 0;
  NodeId src = kNoNode;
  NodeId fsh = kNoNode;
};

/// Suspected, quarantine, valid and forwarding lists plus the sink's
/// delivery log. Reputation lives in each node's trust nibble.
struct IdsLedgers {
  std::map<NodeId, SuspectedEntry> suspected;
  std::map<NodeId, int> quarantine;  // node -> round quarantined
  std::vector<ValidEntry> valid_list;
  std::vector<ForwardEntry> forwarding_table;
  std::vector<ValidEntry> sink_log;  // packets that reached the sink
  int false_negative_catches = 0;
  std::vector<std::pair<int, NodeId>> strike_log;  // (round, node) per new strike

  /// At most one strike per node per round. Returns true if a strike was
  /// added.
  bool record_strike(NodeId node, int round, ReasonSet reasons);
  bool is_quarantined(NodeId n) const { return quarantine.count(n) != 0; }
};

class DisabledIds : public std::runtime_error {
 public:
  explicit DisabledIds(NodeId node);
  NodeId node() const { return node_; }

 private:
  NodeId node_;
};

/// SIDS pass of `detector` over the given observations (profiles[i]
/// belongs to observations[i]). Charges one
/// detection check per observed node, applies trust penalties/rewards,
/// and records strikes for suspects. Throws DisabledIds when the
/// detector's IDS is off.
std::vector<SidsVerdict> sids_check(const EnergyParams& energy, SensorNode& detector,
                                    std::span<SensorNode> nodes,
                                    std::span<const Observation> observations,
                                    std::span<const NormalProfile> profiles, const IdsParams& params,
                                    IdsLedgers& ledgers, int round);

enum class ExidsDecision { Malicious, Rehabilitated, Pending };

std::string_view to_string(ExidsDecision d);

/// EXIDS verdict on a suspected node. Malicious once strikes reach
/// k_strikes or trust falls below trust_floor; Rehabilitated after W
/// rounds without a new strike (trust rewarded, entry cleared).
ExidsDecision exids_decide(const EnergyParams& energy, SensorNode& monitor, SensorNode& suspect,
                           const IdsParams& params, IdsLedgers& ledgers, int round);

/// Permanent isolation. Idempotent.
void quarantine(IdsLedgers& ledgers, NodeId node, int round);

enum class CcVerdict { Accept, Drop };

/// Cluster-scope re-check of one forwarded packet. Accepted packets enter
/// the valid list; a dropped packet from a non-quarantined source is a
/// caught false negative and adds a strike against its origin.
CcVerdict cc_validate(const EnergyParams& energy, SensorNode& cc, const Packet& pkt,
                      const NormalProfile& origin_profile, int origin_packets_this_round,
                      const IdsParams& params, IdsLedgers& ledgers, int round);

struct Confusion {
  int tp = 0;
  int fp = 0;
  int tn = 0;
  int fn = 0;
  double accuracy = 1.0;
  double detection_rate = 1.0;
};

Confusion confusion_from_counts(int tp, int fp, int tn, int fn);

/// Classification at the horizon over every non-sink node that was ever
/// alive: positive = quarantined, truth = malicious.
Confusion compute_confusion(std::span<const SensorNode> nodes, const IdsLedgers& ledgers,
                            const std::vector<bool>& ever_alive, NodeId sink);

}  // namespace imids
