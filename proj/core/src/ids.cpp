#include "imids/ids.hpp"

#include <algorithm>

namespace imids {

std::string_view to_string(SidsReason r) {
  switch (r) {
    case SidsReason::EnergyRate: return "energy";
    case SidsReason::ScheduleViolation: return "schedule";
    case SidsReason::InvalidToken: return "token";
    case SidsReason::PacketFlood: return "flood";
  }
  return "?";
}

std::string ReasonSet::str() const {
  std::string out;
  for (auto r : {SidsReason::EnergyRate, SidsReason::ScheduleViolation, SidsReason::InvalidToken,
                 SidsReason::PacketFlood}) {
    if (!has(r)) continue;
    if (!out.empty()) out += '|';
    out += to_string(r);
  }
  return out;
}

std::string_view to_string(ExidsDecision d) {
  switch (d) {
    case ExidsDecision::Malicious: return "malicious";
    case ExidsDecision::Rehabilitated: return "rehabilitated";
    case ExidsDecision::Pending: return "pending";
  }
  return "?";
}

DisabledIds::DisabledIds(NodeId node)
    : std::runtime_error("IDS disabled at node " + std::to_string(node)), node_(node) {}

SidsVerdict evaluate_sids_rules(const Observation& obs, const NormalProfile& profile,
                                const IdsParams& params) {
  SidsVerdict v{obs.node, SidsStatus::Normal, {}};
  if (obs.energy_spent > params.rate_threshold * profile.expected_energy) {
    v.reasons.add(SidsReason::EnergyRate);
  }
  for (int s : obs.tx_slots) {
    if (std::find(profile.allowed_slots.begin(), profile.allowed_slots.end(), s) ==
        profile.allowed_slots.end()) {
      v.reasons.add(SidsReason::ScheduleViolation);
      break;
    }
  }
  if (params.token_rule && profile.require_valid_token && obs.invalid_token) {
    v.reasons.add(SidsReason::InvalidToken);
  }
  if (static_cast<double>(obs.packets_sent) > params.count_threshold * profile.expected_packets) {
    v.reasons.add(SidsReason::PacketFlood);
  }
  if (!v.reasons.empty()) v.status = SidsStatus::Suspected;
  return v;
}

bool IdsLedgers::record_strike(NodeId node, int round, ReasonSet reasons) {
  auto [it, inserted] = suspected.try_emplace(node);
  auto& e = it->second;
  if (inserted) {
    e.node = node;
    e.first_round = round;
  } else if (e.strike_count > 0 && e.last_strike_round == round) {
    if (!e.reasons.empty()) {
      ReasonSet merged = e.reasons.back();
      for (auto r : {SidsReason::EnergyRate, SidsReason::ScheduleViolation, SidsReason::InvalidToken,
                     SidsReason::PacketFlood}) {
        if (reasons.has(r)) merged.add(r);
      }
      e.reasons.back() = merged;
    }
    return false;
  }
  e.last_strike_round = round;
  ++e.strike_count;
  strike_log.emplace_back(round, node);
  e.reasons.push_back(reasons);
  return true;
}

std::vector<SidsVerdict> sids_check(const EnergyParams& energy, SensorNode& detector,
                                    std::span<SensorNode> nodes,
                                    std::span<const Observation> observations,
                                    std::span<const NormalProfile> profiles, const IdsParams& params,
                                    IdsLedgers& ledgers, int round) {
  if (detector.energy.ids_disabled) throw DisabledIds(detector.id);
  std::vector<SidsVerdict> verdicts;
  verdicts.reserve(observations.size());
  if (profiles.size() != observations.size()) {
    throw std::invalid_argument("sids_check: one profile per observation");
  }
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const auto& obs = observations[i];
    if (!is_alive(detector) || detector.energy.ids_disabled) break;
    charge_detection(energy, detector);
    auto v = evaluate_sids_rules(obs, profiles[i], params);
    auto& target = nodes[obs.node];
    if (v.status == SidsStatus::Suspected) {
      target.trust = trust_penalize(target.trust, params.penalty_step);
      ledgers.record_strike(obs.node, round, v.reasons);
    } else {
      target.trust = trust_reward(target.trust, params.reward_step);
    }
    verdicts.push_back(v);
  }
  return verdicts;
}

ExidsDecision exids_decide(const EnergyParams& energy, SensorNode& monitor, SensorNode& suspect,
                           const IdsParams& params, IdsLedgers& ledgers, int round) {
  if (monitor.energy.ids_disabled) throw DisabledIds(monitor.id);
  auto it = ledgers.suspected.find(suspect.id);
  if (it == ledgers.suspected.end()) return ExidsDecision::Pending;
  charge_detection(energy, monitor);
  const auto& e = it->second;
  if (e.strike_count >= params.k_strikes || suspect.trust.nibble < params.trust_floor) {
    return ExidsDecision::Malicious;
  }
  if (round - e.last_strike_round >= params.window) {
    suspect.trust = trust_reward(suspect.trust, params.reward_step);
    ledgers.suspected.erase(it);
    return ExidsDecision::Rehabilitated;
  }
  return ExidsDecision::Pending;
}

void quarantine(IdsLedgers& ledgers, NodeId node, int round) {
  ledgers.quarantine.try_emplace(node, round);
  ledgers.suspected.erase(node);
}

CcVerdict cc_validate(const EnergyParams& energy, SensorNode& cc, const Packet& pkt,
                      const NormalProfile& origin_profile, int origin_packets_this_round,
                      const IdsParams& params, IdsLedgers& ledgers, int round) {
  if (cc.energy.ids_disabled) throw DisabledIds(cc.id);
  charge_detection(energy, cc);
  if (ledgers.is_quarantined(pkt.src)) return CcVerdict::Drop;

  ReasonSet reasons;
  if (params.token_rule && origin_profile.require_valid_token && !pkt.token.valid) {
    reasons.add(SidsReason::InvalidToken);
  }
  if (std::find(origin_profile.allowed_slots.begin(), origin_profile.allowed_slots.end(), pkt.slot) ==
      origin_profile.allowed_slots.end()) {
    reasons.add(SidsReason::ScheduleViolation);
  }
  if (static_cast<double>(origin_packets_this_round) >
      params.count_threshold * origin_profile.expected_packets) {
    reasons.add(SidsReason::PacketFlood);
  }
  if (!reasons.empty()) {
    ++ledgers.false_negative_catches;
    ledgers.record_strike(pkt.src, round, reasons);
    return CcVerdict::Drop;
  }
  ledgers.valid_list.push_back({round, pkt.src, cc.id});
  return CcVerdict::Accept;
}

Confusion confusion_from_counts(int tp, int fp, int tn, int fn) {
  Confusion c{tp, fp, tn, fn, 1.0, 1.0};
  const int total = tp + fp + tn + fn;
  if (total > 0) c.accuracy = static_cast<double>(tp + tn) / total;
  if (tp + fn > 0) c.detection_rate = static_cast<double>(tp) / (tp + fn);
  return c;
}

Confusion compute_confusion(std::span<const SensorNode> nodes, const IdsLedgers& ledgers,
                            const std::vector<bool>& ever_alive, NodeId sink) {
  int tp = 0, fp = 0, tn = 0, fn = 0;
  for (const auto& n : nodes) {
    if (n.id == sink || !ever_alive[n.id]) continue;
    const bool q = ledgers.is_quarantined(n.id);
    if (n.malicious) {
      (q ? tp : fn)++;
    } else {
      (q ? fp : tn)++;
    }
  }
  return confusion_from_counts(tp, fp, tn, fn);
}

}  // namespace imids
