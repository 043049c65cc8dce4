#include "imids/energy.hpp"

#include <algorithm>

namespace imids {

void EnergyParams::validate() const {
  if (e_elec < 0 || e_amp < 0 || p_listen < 0 || p_sleep < 0 || e_detect < 0) {
    throw EnergyError("energy parameters must be non-negative");
  }
  if (!(p_sleep < p_listen)) throw EnergyError("p_sleep must be below p_listen");
  if (dp_min_threshold < 0 || dp_min_threshold > 1) {
    throw EnergyError("dp_min_threshold must lie in [0,1]");
  }
}

double tx_cost(const EnergyParams& p, long bits, double distance) {
  if (bits <= 0) throw EnergyError("tx_cost: bits must be positive");
  if (distance < 0) throw EnergyError("tx_cost: negative distance");
  const double b = static_cast<double>(bits);
  return p.e_elec * b + p.e_amp * b * distance * distance;
}

double rx_cost(const EnergyParams& p, long bits) {
  if (bits <= 0) throw EnergyError("rx_cost: bits must be positive");
  return p.e_elec * static_cast<double>(bits);
}

double slot_cost(const EnergyParams& p, NodeState state) {
  switch (state) {
    case NodeState::Sleep: return p.p_sleep;
    case NodeState::Listen: return p.p_listen;
    default: throw EnergyError("slot_cost: only Sleep and Listen are charged per slot");
  }
}

double consume(SensorNode& node, double joules) {
  if (joules < 0) throw EnergyError("consume: negative energy");
  if (node.state == NodeState::Dead || node.energy.residual <= 0.0) return 0.0;
  const double before = node.energy.residual;
  node.energy.residual = std::max(0.0, before - joules);
  node.energy.detection_budget = std::min(node.energy.detection_budget, node.energy.residual);
  if (node.energy.residual <= 0.0) node.state = NodeState::Dead;
  return before - node.energy.residual;
}

double charge_slots(const EnergyParams& p, SensorNode& node, const SlotPlan& plan) {
  double total = 0.0;
  for (NodeState st : plan.states) {
    if (st == NodeState::Sleep || st == NodeState::Listen) total += slot_cost(p, st);
  }
  return consume(node, total);
}

void grant_detection_budget(SensorNode& node) {
  const double budget =
      std::min(detection_fraction(node.role) * node.energy.initial, node.energy.residual);
  node.energy.detection_budget = budget;
  node.energy.detection_initial = budget;
  node.energy.ids_disabled = false;
}

DetectionCharge charge_detection(const EnergyParams& p, SensorNode& node) {
  if (detection_fraction(node.role) == 0.0) {
    throw EnergyError("charge_detection: role has no detection power");
  }
  DetectionCharge out;
  const bool was_disabled = node.energy.ids_disabled;
  node.energy.detection_budget = std::max(0.0, node.energy.detection_budget - p.e_detect);
  out.spent = consume(node, p.e_detect);
  if (node.energy.detection_budget <= p.dp_min_threshold * node.energy.detection_initial) {
    node.energy.ids_disabled = true;
  }
  out.disabled_now = !was_disabled && node.energy.ids_disabled;
  return out;
}

}  // namespace imids
