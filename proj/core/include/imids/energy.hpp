#pragma once

#include <stdexcept>
#include <vector>

#include "imids/types.hpp"

namespace imids {

class EnergyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// First-order radio model plus per-slot idle costs.
struct EnergyParams {
  double e_elec = 50e-9;        // J/bit, tx and rx electronics
  double e_amp = 100e-12;       // J/bit/m^2
  double p_listen = 10e-6;      // J/slot
  double p_sleep = 0.1e-6;      // J/slot
  double e_detect = 1e-6;       // J per detection check
  double dp_min_threshold = 0.05;  // fraction of the role's detection budget

  /// Throws EnergyError when the parameters make the model meaningless.
  void validate() const;
};

double tx_cost(const EnergyParams& p, long bits, double distance);
double rx_cost(const EnergyParams& p, long bits);

/// Idle cost of one slot. Transmit/receive are charged per packet.
double slot_cost(const EnergyParams& p, NodeState state);

/// residual := max(0, residual - joules); a node reaching zero is Dead.
/// Returns the energy actually removed.
double consume(SensorNode& node, double joules);

/// Per-slot radio states of one node for the current round.
struct SlotPlan {
  std::vector<NodeState> states;
};

/// Charges slot_cost for every Sleep/Listen slot in the plan.
double charge_slots(const EnergyParams& p, SensorNode& node, const SlotPlan& plan);

/// Grants the detection budget of the node's current role.
void grant_detection_budget(SensorNode& node);

struct DetectionCharge {
  double spent = 0.0;
  bool disabled_now = false;  // budget crossed the threshold on this charge
};

/// One detection check. Throws EnergyError for roles with zero detection
/// power. Sets ids_disabled once the budget is at or below
/// dp_min_threshold of the granted budget.
DetectionCharge charge_detection(const EnergyParams& p, SensorNode& node);

}  // namespace imids
