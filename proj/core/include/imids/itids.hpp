#pragma once

#include <vector>

#include "imids/engine.hpp"
#include "imids/topology.hpp"

namespace imids {

/// Monitor set of the isolation-table baseline: round(fraction * clustered
/// nodes) monitors, split over clusters in proportion to their sensing
/// members and filled with each cluster's lowest-energy Followers. Static
/// for the run.
std::vector<bool> choose_itids_monitors(const Network& net, double monitor_fraction);

/// One round of the baseline: flat clusters, always-listening monitors
/// that check their in-cluster neighbours and isolate on the first
/// offence, no rehabilitation and no reconfiguration.
RoundReport itids_step(SimulationState& state);

}  // namespace imids
