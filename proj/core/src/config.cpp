#include "imids/config.hpp"

#include <string>

namespace imids {

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::Imids: return "imids";
    case Mode::Itids: return "itids";
    case Mode::ImidsNoSectors: return "imids-no-sectors";
  }
  return "?";
}

Mode parse_mode(std::string_view s) {
  if (s == "imids") return Mode::Imids;
  if (s == "itids") return Mode::Itids;
  if (s == "imids-no-sectors") return Mode::ImidsNoSectors;
  throw ConfigError("unknown mode '" + std::string(s) + "'");
}

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

std::uint64_t ScenarioConfig::require_seed() const {
  if (!seed) throw ConfigError("seed is mandatory");
  return *seed;
}

void ScenarioConfig::validate() const {
  require(seed.has_value(), "seed is mandatory");
  require(rounds >= 0, "rounds must be >= 0");
  require(slots_per_round >= 2, "slots_per_round must be >= 2");
  require(seconds_per_round > 0, "seconds_per_round must be positive");

  const auto& d = deployment;
  require(d.node_count >= 3, "node_count must be >= 3");
  require(d.area_width > 0 && d.area_height > 0, "deployment area must be non-empty");
  require(d.sink.x >= 0 && d.sink.x <= d.area_width && d.sink.y >= 0 && d.sink.y <= d.area_height,
          "sink must lie inside the area");
  require(d.transmission_range > 0, "transmission_range must be positive");
  require(d.sector_radius > 0 && d.sector_radius <= d.transmission_range,
          "sector_radius must lie in (0, transmission_range]");
  require(d.leader_fraction > 0 && d.leader_fraction < 1, "leader_fraction must lie in (0,1)");
  require(d.leader_energy > 0 && d.follower_energy > 0, "initial energies must be positive");
  require(d.energy_jitter >= 0 && d.energy_jitter < 1, "energy_jitter must lie in [0,1)");
  require(d.leader_energy_threshold > 0, "leader_energy_threshold must be positive");
  require(d.positions.empty() || static_cast<int>(d.positions.size()) == d.node_count - 1,
          "positions must list every non-sink node");
  require(d.energies.empty() || static_cast<int>(d.energies.size()) == d.node_count - 1,
          "energies must list every non-sink node");
  for (const auto& p : d.positions) {
    require(p.x >= 0 && p.x <= d.area_width && p.y >= 0 && p.y <= d.area_height,
            "explicit position outside the area");
  }
  for (double e : d.energies) require(e > 0, "explicit energies must be positive");

  energy.validate();

  require(attack.attacker_count >= 0, "attacker_count must be >= 0");
  require(attack.fake_msgs_per_round >= 0, "fake_msgs_per_round must be >= 0");
  require(attack.flood_packets_per_slot >= 0, "flood_packets_per_slot must be >= 0");
  require(attack.start_round >= 0, "start_round must be >= 0");
  require(attack.attacker_ids.empty() ? attack.attacker_count <= d.node_count - 1 : true,
          "more attackers than non-sink nodes");
  for (NodeId a : attack.attacker_ids) {
    require(a != 0 && static_cast<int>(a) < d.node_count, "attacker ids must be non-sink nodes");
  }

  require(ids.window >= 1, "window must be >= 1");
  require(ids.k_strikes >= 1, "k_strikes must be >= 1");
  require(ids.trust_floor >= 0 && ids.trust_floor <= TrustState::kMax, "trust_floor must be 0..15");
  require(ids.rate_threshold > 0, "rate_threshold must be positive");
  require(ids.count_threshold > 0, "count_threshold must be positive");
  require(ids.reputation_threshold >= 0 && ids.reputation_threshold <= TrustState::kMax,
          "reputation_threshold must be 0..15");
  require(ids.penalty_step >= 0 && ids.reward_step >= 0, "trust steps must be >= 0");

  require(itids.monitor_fraction > 0 && itids.monitor_fraction <= 1,
          "monitor_fraction must lie in (0,1]");

  require(traffic.data_bytes > 0 && traffic.control_bytes > 0, "packet sizes must be positive");
  require(traffic.sense_every >= 1, "sense_every must be >= 1");

  for (const auto& s : injected_strikes) {
    require(s.node != 0 && static_cast<int>(s.node) < d.node_count,
            "injected strikes must target non-sink nodes");
    require(s.round >= 0, "injected strike round must be >= 0");
  }
}

}  // namespace imids
