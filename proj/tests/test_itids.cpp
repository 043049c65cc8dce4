#include <doctest.h>

#include <algorithm>

#include "imids/attack.hpp"
#include "imids/engine.hpp"
#include "imids/itids.hpp"
#include "support.hpp"

using namespace imids;

namespace {

ScenarioConfig baseline(std::uint64_t seed, int rounds = 60) {
  ScenarioConfig c;
  c.seed = seed;
  c.mode = Mode::Itids;
  c.rounds = rounds;
  return c;
}

}  // namespace

TEST_CASE("monitors are the lowest-energy followers of each cluster") {
  auto st = initialize(baseline(1));
  const auto& net = st.net;
  int total = 0;
  std::size_t population = 0;
  for (const auto& c : net.clusters) {
    population += 1 + c.members.size();
    double worst_monitor = 0, best_other = 1e9;
    for (NodeId m : c.members) {
      if (st.monitor[m]) {
        ++total;
        CHECK(net.nodes[m].cls == NodeClass::Follower);
        worst_monitor = std::max(worst_monitor, net.nodes[m].energy.initial);
      } else if (net.nodes[m].cls == NodeClass::Follower) {
        best_other = std::min(best_other, net.nodes[m].energy.initial);
      }
    }
    CHECK(worst_monitor <= best_other);
    CHECK_FALSE(st.monitor[c.coordinator]);
  }
  CHECK(total == static_cast<int>(std::lround(0.5 * static_cast<double>(population))));
  for (const auto& c : net.clusters) CHECK(c.sectors.empty());
}

TEST_CASE("two hundred nodes get one hundred monitors") {
  auto cfg = baseline(42, 0);
  cfg.deployment.node_count = 201;
  cfg.deployment.area_width = 100;
  cfg.deployment.area_height = 100;
  cfg.deployment.sink = {50, 50};
  auto st = initialize(cfg);
  CHECK(std::count(st.monitor.begin(), st.monitor.end(), true) == 100);
}

TEST_CASE("one strike isolates a benign node for good") {
  auto cfg = baseline(2, 40);
  cfg.attack.attacker_count = 0;
  cfg.ids.rate_threshold = 3.0;
  cfg.injected_strikes = {{9, 5}};
  auto trace = run_simulation(cfg);
  REQUIRE(trace.ledgers.is_quarantined(9));
  CHECK(trace.ledgers.quarantine.at(9) == 5);
  CHECK(trace.confusion.fp == 1);

  cfg.mode = Mode::Imids;
  auto imids = run_simulation(cfg);
  CHECK_FALSE(imids.ledgers.is_quarantined(9));
  CHECK(trace.confusion.fp >= imids.confusion.fp);
}

TEST_CASE("roles never change") {
  auto cfg = baseline(3, 250);
  auto st = initialize(cfg);
  std::vector<Role> roles;
  for (const auto& n : st.net.nodes) roles.push_back(n.role);
  const auto clusters = st.net.clusters.size();
  for (int r = 0; r < cfg.rounds && !st.extinct(); ++r) {
    auto rep = run_round(st);
    REQUIRE(rep.reconfigurations.empty());
  }
  CHECK(st.net.clusters.size() == clusters);
  for (std::size_t i = 0; i < roles.size(); ++i) CHECK(st.net.nodes[i].role == roles[i]);
}

TEST_CASE("attackers are isolated on their first offence") {
  auto trace = run_simulation(baseline(4, 20));
  for (NodeId a : trace.attackers) {
    REQUIRE(trace.ledgers.is_quarantined(a));
    const auto& log = trace.ledgers.strike_log;
    auto first = std::find_if(log.begin(), log.end(), [&](const auto& e) { return e.second == a; });
    REQUIRE(first != log.end());
    CHECK(trace.ledgers.quarantine.at(a) == first->first);
  }
}

TEST_CASE("both defences face the same attack traffic") {
  auto cfg = baseline(5, 0);
  auto a = initialize(cfg);
  cfg.mode = Mode::Imids;
  auto b = initialize(cfg);
  REQUIRE(a.attackers == b.attackers);
  for (NodeId x : a.attackers) {
    auto ra = attack_stream(5, x, 0);
    auto rb = attack_stream(5, x, 0);
    const auto pa = emit_attack_traffic(a.net.nodes[x], a.net.nodes, a.net.graph, kNoNode, cfg.attack,
                                        cfg.traffic, cfg.slots_per_round, 0, ra);
    const auto pb = emit_attack_traffic(b.net.nodes[x], b.net.nodes, b.net.graph, kNoNode, cfg.attack,
                                        cfg.traffic, cfg.slots_per_round, 0, rb);
    REQUIRE(pa.size() == pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
      CHECK(pa[i].dst == pb[i].dst);
      CHECK(pa[i].slot == pb[i].slot);
    }
  }
}
