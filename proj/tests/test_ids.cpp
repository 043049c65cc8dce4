#include <doctest.h>

#include "imids/ids.hpp"
#include "support.hpp"

using namespace imids;
using test::make_node;

namespace {

NormalProfile leaf_profile(int slot) {
  NormalProfile p;
  p.expected_energy = 1e-4;
  p.allowed_slots = {slot};
  p.expected_packets = 1;
  return p;
}

Observation clean(NodeId n, int slot) {
  Observation o;
  o.node = n;
  o.energy_spent = 1e-4;
  o.tx_slots = {slot};
  o.packets_sent = 1;
  return o;
}

struct Net {
  std::vector<SensorNode> nodes;
  Net() {
    nodes.push_back(make_node(0, 0, 0, 1e6, NodeClass::Sink));
    auto sc = make_node(1, 0, 0, 1.0);
    sc.role = Role::SC;
    grant_detection_budget(sc);
    nodes.push_back(sc);
    auto sm = make_node(2, 0, 0, 2.0, NodeClass::Leader);
    sm.role = Role::SM;
    grant_detection_budget(sm);
    nodes.push_back(sm);
    for (NodeId i = 3; i < 8; ++i) nodes.push_back(make_node(i, 0, 0));
  }
};

}  // namespace

TEST_CASE("rule evaluation") {
  IdsParams ids;
  const auto prof = leaf_profile(4);

  CHECK(evaluate_sids_rules(clean(3, 4), prof, ids).status == SidsStatus::Normal);

  auto bad_token = clean(3, 4);
  bad_token.invalid_token = true;
  auto v = evaluate_sids_rules(bad_token, prof, ids);
  CHECK(v.status == SidsStatus::Suspected);
  CHECK(v.reasons == ReasonSet{SidsReason::InvalidToken});

  auto off_slot = clean(3, 4);
  off_slot.tx_slots = {4, 9};
  CHECK(evaluate_sids_rules(off_slot, prof, ids).reasons == ReasonSet{SidsReason::ScheduleViolation});

  auto hungry = clean(3, 4);
  hungry.energy_spent = 1.5e-4;  // at the threshold: not yet
  CHECK(evaluate_sids_rules(hungry, prof, ids).status == SidsStatus::Normal);
  hungry.energy_spent = 1.51e-4;
  CHECK(evaluate_sids_rules(hungry, prof, ids).reasons == ReasonSet{SidsReason::EnergyRate});

  IdsParams no_token = ids;
  no_token.token_rule = false;
  CHECK(evaluate_sids_rules(bad_token, prof, no_token).status == SidsStatus::Normal);
}

TEST_CASE("a ten-packet flood with count threshold 3 trips flood and token rules") {
  IdsParams ids;
  ids.count_threshold = 3;
  Observation o = clean(5, 2);
  o.packets_sent = 10;
  o.invalid_token = true;
  o.tx_slots = {2};
  auto v = evaluate_sids_rules(o, leaf_profile(2), ids);
  CHECK(v.status == SidsStatus::Suspected);
  CHECK(v.reasons.has(SidsReason::PacketFlood));
  CHECK(v.reasons.has(SidsReason::InvalidToken));
  CHECK(v.reasons.str() == "token|flood");
  o.packets_sent = 3;
  CHECK_FALSE(evaluate_sids_rules(o, leaf_profile(2), ids).reasons.has(SidsReason::PacketFlood));
}

TEST_CASE("sids_check charges, scores trust and records strikes") {
  Net net;
  IdsParams ids;
  EnergyParams e;
  IdsLedgers led;
  std::vector<Observation> obs{clean(3, 0), clean(4, 1)};
  obs[1].invalid_token = true;
  std::vector<NormalProfile> prof{leaf_profile(0), leaf_profile(1)};
  net.nodes[3].trust.nibble = 10;
  const double before = net.nodes[1].energy.residual;
  auto v = sids_check(e, net.nodes[1], net.nodes, obs, prof, ids, led, 7);
  REQUIRE(v.size() == 2);
  CHECK(v[0].status == SidsStatus::Normal);
  CHECK(v[1].status == SidsStatus::Suspected);
  CHECK(net.nodes[1].energy.residual == doctest::Approx(before - 2 * e.e_detect));
  CHECK(net.nodes[3].trust.nibble == 11);
  CHECK(net.nodes[4].trust.nibble == 14);
  REQUIRE(led.suspected.count(4));
  CHECK(led.suspected[4].strike_count == 1);
  CHECK(led.suspected[4].first_round == 7);
  CHECK(led.strike_log == std::vector<std::pair<int, NodeId>>{{7, 4}});

  // Same round again: the strike is not doubled.
  sids_check(e, net.nodes[1], net.nodes, std::span(obs).subspan(1), std::span(prof).subspan(1), ids, led, 7);
  CHECK(led.suspected[4].strike_count == 1);

  std::vector<NormalProfile> short_prof{leaf_profile(0)};
  CHECK_THROWS_AS(sids_check(e, net.nodes[1], net.nodes, obs, short_prof, ids, led, 8), std::invalid_argument);

  net.nodes[1].energy.ids_disabled = true;
  CHECK_THROWS_AS(sids_check(e, net.nodes[1], net.nodes, obs, prof, ids, led, 8), DisabledIds);
}

TEST_CASE("exids verdicts") {
  Net net;
  IdsParams ids;
  EnergyParams e;

  SUBCASE("three strikes is malicious") {
    IdsLedgers led;
    for (int r : {1, 2, 3}) led.record_strike(5, r, {SidsReason::InvalidToken});
    CHECK(exids_decide(e, net.nodes[2], net.nodes[5], ids, led, 3) == ExidsDecision::Malicious);
  }
  SUBCASE("low trust is malicious") {
    IdsLedgers led;
    led.record_strike(5, 1, {SidsReason::EnergyRate});
    net.nodes[5].trust.nibble = 7;
    CHECK(exids_decide(e, net.nodes[2], net.nodes[5], ids, led, 1) == ExidsDecision::Malicious);
  }
  SUBCASE("a stale single strike is rehabilitated after the window") {
    IdsLedgers led;
    led.record_strike(5, 10, {SidsReason::EnergyRate});
    net.nodes[5].trust.nibble = 14;
    for (int r = 10; r < 10 + ids.window; ++r) {
      CHECK(exids_decide(e, net.nodes[2], net.nodes[5], ids, led, r) == ExidsDecision::Pending);
    }
    CHECK(exids_decide(e, net.nodes[2], net.nodes[5], ids, led, 10 + ids.window) ==
          ExidsDecision::Rehabilitated);
    CHECK(net.nodes[5].trust.nibble == 15);
    CHECK(led.suspected.empty());
  }
  SUBCASE("no entry is pending and costs nothing") {
    IdsLedgers led;
    const double before = net.nodes[2].energy.residual;
    CHECK(exids_decide(e, net.nodes[2], net.nodes[6], ids, led, 0) == ExidsDecision::Pending);
    CHECK(net.nodes[2].energy.residual == before);
  }
  SUBCASE("disabled monitor") {
    IdsLedgers led;
    net.nodes[2].energy.ids_disabled = true;
    CHECK_THROWS_AS(exids_decide(e, net.nodes[2], net.nodes[5], ids, led, 0), DisabledIds);
  }
}

TEST_CASE("a single false strike never reaches quarantine") {
  Net net;
  IdsParams ids;
  EnergyParams e;
  IdsLedgers led;
  led.record_strike(6, 3, {SidsReason::EnergyRate});
  net.nodes[6].trust = trust_penalize(net.nodes[6].trust);
  bool rehabilitated = false;
  for (int r = 3; r < 30 && !rehabilitated; ++r) {
    auto d = exids_decide(e, net.nodes[2], net.nodes[6], ids, led, r);
    REQUIRE(d != ExidsDecision::Malicious);
    rehabilitated = d == ExidsDecision::Rehabilitated;
  }
  CHECK(rehabilitated);
  CHECK_FALSE(led.is_quarantined(6));
  CHECK(net.nodes[6].trust.nibble == 15);
}

TEST_CASE("quarantine is idempotent and permanent") {
  IdsLedgers led;
  led.record_strike(4, 1, {SidsReason::InvalidToken});
  quarantine(led, 4, 2);
  quarantine(led, 4, 5);
  CHECK(led.quarantine.size() == 1);
  CHECK(led.quarantine.at(4) == 2);
  CHECK(led.suspected.empty());
  CHECK(led.is_quarantined(4));
}

TEST_CASE("cc validation") {
  Net net;
  auto& cc = net.nodes[2];
  cc.role = Role::CC;
  grant_detection_budget(cc);
  IdsParams ids;
  EnergyParams e;
  IdsLedgers led;
  const auto prof = leaf_profile(3);

  Packet good{5, 2, PacketKind::SensorData, {5, true}, 3, 32};
  CHECK(cc_validate(e, cc, good, prof, 1, ids, led, 4) == CcVerdict::Accept);
  REQUIRE(led.valid_list.size() == 1);
  CHECK(led.valid_list[0].src == 5);
  CHECK(led.valid_list[0].round == 4);

  Packet forged = good;
  forged.src = 6;
  forged.token.valid = false;
  CHECK(cc_validate(e, cc, forged, prof, 1, ids, led, 4) == CcVerdict::Drop);
  CHECK(led.false_negative_catches == 1);
  CHECK(led.suspected.at(6).strike_count == 1);

  Packet flooding = good;
  flooding.src = 7;
  CHECK(cc_validate(e, cc, flooding, prof, 5, ids, led, 4) == CcVerdict::Drop);
  CHECK(led.suspected.at(7).reasons.back() == ReasonSet{SidsReason::PacketFlood});

  quarantine(led, 5, 4);
  CHECK(cc_validate(e, cc, good, prof, 1, ids, led, 5) == CcVerdict::Drop);
  CHECK(led.valid_list.size() == 1);
  CHECK(led.false_negative_catches == 2);  // quarantined drops are not catches
}

TEST_CASE("confusion arithmetic") {
  auto a = confusion_from_counts(2, 0, 18, 0);
  CHECK(a.accuracy == 1.0);
  CHECK(a.detection_rate == 1.0);
  auto none = confusion_from_counts(0, 0, 20, 0);
  CHECK(none.accuracy == 1.0);
  CHECK(none.detection_rate == 1.0);
  auto mixed = confusion_from_counts(1, 1, 17, 1);
  CHECK(mixed.accuracy == doctest::Approx(0.9));
  CHECK(mixed.detection_rate == doctest::Approx(0.5));
  CHECK(confusion_from_counts(0, 0, 0, 0).accuracy == 1.0);
}

TEST_CASE("confusion over nodes counts everyone ever alive") {
  std::vector<SensorNode> nodes{make_node(0, 0, 0, 1e6, NodeClass::Sink)};
  for (NodeId i = 1; i <= 20; ++i) nodes.push_back(make_node(i, 0, 0));
  nodes[1].malicious = nodes[2].malicious = true;
  IdsLedgers led;
  quarantine(led, 1, 0);
  quarantine(led, 3, 0);
  std::vector<bool> ever(nodes.size(), true);
  nodes[4].energy.residual = 0;  // died, still counted
  auto c = compute_confusion(nodes, led, ever, 0);
  CHECK(c.tp == 1);
  CHECK(c.fn == 1);
  CHECK(c.fp == 1);
  CHECK(c.tn == 17);
  CHECK(c.tp + c.fp + c.tn + c.fn == 20);
  CHECK(c.accuracy == doctest::Approx(0.9));
  ever[20] = false;
  CHECK(compute_confusion(nodes, led, ever, 0).tn == 16);
}

TEST_CASE("adding a firing reason never clears suspicion") {
  IdsParams ids;
  SeededRng rng(21);
  for (int t = 0; t < 2000; ++t) {
    auto prof = leaf_profile(static_cast<int>(rng.below(5)));
    Observation o = clean(3, prof.allowed_slots[0]);
    o.energy_spent = rng.uniform(0, 3e-4);
    o.packets_sent = static_cast<int>(rng.below(5));
    o.invalid_token = rng.bernoulli(0.3);
    if (rng.bernoulli(0.3)) o.tx_slots.push_back(static_cast<int>(rng.below(10)));
    const auto base = evaluate_sids_rules(o, prof, ids);
    Observation worse = o;
    switch (rng.below(4)) {
      case 0: worse.energy_spent *= 10; worse.energy_spent += 1; break;
      case 1: worse.tx_slots.push_back(99); break;
      case 2: worse.invalid_token = true; break;
      default: worse.packets_sent += 100;
    }
    const auto after = evaluate_sids_rules(worse, prof, ids);
    REQUIRE(after.status == SidsStatus::Suspected);
    REQUIRE((after.reasons.bits() & base.reasons.bits()) == base.reasons.bits());
    if (after.status == SidsStatus::Suspected) REQUIRE_FALSE(after.reasons.empty());
  }
}

TEST_CASE("with every rule relaxed nothing is ever suspected") {
  IdsParams ids;
  ids.rate_threshold = std::numeric_limits<double>::infinity();
  ids.count_threshold = std::numeric_limits<double>::infinity();
  ids.token_rule = false;
  SeededRng rng(22);
  for (int t = 0; t < 1000; ++t) {
    Observation o = clean(3, 1);
    o.energy_spent = rng.uniform(0, 10);
    o.packets_sent = static_cast<int>(rng.below(1000));
    o.invalid_token = rng.bernoulli(0.5);
    REQUIRE(evaluate_sids_rules(o, leaf_profile(1), ids).status == SidsStatus::Normal);
  }
}
