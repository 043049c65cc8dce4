// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on failure.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "imids/attack.hpp"
#include "imids/engine.hpp"
#include "imids_cli/commands.hpp"
#include "imids_cli/config_io.hpp"
#include "imids_cli/output.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace imids;
namespace fs = std::filesystem;

namespace {

const std::vector<std::uint64_t> kSeeds{42, 43, 44, 45, 46};

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::vector<const SimulationTrace*> g_audit;  // every trace produced below

ScenarioConfig with(ScenarioConfig c, std::uint64_t seed, Mode mode) {
  c.seed = seed;
  c.mode = mode;
  return c;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : ",") + p;
  return out;
}

std::string fmt(double v, int prec = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

struct Paired {
  SimulationTrace imids;
  SimulationTrace itids;
};

Verdict lifetime_dominance(const std::vector<Paired>& runs) {
  int dominated = 0, strict = 0;
  std::vector<std::string> finals;
  for (const auto& p : runs) {
    bool every = p.imids.rounds.size() == p.itids.rounds.size();
    for (std::size_t r = 0; every && r < p.imids.rounds.size(); ++r) {
      every = p.imids.rounds[r].alive_count >= p.itids.rounds[r].alive_count;
    }
    dominated += every;
    const int a = p.imids.rounds.back().alive_count, b = p.itids.rounds.back().alive_count;
    strict += a > b;
    finals.push_back(std::to_string(a) + "/" + std::to_string(b));
  }
  const int n = static_cast<int>(runs.size());
  return {dominated == n && strict >= n - 1,
          std::to_string(dominated) + "/" + std::to_string(n) + " seeds dominate every round, strict at horizon in " +
              std::to_string(strict) + "/" + std::to_string(n) + " (final alive imids/itids " + join(finals) + ")"};
}

Verdict accuracy_dominance(const std::vector<Paired>& runs) {
  int higher = 0;
  double worst = 1.0;
  std::vector<std::string> pairs;
  for (const auto& p : runs) {
    higher += p.imids.confusion.accuracy > p.itids.confusion.accuracy;
    worst = std::min(worst, p.imids.confusion.accuracy);
    pairs.push_back(fmt(p.imids.confusion.accuracy) + "/" + fmt(p.itids.confusion.accuracy));
  }
  const int n = static_cast<int>(runs.size());
  return {higher >= n - 1 && worst >= 0.9,
          "imids higher in " + std::to_string(higher) + "/" + std::to_string(n) + ", min imids accuracy " + fmt(worst) +
              " (imids/itids " + join(pairs) + ")"};
}

Verdict sector_energy(const ScenarioConfig& stock, std::vector<SimulationTrace>& keep) {
  struct Cell {
    int nodes;
    std::uint64_t seed;
    std::future<SimulationTrace> sect, flat;
  };
  std::vector<Cell> cells;
  for (int n : {50, 100, 200}) {
    for (auto seed : kSeeds) {
      auto c = stock;
      c.deployment.node_count = n;
      cells.push_back({n, seed, std::async(std::launch::async, run_simulation, with(c, seed, Mode::Imids)),
                       std::async(std::launch::async, run_simulation, with(c, seed, Mode::ImidsNoSectors))});
    }
  }
  int wins = 0;
  double worst = 0;
  std::vector<std::string> ratios;
  for (auto& cell : cells) {
    keep.push_back(cell.sect.get());
    const double s = cli::total_energy(keep.back());
    keep.push_back(cell.flat.get());
    const double f = cli::total_energy(keep.back());
    wins += s < f;
    worst = std::max(worst, s / f);
    ratios.push_back(std::to_string(cell.nodes) + ":" + fmt(s / f));
  }
  return {wins == static_cast<int>(cells.size()),
          std::to_string(wins) + "/" + std::to_string(cells.size()) +
              " cells cheaper with sectors, worst ratio " + fmt(worst) + " (" + join(ratios) + ")"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Verdict determinism(const ScenarioConfig& stock) {
  const auto root = fs::temp_directory_path() / ("imids_acceptance_" + std::to_string(::getpid()));
  int same = 0;
  for (auto seed : kSeeds) {
    auto c = with(stock, seed, Mode::Imids);
    const auto a = cli::cmd_run(c, root / std::to_string(seed) / "a");
    const auto b = cli::cmd_run(c, root / std::to_string(seed) / "b");
    same += slurp(a.metrics_csv) == slurp(b.metrics_csv) && slurp(a.summary_json) == slurp(b.summary_json);
  }
  fs::remove_all(root);
  const int n = static_cast<int>(kSeeds.size());
  return {same == n, std::to_string(same) + "/" + std::to_string(n) + " repeated runs byte-identical"};
}

Verdict quarantine_soundness() {
  long leaks = 0, checked = 0;
  for (const auto* t : g_audit) {
    for (const auto& [q, at] : t->ledgers.quarantine) {
      ++checked;
      for (const auto* log : {&t->ledgers.valid_list, &t->ledgers.sink_log}) {
        leaks += std::count_if(log->begin(), log->end(), [&](const ValidEntry& e) { return e.src == q && e.round > at; });
      }
    }
  }
  return {leaks == 0, std::to_string(leaks) + " leaked packets over " + std::to_string(checked) +
                          " quarantines in " + std::to_string(g_audit.size()) + " runs"};
}

Verdict detection_latency(const std::vector<Paired>& runs, const IdsParams& ids) {
  const int bound = ids.k_strikes + ids.window;
  int worst = -1, missed = 0, attackers = 0;
  for (const auto& p : runs) {
    for (NodeId a : p.imids.attackers) {
      ++attackers;
      auto it = p.imids.ledgers.quarantine.find(a);
      if (it == p.imids.ledgers.quarantine.end()) {
        ++missed;
        continue;
      }
      worst = std::max(worst, it->second);
    }
  }
  return {missed == 0 && worst <= bound, std::to_string(attackers - missed) + "/" + std::to_string(attackers) +
                                            " attackers quarantined, latest at round " + std::to_string(worst) +
                                            " (bound " + std::to_string(bound) + ")"};
}

Verdict phantom_avoidance(const ScenarioConfig& stock, std::vector<SimulationTrace>& keep) {
  int ok = 0;
  std::vector<std::string> notes;
  for (auto seed : kSeeds) {
    auto c = with(stock, seed, Mode::Imids);
    const auto attackers = choose_attackers(c.attack, c.deployment.node_count, seed);
    NodeId victim = 1;
    while (std::binary_search(attackers.begin(), attackers.end(), victim)) ++victim;
    c.injected_strikes = {{victim, 10}};
    keep.push_back(run_simulation(c));
    const bool kept = !keep.back().ledgers.is_quarantined(victim);
    keep.push_back(run_simulation(with(c, seed, Mode::Itids)));
    const bool isolated = keep.back().ledgers.is_quarantined(victim);
    ok += kept && isolated;
    notes.push_back(std::to_string(victim) + (kept ? ":kept" : ":lost") + (isolated ? "/isolated" : "/kept"));
  }
  const int n = static_cast<int>(kSeeds.size());
  return {ok == n, std::to_string(ok) + "/" + std::to_string(n) +
                       " seeds rehabilitate under imids and isolate under itids (" + join(notes) + ")"};
}

Verdict election_oracle_agreement() {
  int agree = 0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    SeededRng rng(derive_seed(8, {i}));
    const int n = 3 + static_cast<int>(rng.below(8));  // at most 10 nodes with the sink
    auto nodes = test::random_nodes(rng, n, 30, 0.5);
    for (auto& node : nodes) {
      if (node.id == 0) continue;
      node.energy.residual = node.energy.initial * rng.uniform(0.1, 1.0);
      node.trust.nibble = static_cast<int>(rng.below(16));
    }
    const double range = rng.uniform(8, 25);
    const auto g = build_graph(nodes, range);
    std::vector<NodeId> targets;
    for (NodeId t = 1; t < static_cast<NodeId>(n); ++t) targets.push_back(t);
    agree += elect_coordinators(nodes, g, {0, 8}, targets).coordinators == test::election_oracle(nodes, range, 8);
  }
  return {agree == 50, std::to_string(agree) + "/50 instances agree"};
}

Verdict energy_audit() {
  double worst = 0;
  for (const auto* t : g_audit) {
    std::vector<double> spent = t->init_spent;
    for (const auto& r : t->rounds) {
      for (std::size_t i = 0; i < r.energy_spent.size(); ++i) spent[i] += r.energy_spent[i];
    }
    for (std::size_t i = 1; i < spent.size(); ++i) {
      worst = std::max(worst, std::abs(spent[i] - (t->initial_energy[i] - t->final_residual[i])));
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", worst);
  return {worst <= 1e-9, "max per-node discrepancy " + std::string(buf) + " J over " +
                             std::to_string(g_audit.size()) + " runs"};
}

Verdict invariant_suite() {
  int instances = 0, violations = 0, attempts = 0;
  std::string first;
  auto fail = [&](const std::string& what) {
    if (violations++ == 0) first = what;
  };
  for (std::uint64_t seed = 0; instances < 1000 && attempts < 5000; ++seed, ++attempts) {
    SeededRng rng(derive_seed(10, {seed}));
    ScenarioConfig c;
    c.seed = seed;
    c.rounds = 25;
    c.mode = static_cast<Mode>(rng.below(3));
    c.deployment.node_count = 8 + static_cast<int>(rng.below(33));
    c.deployment.area_width = rng.uniform(20, 60);
    c.deployment.area_height = rng.uniform(20, 60);
    c.deployment.sink = {c.deployment.area_width / 2, c.deployment.area_height / 2};
    c.deployment.transmission_range = rng.uniform(0.4, 0.8) * std::max(c.deployment.area_width, c.deployment.area_height);
    c.deployment.sector_radius = c.deployment.transmission_range * rng.uniform(0.3, 1.0);
    c.deployment.follower_energy = rng.uniform(0.002, 0.05);  // some nodes die inside the horizon
    c.attack.attacker_count = static_cast<int>(rng.below(4));
    c.attack.fake_msgs_per_round = static_cast<int>(rng.below(20));
    SimulationState st;
    try {
      st = initialize(c);
    } catch (const TopologyError&) {
      continue;  // sparse draw; not an instance
    }
    ++instances;
    const std::string tag = "seed " + std::to_string(seed) + ": ";
    if (auto v = test::hierarchy_violation(st.net, true)) fail(tag + "init " + *v);
    int alive = st.alive_count();
    for (int r = 0; r < c.rounds && !st.extinct(); ++r) {
      run_round(st);
      std::set<NodeId> quarantined;
      for (const auto& [q, at] : st.ids.quarantine) quarantined.insert(q);
      if (auto v = test::hierarchy_violation(st.net, false, quarantined)) fail(tag + "round " + std::to_string(r) + " " + *v);
      if (st.alive_count() > alive) fail(tag + "alive count rose");
      alive = st.alive_count();
      for (const auto& n : st.net.nodes) {
        if (n.trust.nibble < 0 || n.trust.nibble > TrustState::kMax) fail(tag + "trust out of range");
      }
    }
  }
  return {violations == 0 && instances >= 1000,
          std::to_string(instances) + " instances, " + std::to_string(violations) + " violations" +
              (first.empty() ? "" : " (first: " + first + ")")};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path config_dir = argc > 1 ? fs::path(argv[1]) : fs::path(IMIDS_CONFIG_DIR);
  const auto stock = cli::load_config(config_dir / "stock.json");

  std::vector<Paired> paired;
  {
    std::vector<std::future<Paired>> jobs;
    for (auto seed : kSeeds) {
      jobs.push_back(std::async(std::launch::async, [&stock, seed] {
        return Paired{run_simulation(with(stock, seed, Mode::Imids)), run_simulation(with(stock, seed, Mode::Itids))};
      }));
    }
    for (auto& j : jobs) paired.push_back(j.get());
  }
  std::vector<SimulationTrace> sweep, phantom;

  std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"lifetime dominance", [&] { return lifetime_dominance(paired); }},
      {"accuracy dominance", [&] { return accuracy_dominance(paired); }},
      {"sectorization energy", [&] { return sector_energy(stock, sweep); }},
      {"determinism", [&] { return determinism(stock); }},
      {"quarantine soundness", [&] {
         phantom_avoidance(stock, phantom);  // fills the audit set before it is checked
         for (const auto& p : paired) {
           g_audit.push_back(&p.imids);
           g_audit.push_back(&p.itids);
         }
         for (const auto& t : sweep) g_audit.push_back(&t);
         for (const auto& t : phantom) g_audit.push_back(&t);
         return quarantine_soundness();
       }},
      {"detection latency", [&] { return detection_latency(paired, stock.ids); }},
      {"false-positive handling", [&] {
         std::vector<SimulationTrace> again;
         return phantom_avoidance(stock, again);
       }},
      {"election oracle", [&] { return election_oracle_agreement(); }},
      {"energy audit", [&] { return energy_audit(); }},
      {"invariant suites", [&] { return invariant_suite(); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("%s %2zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), v.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
