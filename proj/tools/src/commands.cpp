#include "imids_cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "imids/engine.hpp"
#include "imids_cli/config_io.hpp"
#include "imids_cli/output.hpp"

namespace imids::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string dump(const json& j) { return j.dump(2) + "\n"; }

Series alive_series(const std::string& name, const SimulationTrace& t) {
  Series s{name, {}};
  for (const auto& r : t.rounds) s.points.emplace_back(r.round * t.config.seconds_per_round, r.alive_count);
  return s;
}

Series accuracy_series(const std::string& name, const SimulationTrace& t) {
  Series s{name, {}};
  for (const auto& r : t.rounds) {
    s.points.emplace_back(r.round * t.config.seconds_per_round, r.confusion.accuracy);
  }
  return s;
}

std::string time_label(const ScenarioConfig& c) {
  return c.seconds_per_round == 1.0 ? "time (s, 1 round = 1 s)"
                                    : "time (s, 1 round = " + format_number(c.seconds_per_round) + " s)";
}

}  // namespace

RunArtifacts cmd_run(const ScenarioConfig& config, const fs::path& out_dir) {
  const auto trace = run_simulation(config);
  RunArtifacts a{out_dir / "metrics.csv", out_dir / "summary.json", {out_dir / "alive.svg"}};
  write_atomic(a.metrics_csv, metrics_csv(trace));
  write_atomic(a.summary_json, dump(summary_json(trace)));
  write_atomic(out_dir / "ledgers.json", dump(ledgers_json(trace)));
  write_atomic(a.charts[0], render_line_chart({"Alive nodes", time_label(config), "alive nodes", 0.0, std::nullopt},
                                              {alive_series(std::string(to_string(config.mode)), trace)}));
  return a;
}

RunArtifacts cmd_compare(const ScenarioConfig& config, const fs::path& out_dir) {
  auto imids_cfg = config;
  imids_cfg.mode = Mode::Imids;
  auto itids_cfg = config;
  itids_cfg.mode = Mode::Itids;
  const auto a = run_simulation(imids_cfg);
  const auto b = run_simulation(itids_cfg);

  RunArtifacts art{out_dir / "metrics.csv", out_dir / "summary.json",
                   {out_dir / "alive.svg", out_dir / "accuracy.svg"}};
  write_atomic(out_dir / "imids" / "metrics.csv", metrics_csv(a));
  write_atomic(out_dir / "itids" / "metrics.csv", metrics_csv(b));

  std::string csv = "round,alive_imids,alive_itids,accuracy_imids,accuracy_itids,energy_imids,energy_itids\n";
  const std::size_t n = std::max(a.rounds.size(), b.rounds.size());
  auto cell = [](const SimulationTrace& t, std::size_t i, auto get) {
    return i < t.rounds.size() ? get(t.rounds[i]) : std::string();
  };
  int alive_ge = 0, compared = 0;
  double max_gap = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    csv += std::to_string(i) + ',' +
           cell(a, i, [](const RoundReport& r) { return std::to_string(r.alive_count); }) + ',' +
           cell(b, i, [](const RoundReport& r) { return std::to_string(r.alive_count); }) + ',' +
           cell(a, i, [](const RoundReport& r) { return format_number(r.confusion.accuracy); }) + ',' +
           cell(b, i, [](const RoundReport& r) { return format_number(r.confusion.accuracy); }) + ',' +
           cell(a, i, [](const RoundReport& r) { return format_number(r.energy_spent_total); }) + ',' +
           cell(b, i, [](const RoundReport& r) { return format_number(r.energy_spent_total); }) + '\n';
    if (i < a.rounds.size() && i < b.rounds.size()) {
      ++compared;
      const int gap = a.rounds[i].alive_count - b.rounds[i].alive_count;
      if (gap >= 0) ++alive_ge;
      max_gap = std::max(max_gap, static_cast<double>(gap));
    }
  }
  write_atomic(art.metrics_csv, csv);

  const int final_a = a.rounds.empty() ? a.initial_alive : a.rounds.back().alive_count;
  const int final_b = b.rounds.empty() ? b.initial_alive : b.rounds.back().alive_count;
  json s;
  s["arms"] = {{"imids", summary_json(a)}, {"itids", summary_json(b)}};
  for (auto& [k, v] : s["arms"].items()) v.erase("config");
  s["alive"] = {{"dominates_every_round", compared > 0 && alive_ge == compared},
                {"rounds_imids_ge_itids", alive_ge},
                {"rounds_compared", compared},
                {"final_difference", final_a - final_b},
                {"max_difference", max_gap}};
  s["accuracy"] = {{"imids", a.confusion.accuracy},
                   {"itids", b.confusion.accuracy},
                   {"difference", a.confusion.accuracy - b.confusion.accuracy},
                   {"imids_higher", a.confusion.accuracy > b.confusion.accuracy}};
  s["energy"] = {{"imids", total_energy(a)}, {"itids", total_energy(b)}};
  s["config"] = config_to_json(config);
  write_atomic(art.summary_json, dump(s));

  write_atomic(art.charts[0], render_line_chart({"Alive nodes", time_label(config), "alive nodes", 0.0, std::nullopt},
                                                {alive_series("IMIDS", a), alive_series("ITIDS", b)}));
  write_atomic(art.charts[1], render_line_chart({"Detection accuracy", time_label(config), "accuracy", std::nullopt, 1.0},
                                                {accuracy_series("IMIDS", a), accuracy_series("ITIDS", b)}));
  return art;
}

SweepAxis parse_axis(const std::string& s) {
  if (s == "node_count") return SweepAxis::NodeCount;
  if (s == "attackers") return SweepAxis::Attackers;
  if (s == "mode") return SweepAxis::Mode;
  throw ConfigError("unknown sweep axis '" + s + "' (node_count, attackers, mode)");
}

namespace {

struct Cell {
  std::string value;
  Mode mode = Mode::Imids;
  int replicate = 0;
  ScenarioConfig config;
  // results
  int rounds = 0;
  int final_alive = 0;
  std::optional<int> life;
  double energy = 0.0;
  double accuracy = 0.0;
  double detection_rate = 0.0;
};

int parse_int(const std::string& v, const char* what) {
  std::size_t pos = 0;
  int out = 0;
  try {
    out = std::stoi(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || v.empty()) throw ConfigError(std::string(what) + " value '" + v + "' is not an integer");
  return out;
}

}  // namespace

RunArtifacts cmd_sweep(const ScenarioConfig& config, const SweepOptions& opt, const fs::path& out_dir) {
  if (opt.values.empty()) throw ConfigError("sweep needs at least one value");
  if (opt.replicates < 1) throw ConfigError("replicates must be >= 1");
  const auto base_seed = config.require_seed();

  std::vector<Cell> cells;
  for (const auto& v : opt.values) {
    std::vector<Mode> modes = opt.axis == SweepAxis::Mode ? std::vector<Mode>{parse_mode(v)} : opt.modes;
    for (Mode m : modes) {
      for (int r = 0; r < opt.replicates; ++r) {
        Cell c;
        c.value = v;
        c.mode = m;
        c.replicate = r;
        c.config = config;
        c.config.mode = m;
        c.config.seed = base_seed + static_cast<std::uint64_t>(r);
        if (opt.axis == SweepAxis::NodeCount) c.config.deployment.node_count = parse_int(v, "node_count");
        if (opt.axis == SweepAxis::Attackers) {
          c.config.attack.attacker_ids.clear();
          c.config.attack.attacker_count = parse_int(v, "attackers");
        }
        c.config.validate();
        cells.push_back(std::move(c));
      }
    }
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        const auto t = run_simulation(cells[i].config);
        auto& c = cells[i];
        c.rounds = static_cast<int>(t.rounds.size());
        c.final_alive = t.rounds.empty() ? t.initial_alive : t.rounds.back().alive_count;
        c.life = lifetime(t);
        c.energy = total_energy(t);
        c.accuracy = t.confusion.accuracy;
        c.detection_rate = t.confusion.detection_rate;
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned jobs = std::min<unsigned>(opt.jobs > 0 ? static_cast<unsigned>(opt.jobs) : hw,
                                           static_cast<unsigned>(cells.size()));
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < jobs; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  static const char* axis_names[] = {"node_count", "attackers", "mode"};
  const std::string axis = axis_names[static_cast<int>(opt.axis)];
  std::string csv = "axis,value,mode,replicate,seed,rounds_executed,final_alive,lifetime_round,total_energy,accuracy,detection_rate\n";
  for (const auto& c : cells) {
    csv += axis + ',' + c.value + ',' + std::string(to_string(c.mode)) + ',' + std::to_string(c.replicate) + ',' +
           std::to_string(*c.config.seed) + ',' + std::to_string(c.rounds) + ',' + std::to_string(c.final_alive) +
           ',' + (c.life ? std::to_string(*c.life) : std::string()) + ',' + format_number(c.energy) + ',' +
           format_number(c.accuracy) + ',' + format_number(c.detection_rate) + '\n';
  }
  RunArtifacts art{out_dir / "sweep.csv", out_dir / "summary.json", {out_dir / "energy.svg"}};
  write_atomic(art.metrics_csv, csv);

  // Energy chart: mean over replicates per (mode, value).
  std::vector<Series> series;
  std::vector<Mode> modes_seen;
  for (const auto& c : cells) {
    if (std::find(modes_seen.begin(), modes_seen.end(), c.mode) == modes_seen.end()) modes_seen.push_back(c.mode);
  }
  json cells_json = json::array();
  for (Mode m : modes_seen) {
    Series s{std::string(to_string(m)), {}};
    for (std::size_t vi = 0; vi < opt.values.size(); ++vi) {
      double sum = 0.0;
      int n = 0;
      for (const auto& c : cells) {
        if (c.mode == m && c.value == opt.values[vi]) sum += c.energy, ++n;
      }
      if (n == 0) continue;
      const double x = opt.axis == SweepAxis::Mode ? static_cast<double>(vi) : std::stod(opt.values[vi]);
      s.points.emplace_back(x, sum / n);
      cells_json.push_back({{"mode", s.name}, {"value", opt.values[vi]}, {"mean_total_energy", sum / n}, {"runs", n}});
    }
    series.push_back(std::move(s));
  }
  const std::string x_label = opt.axis == SweepAxis::Mode ? "mode (index in --values)" : axis;
  write_atomic(art.charts[0], render_line_chart({"Total energy consumed", x_label, "energy (J)", 0.0, std::nullopt}, series));

  json s;
  s["axis"] = axis;
  s["values"] = opt.values;
  s["runs"] = cells.size();
  s["replicates"] = opt.replicates;
  s["mean_energy"] = cells_json;
  s["config"] = config_to_json(config);
  write_atomic(art.summary_json, dump(s));
  return art;
}

}  // namespace imids::cli
