#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "imids/config.hpp"
#include "imids/topology.hpp"
#include "imids_cli/commands.hpp"
#include "imids_cli/config_io.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

void report(const imids::cli::RunArtifacts& a) {
  std::printf("wrote %s\nwrote %s\n", a.metrics_csv.c_str(), a.summary_json.c_str());
  for (const auto& c : a.charts) std::printf("wrote %s\n", c.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  using namespace imids;
  CLI::App app{"Cluster/sector intrusion-detection simulator for sleep-deprivation attacks"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> overrides;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "scenario JSON")->required();
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--override", overrides, "key=value (dotted path, repeatable)");
  };

  auto* run = app.add_subcommand("run", "single simulation");
  add_common(run);
  auto* compare = app.add_subcommand("compare", "IMIDS vs ITIDS on identical seed and attack traffic");
  add_common(compare);
  auto* sweep = app.add_subcommand("sweep", "parameter sweep");
  add_common(sweep);
  std::string axis;
  std::vector<std::string> values;
  std::vector<std::string> modes{"imids", "imids-no-sectors"};
  int replicates = 1;
  int jobs = 0;
  sweep->add_option("--axis", axis, "node_count | attackers | mode")->required();
  sweep->add_option("--values", values, "comma-separated values")->required()->delimiter(',');
  sweep->add_option("--modes", modes, "modes per cell (ignored on the mode axis)")->delimiter(',')->capture_default_str();
  sweep->add_option("--replicates", replicates, "seeds per cell (seed, seed+1, ...)")->capture_default_str();
  sweep->add_option("--jobs", jobs, "parallel runs (0 = all cores)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    const auto config = cli::load_config(config_path, overrides);
    if (run->parsed()) {
      report(cli::cmd_run(config, out_dir));
    } else if (compare->parsed()) {
      report(cli::cmd_compare(config, out_dir));
    } else {
      cli::SweepOptions opt;
      opt.axis = cli::parse_axis(axis);
      opt.values = values;
      opt.modes.clear();
      for (const auto& m : modes) opt.modes.push_back(parse_mode(m));
      opt.replicates = replicates;
      opt.jobs = jobs;
      report(cli::cmd_sweep(config, opt, out_dir));
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const TopologyError& e) {
    std::fprintf(stderr, "topology failure: %s\n", e.what());
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return 0;
}
