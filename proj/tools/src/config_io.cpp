#include "imids_cli/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

namespace imids::cli {

namespace {

json position_to_json(const Position& p) { return json::array({p.x, p.y}); }

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + "expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    out = convert<T>(*it, where(key));
  }

  const json* sub(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw ConfigError("unknown key '" + path_ + k + "'");
    }
  }

  std::string where(const std::string& key = {}) const {
    return (path_ + key).empty() ? std::string() : path_ + key + ": ";
  }

  template <class T>
  static T convert(const json& v, const std::string& where) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(where + "expected a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(where + "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_unsigned() || v.get<long long>() >= 0) return v.get<T>();
        throw ConfigError(where + "expected a non-negative integer");
      } else {
        return v.get<T>();
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(where + "expected a number");
      return v.get<T>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(where + "expected a string");
      return v.get<std::string>();
    } else {
      static_assert(sizeof(T) == 0, "unsupported config field type");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Position read_position(const json& v, const std::string& where) {
  if (v.is_array() && v.size() == 2) {
    return {Reader::convert<double>(v[0], where), Reader::convert<double>(v[1], where)};
  }
  if (v.is_object()) {
    Position p;
    Reader r(v, where.empty() ? "" : where.substr(0, where.size() - 2) + ".");
    r.get("x", p.x);
    r.get("y", p.y);
    r.finish();
    return p;
  }
  throw ConfigError(where + "expected [x, y]");
}

template <class T>
std::vector<T> read_list(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + "expected an array");
  std::vector<T> out;
  for (const auto& e : v) out.push_back(Reader::convert<T>(e, where));
  return out;
}

}  // namespace

json config_to_json(const ScenarioConfig& c) {
  const auto& d = c.deployment;
  json positions = json::array();
  for (const auto& p : d.positions) positions.push_back(position_to_json(p));
  json strikes = json::array();
  for (const auto& s : c.injected_strikes) strikes.push_back({{"node", s.node}, {"round", s.round}});

  json j;
  j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  j["mode"] = std::string(to_string(c.mode));
  j["rounds"] = c.rounds;
  j["slots_per_round"] = c.slots_per_round;
  j["seconds_per_round"] = c.seconds_per_round;
  j["deployment"] = {
      {"node_count", d.node_count},
      {"area_width", d.area_width},
      {"area_height", d.area_height},
      {"sink", position_to_json(d.sink)},
      {"transmission_range", d.transmission_range},
      {"sector_radius", d.sector_radius},
      {"leader_fraction", d.leader_fraction},
      {"leader_energy", d.leader_energy},
      {"follower_energy", d.follower_energy},
      {"energy_jitter", d.energy_jitter},
      {"leader_energy_threshold", d.leader_energy_threshold},
      {"positions", positions},
      {"energies", d.energies},
  };
  j["energy"] = {
      {"e_elec", c.energy.e_elec},     {"e_amp", c.energy.e_amp},       {"p_listen", c.energy.p_listen},
      {"p_sleep", c.energy.p_sleep},   {"e_detect", c.energy.e_detect}, {"dp_min_threshold", c.energy.dp_min_threshold},
  };
  j["attack"] = {
      {"attacker_ids", c.attack.attacker_ids},
      {"attacker_count", c.attack.attacker_count},
      {"fake_msgs_per_round", c.attack.fake_msgs_per_round},
      {"flood_packets_per_slot", c.attack.flood_packets_per_slot},
      {"start_round", c.attack.start_round},
  };
  j["ids"] = {
      {"window", c.ids.window},
      {"k_strikes", c.ids.k_strikes},
      {"trust_floor", c.ids.trust_floor},
      {"rate_threshold", c.ids.rate_threshold},
      {"count_threshold", c.ids.count_threshold},
      {"reputation_threshold", c.ids.reputation_threshold},
      {"penalty_step", c.ids.penalty_step},
      {"reward_step", c.ids.reward_step},
      {"token_rule", c.ids.token_rule},
  };
  j["itids"] = {{"monitor_fraction", c.itids.monitor_fraction}};
  j["traffic"] = {
      {"data_bytes", c.traffic.data_bytes},
      {"control_bytes", c.traffic.control_bytes},
      {"sense_every", c.traffic.sense_every},
  };
  j["injected_strikes"] = strikes;
  return j;
}

ScenarioConfig config_from_json(const json& j) {
  ScenarioConfig c;
  Reader top(j, "");
  if (const json* s = top.sub("seed"); s && !s->is_null()) {
    c.seed = Reader::convert<std::uint64_t>(*s, "seed: ");
  }
  std::string mode = std::string(to_string(c.mode));
  top.get("mode", mode);
  c.mode = parse_mode(mode);
  top.get("rounds", c.rounds);
  top.get("slots_per_round", c.slots_per_round);
  top.get("seconds_per_round", c.seconds_per_round);

  if (const json* dj = top.sub("deployment")) {
    auto& d = c.deployment;
    Reader r(*dj, "deployment.");
    r.get("node_count", d.node_count);
    r.get("area_width", d.area_width);
    r.get("area_height", d.area_height);
    if (const json* s = r.sub("sink")) d.sink = read_position(*s, "deployment.sink: ");
    r.get("transmission_range", d.transmission_range);
    r.get("sector_radius", d.sector_radius);
    r.get("leader_fraction", d.leader_fraction);
    r.get("leader_energy", d.leader_energy);
    r.get("follower_energy", d.follower_energy);
    r.get("energy_jitter", d.energy_jitter);
    r.get("leader_energy_threshold", d.leader_energy_threshold);
    if (const json* ps = r.sub("positions")) {
      if (!ps->is_array()) throw ConfigError("deployment.positions: expected an array");
      for (const auto& p : *ps) d.positions.push_back(read_position(p, "deployment.positions: "));
    }
    if (const json* es = r.sub("energies")) d.energies = read_list<double>(*es, "deployment.energies: ");
    r.finish();
  }
  if (const json* ej = top.sub("energy")) {
    auto& e = c.energy;
    Reader r(*ej, "energy.");
    r.get("e_elec", e.e_elec);
    r.get("e_amp", e.e_amp);
    r.get("p_listen", e.p_listen);
    r.get("p_sleep", e.p_sleep);
    r.get("e_detect", e.e_detect);
    r.get("dp_min_threshold", e.dp_min_threshold);
    r.finish();
  }
  if (const json* aj = top.sub("attack")) {
    auto& a = c.attack;
    Reader r(*aj, "attack.");
    if (const json* ids = r.sub("attacker_ids")) a.attacker_ids = read_list<NodeId>(*ids, "attack.attacker_ids: ");
    r.get("attacker_count", a.attacker_count);
    r.get("fake_msgs_per_round", a.fake_msgs_per_round);
    r.get("flood_packets_per_slot", a.flood_packets_per_slot);
    r.get("start_round", a.start_round);
    r.finish();
  }
  if (const json* ij = top.sub("ids")) {
    auto& p = c.ids;
    Reader r(*ij, "ids.");
    r.get("window", p.window);
    r.get("k_strikes", p.k_strikes);
    r.get("trust_floor", p.trust_floor);
    r.get("rate_threshold", p.rate_threshold);
    r.get("count_threshold", p.count_threshold);
    r.get("reputation_threshold", p.reputation_threshold);
    r.get("penalty_step", p.penalty_step);
    r.get("reward_step", p.reward_step);
    r.get("token_rule", p.token_rule);
    r.finish();
  }
  if (const json* tj = top.sub("itids")) {
    Reader r(*tj, "itids.");
    r.get("monitor_fraction", c.itids.monitor_fraction);
    r.finish();
  }
  if (const json* tj = top.sub("traffic")) {
    Reader r(*tj, "traffic.");
    r.get("data_bytes", c.traffic.data_bytes);
    r.get("control_bytes", c.traffic.control_bytes);
    r.get("sense_every", c.traffic.sense_every);
    r.finish();
  }
  if (const json* sj = top.sub("injected_strikes")) {
    if (!sj->is_array()) throw ConfigError("injected_strikes: expected an array");
    for (const auto& e : *sj) {
      InjectedStrike s;
      Reader r(e, "injected_strikes[].");
      r.get("node", s.node);
      r.get("round", s.round);
      r.finish();
      c.injected_strikes.push_back(s);
    }
  }
  top.finish();
  return c;
}

void apply_override(json& j, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override '" + std::string(assignment) + "' is not of the form key=value");
  }
  const std::string path(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json* node = &j;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].empty()) throw ConfigError("override '" + path + "': empty path component");
    if (!node->is_object()) throw ConfigError("override '" + path + "': '" + parts[i - 1] + "' is not an object");
    node = &(*node)[parts[i]];
  }
  *node = std::move(value);
}

ScenarioConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json j = json::parse(in, nullptr, false, true);
  if (j.is_discarded()) throw ConfigError("config '" + path.string() + "' is not valid JSON");
  for (const auto& o : overrides) apply_override(j, o);
  auto config = config_from_json(j);
  config.validate();
  return config;
}

}  // namespace imids::cli
