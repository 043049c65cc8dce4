#include "imids_cli/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "imids_cli/config_io.hpp"

namespace imids::cli {

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("short write to '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::string format_number(double v) {
  if (!std::isfinite(v)) return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string metrics_csv(const SimulationTrace& trace) {
  std::string out = "round,alive,energy_spent_total,suspects_new,quarantines_new,tp,fp,tn,fn\n";
  for (const auto& r : trace.rounds) {
    out += std::to_string(r.round) + ',' + std::to_string(r.alive_count) + ',' +
           format_number(r.energy_spent_total) + ',' + std::to_string(r.new_suspects.size()) + ',' +
           std::to_string(r.new_quarantines.size()) + ',' + std::to_string(r.confusion.tp) + ',' +
           std::to_string(r.confusion.fp) + ',' + std::to_string(r.confusion.tn) + ',' +
           std::to_string(r.confusion.fn) + '\n';
  }
  return out;
}

std::optional<int> lifetime(const SimulationTrace& trace) {
  for (const auto& r : trace.rounds) {
    if (r.alive_count < trace.initial_alive) return r.round;
  }
  return std::nullopt;
}

double total_energy(const SimulationTrace& trace) {
  double e = 0.0;
  for (double x : trace.init_spent) e += x;
  for (const auto& r : trace.rounds) e += r.energy_spent_total;
  return e;
}

nlohmann::json summary_json(const SimulationTrace& trace) {
  nlohmann::json j;
  const auto life = lifetime(trace);
  j["mode"] = std::string(to_string(trace.config.mode));
  j["rounds_executed"] = trace.rounds.size();
  j["truncated"] = trace.truncated;
  j["initial_alive"] = trace.initial_alive;
  j["final_alive"] = trace.rounds.empty() ? trace.initial_alive : trace.rounds.back().alive_count;
  j["lifetime_round"] = life ? nlohmann::json(*life) : nlohmann::json(nullptr);
  j["lifetime_seconds"] = life ? nlohmann::json(*life * trace.config.seconds_per_round) : nlohmann::json(nullptr);
  j["total_energy"] = total_energy(trace);
  j["accuracy"] = trace.confusion.accuracy;
  j["detection_rate"] = trace.confusion.detection_rate;
  j["confusion"] = {{"tp", trace.confusion.tp}, {"fp", trace.confusion.fp}, {"tn", trace.confusion.tn},
                    {"fn", trace.confusion.fn}};
  j["attackers"] = trace.attackers;
  j["config"] = config_to_json(trace.config);
  return j;
}

nlohmann::json ledgers_json(const SimulationTrace& trace) {
  nlohmann::json q = nlohmann::json::array();
  for (const auto& [node, round] : trace.ledgers.quarantine) q.push_back({{"node", node}, {"round", round}});
  nlohmann::json s = nlohmann::json::array();
  for (const auto& [node, e] : trace.ledgers.suspected) {
    nlohmann::json reasons = nlohmann::json::array();
    for (const auto& r : e.reasons) reasons.push_back(r.str());
    s.push_back({{"node", node},
                 {"first_round", e.first_round},
                 {"last_strike_round", e.last_strike_round},
                 {"strikes", e.strike_count},
                 {"reasons", reasons}});
  }
  nlohmann::json reconf = nlohmann::json::array();
  for (const auto& r : trace.rounds) {
    for (const auto& ev : r.reconfigurations) {
      reconf.push_back({{"round", r.round},
                        {"failed", ev.failed},
                        {"role", std::string(to_string(ev.role))},
                        {"replacements", ev.replacements},
                        {"orphaned", ev.orphaned}});
    }
  }
  return {{"quarantine", q},
          {"suspected", s},
          {"false_negative_catches", trace.ledgers.false_negative_catches},
          {"valid_list_entries", trace.ledgers.valid_list.size()},
          {"sink_deliveries", trace.ledgers.sink_log.size()},
          {"reconfigurations", reconf}};
}

namespace {

std::string escape_xml(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

double nice_step(double span, int target_ticks) {
  const double raw = span / target_ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  const double nice = f < 1.5 ? 1 : f < 3 ? 2 : f < 7 ? 5 : 10;
  return nice * mag;
}

std::string tick_label(double v, double step) {
  std::ostringstream os;
  if (std::fabs(v) < step * 1e-6) v = 0.0;
  const int decimals = step >= 1 ? 0 : static_cast<int>(std::ceil(-std::log10(step) - 1e-9));
  if (std::fabs(v) >= 1e5 || (v != 0.0 && std::fabs(v) < 1e-3)) {
    os.precision(2);
    os << std::scientific << v;
  } else {
    os.setf(std::ios::fixed);
    os.precision(decimals);
    os << v;
  }
  return os.str();
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

}  // namespace

std::string render_line_chart(const ChartSpec& spec, const std::vector<Series>& series) {
  constexpr double W = 720, H = 440, L = 80, R = 160, T = 40, B = 60;
  const double pw = W - L - R, ph = H - T - B;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (auto [x, y] : s.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (spec.y_min) ymin = *spec.y_min;
  if (spec.y_max) ymax = *spec.y_max;
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double xstep = nice_step(xmax - xmin, 8);
  const double ystep = nice_step(ymax - ymin, 6);
  if (!spec.y_min) ymin = std::floor(ymin / ystep) * ystep;
  if (!spec.y_max) ymax = std::ceil(ymax / ystep) * ystep;

  auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return T + ph - (y - ymin) / (ymax - ymin) * ph; };

  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
     << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"#ffffff\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape_xml(spec.title)
     << "</text>\n";

  for (double y = ymin; y <= ymax + ystep * 1e-6; y += ystep) {
    os << "<line x1=\"" << L << "\" y1=\"" << py(y) << "\" x2=\"" << L + pw << "\" y2=\"" << py(y)
       << "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
    os << "<text x=\"" << L - 6 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">" << tick_label(y, ystep)
       << "</text>\n";
  }
  for (double x = std::ceil(xmin / xstep) * xstep; x <= xmax + xstep * 1e-6; x += xstep) {
    os << "<line x1=\"" << px(x) << "\" y1=\"" << T + ph << "\" x2=\"" << px(x) << "\" y2=\"" << T + ph + 5
       << "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    os << "<text x=\"" << px(x) << "\" y=\"" << T + ph + 18 << "\" text-anchor=\"middle\">"
       << tick_label(x, xstep) << "</text>\n";
  }
  os << "<line x1=\"" << L << "\" y1=\"" << T + ph << "\" x2=\"" << L + pw << "\" y2=\"" << T + ph
     << "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << T + ph
     << "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
  os << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 18 << "\" text-anchor=\"middle\">"
     << escape_xml(spec.x_label) << "</text>\n";
  os << "<text x=\"18\" y=\"" << T + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << T + ph / 2
     << ")\">" << escape_xml(spec.y_label) << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = kPalette[i % std::size(kPalette)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t k = 0; k < s.points.size(); ++k) {
      if (k) os << ' ';
      os << px(s.points[k].first) << ',' << py(s.points[k].second);
    }
    os << "\"/>\n";
    if (s.points.size() <= 12) {
      for (auto [x, y] : s.points) {
        os << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      }
    }
    const double ly = T + 10 + 20.0 * static_cast<double>(i);
    os << "<line x1=\"" << L + pw + 15 << "\" y1=\"" << ly << "\" x2=\"" << L + pw + 40 << "\" y2=\"" << ly
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << L + pw + 46 << "\" y=\"" << ly + 4 << "\">" << escape_xml(s.name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace imids::cli
