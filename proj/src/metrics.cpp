#include "distnav/metrics.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace distnav {

void Thresholds::validate() const {
  if (!(collision_dist > 0.0 && collision_dist <= discomfort_dist)) {
    throw PreconditionError("Thresholds: need 0 < collision_dist <= discomfort_dist");
  }
  if (!(freezing_ratio > 1.0)) throw PreconditionError("Thresholds: freezing_ratio must exceed 1");
}

RunResult classify_run(const RunLog& log, double human_path_length, const Thresholds& th) {
  th.validate();
  if (log.steps.empty()) throw PreconditionError(fmt::format("classify_run: run '{}' is empty", log.name));
  if (!(human_path_length > 0.0)) {
    throw PreconditionError(fmt::format("classify_run: run '{}' needs a positive reference length", log.name));
  }

  RunResult r;
  r.name = log.name;
  r.timeout = log.timeout;
  r.reached_goal = log.reached_goal;
  r.min_sep = log.min_separation();
  r.has_pedestrians = r.min_sep.has_value();
  if (r.min_sep) {
    r.collision = *r.min_sep < th.collision_dist;
    r.discomfort = *r.min_sep < th.discomfort_dist;
  }
  r.robot_path = path_arc_length(log.robot_path());
  r.ratio = r.robot_path / human_path_length;
  r.freezing = r.ratio > th.freezing_ratio || log.timeout;
  r.duration = log.steps.back().time - log.steps.front().time;
  for (const auto& s : log.steps) {
    if (s.replan_ms) r.replan_ms.push_back(*s.replan_ms);
  }
  return r;
}

MeanSd mean_sd(std::vector<double> values) {
  if (values.empty()) return {};
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  std::vector<double> dev;
  dev.reserve(values.size());
  for (double v : values) dev.push_back((v - mean) * (v - mean));
  std::sort(dev.begin(), dev.end());
  double ss = 0.0;
  for (double d : dev) ss += d;
  return {mean, std::sqrt(ss / n), values.size()};
}

MetricsReport aggregate(std::span<const RunResult> results, const Thresholds& th) {
  if (results.empty()) throw PreconditionError("aggregate: no runs");
  th.validate();

  MetricsReport rep;
  rep.thresholds = th;
  rep.runs = results.size();
  std::vector<double> seps, paths, times, replans;
  for (const auto& r : results) {
    rep.collisions += r.collision;
    rep.discomforts += r.discomfort;
    rep.freezes += r.freezing;
    rep.timeouts += r.timeout;
    rep.goals_reached += r.reached_goal;
    rep.runs_without_pedestrians += !r.has_pedestrians;
    rep.max_ratio = std::max(rep.max_ratio, r.ratio);
    if (r.min_sep) seps.push_back(*r.min_sep);
    paths.push_back(r.robot_path);
    if (r.reached_goal) times.push_back(r.duration);
    replans.insert(replans.end(), r.replan_ms.begin(), r.replan_ms.end());
  }
  const auto pct = [&](std::size_t k) { return 100.0 * static_cast<double>(k) / static_cast<double>(rep.runs); };
  rep.collision_pct = pct(rep.collisions);
  rep.discomfort_pct = pct(rep.discomforts);
  rep.freezing_pct = pct(rep.freezes);
  rep.min_sep = mean_sd(std::move(seps));
  rep.path_length = mean_sd(std::move(paths));
  rep.time_to_goal = mean_sd(std::move(times));
  rep.replan_ms = mean_sd(std::move(replans));
  return rep;
}

void write_report_json(std::ostream& os, const MetricsReport& rep, bool timing) {
  const auto pair = [](MeanSd m) {
    if (m.count == 0) return nlohmann::ordered_json{{"mean", nullptr}, {"sd", nullptr}, {"count", 0}};
    return nlohmann::ordered_json{{"mean", m.mean}, {"sd", m.sd}, {"count", m.count}};
  };
  nlohmann::ordered_json j;
  j["runs"] = rep.runs;
  j["discomfort_pct"] = rep.discomfort_pct;
  j["collision_pct"] = rep.collision_pct;
  j["freezing_pct"] = rep.freezing_pct;
  j["max_ratio"] = rep.max_ratio;
  j["mean_min_sep"] = pair(rep.min_sep);
  j["mean_path"] = pair(rep.path_length);
  j["mean_time_to_goal"] = pair(rep.time_to_goal);
  if (timing) j["mean_replan_ms"] = pair(rep.replan_ms);
  j["counts"] = {{"collisions", rep.collisions},         {"discomforts", rep.discomforts},
                 {"freezes", rep.freezes},               {"timeouts", rep.timeouts},
                 {"goals_reached", rep.goals_reached},   {"runs_without_pedestrians", rep.runs_without_pedestrians}};
  j["thresholds"] = {{"collision_dist", rep.thresholds.collision_dist},
                     {"discomfort_dist", rep.thresholds.discomfort_dist},
                     {"freezing_ratio", rep.thresholds.freezing_ratio}};
  os << j.dump(2) << '\n';
}

void write_report_table(std::ostream& os, const MetricsReport& rep, bool timing) {
  const auto pm = [](MeanSd m, int digits) {
    return m.count ? fmt::format("{:.{}f} ± {:.{}f}", m.mean, digits, m.sd, digits) : std::string("n/a");
  };
  std::vector<std::pair<std::string, std::string>> cols{
      {"Runs", fmt::format("{}", rep.runs)},
      {"Discomfort", fmt::format("{:.1f}%", rep.discomfort_pct)},
      {"Collisions", fmt::format("{:.1f}%", rep.collision_pct)},
      {"Freezing", fmt::format("{:.1f}%", rep.freezing_pct)},
      {"max(d_r/d_h)", fmt::format("{:.3f}", rep.max_ratio)},
      {"mu(s) [m]", pm(rep.min_sep, 3)},
      {"mu(d_r) [m]", pm(rep.path_length, 2)},
  };
  if (timing) cols.emplace_back("mu(t) [ms]", pm(rep.replan_ms, 1));

  std::string head, vals;
  for (const auto& [h, v] : cols) {
    // "±" is two bytes but one column wide.
    const auto width = [](const std::string& s) {
      return s.size() - static_cast<std::size_t>(std::count(s.begin(), s.end(), '\xC2'));
    };
    const std::size_t w = std::max(width(h), width(v)) + 2;
    head += h + std::string(w - width(h), ' ');
    vals += v + std::string(w - width(v), ' ');
  }
  os << head << '\n' << vals << '\n';
}

}  // namespace distnav
