#include "distnav/simulator.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <fstream>
#include <ostream>
#include <sstream>

namespace distnav {

namespace {

constexpr const char* kCsvHeader = "t,agent_id,x,y,min_sep,replan_ms";

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw InputError(fmt::format("{}: bad number '{}'", where, s));
  return v;
}

nlohmann::json vec_json(Vec2 v) { return nlohmann::json::array({v.x, v.y}); }

Vec2 json_vec(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw InputError("expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

RunSummary summarize(const RunLog& log) {
  RunSummary s;
  s.name = log.name;
  s.steps = log.steps.size();
  s.reached_goal = log.reached_goal;
  s.timeout = log.timeout;
  s.human_path_length = log.human_path_length;
  s.robot_path_length = path_arc_length(log.robot_path());
  s.min_separation = log.min_separation();
  if (!log.steps.empty()) s.duration = log.steps.back().time - log.steps.front().time;
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& step : log.steps) {
    if (step.replan_ms) {
      total += *step.replan_ms;
      ++count;
    }
  }
  s.mean_replan_ms = count ? total / static_cast<double>(count) : 0.0;
  return s;
}

void write_run_csv(std::ostream& os, const RunLog& log) {
  os << kCsvHeader << '\n';
  for (const auto& step : log.steps) {
    const std::string sep = step.min_separation ? num(*step.min_separation) : "";
    const std::string ms = step.replan_ms ? num(*step.replan_ms) : "";
    for (const auto& [id, pos] : step.positions) {
      os << num(step.time) << ',' << id << ',' << num(pos.x) << ',' << num(pos.y) << ',' << sep << ',' << ms << '\n';
    }
  }
}

void write_run_summary_json(std::ostream& os, const RunLog& log) {
  const RunSummary s = summarize(log);
  nlohmann::ordered_json j;
  j["name"] = s.name;
  j["steps"] = s.steps;
  j["start"] = vec_json(log.start);
  j["goal"] = vec_json(log.goal);
  j["reached_goal"] = s.reached_goal;
  j["timeout"] = s.timeout;
  j["human_path_length"] = s.human_path_length;
  j["robot_path_length"] = s.robot_path_length;
  j["min_separation"] = s.min_separation ? nlohmann::ordered_json(*s.min_separation) : nlohmann::ordered_json();
  j["duration"] = s.duration;
  j["mean_replan_ms"] = s.mean_replan_ms;
  os << j.dump(2) << '\n';
}

void save_run(const std::filesystem::path& dir, const RunLog& log) {
  std::filesystem::create_directories(dir);
  std::ofstream csv(dir / (log.name + ".csv"));
  std::ofstream json(dir / (log.name + ".json"));
  if (!csv || !json) throw InputError(fmt::format("cannot write run '{}' to {}", log.name, dir.string()));
  write_run_csv(csv, log);
  write_run_summary_json(json, log);
}

RunLog load_run(const std::filesystem::path& csv_path) {
  const std::string name = csv_path.string();
  std::ifstream in(csv_path);
  if (!in) throw InputError(fmt::format("cannot open run log '{}'", name));

  RunLog log;
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw InputError(fmt::format("{}:1: expected header '{}'", name, kCsvHeader));
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = fmt::format("{}:{}", name, line_no);
    const auto f = split_csv(line);
    if (f.size() != 6) throw InputError(fmt::format("{}: expected 6 fields, got {}", where, f.size()));
    const double t = parse_double(f[0], where);
    const auto id = static_cast<int>(parse_double(f[1], where));
    const Vec2 pos{parse_double(f[2], where), parse_double(f[3], where)};
    if (id == kRobotId) {
      if (!log.steps.empty() && !(t > log.steps.back().time)) {
        throw InputError(fmt::format("{}: time must increase between steps", where));
      }
      StepRecord step;
      step.time = t;
      if (!f[4].empty()) step.min_separation = parse_double(f[4], where);
      if (!f[5].empty()) step.replan_ms = parse_double(f[5], where);
      log.steps.push_back(std::move(step));
    } else if (log.steps.empty() || log.steps.back().time != t) {
      throw InputError(fmt::format("{}: agent row before its step's robot row", where));
    }
    log.steps.back().positions.emplace_back(id, pos);
  }
  if (log.steps.empty()) throw InputError(fmt::format("{}: run log has no steps", name));

  auto json_path = csv_path;
  json_path.replace_extension(".json");
  std::ifstream js(json_path);
  if (!js) throw InputError(fmt::format("missing run summary '{}'", json_path.string()));
  try {
    nlohmann::json j;
    js >> j;
    log.name = j.at("name").get<std::string>();
    log.start = json_vec(j.at("start"));
    log.goal = json_vec(j.at("goal"));
    log.reached_goal = j.at("reached_goal").get<bool>();
    log.timeout = j.at("timeout").get<bool>();
    log.human_path_length = j.at("human_path_length").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(fmt::format("{}: {}", json_path.string(), e.what()));
  }
  return log;
}

}  // namespace distnav
