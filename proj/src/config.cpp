#include "distnav/config.hpp"

#include <fmt/format.h>

#include <array>
#include <fstream>
#include <set>
#include <type_traits>

namespace distnav {

namespace {

constexpr std::array kCommands{Command::Evolve1d, Command::Replay, Command::Simulate, Command::Metrics};
constexpr std::array<std::string_view, 6> kVerbosity{"trace", "debug", "info", "warn", "error", "off"};

// Reads fields out of a JSON object, remembering which keys were consumed.
class Reader {
 public:
  Reader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw InputError(fmt::format("config: '{}' must be an object", path_.empty() ? "<root>" : path_));
  }

  template <class T>
  void field(const char* key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    const std::string where = qualify(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) throw InputError(fmt::format("config: '{}' must be a boolean", where));
      out = it->template get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!it->is_string()) throw InputError(fmt::format("config: '{}' must be a string", where));
      out = it->template get<std::string>();
    } else if constexpr (std::is_unsigned_v<T>) {
      if (!it->is_number_unsigned()) throw InputError(fmt::format("config: '{}' must be a non-negative integer", where));
      out = it->template get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) throw InputError(fmt::format("config: '{}' must be a number", where));
      out = it->template get<T>();
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
      if (!it->is_array()) throw InputError(fmt::format("config: '{}' must be an array of numbers", where));
      out.clear();
      for (const auto& v : *it) {
        if (!v.is_number()) throw InputError(fmt::format("config: '{}' must be an array of numbers", where));
        out.push_back(v.template get<double>());
      }
    } else if constexpr (std::is_same_v<T, Command>) {
      std::string name;
      field(key, name);
      const auto c = std::find_if(kCommands.begin(), kCommands.end(),
                                  [&](Command cmd) { return command_name(cmd) == name; });
      if (c == kCommands.end()) throw InputError(fmt::format("config: unknown mode '{}'", name));
      out = *c;
    } else {
      static_assert(sizeof(T) == 0, "unsupported config field type");
    }
  }

  template <class F>
  void section(const char* key, F&& body) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    Reader sub(*it, qualify(key));
    body(sub);
    sub.finish();
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw InputError(fmt::format("config: unknown key '{}'", qualify(key.c_str())));
    }
  }

 private:
  std::string qualify(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

class Writer {
 public:
  explicit Writer(nlohmann::ordered_json& j) : j_(j) { j_ = nlohmann::ordered_json::object(); }

  template <class T>
  void field(const char* key, const T& v) {
    if constexpr (std::is_same_v<T, Command>) {
      j_[key] = std::string(command_name(v));
    } else {
      j_[key] = v;
    }
  }

  template <class F>
  void section(const char* key, F&& body) {
    nlohmann::ordered_json sub;
    Writer w(sub);
    body(w);
    j_[key] = std::move(sub);
  }

 private:
  nlohmann::ordered_json& j_;
};

// One schema for both directions. Cfg is ExperimentConfig or its const form.
template <class Archive, class Cfg>
void visit(Archive& a, Cfg& c) {
  a.field("mode", c.mode);
  a.field("seed", c.seed);
  a.field("samples", c.samples);
  a.field("jobs", c.jobs);
  a.field("verbosity", c.verbosity);
  a.section("paths", [&](Archive& s) {
    s.field("dataset", c.dataset);
    s.field("output", c.output);
  });
  a.section("planner", [&](Archive& s) {
    s.field("horizon_steps", c.planner.horizon_steps);
    s.field("dt", c.planner.dt);
    s.field("history", c.planner.history);
    s.field("max_critical", c.planner.max_critical);
    s.field("robot_speed", c.planner.robot_speed);
    s.field("max_speed", c.planner.max_speed);
    s.field("observation_noise", c.planner.observation_noise);
    s.field("goal_noise", c.planner.goal_noise);
  });
  const auto kernel = [&](const char* name, auto& k) {
    a.section(name, [&](Archive& s) {
      s.field("length_scale", k.length_scale);
      s.field("signal_var", k.signal_var);
      s.field("jitter", k.jitter);
    });
  };
  kernel("pedestrian_kernel", c.planner.pedestrian_kernel);
  kernel("robot_kernel", c.planner.robot_kernel);
  a.section("collision", [&](Archive& s) {
    s.field("weight", c.planner.collision.weight);
    s.field("sigma", c.planner.collision.sigma);
  });
  a.section("solver", [&](Archive& s) {
    s.field("epsilon", c.planner.solver.epsilon);
    s.field("kl_epsilon", c.planner.solver.kl_epsilon);
    s.field("max_sweeps", c.planner.solver.max_sweeps);
    s.field("critical_threshold", c.planner.solver.critical_threshold);
    s.field("gamma_clamp", c.planner.solver.gamma_clamp);
  });
  a.section("sfm", [&](Archive& s) {
    s.field("desired_speed", c.arena.sfm.desired_speed);
    s.field("relaxation_time", c.arena.sfm.relaxation_time);
    s.field("repulsion_strength", c.arena.sfm.repulsion_strength);
    s.field("repulsion_range", c.arena.sfm.repulsion_range);
    s.field("max_speed", c.arena.sfm.max_speed);
  });
  a.section("arena", [&](Archive& s) {
    s.field("radius", c.arena.radius);
    s.field("pedestrians", c.arena.pedestrians);
    s.field("runs", c.runs);
    s.field("time_cap", c.arena.time_cap);
    s.field("goal_tolerance", c.arena.goal_tolerance);
    s.field("spawn_spacing", c.arena.spawn_spacing);
  });
  a.section("replay", [&](Archive& s) {
    s.field("goal_tolerance", c.replay.goal_tolerance);
    s.field("grace", c.replay.grace);
  });
  a.section("thresholds", [&](Archive& s) {
    s.field("collision_dist", c.thresholds.collision_dist);
    s.field("discomfort_dist", c.thresholds.discomfort_dist);
    s.field("freezing_ratio", c.thresholds.freezing_ratio);
  });
  a.section("evolve1d", [&](Archive& s) {
    s.field("means", c.evolve1d.means);
    s.field("sds", c.evolve1d.sds);
    s.field("penalty_weight", c.evolve1d.penalty_weight);
    s.field("penalty_sigma", c.evolve1d.penalty_sigma);
    s.field("grid_lo", c.evolve1d.grid_lo);
    s.field("grid_hi", c.evolve1d.grid_hi);
    s.field("grid_points", c.evolve1d.grid_points);
    s.field("sweeps", c.evolve1d.sweeps);
    s.field("compare_sampler", c.compare_sampler);
  });
}

}  // namespace

std::string_view command_name(Command c) {
  switch (c) {
    case Command::Evolve1d: return "evolve1d";
    case Command::Replay: return "replay";
    case Command::Simulate: return "simulate";
    case Command::Metrics: return "metrics";
  }
  return "?";
}

PlannerConfig ExperimentConfig::effective_planner() const {
  PlannerConfig p = planner;
  p.samples = samples;
  p.seed = seed;
  return p;
}

void ExperimentConfig::validate() const {
  if (samples < 1) throw InputError("config: samples must be >= 1");
  if (jobs < 1) throw InputError("config: jobs must be >= 1");
  if (std::find(kVerbosity.begin(), kVerbosity.end(), verbosity) == kVerbosity.end()) {
    throw InputError(fmt::format("config: unknown verbosity '{}'", verbosity));
  }
  if (output.empty()) throw InputError("config: paths.output must be set");
  try {
    switch (mode) {
      case Command::Evolve1d:
        evolve1d.validate();
        break;
      case Command::Replay:
        if (dataset.empty()) throw InputError("config: paths.dataset is required for replay");
        effective_planner().validate();
        if (!(replay.goal_tolerance > 0.0) || !(replay.grace >= 0.0)) {
          throw InputError("config: replay needs goal_tolerance > 0 and grace >= 0");
        }
        thresholds.validate();
        break;
      case Command::Simulate:
        effective_planner().validate();
        arena.validate();
        if (runs < 1) throw InputError("config: arena.runs must be >= 1");
        thresholds.validate();
        break;
      case Command::Metrics:
        thresholds.validate();
        break;
    }
  } catch (const PreconditionError& e) {
    throw InputError(fmt::format("config: {}", e.what()));
  }
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  Reader r(j, "");
  visit(r, cfg);
  r.finish();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open config '{}'", path.string()));
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return config_from_json(j);
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  Writer w(j);
  visit(w, cfg);
  return j;
}

}  // namespace distnav
