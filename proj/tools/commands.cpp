#include "commands.hpp"

#include "distnav/parallel.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <ostream>

namespace distnav::cli {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw InputError(fmt::format("cannot write '{}'", path.string()));
  return f;
}

MetricsReport report_runs(const ExperimentConfig& cfg, std::vector<RunLog> logs, const RunFlags& flags,
                          std::ostream& out) {
  const fs::path dir = cfg.output;
  std::vector<RunResult> results;
  for (auto& log : logs) {
    if (flags.no_timing) log.strip_timing();
    save_run(dir / "runs", log);
    results.push_back(classify_run(log, cfg.thresholds));
  }
  const MetricsReport report = aggregate(results, cfg.thresholds);
  auto json = open_out(dir / "report.json");
  write_report_json(json, report, !flags.no_timing);
  auto txt = open_out(dir / "report.txt");
  write_report_table(txt, report, !flags.no_timing);
  write_report_table(out, report, !flags.no_timing);
  return report;
}

}  // namespace

Evolve1dResult cmd_evolve1d(const ExperimentConfig& cfg, std::ostream& out) {
  const Scenario1d& sc = cfg.evolve1d;
  sc.validate();
  const CollisionKernel kernel = sc.kernel();
  const fs::path dir = cfg.output;

  auto densities = sc.initial_densities();
  const EvolutionHistory history = exact_update(densities, kernel, sc.sweeps);

  Evolve1dResult result;
  result.objective = history.objective;

  std::vector<double> sampled_objective;
  if (cfg.compare_sampler) {
    auto sets = sc.initial_samples(cfg.samples, cfg.seed);
    const PenaltyCache cache(sets, kernel);
    std::vector<std::size_t> order(sets.size());
    std::iota(order.begin(), order.end(), 0);
    sampled_objective.push_back(discrete_objective(sets, cache));
    for (std::size_t s = 0; s < sc.sweeps; ++s) sampled_objective.push_back(sweep(sets, cache, order).objective);

    std::vector<double> ks;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const auto& paths = sets[i].paths();
      ks.push_back(ks_distance(history.densities.back()[i], paths.x, sets[i].weights()));
    }
    result.ks = std::move(ks);
  }

  {
    auto f = open_out(dir / "evolution.csv");
    write_evolution_csv(f, history);
  }
  {
    auto f = open_out(dir / "objective.csv");
    f << (cfg.compare_sampler ? "sweep,objective,sampler_objective\n" : "sweep,objective\n");
    for (std::size_t s = 0; s < history.objective.size(); ++s) {
      f << s << ',' << fmt::format("{:.17g}", history.objective[s]);
      if (cfg.compare_sampler) f << ',' << fmt::format("{:.17g}", sampled_objective[s]);
      f << '\n';
    }
  }

  nlohmann::ordered_json summary;
  summary["sweeps"] = sc.sweeps;
  summary["objective"] = history.objective;
  summary["strictly_decreasing"] =
      std::adjacent_find(history.objective.begin(), history.objective.end(), std::less_equal<>()) ==
      history.objective.end();
  auto agents = nlohmann::ordered_json::array();
  for (const auto& d : history.densities.back()) {
    const Moments1d m = moments_1d(d.xs, d.ps);
    agents.push_back({{"mean", m.mean},
                      {"variance", m.variance},
                      {"skew", m.skew},
                      {"excess_kurtosis", m.excess_kurtosis},
                      {"modes", m.modes}});
  }
  summary["agents"] = agents;
  if (result.ks) {
    summary["sampler"] = {{"samples", cfg.samples},
                          {"seed", cfg.seed},
                          {"objective", sampled_objective},
                          {"ks", *result.ks},
                          {"max_ks", *std::max_element(result.ks->begin(), result.ks->end())}};
  }
  auto f = open_out(dir / "summary.json");
  f << summary.dump(2) << '\n';

  fmt::print(out, "J_c: {:.6g} -> {:.6g} over {} sweeps\n", history.objective.front(), history.objective.back(),
             sc.sweeps);
  for (std::size_t i = 0; i < agents.size(); ++i) {
    fmt::print(out, "agent {}: modes {}\n", i, agents[i]["modes"].dump());
  }
  if (result.ks) fmt::print(out, "KS vs sampler (m={}): {}\n", cfg.samples, fmt::join(*result.ks, ", "));
  return result;
}

std::optional<MetricsReport> cmd_replay(const ExperimentConfig& cfg, const RunFlags& flags, std::ostream& out) {
  const Dataset data = load_dataset(cfg.dataset);
  const auto partials = extract_partials(data);
  fmt::print(out, "{}: {} pedestrians, {} frames, {} partial runs\n", data.name, data.tracks.size(),
             data.frame_ids.size(), partials.size());

  const auto list = [&](std::ostream& os) {
    os << "index,pedestrian,start_frame,end_frame,length_m\n";
    for (std::size_t k = 0; k < partials.size(); ++k) {
      const auto& p = partials[k];
      os << k << ',' << p.pedestrian << ',' << data.frame_ids[p.start_frame] << ','
         << data.frame_ids[p.end_frame] << ',' << fmt::format("{:.3f}", p.length()) << '\n';
    }
  };
  if (flags.dry_run) {
    list(out);
    return std::nullopt;
  }
  if (partials.empty()) throw InputError(fmt::format("{}: no partial runs of 8-12 m", data.name));
  auto listing = open_out(fs::path(cfg.output) / "partials.csv");
  list(listing);

  const PlannerConfig planner = cfg.effective_planner();
  auto logs = parallel_map(partials.size(), cfg.jobs, [&](std::size_t k) {
    return run_replay(data, partials[k], planner, cfg.replay);
  });

  std::vector<RunResult> human;
  for (const auto& p : partials) human.push_back(classify_run(human_baseline(data, p), cfg.thresholds));
  auto hj = open_out(fs::path(cfg.output) / "human_report.json");
  write_report_json(hj, aggregate(human, cfg.thresholds), false);

  return report_runs(cfg, std::move(logs), flags, out);
}

MetricsReport cmd_simulate(const ExperimentConfig& cfg, const RunFlags& flags, std::ostream& out) {
  const PlannerConfig planner = cfg.effective_planner();
  auto logs = parallel_map(cfg.runs, cfg.jobs, [&](std::size_t k) {
    return run_interactive(cfg.arena, planner, cfg.seed + k);
  });
  return report_runs(cfg, std::move(logs), flags, out);
}

MetricsReport cmd_metrics(const ExperimentConfig& cfg, const std::vector<fs::path>& inputs, const RunFlags& flags,
                          std::ostream& out) {
  std::vector<fs::path> files;
  for (const auto& p : inputs) {
    if (fs::is_directory(p)) {
      for (const auto& e : fs::directory_iterator(p)) {
        if (e.is_regular_file() && e.path().extension() == ".csv") {
          auto json = e.path();
          json.replace_extension(".json");
          if (fs::exists(json)) files.push_back(e.path());
        }
      }
    } else if (fs::exists(p)) {
      files.push_back(p);
    } else {
      throw InputError(fmt::format("no such run log '{}'", p.string()));
    }
  }
  if (files.empty()) throw InputError("metrics: no run logs found");
  std::sort(files.begin(), files.end());

  std::vector<RunResult> results;
  for (const auto& f : files) {
    RunLog log = load_run(f);
    if (flags.no_timing) log.strip_timing();
    results.push_back(classify_run(log, cfg.thresholds));
  }
  const MetricsReport report = aggregate(results, cfg.thresholds);
  auto json = open_out(fs::path(cfg.output) / "report.json");
  write_report_json(json, report, !flags.no_timing);
  auto txt = open_out(fs::path(cfg.output) / "report.txt");
  write_report_table(txt, report, !flags.no_timing);
  write_report_table(out, report, !flags.no_timing);
  return report;
}

}  // namespace distnav::cli
