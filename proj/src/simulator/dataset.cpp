#include "distnav/simulator.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

namespace distnav {

namespace {

struct Record {
  long long frame;
  int pedestrian;
  Vec2 pos;
};

// Integer-valued field; ETH exports often write ids as "780.0".
long long parse_integral(const std::string& tok, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size() || !std::isfinite(v) || v != std::floor(v) || std::abs(v) > 9e15) {
    throw InputError(fmt::format("{}: expected an integer, got '{}'", where, tok));
  }
  return static_cast<long long>(v);
}

double parse_real(const std::string& tok, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size() || !std::isfinite(v)) {
    throw InputError(fmt::format("{}: expected a finite number, got '{}'", where, tok));
  }
  return v;
}

}  // namespace

const Track* Dataset::track(int id) const {
  const auto it = std::find_if(tracks.begin(), tracks.end(), [id](const Track& t) { return t.id == id; });
  return it == tracks.end() ? nullptr : &*it;
}

std::vector<std::pair<int, Vec2>> Dataset::at_frame(std::size_t frame, std::optional<int> exclude) const {
  std::vector<std::pair<int, Vec2>> out;
  for (const auto& t : tracks) {
    if (exclude && t.id == *exclude) continue;
    const auto it = std::lower_bound(t.frames.begin(), t.frames.end(), frame);
    if (it != t.frames.end() && *it == frame) {
      out.emplace_back(t.id, t.positions[static_cast<std::size_t>(it - t.frames.begin())]);
    }
  }
  return out;
}

Dataset parse_dataset(std::istream& in, const std::string& name, double frame_period) {
  if (!(frame_period > 0.0)) throw InputError(fmt::format("{}: frame_period must be positive", name));

  std::vector<Record> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.empty()) continue;

    const std::string where = fmt::format("{}:{}", name, line_no);
    if (tok.size() != 4) throw InputError(fmt::format("{}: expected 4 fields, got {}", where, tok.size()));
    Record r{parse_integral(tok[0], where), static_cast<int>(parse_integral(tok[1], where)),
             {parse_real(tok[2], where), parse_real(tok[3], where)}};
    if (r.pedestrian == kRobotId) throw InputError(fmt::format("{}: pedestrian id {} is reserved", where, kRobotId));
    if (!records.empty() && r.frame < records.back().frame) {
      throw InputError(fmt::format("{}: frame {} after frame {} (frames must be non-decreasing)", where, r.frame,
                                   records.back().frame));
    }
    if (!records.empty() && r.frame == records.back().frame) {
      for (auto it = records.rbegin(); it != records.rend() && it->frame == r.frame; ++it) {
        if (it->pedestrian == r.pedestrian) {
          throw InputError(fmt::format("{}: pedestrian {} appears twice in frame {}", where, r.pedestrian, r.frame));
        }
      }
    }
    records.push_back(r);
  }
  if (records.empty()) throw InputError(fmt::format("{}: dataset has no records", name));

  Dataset data;
  data.name = name;
  data.frame_period = frame_period;
  std::map<int, Track> tracks;
  for (const auto& r : records) {
    if (data.frame_ids.empty() || data.frame_ids.back() != r.frame) data.frame_ids.push_back(r.frame);
    Track& t = tracks[r.pedestrian];
    t.id = r.pedestrian;
    t.frames.push_back(data.frame_ids.size() - 1);
    t.positions.push_back(r.pos);
  }
  for (auto& [id, t] : tracks) data.tracks.push_back(std::move(t));
  return data;
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open dataset '{}'", path.string()));

  double frame_period = 0.4;
  const std::filesystem::path meta = path.string() + ".meta.json";
  if (std::filesystem::exists(meta)) {
    std::ifstream mf(meta);
    nlohmann::json j;
    try {
      mf >> j;
    } catch (const nlohmann::json::exception& e) {
      throw InputError(fmt::format("{}: {}", meta.string(), e.what()));
    }
    for (const auto& [key, value] : j.items()) {
      if (key != "frame_period") throw InputError(fmt::format("{}: unknown key '{}'", meta.string(), key));
      if (!value.is_number()) throw InputError(fmt::format("{}: frame_period must be a number", meta.string()));
      frame_period = value.get<double>();
    }
  }
  return parse_dataset(in, path.filename().string(), frame_period);
}

double PartialRun::length() const { return path_arc_length(human_path); }

std::vector<PartialRun> extract_partials(const Dataset& data) {
  if (data.tracks.empty()) throw InputError("extract_partials: empty dataset");

  std::vector<PartialRun> out;
  for (const auto& track : data.tracks) {
    // Split on missing frames; a segment never bridges a gap.
    std::size_t piece_begin = 0;
    while (piece_begin < track.frames.size()) {
      std::size_t piece_end = piece_begin + 1;
      while (piece_end < track.frames.size() && track.frames[piece_end] == track.frames[piece_end - 1] + 1) {
        ++piece_end;
      }

      const auto emit = [&](std::size_t s, std::size_t e) {
        PartialRun p;
        p.pedestrian = track.id;
        p.start_frame = track.frames[s];
        p.end_frame = track.frames[e];
        p.frames.assign(track.frames.begin() + static_cast<std::ptrdiff_t>(s),
                        track.frames.begin() + static_cast<std::ptrdiff_t>(e) + 1);
        p.human_path.assign(track.positions.begin() + static_cast<std::ptrdiff_t>(s),
                            track.positions.begin() + static_cast<std::ptrdiff_t>(e) + 1);
        out.push_back(std::move(p));
      };

      std::size_t s = piece_begin;
      while (s + 1 < piece_end) {
        // First end index whose arc length from s reaches the target.
        double arc = 0.0;
        double prev_arc = 0.0;
        std::size_t e = s;
        while (e + 1 < piece_end && arc < kPartialTarget) {
          prev_arc = arc;
          arc += distance(track.positions[e], track.positions[e + 1]);
          ++e;
        }
        if (arc < kPartialTarget) {
          if (arc >= kPartialMin) emit(s, e);  // tail long enough on its own
          break;
        }
        if (arc <= kPartialMax) {
          emit(s, e);
        } else if (e - 1 > s && prev_arc >= kPartialMin) {
          // One long step overshot the window; stop just before it.
          --e;
          emit(s, e);
        }
        s = e;
      }
      piece_begin = piece_end;
    }
  }
  return out;
}

}  // namespace distnav
