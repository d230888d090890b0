#pragma once

#include "distnav/simulator.hpp"
#include "support.hpp"

#include <cmath>
#include <fstream>
#include <filesystem>

namespace distnav::fixtures {

/// Pedestrian 1 walks along +x in `step` increments for `length` metres; the
/// optional bystander (id 2) stands off to the side for the whole recording.
inline Dataset straight_walk_dataset(double length, double step, bool with_bystander = false) {
  Dataset d;
  d.name = "walk.txt";
  const auto steps = static_cast<std::size_t>(std::ceil(length / step - 1e-9));
  Track walker{1, {}, {}};
  Track bystander{2, {}, {}};
  for (std::size_t f = 0; f <= steps; ++f) {
    d.frame_ids.push_back(static_cast<long long>(10 * f));
    walker.frames.push_back(f);
    walker.positions.push_back({step * static_cast<double>(f), 0.0});
    bystander.frames.push_back(f);
    bystander.positions.push_back({6.0, 4.0});
  }
  d.tracks.push_back(walker);
  if (with_bystander) d.tracks.push_back(bystander);
  return d;
}

/// Writes a dataset in the plain `frame ped x y` text format.
inline void write_dataset(const std::filesystem::path& path, const Dataset& d) {
  std::ofstream out(path);
  for (std::size_t f = 0; f < d.frame_ids.size(); ++f) {
    for (const auto& [id, pos] : d.at_frame(f)) out << d.frame_ids[f] << ' ' << id << ' ' << pos.x << ' ' << pos.y << '\n';
  }
}

}  // namespace distnav::fixtures
