#include "distnav/grid_oracle.hpp"

#include "distnav/gp_preference.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

namespace distnav {

namespace {

constexpr double kDensityFloor = 1e-300;

std::vector<double> trapezoid_weights(std::size_t n, double h) {
  std::vector<double> tw(n, h);
  if (n == 1) {
    tw[0] = 1.0;
    return tw;
  }
  tw.front() = tw.back() = 0.5 * h;
  return tw;
}

void require_shared_grid(std::span<const GridDensity> ds) {
  if (ds.empty()) throw PreconditionError("grid oracle: no densities");
  for (const auto& d : ds) {
    if (d.xs != ds[0].xs) throw PreconditionError("grid oracle: densities must share one grid");
    if (d.ps.size() != d.xs.size()) throw PreconditionError("grid oracle: xs and ps differ in length");
  }
}

// psi tabulated on every grid offset -(n-1)h .. (n-1)h.
std::vector<double> offset_table(std::size_t n, double h, const CollisionKernel& k) {
  if (k.dimension != 1) throw PreconditionError("grid oracle: collision kernel must be one-dimensional");
  k.validate();
  std::vector<double> table(2 * n - 1);
  for (std::size_t o = 0; o < table.size(); ++o) {
    const double d = h * (static_cast<double>(o) - static_cast<double>(n - 1));
    table[o] = k.at_distance(d);
  }
  return table;
}

// (psi * q)[a] = sum_b psi(x_a - x_b) q[b]; psi is even, so row a of the
// Toeplitz matrix is the contiguous slice starting at n-1-a.
void accumulate_convolution(const std::vector<double>& table, std::span<const double> q, std::vector<double>& out) {
  const std::size_t n = q.size();
  const auto& kern = simd::kernels();
  for (std::size_t a = 0; a < n; ++a) out[a] += kern.dot(table.data() + (n - 1 - a), q.data(), n);
}

std::vector<double> quadrature_masses(const GridDensity& d, const std::vector<double>& tw) {
  std::vector<double> q(d.ps.size());
  for (std::size_t b = 0; b < q.size(); ++b) q[b] = tw[b] * d.ps[b];
  return q;
}

}  // namespace

double GridDensity::integral() const { return trapezoid(ps, spacing()); }

void GridDensity::validate(double tol) const {
  if (xs.size() < 2 || xs.size() != ps.size()) throw PreconditionError("GridDensity: need >= 2 matching points");
  const double h = spacing();
  if (!(h > 0.0)) throw PreconditionError("GridDensity: grid must be increasing");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (std::abs((xs[i] - xs[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h))) {
      throw PreconditionError("GridDensity: grid must be uniform");
    }
  }
  for (double p : ps) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw PreconditionError("GridDensity: values must be finite and >= 0");
  }
  const double z = integral();
  if (std::abs(z - 1.0) > tol) throw PreconditionError(fmt::format("GridDensity: integrates to {}, not 1", z));
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  if (n < 2 || !(hi > lo)) throw PreconditionError("uniform_grid: need n >= 2 and hi > lo");
  std::vector<double> xs(n);
  const double h = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) xs[i] = lo + h * static_cast<double>(i);
  return xs;
}

GridDensity make_gaussian(std::span<const double> xs, double mean, double sd) {
  if (!(sd > 0.0)) throw PreconditionError("make_gaussian: sd must be positive");
  GridDensity g{{xs.begin(), xs.end()}, std::vector<double>(xs.size())};
  const double c = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * sd);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double z = (xs[i] - mean) / sd;
    g.ps[i] = c * std::exp(-0.5 * z * z);
  }
  const double z = g.integral();
  if (!(z > 0.0)) throw PreconditionError("make_gaussian: density has no mass on the grid");
  for (double& p : g.ps) p /= z;
  return g;
}

std::vector<double> exact_gamma(std::size_t i, std::span<const GridDensity> densities, const CollisionKernel& k) {
  require_shared_grid(densities);
  if (i >= densities.size()) throw PreconditionError("exact_gamma: agent index out of range");
  const std::size_t n = densities[0].xs.size();
  const double h = densities[0].spacing();
  const auto table = offset_table(n, h, k);
  const auto tw = trapezoid_weights(n, h);
  std::vector<double> gamma(n, 0.0);
  for (std::size_t j = 0; j < densities.size(); ++j) {
    if (j == i) continue;
    accumulate_convolution(table, quadrature_masses(densities[j], tw), gamma);
  }
  return gamma;
}

double exact_objective(std::span<const GridDensity> densities, const CollisionKernel& k) {
  require_shared_grid(densities);
  const std::size_t n = densities[0].xs.size();
  const double h = densities[0].spacing();
  const auto table = offset_table(n, h, k);
  const auto tw = trapezoid_weights(n, h);
  double total = 0.0;
  for (std::size_t j = 1; j < densities.size(); ++j) {
    std::vector<double> conv(n, 0.0);
    accumulate_convolution(table, quadrature_masses(densities[j], tw), conv);
    for (std::size_t i = 0; i < j; ++i) {
      for (std::size_t a = 0; a < n; ++a) total += tw[a] * densities[i].ps[a] * conv[a];
    }
  }
  return total;
}

double grid_kl(const GridDensity& p, const GridDensity& q) {
  if (p.xs != q.xs) throw PreconditionError("grid_kl: densities must share one grid");
  const auto tw = trapezoid_weights(p.xs.size(), p.spacing());
  double kl = 0.0;
  for (std::size_t a = 0; a < p.ps.size(); ++a) {
    if (p.ps[a] == 0.0) continue;
    kl += tw[a] * p.ps[a] * std::log(std::max(p.ps[a], kDensityFloor) / std::max(q.ps[a], kDensityFloor));
  }
  return kl;
}

EvolutionHistory exact_update(std::vector<GridDensity>& densities, const CollisionKernel& k, std::size_t sweeps) {
  require_shared_grid(densities);
  for (const auto& d : densities) d.validate(1e-6);
  const std::size_t n = densities[0].xs.size();
  const double h = densities[0].spacing();
  const auto table = offset_table(n, h, k);
  const auto tw = trapezoid_weights(n, h);

  EvolutionHistory hist;
  hist.densities.push_back(densities);
  hist.objective.push_back(exact_objective(densities, k));
  for (std::size_t s = 0; s < sweeps; ++s) {
    double kl_sum = 0.0;
    for (std::size_t i = 0; i < densities.size(); ++i) {
      std::vector<double> gamma(n, 0.0);
      for (std::size_t j = 0; j < densities.size(); ++j) {
        if (j != i) accumulate_convolution(table, quadrature_masses(densities[j], tw), gamma);
      }
      // Shifting gamma by a constant only rescales the normaliser.
      const double shift = *std::min_element(gamma.begin(), gamma.end());
      GridDensity next{densities[i].xs, std::vector<double>(n)};
      for (std::size_t a = 0; a < n; ++a) next.ps[a] = densities[i].ps[a] * std::exp(-(gamma[a] - shift));
      const double z = next.integral();
      if (!(z > 0.0) || !std::isfinite(z)) {
        throw NumericalError(fmt::format("exact_update: normaliser of agent {} underflowed in sweep {}", i, s + 1));
      }
      for (double& p : next.ps) p /= z;
      kl_sum += grid_kl(next, densities[i]);
      densities[i] = std::move(next);
    }
    hist.kl_sum.push_back(kl_sum);
    hist.densities.push_back(densities);
    hist.objective.push_back(exact_objective(densities, k));
  }
  return hist;
}

double ks_distance(const GridDensity& grid, std::span<const double> samples, std::span<const double> weights) {
  if (samples.size() != weights.size()) throw PreconditionError("ks_distance: samples and weights differ in length");
  if (samples.empty()) throw PreconditionError("ks_distance: no samples");
  double wsum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw PreconditionError("ks_distance: weights must be finite and >= 0");
    wsum += w;
  }
  if (!(wsum > 0.0)) throw PreconditionError("ks_distance: all sample weights are zero");

  const std::size_t n = grid.xs.size();
  const auto tw = trapezoid_weights(n, grid.spacing());
  std::vector<double> mass(n);
  double gsum = 0.0;
  for (std::size_t a = 0; a < n; ++a) gsum += mass[a] = tw[a] * grid.ps[a];
  if (!(gsum > 0.0)) throw PreconditionError("ks_distance: grid density has no mass");

  std::vector<std::size_t> order(samples.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return samples[a] < samples[b]; });

  // Both CDFs are right-continuous step functions; the supremum is attained
  // right after some jump, so walk all jump locations in ascending order.
  double fg = 0.0, fs = 0.0, ks = 0.0;
  std::size_t a = 0, s = 0;
  while (a < n || s < order.size()) {
    const double xg = a < n ? grid.xs[a] : std::numeric_limits<double>::infinity();
    const double xs = s < order.size() ? samples[order[s]] : std::numeric_limits<double>::infinity();
    const double x = std::min(xg, xs);
    while (a < n && grid.xs[a] == x) fg += mass[a++] / gsum;
    while (s < order.size() && samples[order[s]] == x) fs += weights[order[s++]] / wsum;
    ks = std::max(ks, std::abs(fg - fs));
  }
  return std::min(ks, 1.0);
}

void write_evolution_csv(std::ostream& os, const EvolutionHistory& h) {
  os << "sweep,agent,x,p\n";
  for (std::size_t s = 0; s < h.densities.size(); ++s) {
    for (std::size_t i = 0; i < h.densities[s].size(); ++i) {
      const auto& d = h.densities[s][i];
      for (std::size_t a = 0; a < d.xs.size(); ++a) fmt::print(os, "{},{},{},{}\n", s, i, d.xs[a], d.ps[a]);
    }
  }
}

Scenario1d Scenario1d::wide() {
  Scenario1d s;
  s.means = {-0.5, 0.0, 0.5};
  s.sds = {1.0, 1.0, 1.0};
  s.grid_lo = -8.5;
  s.grid_hi = 8.5;
  return s;
}

void Scenario1d::validate() const {
  if (means.empty() || means.size() != sds.size()) {
    throw PreconditionError("scenario: means and sds must be non-empty and of equal length");
  }
  for (double sd : sds) {
    if (!(sd > 0.0)) throw PreconditionError("scenario: sds must be positive");
  }
  kernel().validate();
  if (grid_points < 2 || !(grid_hi > grid_lo)) throw PreconditionError("scenario: invalid grid");
}

std::vector<GridDensity> Scenario1d::initial_densities() const {
  validate();
  const auto xs = uniform_grid(grid_lo, grid_hi, grid_points);
  std::vector<GridDensity> out;
  for (std::size_t i = 0; i < means.size(); ++i) out.push_back(make_gaussian(xs, means[i], sds[i]));
  return out;
}

std::vector<SampleSet> Scenario1d::initial_samples(std::size_t m, std::uint64_t seed) const {
  validate();
  if (m == 0) throw PreconditionError("scenario: m must be >= 1");
  std::vector<SampleSet> out;
  for (std::size_t i = 0; i < means.size(); ++i) {
    std::mt19937_64 rng(seed + i);
    std::normal_distribution<double> normal(means[i], sds[i]);
    std::vector<double> xs(m);
    for (double& x : xs) x = normal(rng);
    out.push_back(SampleSet::from_points(static_cast<int>(i), xs));
  }
  return out;
}

}  // namespace distnav
