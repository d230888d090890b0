#include "distnav/collision.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace distnav {

void CollisionKernel::validate() const {
  if (!(weight > 0.0) || !(sigma > 0.0)) {
    throw PreconditionError(fmt::format("CollisionKernel: weight {} and sigma {} must be positive", weight, sigma));
  }
  if (dimension != 1 && dimension != 2) throw PreconditionError("CollisionKernel: dimension must be 1 or 2");
}

double CollisionKernel::peak() const {
  if (dimension == 1) return weight / (std::sqrt(2.0 * std::numbers::pi) * sigma);
  return weight / (2.0 * std::numbers::pi * sigma * sigma);
}

double CollisionKernel::at_distance(double d) const {
  const auto g = gaussian();
  return g.peak * simd::exp_approx(d * d * g.neg_inv_two_var);
}

double pairwise_penalty(const Trajectory& a, const Trajectory& b, const CollisionKernel& k) {
  k.validate();
  require_same_grid(a.grid, b.grid, "pairwise_penalty");
  const std::size_t T = a.grid.steps;
  std::vector<double> ax(T), ay(T), bx(T), by(T);
  for (std::size_t t = 0; t < T; ++t) {
    ax[t] = a.states[t].x;
    ay[t] = a.states[t].y;
    bx[t] = b.states[t].x;
    by[t] = b.states[t].y;
  }
  double out = 0.0;
  simd::kernels().penalty_row(ax.data(), ay.data(), {bx.data(), by.data(), 1, T}, k.gaussian(), &out);
  return out;
}

PenaltyMatrix::PenaltyMatrix(std::size_t r, std::size_t c, std::vector<double> v)
    : rows(r), cols(c), values(std::move(v)) {
  if (values.size() != rows * cols) throw PreconditionError("PenaltyMatrix: size mismatch");
  for (double x : values) {
    if (!(x >= 0.0)) throw PreconditionError("PenaltyMatrix: entries must be non-negative");
  }
}

PenaltyMatrix PenaltyMatrix::transposed() const {
  std::vector<double> t(values.size());
  for (std::size_t y = 0; y < rows; ++y) {
    for (std::size_t z = 0; z < cols; ++z) t[z * rows + y] = values[y * cols + z];
  }
  return PenaltyMatrix(cols, rows, std::move(t));
}

PenaltyMatrix penalty_matrix(const SampleSet& a, const SampleSet& b, const CollisionKernel& k) {
  k.validate();
  require_same_grid(a.grid(), b.grid(), "penalty_matrix");
  const std::size_t T = a.grid().steps;
  const auto& kern = simd::kernels();
  const auto g = k.gaussian();
  PenaltyMatrix out;
  out.rows = a.size();
  out.cols = b.size();
  out.values.resize(out.rows * out.cols);
  std::vector<double> ax(T), ay(T);
  for (std::size_t y = 0; y < a.size(); ++y) {
    a.paths().gather(y, ax.data(), ay.data());
    kern.penalty_row(ax.data(), ay.data(), b.paths().block(), g, out.values.data() + y * out.cols);
  }
  return out;
}

double expected_penalty(const SampleSet& a, const SampleSet& b, const CollisionKernel& k) {
  k.validate();
  require_same_grid(a.grid(), b.grid(), "expected_penalty");
  const std::size_t T = a.grid().steps;
  const auto& kern = simd::kernels();
  const auto g = k.gaussian();
  const auto wa = a.weights();
  const auto wb = b.weights();
  std::vector<double> ax(T), ay(T);
  double total = 0.0;
  for (std::size_t y = 0; y < a.size(); ++y) {
    if (wa[y] == 0.0) continue;
    a.paths().gather(y, ax.data(), ay.data());
    total += wa[y] * kern.penalty_dot(ax.data(), ay.data(), b.paths().block(), g, wb.data());
  }
  return total / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

double joint_expected_penalty(std::span<const SampleSet> sets, const CollisionKernel& k) {
  if (sets.size() < 2) throw PreconditionError("joint_expected_penalty: at least two sample sets required");
  double total = 0.0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = i + 1; j < sets.size(); ++j) total += expected_penalty(sets[i], sets[j], k);
  }
  return total;
}

}  // namespace distnav
