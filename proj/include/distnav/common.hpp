#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace distnav {

/// Raised when an operation is called outside its documented preconditions.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised on numerical breakdown (singular Gram matrix, weight underflow, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for malformed user input (config files, datasets, run logs).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  friend bool operator==(Vec2 a, Vec2 b) = default;

  double norm() const { return std::hypot(x, y); }
  double squared_norm() const { return x * x + y * y; }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// Sum of segment lengths of a polyline, accumulated front to back.
double path_arc_length(const std::vector<Vec2>& positions);

/// Uniform time grid {t0, t0 + dt, ..., t0 + (T-1) dt}.
struct TimeGrid {
  double t0 = 0.0;
  double dt = 0.4;
  std::size_t steps = 20;

  TimeGrid() = default;
  TimeGrid(double start, double step, std::size_t count);

  double time(std::size_t k) const { return t0 + dt * static_cast<double>(k); }
  std::vector<double> times() const;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

/// Planar positions sampled on a TimeGrid.
struct Trajectory {
  TimeGrid grid;
  std::vector<Vec2> states;

  Trajectory() = default;
  Trajectory(TimeGrid g, std::vector<Vec2> s);

  std::size_t size() const { return states.size(); }
  const Vec2& operator[](std::size_t k) const { return states[k]; }
};

void require_same_grid(const TimeGrid& a, const TimeGrid& b, const char* what);

}  // namespace distnav
