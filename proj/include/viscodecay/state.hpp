#pragma once

#include "viscodecay/domain.hpp"
#include "viscodecay/memory.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace viscodecay {

struct SimConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  double blowup_threshold = 1e6;
  std::size_t history_stride = 1;
  /// Energy records are taken every output_stride steps.
  std::size_t output_stride = 1;
  MemoryMode memory = MemoryMode::Full;

  std::size_t step_count() const;
  /// dt <= 0.5 h / sqrt(dim), t_end / dt integral, positive strides.
  std::vector<std::string> violations(const DomainSpec& dom) const;
};

struct SimState {
  double t = 0.0;
  std::size_t step = 0;
  Field u;
  /// u_t at time t
  Field v;
  /// Explicit part of u_tt at time t: Lap u - memory term + source.
  Field accel;
  MemoryHistory history;
};

/// One row of the energy bookkeeping.
struct EnergyRecord {
  double t = 0.0;
  /// (1/2) ||u_t||^2
  double kinetic = 0.0;
  /// (1/2) (1 - int_0^t g) ||grad u||^2
  double elastic = 0.0;
  /// (1/2) int_0^t g(t-s) ||grad u(t) - grad u(s)||^2 ds
  double memory = 0.0;
  /// b int |u|^{p(x)} / p(x)
  double source_modular = 0.0;
  double E = 0.0;
  /// Quadratic energy E + source_modular
  double scriptE = 0.0;
  /// Right-hand side of dE/dt
  double dissipation = 0.0;
};

struct TrajectoryPoint {
  EnergyRecord energy;
  /// sqrt(l) ||grad u(t)||_2
  double lambda = 0.0;
};

struct Outcome {
  enum class Kind { Completed, BlewUp };
  Kind kind = Kind::Completed;
  double time = 0.0;

  bool blew_up() const { return kind == Kind::BlewUp; }
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  Outcome outcome;
  /// Spacing between consecutive records.
  double output_dt = 0.0;
};

} // namespace viscodecay
