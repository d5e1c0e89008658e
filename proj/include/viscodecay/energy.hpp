#pragma once

#include "viscodecay/model.hpp"
#include "viscodecay/state.hpp"

#include <vector>

namespace viscodecay {

/// All energy components of a state, with the solver's quadratures.
/// fd_step is only used for the derivative of sampled kernels.
EnergyRecord total_energy(const SimState& state, const Model& model, double fd_step);

/// -a int |u_t|^{m(x)} - (1/2) g(t) ||grad u||^2 + (1/2) int_0^t g'(t-s) ||grad u(t) - grad u(s)||^2 ds
double dissipation_rate(const SimState& state, const Model& model, double fd_step);

struct ResidualSeries {
  /// r_i = (E_{i+1} - E_i) / dt - (D_i + D_{i+1}) / 2
  std::vector<double> residuals;
  double max_abs = 0.0;
  /// Root mean square of the series.
  double l2 = 0.0;
};

/// Discrete audit of dE/dt = dissipation along a trajectory.
ResidualSeries energy_identity_residual(const Trajectory& traj);

} // namespace viscodecay
