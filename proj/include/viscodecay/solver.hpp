#pragma once

#include "viscodecay/energy.hpp"
#include "viscodecay/model.hpp"
#include "viscodecay/state.hpp"

namespace viscodecay {

/// Unique root of v + dt a |v|^{m-2} v = r, by safeguarded Newton on |v|.
double damping_solve(double r, double dt, double a, double m);

/// int_0^t g(t - s) Lap u(s) ds at the state's time.
Field memory_term(const SimState& state, const Model& model);

/// Lap u - memory term + b |u|^{p-2} u.
Field acceleration(const SimState& state, const Model& model);

/// State at t = 0 with u0 recorded in the history. Throws InputError if the
/// data are not Dirichlet-compatible or the configuration is invalid.
SimState initialize(const Model& model, const SimConfig& cfg, const Field& u0, const Field& u1);

enum class StepStatus { Ok, NonFinite };

/// Advances the state by one step of cfg.dt, in place:
///   v^{n+1/2} = D_{dt/2}(v^n + dt/2 w^n),  u^{n+1} = u^n + dt v^{n+1/2},
///   v^{n+1}   = D_{dt/2}(v^{n+1/2} + dt/2 w^{n+1}),
/// where w is acceleration() and D_tau applies damping_solve(., tau, a, m(x)) nodewise.
StepStatus step(SimState& state, const Model& model, const SimConfig& cfg);

/// Integrates to cfg.t_end, recording energies every output_stride steps.
/// Stops early with BlewUp once ||u||_inf exceeds the threshold or a
/// non-finite value appears.
Trajectory run(const Model& model, const SimConfig& cfg, const Field& u0, const Field& u1);

} // namespace viscodecay
