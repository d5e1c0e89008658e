#include "viscodecay/energy.hpp"

#include "viscodecay/errors.hpp"

#include <cmath>
#include <string>

namespace viscodecay {

namespace {

void require_finite(double value, const char* component) {
  if (!std::isfinite(value))
    throw NumericalError(std::string("non-finite energy component: ") + component);
}

} // namespace

EnergyRecord total_energy(const SimState& state, const Model& model, double fd_step) {
  const auto& dom = model.dom;
  const auto& w = dom.weights();
  EnergyRecord r;
  r.t = state.t;
  r.kinetic = 0.5 * inner(state.v, state.v, dom);
  const double grad_sq = grad_sq_norm(state.u, dom);
  r.elastic = 0.5 * (1.0 - model.kernel.mass(state.t)) * grad_sq;
  r.memory = 0.5 * state.history.gap(model.kernel, state.t, state.u);
  double source = 0.0;
  if (model.b != 0.0) {
    for (std::size_t k = 0; k < state.u.size(); ++k) {
      const double p = model.p[k];
      if (state.u[k] != 0.0)
        source += w[k] * std::pow(std::abs(state.u[k]), p) / p;
    }
  }
  r.source_modular = model.b * source;
  r.scriptE = r.kinetic + r.elastic + r.memory;
  r.E = r.scriptE - r.source_modular;
  r.dissipation = dissipation_rate(state, model, fd_step);

  require_finite(r.kinetic, "kinetic");
  require_finite(r.elastic, "elastic");
  require_finite(r.memory, "memory");
  require_finite(r.source_modular, "source_modular");
  require_finite(r.dissipation, "dissipation");
  return r;
}

double dissipation_rate(const SimState& state, const Model& model, double fd_step) {
  const auto& dom = model.dom;
  const auto& w = dom.weights();
  double damping = 0.0;
  if (model.a != 0.0) {
    for (std::size_t k = 0; k < state.v.size(); ++k)
      if (state.v[k] != 0.0)
        damping += w[k] * std::pow(std::abs(state.v[k]), model.m[k]);
  }
  const double grad_sq = grad_sq_norm(state.u, dom);
  return -model.a * damping - 0.5 * model.kernel.g(state.t) * grad_sq +
         0.5 * state.history.gap_rate(model.kernel, state.t, state.u, fd_step);
}

ResidualSeries energy_identity_residual(const Trajectory& traj) {
  ResidualSeries out;
  const auto& pts = traj.points;
  if (pts.size() < 2)
    return out;
  double sq = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const auto& a = pts[i].energy;
    const auto& b = pts[i + 1].energy;
    const double dt = b.t - a.t;
    const double r = (b.E - a.E) / dt - 0.5 * (a.dissipation + b.dissipation);
    out.residuals.push_back(r);
    out.max_abs = std::max(out.max_abs, std::abs(r));
    sq += r * r;
  }
  out.l2 = std::sqrt(sq / static_cast<double>(out.residuals.size()));
  return out;
}

} // namespace viscodecay
