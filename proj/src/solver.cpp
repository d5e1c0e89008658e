#include "viscodecay/solver.hpp"

#include "viscodecay/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace viscodecay {

std::size_t SimConfig::step_count() const {
  return static_cast<std::size_t>(std::llround(t_end / dt));
}

std::vector<std::string> SimConfig::violations(const DomainSpec& dom) const {
  std::vector<std::string> out;
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    out.push_back("time.dt must be positive");
    return out;
  }
  if (!(t_end > 0.0) || !std::isfinite(t_end))
    out.push_back("time.t_end must be positive");
  const double cfl = 0.5 * dom.min_spacing() / std::sqrt(static_cast<double>(dom.dim()));
  if (dt > cfl * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "time.dt = " << dt << " violates CFL bound dt <= 0.5 h / sqrt(dim) = " << cfl
        << " (h = " << dom.min_spacing() << ")";
    out.push_back(msg.str());
  }
  const double ratio = t_end / dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio))
    out.push_back("time.t_end / time.dt must be an integer");
  if (history_stride == 0)
    out.push_back("time.history_stride must be positive");
  if (output_stride == 0)
    out.push_back("time.output_stride must be positive");
  if (!(blowup_threshold > 0.0))
    out.push_back("time.blowup_threshold must be positive");
  return out;
}

double damping_solve(double r, double dt, double a, double m) {
  const double c = dt * a;
  if (c == 0.0 || r == 0.0)
    return r / (1.0 + c);
  if (m == 2.0)
    return r / (1.0 + c);

  // phi(y) = y + c y^{m-1} - |r| is increasing and convex on y >= 0, so
  // Newton started from an upper bound decreases monotonically to the root.
  const double target = std::abs(r);
  double lo = 0.0;
  double hi = std::min(target, std::pow(target / c, 1.0 / (m - 1.0)));
  double y = hi;
  for (int it = 0; it < 200; ++it) {
    const double pw = std::pow(y, m - 2.0);
    const double phi = y + c * pw * y - target;
    if (phi > 0.0)
      hi = y;
    else
      lo = y;
    const double dphi = 1.0 + c * (m - 1.0) * pw;
    double next = y - phi / dphi;
    if (!(next > lo && next < hi))
      next = 0.5 * (lo + hi);
    if (std::abs(next - y) <= 1e-13 * std::max(1.0, y)) {
      y = next;
      break;
    }
    y = next;
  }
  return std::copysign(y, r);
}

Field memory_term(const SimState& state, const Model& model) {
  if (model.kernel.is_zero() || state.t == 0.0)
    return model.dom.zeros();
  return laplacian(state.history.convolve(model.kernel, state.t, state.u), model.dom);
}

Field acceleration(const SimState& state, const Model& model) {
  Field w = laplacian(state.u, model.dom);
  if (!model.kernel.is_zero() && state.t > 0.0) {
    const Field mem = memory_term(state, model);
    for (std::size_t k = 0; k < w.size(); ++k)
      w[k] -= mem[k];
  }
  if (model.b != 0.0) {
    for (std::size_t k = 0; k < w.size(); ++k) {
      const double u = state.u[k];
      if (u != 0.0)
        w[k] += model.b * std::pow(std::abs(u), model.p[k] - 2.0) * u;
    }
  }
  apply_dirichlet(w, model.dom);
  return w;
}

SimState initialize(const Model& model, const SimConfig& cfg, const Field& u0, const Field& u1) {
  const auto& dom = model.dom;
  dom.require_field(u0, "initial displacement");
  dom.require_field(u1, "initial velocity");
  dom.require_field(model.m.values(), "damping exponent");
  dom.require_field(model.p.values(), "source exponent");
  if (const auto bad = cfg.violations(dom); !bad.empty())
    throw InputError(bad.front());
  for (std::size_t k = 0; k < u0.size(); ++k) {
    if (!std::isfinite(u0[k]) || !std::isfinite(u1[k]))
      throw InputError("initial data must be finite");
    if (dom.on_boundary(k) && (u0[k] != 0.0 || u1[k] != 0.0))
      throw InputError("initial data must vanish on the boundary");
  }

  SimState state;
  state.t = 0.0;
  state.step = 0;
  state.u = u0;
  state.v = u1;
  state.history = MemoryHistory(model.kernel, dom, cfg.memory, cfg.history_stride, cfg.dt);
  state.history.record(0, 0.0, state.u);
  state.accel = acceleration(state, model);
  return state;
}

namespace {

void damped_kick(Field& v, const Field& accel, double tau, const Model& model) {
  for (std::size_t k = 0; k < v.size(); ++k)
    v[k] = damping_solve(v[k] + tau * accel[k], tau, model.a, model.m[k]);
  apply_dirichlet(v, model.dom);
}

bool all_finite(const Field& f) {
  return std::all_of(f.begin(), f.end(), [](double x) { return std::isfinite(x); });
}

} // namespace

StepStatus step(SimState& state, const Model& model, const SimConfig& cfg) {
  const double half = 0.5 * cfg.dt;
  damped_kick(state.v, state.accel, half, model);
  for (std::size_t k = 0; k < state.u.size(); ++k)
    state.u[k] += cfg.dt * state.v[k];
  apply_dirichlet(state.u, model.dom);

  state.step += 1;
  state.t = static_cast<double>(state.step) * cfg.dt;
  if (!all_finite(state.u))
    return StepStatus::NonFinite;
  state.history.record(state.step, state.t, state.u);
  state.accel = acceleration(state, model);
  damped_kick(state.v, state.accel, half, model);
  if (!all_finite(state.v) || !all_finite(state.accel))
    return StepStatus::NonFinite;
  return StepStatus::Ok;
}

Trajectory run(const Model& model, const SimConfig& cfg, const Field& u0, const Field& u1) {
  SimState state = initialize(model, cfg, u0, u1);
  const double sqrt_l = model.kernel.is_zero() ? 1.0 : std::sqrt(std::max(0.0, model.kernel.l()));

  Trajectory traj;
  traj.output_dt = cfg.dt * static_cast<double>(cfg.output_stride);
  auto record = [&] {
    TrajectoryPoint pt;
    pt.energy = total_energy(state, model, cfg.dt);
    pt.lambda = sqrt_l * std::sqrt(grad_sq_norm(state.u, model.dom));
    traj.points.push_back(pt);
  };
  record();

  const std::size_t steps = cfg.step_count();
  for (std::size_t n = 0; n < steps; ++n) {
    const StepStatus status = step(state, model, cfg);
    double sup = 0.0;
    for (double x : state.u)
      sup = std::max(sup, std::abs(x));
    if (status == StepStatus::NonFinite || !std::isfinite(sup) || sup > cfg.blowup_threshold) {
      traj.outcome = {Outcome::Kind::BlewUp, state.t};
      return traj;
    }
    if (state.step % cfg.output_stride == 0)
      record();
  }
  traj.outcome = {Outcome::Kind::Completed, state.t};
  return traj;
}

} // namespace viscodecay
