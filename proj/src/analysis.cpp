#include "viscodecay/analysis.hpp"

#include "viscodecay/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace viscodecay {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Largest Young/Cauchy parameter accepted by the balance split.
constexpr double kParameterCap = 0.99;

// Convergence suite (stable-set run, h in [0.005, 0.04], dt = h/4): the gap
// between discrete and reference energies stays below 0.15 (dt + h^2) E(0).
constexpr double kSchemeAllowance = 1.0;

ConditionItem less_than(std::string name, double lhs, double rhs) {
  return {std::move(name), lhs, rhs, rhs - lhs, lhs < rhs};
}

void finalize(ConditionReport& report) {
  report.ok = std::all_of(report.items.begin(), report.items.end(),
                          [](const ConditionItem& item) { return item.pass; });
}

} // namespace

StableSetConstants stable_set_constants_from_B1(double B1, double l, double b, double p1,
                                                double p2) {
  if (!(p1 > 2.0) || !(p2 >= p1))
    throw InputError("stable-set constants need 2 < p1 <= p2");
  if (!(b > 0.0))
    throw InputError("stable-set constants need b > 0");
  if (!(B1 >= 1.0))
    throw InputError("B1 must be at least 1");
  StableSetConstants c;
  c.B1 = B1;
  c.l = l;
  c.b = b;
  c.p1 = p1;
  c.p2 = p2;
  c.lambda1 = std::pow(1.0 / (b * std::pow(B1, p1)), 1.0 / (p1 - 2.0));
  c.E1 = (0.5 - 1.0 / p1) * c.lambda1 * c.lambda1;
  return c;
}

StableSetConstants stable_set_constants(double B, double l, double b, double p1, double p2) {
  if (!(B > 0.0))
    throw InputError("embedding constant must be positive");
  if (!(l > 0.0))
    throw InputError("stable-set constants need l > 0");
  if (!(b > 0.0))
    throw InputError("stable-set constants need b > 0");
  const double B1 = std::max({1.0, B / std::sqrt(l), 1.0 / std::sqrt(b)});
  auto c = stable_set_constants_from_B1(B1, l, b, p1, p2);
  c.B = B;
  return c;
}

double f_lambda(double lambda, const StableSetConstants& c) {
  if (!(lambda >= 0.0))
    throw InputError("f_lambda: lambda must be nonnegative");
  const double power = std::max(std::pow(lambda, c.p1), std::pow(lambda, c.p2));
  return 0.5 * lambda * lambda - c.b / c.p1 * std::pow(c.B1, c.p1) * power;
}

Verdict solve_lambda2(double E0, const StableSetConstants& c) {
  if (!(E0 > 0.0 && E0 < c.E1))
    return {false, kNaN, "E(0) outside (0, E1): no root of f(lambda) = E(0) below lambda1"};
  double lo = 0.0;
  double hi = c.lambda1;
  for (int it = 0; it < 400 && hi - lo > 1e-15 * c.lambda1; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi)
      break;
    if (f_lambda(mid, c) < E0)
      lo = mid;
    else
      hi = mid;
  }
  return {true, 0.5 * (lo + hi), ""};
}

Verdict compute_Ctilde(double lambda2, const StableSetConstants& c) {
  const double s = 2.0 * c.b * std::pow(c.B1, c.p2) / c.p1 * std::pow(lambda2, c.p1 - 2.0);
  if (!(s < 1.0))
    return {false, kNaN, "Ctilde undefined: 2 b B1^p2 lambda2^(p1-2) / p1 >= 1"};
  return {true, s / (1.0 - s), ""};
}

StableSetConstants complete_constants(StableSetConstants c, double E0, double lambda0) {
  c.lambda0 = lambda0;
  c.has_lambda2 = false;
  c.has_Ctilde = false;
  const auto l2 = solve_lambda2(E0, c);
  if (!l2.ok)
    return c;
  c.lambda2 = l2.value;
  c.has_lambda2 = true;
  const auto ct = compute_Ctilde(c.lambda2, c);
  if (!ct.ok)
    return c;
  c.Ctilde = ct.value;
  c.has_Ctilde = true;
  c.omega_small = (1.0 - 2.0 / c.p2) * c.Ctilde * c.p2;
  return c;
}

const ConditionItem* ConditionReport::find(const std::string& name) const {
  for (const auto& item : items)
    if (item.name == name)
      return &item;
  return nullptr;
}

ConditionReport check_decay_conditions(double E0, const StableSetConstants& c,
                                       const Admissibility& kernel) {
  ConditionReport report;
  const double threshold = std::pow(c.p1 / c.p2, 1.0 / (c.p1 - 2.0)) * c.lambda1 * c.lambda1 *
                           (0.5 - 1.0 / c.p2);
  report.items.push_back(less_than("E0_positive", 0.0, E0));
  report.items.push_back(less_than("E0_below_decay_threshold", E0, threshold));
  report.items.push_back(less_than("lambda0_below_lambda1", c.lambda0, c.lambda1));
  ConditionItem admissible{"kernel_admissible", 0.0, kernel.l, kernel.l, kernel.ok};
  report.items.push_back(admissible);
  if (c.has_Ctilde)
    report.items.push_back(less_than("omega_below_2", c.omega_small, 2.0));
  else
    report.items.push_back({"omega_below_2", kNaN, 2.0, kNaN, false});
  finalize(report);
  return report;
}

ConditionReport check_blowup_conditions(double E0, const StableSetConstants& c,
                                        const Admissibility& kernel, double m2) {
  ConditionReport report;
  report.items.push_back(less_than("m2_below_p1", m2, c.p1));
  report.items.push_back({"kernel_admissible", 0.0, kernel.l, kernel.l, kernel.ok});
  report.items.push_back(less_than("kernel_mass_below_bound", kernel.mass, blowup_mass_bound(c.p1)));
  const double factor = 1.0 - (1.0 - c.l) / (c.p1 * (c.p1 - 2.0) * c.l);
  report.items.push_back(less_than("E0_below_blowup_threshold", E0, factor * c.E1));
  report.items.push_back(less_than("lambda0_above_lambda1", c.lambda1, c.lambda0));
  finalize(report);
  return report;
}

InvariantSetReport check_invariant_set(const Trajectory& traj, double lambda2, double tol) {
  InvariantSetReport report;
  report.worst_excess = -std::numeric_limits<double>::infinity();
  const double bound = lambda2 * lambda2;
  for (const auto& pt : traj.points) {
    const double excess = pt.lambda * pt.lambda - bound;
    if (excess > report.worst_excess) {
      report.worst_excess = excess;
      report.worst_t = pt.energy.t;
    }
  }
  report.ok = traj.points.empty() || report.worst_excess <= tol;
  if (traj.points.empty())
    report.worst_excess = 0.0;
  return report;
}

DampingCase damping_case(double m1, double m2) {
  if (m1 > 2.0)
    return DampingCase::Superlinear;
  if (m2 > 2.0)
    return DampingCase::Mixed;
  return DampingCase::Linear;
}

namespace {

struct BalanceTerm {
  double coefficient;
  // parameter = (target / coefficient)^inverse_power
  double inverse_power;
  bool present;
};

// Splits (2 - omega)/2 equally over the present terms of
//   c_young eps^{m2/(m2-2)} + c_cauchy eps' + c_delta delta^{m1} = (2 - omega)/2
// and inverts each term. If a parameter lands at or above the cap, every
// target shrinks by the same factor, which only lowers the left-hand side.
BalanceSplit split_balance(const DecayInputs& in, DampingCase dcase) {
  const auto& c = in.c;
  const double one_c = 1.0 + c.Ctilde;
  const double omega_sum = (2.0 - c.omega_small) / 2.0;
  const double measure_sq = (1.0 + in.domain_measure) * (1.0 + in.domain_measure);

  BalanceTerm young{0.0, 0.0, false};
  if (dcase == DampingCase::Superlinear) {
    const double energy_factor =
        std::max(std::pow(in.E0, (in.m2 - in.m1) / (in.m1 - 2.0)), 1.0);
    young = {2.0 * measure_sq * energy_factor, (in.m2 - 2.0) / in.m2, true};
  } else if (dcase == DampingCase::Mixed) {
    young = {2.0 * measure_sq, (in.m2 - 2.0) / in.m2, true};
  }
  const BalanceTerm cauchy{one_c * (1.0 - c.l) / c.l, 1.0, true};
  const BalanceTerm delta{in.a * 2.0 * std::pow(c.B1, in.m2) / std::pow(c.l, in.m2 / 2.0) * one_c,
                          1.0 / in.m1, true};

  BalanceSplit split;
  split.terms = young.present ? 3 : 2;
  const double target = omega_sum / split.terms;

  double shrink = 1.0;
  for (const BalanceTerm* term : std::array<const BalanceTerm*, 3>{&young, &cauchy, &delta}) {
    if (!term->present || term->coefficient <= 0.0)
      continue;
    // (s target / coef)^q <= cap  <=>  s <= cap^{1/q} coef / target
    const double limit = std::pow(kParameterCap, 1.0 / term->inverse_power) * term->coefficient / target;
    shrink = std::min(shrink, limit);
  }
  split.shrink = shrink;
  split.per_term_target = shrink * target;

  auto invert = [&](const BalanceTerm& term) {
    if (!term.present)
      return 0.0;
    if (term.coefficient <= 0.0)
      return kParameterCap;
    return std::pow(split.per_term_target / term.coefficient, term.inverse_power);
  };
  split.eps_young = invert(young);
  split.eps_cauchy = invert(cauchy);
  split.delta = invert(delta);
  return split;
}

std::string validate_common(const DecayInputs& in) {
  if (!in.c.has_Ctilde)
    return "decay constants unavailable: Ctilde undefined for this E(0)";
  if (!(in.c.omega_small < 2.0))
    return "decay constants unavailable: omega = (1 - 2/p2) Ctilde p2 >= 2";
  if (!(in.m1 >= 2.0 && in.m2 >= in.m1))
    return "decay constants need 2 <= m1 <= m2";
  if (!(in.a > 0.0))
    return "decay constants need a > 0";
  if (!(in.E0 > 0.0))
    return "decay constants need E(0) > 0";
  if (!(in.omega1 > 0.0) || !(in.domain_measure > 0.0))
    return "decay constants need a positive eigenvalue and domain measure";
  if (!(in.c.l > 0.0 && in.c.l <= 1.0))
    return "decay constants need 0 < l <= 1";
  return "";
}

// Terms shared by both kernel classes:
//   [lead (1+C)/(omega1 l) + lead (1+C)] + [gamma (1+C)/(omega1 l (gamma+1)) + gamma (1+C)/(gamma+1)]
//   + damping term + delta^{-m1/(m1-1)} / (gamma + 1)
double common_bracket(const DecayInputs& in, DampingCase dcase, double gamma,
                      const BalanceSplit& split, double lead) {
  const auto& c = in.c;
  const double one_c = 1.0 + c.Ctilde;
  const double ol = in.omega1 * c.l;
  const double measure_sq = (1.0 + in.domain_measure) * (1.0 + in.domain_measure);

  double bracket = lead * one_c / ol + lead * one_c;
  bracket += gamma * one_c / (ol * (gamma + 1.0)) + gamma * one_c / (gamma + 1.0);

  switch (dcase) {
  case DampingCase::Superlinear:
    bracket += 2.0 * measure_sq * std::pow(split.eps_young, -in.m2 / 2.0) /
               (in.a * std::pow(in.E0, gamma));
    break;
  case DampingCase::Mixed:
    // From the m1 = 2 estimate: the |u_t|^2 part integrates -E'/a exactly and
    // contributes 2(1+|Omega|)^2 / ((gamma+1) a); the Young remainder keeps the
    // 1/a factor of the damping identity, as in the m1 > 2 case.
    bracket += 2.0 * measure_sq / ((gamma + 1.0) * in.a);
    bracket += 2.0 * measure_sq * std::pow(split.eps_young, -in.m2 / 2.0) /
               (in.a * std::pow(in.E0, gamma));
    break;
  case DampingCase::Linear:
    bracket += 2.0 / ((gamma + 1.0) * in.a);
    break;
  }
  bracket += std::pow(split.delta, -in.m1 / (in.m1 - 1.0)) / (gamma + 1.0);
  return bracket;
}

} // namespace

KResult compute_K(const DecayInputs& in, double xi0) {
  KResult out;
  out.damping = damping_case(in.m1, in.m2);
  out.gamma = out.damping == DampingCase::Linear ? 0.0 : (in.m2 - 2.0) / 2.0;
  if (auto err = validate_common(in); !err.empty()) {
    out.reason = err;
    return out;
  }
  if (!(xi0 > 0.0)) {
    out.reason = "decay constants need xi(0) > 0";
    return out;
  }
  out.split = split_balance(in, out.damping);
  const double gamma = out.gamma;
  double bracket = common_bracket(in, out.damping, gamma, out.split, 3.0);
  bracket += (1.0 + 1.0 / (2.0 * out.split.eps_cauchy)) * 2.0 / (xi0 * (gamma + 1.0));
  out.K = (2.0 - in.c.omega_small) / 2.0 / (xi0 * bracket);
  out.ok = out.K > 0.0 && std::isfinite(out.K);
  if (!out.ok)
    out.reason = "K is not a positive finite number";
  return out;
}

KResult compute_K_alpha_sigma(const DecayInputs& in, double alpha, double sigma, double C_ode,
                              double C_bound) {
  if (!(alpha > 1.0 && alpha < 2.0))
    throw InputError("K(alpha, sigma) needs 1 < alpha < 2");
  if (!(sigma > 0.0 && sigma < 1.0))
    throw InputError("K(alpha, sigma) needs 0 < sigma < 1");
  if (!(2.0 * alpha + sigma < 3.0))
    throw InputError("K(alpha, sigma) needs 2 alpha + sigma < 3");
  if (!(C_ode > 0.0) || !(C_bound > 0.0))
    throw InputError("K(alpha, sigma) needs positive kernel constants");

  KResult out;
  out.damping = damping_case(in.m1, in.m2);
  out.gamma = out.damping == DampingCase::Linear ? 0.0 : (in.m2 - 2.0) / 2.0;
  if (auto err = validate_common(in); !err.empty()) {
    out.reason = err;
    return out;
  }
  out.split = split_balance(in, out.damping);
  const double gamma = out.gamma;
  const double one_c = 1.0 + in.c.Ctilde;
  const double l = in.c.l;
  const double rho = (1.0 - sigma) / (alpha - 1.0);
  const double kappa = gamma * (sigma + alpha - 1.0) / sigma;

  double bracket = common_bracket(in, out.damping, gamma, out.split, 2.0);
  bracket += 2.0 / (C_ode * (gamma + 1.0));
  // both (1 - rho) and (2 - rho) are negative since rho > 2
  const double history = (alpha - 1.0) / (sigma + alpha - 1.0) * 4.0 * one_c / l /
                         std::pow(in.E0, gamma) * std::pow(C_bound, 1.0 - sigma) /
                         ((1.0 - rho) * (2.0 - rho));
  const double rate = sigma / (C_ode * (sigma + alpha - 1.0)) / (kappa + 1.0) *
                      std::pow(in.E0, kappa - gamma);
  bracket += (1.0 + 1.0 / (2.0 * out.split.eps_cauchy)) * (history + rate);
  out.K = (2.0 - in.c.omega_small) / 2.0 / bracket;
  out.ok = out.K > 0.0 && std::isfinite(out.K);
  if (!out.ok)
    out.reason = "K(alpha, sigma) is not a positive finite number";
  return out;
}

std::string to_string(EnvelopeKind kind) {
  switch (kind) {
  case EnvelopeKind::TypeIPoly:
    return "typeI_poly";
  case EnvelopeKind::TypeIExp:
    return "typeI_exp";
  case EnvelopeKind::TypeIIPoly:
    return "typeII_poly";
  case EnvelopeKind::TypeIIExp:
    return "typeII_exp";
  }
  return "unknown";
}

DecayEnvelope make_envelope(bool type_two, const KResult& k, double E0, double m2,
                            std::function<double(double)> xi_cumulative, double alpha,
                            double sigma) {
  if (!k.ok)
    throw InputError("make_envelope: decay constant unavailable (" + k.reason + ")");
  DecayEnvelope env;
  const bool poly = m2 > 2.0;
  if (type_two) {
    env.kind = poly ? EnvelopeKind::TypeIIPoly : EnvelopeKind::TypeIIExp;
    env.xi_cumulative = [](double t) { return t; };
  } else {
    env.kind = poly ? EnvelopeKind::TypeIPoly : EnvelopeKind::TypeIExp;
    if (!xi_cumulative)
      throw InputError("make_envelope: Type I envelope needs int_0^t xi");
    env.xi_cumulative = std::move(xi_cumulative);
  }
  env.gamma = poly ? (m2 - 2.0) / 2.0 : 0.0;
  env.K = k.K;
  env.E0 = E0;
  env.m2 = m2;
  env.alpha = alpha;
  env.sigma = sigma;
  return env;
}

double envelope(double t, const DecayEnvelope& env) {
  const double phi = env.xi_cumulative(t);
  switch (env.kind) {
  case EnvelopeKind::TypeIPoly:
  case EnvelopeKind::TypeIIPoly:
    return env.E0 * std::pow(env.m2 / (2.0 + env.K * (env.m2 - 2.0) * phi), 2.0 / (env.m2 - 2.0));
  case EnvelopeKind::TypeIExp:
  case EnvelopeKind::TypeIIExp:
    return env.E0 * std::exp(1.0 - env.K * phi);
  }
  return kNaN;
}

EnvelopeReport verify_envelope(const Trajectory& traj, const DecayEnvelope& env, double tol) {
  EnvelopeReport report;
  report.max_violation = -std::numeric_limits<double>::infinity();
  for (const auto& pt : traj.points) {
    const double bound = envelope(pt.energy.t, env);
    report.margins.push_back(bound - pt.energy.E);
    const double violation = pt.energy.E - bound * (1.0 + tol);
    if (violation > report.max_violation) {
      report.max_violation = violation;
      report.worst_t = pt.energy.t;
    }
  }
  if (traj.points.empty())
    report.max_violation = 0.0;
  report.ok = report.max_violation <= 0.0;
  return report;
}

double scheme_allowance(double dt, double h) { return kSchemeAllowance * (dt + h * h); }

namespace {

// int_{t_i}^{t_{i+1}} of the quadratic through three neighbouring samples,
// by two-point Gauss; trapezoid when only two samples exist.
double interval_integral(std::span<const double> t, const std::vector<double>& f, std::size_t i) {
  const std::size_t n = t.size();
  const double a = t[i], b = t[i + 1];
  if (n < 3)
    return 0.5 * (f[i] + f[i + 1]) * (b - a);
  const std::size_t j = i + 2 < n ? i : i - 1;
  const double x0 = t[j], x1 = t[j + 1], x2 = t[j + 2];
  auto q = [&](double x) {
    return f[j] * (x - x1) * (x - x2) / ((x0 - x1) * (x0 - x2)) +
           f[j + 1] * (x - x0) * (x - x2) / ((x1 - x0) * (x1 - x2)) +
           f[j + 2] * (x - x0) * (x - x1) / ((x2 - x0) * (x2 - x1));
  };
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a), g = 1.0 / std::sqrt(3.0);
  return half * (q(mid - half * g) + q(mid + half * g));
}

} // namespace

KomornikReport komornik_check(std::span<const double> t, std::span<const double> E,
                              std::span<const double> phi, std::span<const double> dphi,
                              double sigma, double omega,
                              const std::function<double(double)>& tail) {
  const std::size_t n = t.size();
  if (n < 2 || E.size() != n || phi.size() != n || dphi.size() != n)
    throw InputError("komornik_check: samples must share one grid of at least 2 points");
  if (!(sigma >= 0.0) || !(omega > 0.0))
    throw InputError("komornik_check: needs sigma >= 0 and omega > 0");
  if (phi[0] != 0.0)
    throw InputError("komornik_check: phi(0) must be 0");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(t[i] > t[i - 1]))
      throw InputError("komornik_check: times must increase");
    if (!(phi[i] > phi[i - 1]))
      throw InputError("komornik_check: phi must be strictly increasing");
    if (E[i] > E[i - 1])
      throw InputError("komornik_check: E must be nonincreasing");
  }

  KomornikReport report;
  const double tail_value = tail ? tail(t[n - 1]) : kNaN;
  if (std::isnan(tail_value)) {
    report.inconclusive = true;
    return report;
  }

  std::vector<double> integrand(n);
  for (std::size_t i = 0; i < n; ++i)
    integrand[i] = std::pow(E[i], 1.0 + sigma) * dphi[i];

  const double E0 = E[0];
  report.hypothesis_margin = std::numeric_limits<double>::infinity();
  report.conclusion_margin = std::numeric_limits<double>::infinity();
  bool hyp = true;
  bool concl = true;
  double running = tail_value;
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t i = n - 1 - r;
    if (i + 1 < n)
      running += interval_integral(t, integrand, i);
    const double rhs = std::pow(E0, sigma) * E[i] / omega;
    const double margin = rhs - running;
    if (margin < report.hypothesis_margin) {
      report.hypothesis_margin = margin;
      report.worst_t = t[i];
    }
    if (!(running <= rhs * (1.0 + 1e-6)))
      hyp = false;

    const double bound = sigma == 0.0
                             ? E0 * std::exp(1.0 - omega * phi[i])
                             : E0 * std::pow((1.0 + sigma) / (1.0 + omega * sigma * phi[i]),
                                             1.0 / sigma);
    report.conclusion_margin = std::min(report.conclusion_margin, bound - E[i]);
    if (!(E[i] <= bound * (1.0 + 1e-9)))
      concl = false;
  }
  report.hypothesis_ok = hyp;
  report.conclusion_ok = concl;
  return report;
}

std::string to_string(DecayFit::Class cls) {
  switch (cls) {
  case DecayFit::Class::Exponential:
    return "exponential";
  case DecayFit::Class::Polynomial:
    return "polynomial";
  case DecayFit::Class::Undetermined:
    return "undetermined";
  }
  return "unknown";
}

namespace {

struct LineFit {
  double slope = 0.0;
  double r2 = kNaN;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit fit;
  if (sxx == 0.0)
    return fit;
  fit.slope = sxy / sxx;
  // relative cut-off: log E this flat carries no rate information
  if (syy <= 1e-24 * std::max(1.0, my * my) * n)
    return fit;
  fit.r2 = sxy * sxy / (sxx * syy);
  return fit;
}

} // namespace

DecayFit fit_decay(std::span<const double> t, std::span<const double> E) {
  if (t.size() != E.size())
    throw InputError("fit_decay: t and E must have the same length");
  std::vector<double> ts, logE;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (E[i] > 0.0 && std::isfinite(E[i])) {
      ts.push_back(t[i]);
      logE.push_back(std::log(E[i]));
    }
  }
  DecayFit fit;
  fit.used = ts.size();
  if (ts.size() < 50)
    return fit;

  auto log1p_all = [](const std::vector<double>& xs) {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
      out[i] = std::log1p(xs[i]);
    return out;
  };

  // model choice over every positive record
  const LineFit exp_all = least_squares(ts, logE);
  const LineFit poly_all = least_squares(log1p_all(ts), logE);
  fit.r2_exponential = exp_all.r2;
  fit.r2_polynomial = poly_all.r2;

  // rate from the trailing half
  const double t_half = 0.5 * (ts.front() + ts.back());
  std::vector<double> tail_t, tail_logE;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ts[i] >= t_half) {
      tail_t.push_back(ts[i]);
      tail_logE.push_back(logE[i]);
    }
  }
  const LineFit exp_tail = least_squares(tail_t, tail_logE);
  const LineFit poly_tail = least_squares(log1p_all(tail_t), tail_logE);

  if (std::isnan(exp_all.r2) || std::isnan(poly_all.r2)) {
    fit.rate = -exp_tail.slope;
    fit.near_zero_rate = std::abs(fit.rate) < 1e-8;
    return fit;
  }
  const double gap = exp_all.r2 - poly_all.r2;
  if (gap > 0.02) {
    fit.cls = DecayFit::Class::Exponential;
    fit.rate = -exp_tail.slope;
    fit.r2 = exp_all.r2;
  } else if (-gap > 0.02) {
    fit.cls = DecayFit::Class::Polynomial;
    fit.rate = -poly_tail.slope;
    fit.r2 = poly_all.r2;
  } else {
    fit.rate = -exp_tail.slope;
    fit.r2 = std::max(exp_all.r2, poly_all.r2);
  }
  fit.near_zero_rate = std::abs(fit.rate) < 1e-8;
  return fit;
}

DecayFit fit_decay(const Trajectory& traj) {
  std::vector<double> t, E;
  t.reserve(traj.points.size());
  E.reserve(traj.points.size());
  for (const auto& pt : traj.points) {
    t.push_back(pt.energy.t);
    E.push_back(pt.energy.E);
  }
  return fit_decay(t, E);
}

} // namespace viscodecay
