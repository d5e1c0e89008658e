#include "viscodecay/kernel.hpp"

#include "viscodecay/errors.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace viscodecay {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double power_law_g(const PowerLawKernel& p, double t) {
  const double base = std::pow(p.g0, 1.0 - p.alpha) + p.C * (p.alpha - 1.0) * t;
  return std::pow(base, -1.0 / (p.alpha - 1.0));
}

double tail_value(const SampledKernel& s, const TailModel& tail, double t) {
  const double T = s.t.back();
  const double gT = s.g.back();
  if (tail.kind == TailModel::Kind::Exponential)
    return gT * std::exp(-tail.rate * (t - T));
  return gT * std::pow((1.0 + t) / (1.0 + T), -tail.rate);
}

// int_T^t of the tail, t may be infinite
double tail_mass(const SampledKernel& s, const TailModel& tail, double t) {
  const double T = s.t.back();
  const double gT = s.g.back();
  if (tail.kind == TailModel::Kind::Exponential) {
    const double decay = std::isinf(t) ? 0.0 : std::exp(-tail.rate * (t - T));
    return gT * (1.0 - decay) / tail.rate;
  }
  const double ratio = std::isinf(t) ? 0.0 : std::pow((1.0 + t) / (1.0 + T), 1.0 - tail.rate);
  return gT * (1.0 + T) / (tail.rate - 1.0) * (1.0 - ratio);
}

double sampled_g(const SampledKernel& s, double t) {
  if (t >= s.t.back()) {
    if (t == s.t.back())
      return s.g.back();
    if (!s.tail)
      throw InputError("sampled kernel evaluated past its last sample without a tail model");
    return tail_value(s, *s.tail, t);
  }
  const auto it = std::upper_bound(s.t.begin(), s.t.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - s.t.begin()) - 1;
  const double w = (t - s.t[i]) / (s.t[i + 1] - s.t[i]);
  return (1.0 - w) * s.g[i] + w * s.g[i + 1];
}

// Simpson on pairs of sample intervals (nonuniform form), linear interpolant
// on the leftover partial piece, analytic tail past the last sample.
double sampled_mass(const SampledKernel& s, double t) {
  const auto& ts = s.t;
  const auto& gs = s.g;
  const std::size_t n = ts.size();
  double total = 0.0;
  std::size_t k = 0;
  while (k + 2 < n && ts[k + 2] <= t) {
    const double h0 = ts[k + 1] - ts[k];
    const double h1 = ts[k + 2] - ts[k + 1];
    total += (h0 + h1) / 6.0 *
             ((2.0 - h1 / h0) * gs[k] + (h0 + h1) * (h0 + h1) / (h0 * h1) * gs[k + 1] +
              (2.0 - h0 / h1) * gs[k + 2]);
    k += 2;
  }
  while (k + 1 < n && ts[k] < t) {
    const double right = std::min(t, ts[k + 1]);
    total += 0.5 * (gs[k] + sampled_g(s, right)) * (right - ts[k]);
    ++k;
  }
  if (t > ts.back()) {
    if (!s.tail)
      throw InputError("sampled kernel needs a tail model for mass beyond the last sample");
    total += tail_mass(s, *s.tail, t);
  }
  return total;
}

std::vector<double> three_point_derivative(std::span<const double> t, std::span<const double> f) {
  const std::size_t n = t.size();
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = t[i] - t[i - 1];
    const double h1 = t[i + 1] - t[i];
    d[i] = -h1 / (h0 * (h0 + h1)) * f[i - 1] + (h1 - h0) / (h0 * h1) * f[i] +
           h0 / (h1 * (h0 + h1)) * f[i + 1];
  }
  {
    const double h0 = t[1] - t[0];
    const double h1 = t[2] - t[1];
    d[0] = -(2.0 * h0 + h1) / (h0 * (h0 + h1)) * f[0] + (h0 + h1) / (h0 * h1) * f[1] -
           h0 / (h1 * (h0 + h1)) * f[2];
  }
  {
    const double h0 = t[n - 2] - t[n - 3];
    const double h1 = t[n - 1] - t[n - 2];
    d[n - 1] = (2.0 * h1 + h0) / (h1 * (h0 + h1)) * f[n - 1] -
               (h0 + h1) / (h0 * h1) * f[n - 2] + h1 / (h0 * (h0 + h1)) * f[n - 3];
  }
  return d;
}

XiFunction sampled_xi(const SampledKernel& s) {
  if (s.xi_constant)
    return XiFunction::constant(*s.xi_constant);

  // running minimum of -g'/g makes xi nonincreasing and keeps g' <= -xi g at samples
  const auto dg = three_point_derivative(s.t, s.g);
  auto rates = std::make_shared<std::vector<double>>(s.t.size());
  double running = kInfinity;
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    const double r = s.g[i] > 0.0 ? std::max(0.0, -dg[i] / s.g[i]) : 0.0;
    running = std::min(running, r);
    (*rates)[i] = running;
  }
  auto cum = std::make_shared<std::vector<double>>(s.t.size(), 0.0);
  for (std::size_t i = 1; i < s.t.size(); ++i)
    (*cum)[i] = (*cum)[i - 1] + (*rates)[i - 1] * (s.t[i] - s.t[i - 1]);

  auto times = std::make_shared<std::vector<double>>(s.t);
  const std::optional<TailModel> tail = s.tail;
  auto xi = [times, rates, tail](double t) {
    if (t >= times->back()) {
      double r = rates->back();
      if (tail)
        r = std::min(r, tail->kind == TailModel::Kind::Exponential ? tail->rate
                                                                   : tail->rate / (1.0 + t));
      return r;
    }
    const auto it = std::upper_bound(times->begin(), times->end(), t);
    return (*rates)[static_cast<std::size_t>(it - times->begin()) - 1];
  };
  auto cumulative = [times, rates, cum, tail](double t) {
    if (t < times->back()) {
      const auto it = std::upper_bound(times->begin(), times->end(), t);
      const std::size_t i = static_cast<std::size_t>(it - times->begin()) - 1;
      return (*cum)[i] + (*rates)[i] * (t - (*times)[i]);
    }
    const double T = times->back();
    const double base = cum->back();
    const double r = rates->back();
    if (!tail || tail->kind == TailModel::Kind::Exponential) {
      const double rate = tail ? std::min(r, tail->rate) : r;
      return base + rate * (t - T);
    }
    // min(r, beta / (1 + s)) switches at s* = beta / r - 1
    const double beta = tail->rate;
    const double switch_t = r > 0.0 ? std::max(T, beta / r - 1.0) : T;
    if (t <= switch_t)
      return base + r * (t - T);
    return base + r * (switch_t - T) + beta * std::log((1.0 + t) / (1.0 + switch_t));
  };
  return XiFunction(xi, cumulative);
}

} // namespace

XiFunction::XiFunction(std::function<double(double)> xi, std::function<double(double)> cumulative)
    : xi_(std::move(xi)), cumulative_(std::move(cumulative)) {}

XiFunction XiFunction::constant(double value) {
  if (!(value > 0.0))
    throw InputError("xi must be positive");
  return XiFunction([value](double) { return value; }, [value](double t) { return value * t; });
}

RelaxationKernel RelaxationKernel::exponential(double g0, double k) {
  if (!(g0 > 0.0) || !(k > 0.0))
    throw InputError("exponential kernel needs g0 > 0 and k > 0");
  return RelaxationKernel(ExponentialKernel{g0, k});
}

RelaxationKernel RelaxationKernel::power_law(double g0, double C, double alpha) {
  if (!(g0 > 0.0) || !(C > 0.0))
    throw InputError("power-law kernel needs g0 > 0 and C > 0");
  if (!(alpha > 1.0 && alpha < 2.0))
    throw InputError("power-law kernel needs 1 < alpha < 2");
  return RelaxationKernel(PowerLawKernel{g0, C, alpha});
}

RelaxationKernel RelaxationKernel::sampled(std::vector<double> t, std::vector<double> g,
                                           std::optional<TailModel> tail,
                                           std::optional<double> xi_constant) {
  if (t.size() != g.size() || t.size() < 3)
    throw InputError("sampled kernel needs at least 3 (t, g) pairs of equal length");
  if (t.front() != 0.0)
    throw InputError("sampled kernel must start at t = 0");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1]))
      throw InputError("sampled kernel times must be strictly increasing");
  for (double v : g)
    if (!std::isfinite(v) || v < 0.0)
      throw InputError("sampled kernel values must be finite and nonnegative");
  if (tail) {
    if (!(tail->rate > 0.0))
      throw InputError("tail rate must be positive");
    if (tail->kind == TailModel::Kind::Power && !(tail->rate > 1.0))
      throw InputError("power tail needs rate > 1 for a finite mass");
  }
  return RelaxationKernel(SampledKernel{std::move(t), std::move(g), tail, xi_constant});
}

RelaxationKernel RelaxationKernel::zero() { return RelaxationKernel(ZeroKernel{}); }

std::string RelaxationKernel::name() const {
  return std::visit(overloaded{[](const ExponentialKernel&) { return std::string("exponential"); },
                               [](const PowerLawKernel&) { return std::string("power"); },
                               [](const SampledKernel&) { return std::string("sampled"); },
                               [](const ZeroKernel&) { return std::string("zero"); }},
                    kind_);
}

double RelaxationKernel::g(double t) const {
  if (!(t >= 0.0))
    throw InputError("kernel evaluated at negative time");
  return std::visit(
      overloaded{[t](const ExponentialKernel& e) { return e.g0 * std::exp(-e.k * t); },
                 [t](const PowerLawKernel& p) { return power_law_g(p, t); },
                 [t](const SampledKernel& s) { return sampled_g(s, t); },
                 [](const ZeroKernel&) { return 0.0; }},
      kind_);
}

double RelaxationKernel::derivative(double t, double fd_step) const {
  if (!(t >= 0.0))
    throw InputError("kernel derivative at negative time");
  return std::visit(
      overloaded{[t](const ExponentialKernel& e) { return -e.k * e.g0 * std::exp(-e.k * t); },
                 [t](const PowerLawKernel& p) { return -p.C * std::pow(power_law_g(p, t), p.alpha); },
                 [&](const SampledKernel& s) {
                   if (t < fd_step)
                     return (sampled_g(s, t + fd_step) - sampled_g(s, t)) / fd_step;
                   return (sampled_g(s, t + fd_step) - sampled_g(s, t - fd_step)) / (2.0 * fd_step);
                 },
                 [](const ZeroKernel&) { return 0.0; }},
      kind_);
}

double RelaxationKernel::mass(double t) const {
  if (!(t >= 0.0))
    throw InputError("kernel mass at negative time");
  return std::visit(
      overloaded{[t](const ExponentialKernel& e) {
                   if (std::isinf(t))
                     return e.g0 / e.k;
                   return e.g0 * -std::expm1(-e.k * t) / e.k;
                 },
                 [t](const PowerLawKernel& p) {
                   // int_0^t (a + b s)^{-r} ds with r = 1/(alpha - 1) > 1
                   const double a = std::pow(p.g0, 1.0 - p.alpha);
                   const double b = p.C * (p.alpha - 1.0);
                   const double r = 1.0 / (p.alpha - 1.0);
                   const double head = std::pow(a, 1.0 - r);
                   const double tail = std::isinf(t) ? 0.0 : std::pow(a + b * t, 1.0 - r);
                   return (head - tail) / (b * (r - 1.0));
                 },
                 [t](const SampledKernel& s) { return sampled_mass(s, t); },
                 [](const ZeroKernel&) { return 0.0; }},
      kind_);
}

double RelaxationKernel::l() const { return 1.0 - mass(kInfinity); }

std::optional<double> RelaxationKernel::exponential_rate() const {
  if (const auto* e = std::get_if<ExponentialKernel>(&kind_))
    return e->k;
  return std::nullopt;
}

std::optional<double> RelaxationKernel::power_bound_constant() const {
  const auto* p = std::get_if<PowerLawKernel>(&kind_);
  if (!p)
    return std::nullopt;
  // a + b t >= min(a, b) (1 + t)
  const double a = std::pow(p->g0, 1.0 - p->alpha);
  const double b = p->C * (p->alpha - 1.0);
  return std::pow(std::min(a, b), -1.0 / (p->alpha - 1.0));
}

XiFunction RelaxationKernel::xi() const {
  return std::visit(
      overloaded{[](const ExponentialKernel& e) { return XiFunction::constant(e.k); },
                 [](const PowerLawKernel& p) {
                   // g' = -(C g^{alpha-1}) g, and g^{alpha-1} = 1 / (a + b t)
                   const double a = std::pow(p.g0, 1.0 - p.alpha);
                   const double b = p.C * (p.alpha - 1.0);
                   const double C = p.C;
                   return XiFunction([=](double t) { return C / (a + b * t); },
                                     [=](double t) { return std::log1p(b * t / a) / (p.alpha - 1.0); });
                 },
                 [](const SampledKernel& s) { return sampled_xi(s); },
                 [](const ZeroKernel&) -> XiFunction {
                   throw InputError("zero kernel has no decay-rate function");
                 }},
      kind_);
}

double eval_g(const RelaxationKernel& kernel, double t) { return kernel.g(t); }

double kernel_mass(const RelaxationKernel& kernel, double t) { return kernel.mass(t); }

Admissibility admissibility(const RelaxationKernel& kernel) {
  Admissibility a;
  a.mass = kernel.mass(kInfinity);
  a.l = 1.0 - a.mass;
  a.g0_positive = kernel.g0() > 0.0;
  if (const auto* s = std::get_if<SampledKernel>(&kernel.kind())) {
    a.nonincreasing = std::is_sorted(s->g.rbegin(), s->g.rend());
  } else {
    a.nonincreasing = true;
  }
  a.ok = a.g0_positive && a.nonincreasing && a.l > 0.0;
  return a;
}

DecayClassReport decay_class_check(const RelaxationKernel& kernel, const DecayClass& cls,
                                   std::span<const double> grid) {
  if (grid.size() < 3)
    throw InputError("decay_class_check: grid needs at least 3 points");
  if (const auto* t2 = std::get_if<TypeIIClass>(&cls)) {
    if (!(t2->alpha > 1.0 && t2->alpha < 2.0))
      throw InputError("decay_class_check: Type II needs 1 < alpha < 2");
    if (!(t2->C > 0.0))
      throw InputError("decay_class_check: Type II needs C > 0");
  }
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw InputError("decay_class_check: grid must be strictly increasing");

  std::vector<double> g(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    g[i] = kernel.g(grid[i]);
  const auto dg = three_point_derivative(grid, g);
  const double tol = 1e-8 * kernel.g0();

  DecayClassReport report;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double residual = 0.0;
    if (const auto* t1 = std::get_if<TypeIClass>(&cls))
      residual = dg[i] + t1->xi(grid[i]) * g[i];
    else {
      const auto& t2 = std::get<TypeIIClass>(cls);
      residual = dg[i] + t2.C * std::pow(g[i], t2.alpha);
    }
    if (residual > report.worst_residual) {
      report.worst_residual = residual;
      report.worst_t = grid[i];
    }
  }
  report.ok = report.worst_residual <= tol;
  return report;
}

double blowup_mass_bound(double p1) {
  if (!(p1 > 2.0))
    throw InputError("blowup_mass_bound: p1 must exceed 2");
  const double head = 0.5 * p1 - 1.0;
  return head / (head + 1.0 / (2.0 * p1));
}

} // namespace viscodecay
