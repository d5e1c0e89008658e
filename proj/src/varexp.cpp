#include "viscodecay/varexp.hpp"

#include "viscodecay/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace viscodecay {

ExponentField::ExponentField(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty())
    throw InputError("exponent field is empty");
  for (double q : values_)
    if (!std::isfinite(q))
      throw InputError("exponent field contains a non-finite value");
  const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
  q1_ = *lo;
  q2_ = *hi;
}

ExponentField ExponentField::constant(const DomainSpec& dom, double value) {
  ExponentField field(std::vector<double>(dom.size(), value));
  field.set_log_holder({0.0, 0.5, true});
  return field;
}

ExponentField ExponentField::linear(const DomainSpec& dom, double left, double right) {
  std::vector<double> v(dom.size());
  for (std::size_t j = 0; j < dom.nodes(1); ++j)
    for (std::size_t i = 0; i < dom.nodes(0); ++i)
      v[dom.index(i, j)] = left + (right - left) * dom.coordinate(0, i) / dom.length(0);
  return ExponentField(std::move(v));
}

ExponentField ExponentField::sine_bump(const DomainSpec& dom, double base, double amplitude) {
  std::vector<double> v(dom.size());
  for (std::size_t j = 0; j < dom.nodes(1); ++j) {
    for (std::size_t i = 0; i < dom.nodes(0); ++i) {
      double shape = std::sin(std::numbers::pi * dom.coordinate(0, i) / dom.length(0));
      shape *= shape;
      if (dom.dim() == 2) {
        const double sy = std::sin(std::numbers::pi * dom.coordinate(1, j) / dom.length(1));
        shape *= sy * sy;
      }
      v[dom.index(i, j)] = base + amplitude * shape;
    }
  }
  return ExponentField(std::move(v));
}

ValidationReport validate_exponent_bounds(const ExponentField& field, double q_max) {
  if (field.size() == 0)
    throw InputError("validate_exponent_bounds: empty exponent field");
  ValidationReport report;
  report.q1 = field.q1();
  report.q2 = field.q2();
  double worst_excess = 0.0;
  for (std::size_t k = 0; k < field.size(); ++k) {
    const double q = field[k];
    const double excess = std::max(2.0 - q, q - q_max);
    if (excess > worst_excess) {
      worst_excess = excess;
      report.worst_node = k;
      report.worst_value = q;
    }
  }
  if (report.worst_node) {
    report.ok = false;
    std::ostringstream msg;
    msg << "exponent " << report.worst_value << " at node " << *report.worst_node
        << " outside [2, " << q_max << "]";
    report.message = msg.str();
  }
  return report;
}

LogHolderReport log_holder_check(const ExponentField& field, const DomainSpec& dom, double A,
                                 double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw InputError("log_holder_check: delta must lie in (0, 1)");
  if (!(A > 0.0))
    throw InputError("log_holder_check: A must be positive");
  dom.require_field(field.values(), "log_holder_check");

  LogHolderReport report;
  if (delta <= dom.min_spacing()) {
    report.vacuous = true;
    return report;
  }

  const std::size_t n = field.size();
  const std::size_t nx = dom.nodes(0);
  auto position = [&](std::size_t k, int axis) {
    return dom.coordinate(axis, axis == 0 ? k % nx : k / nx);
  };
  for (std::size_t a = 0; a < n; ++a) {
    const double xa = position(a, 0);
    const double ya = position(a, 1);
    for (std::size_t b = a + 1; b < n; ++b) {
      const double dx = position(b, 0) - xa;
      const double dy = dom.dim() == 2 ? position(b, 1) - ya : 0.0;
      const double dist = std::hypot(dx, dy);
      if (!(dist > 0.0) || dist >= delta)
        continue;
      const double lhs = std::abs(field[a] - field[b]) * -std::log(dist);
      if (lhs > report.A_required) {
        report.A_required = lhs;
        report.node_a = a;
        report.node_b = b;
      }
    }
  }
  report.ok = report.A_required <= A;
  return report;
}

double modular(std::span<const double> f, const ExponentField& q, const DomainSpec& dom) {
  dom.require_field(f, "modular");
  dom.require_field(q.values(), "modular exponent");
  const auto& w = dom.weights();
  double sum = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k)
    if (f[k] != 0.0)
      sum += w[k] * std::pow(std::abs(f[k]), q[k]);
  return sum;
}

namespace {

double scaled_modular(std::span<const double> f, const ExponentField& q, const DomainSpec& dom,
                      double lambda) {
  const auto& w = dom.weights();
  double sum = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k)
    if (f[k] != 0.0)
      sum += w[k] * std::pow(std::abs(f[k]) / lambda, q[k]);
  return sum;
}

} // namespace

double luxemburg_norm(std::span<const double> f, const ExponentField& q, const DomainSpec& dom) {
  const double rho = modular(f, q, dom);
  if (rho == 0.0)
    return 0.0;

  // modular(f / lambda) is strictly decreasing in lambda; the sandwich
  // inequality puts the root between these two endpoints.
  double lo = std::pow(rho, 1.0 / q.q2()) / 2.0;
  double hi = std::pow(rho, 1.0 / q.q1()) * 2.0;
  if (lo > hi)
    std::swap(lo, hi);
  for (int expand = 0; scaled_modular(f, q, dom, lo) < 1.0; ++expand) {
    if (expand > 200)
      throw NumericalError("luxemburg_norm: lower bracket expansion failed");
    lo *= 0.5;
  }
  for (int expand = 0; scaled_modular(f, q, dom, hi) > 1.0; ++expand) {
    if (expand > 200)
      throw NumericalError("luxemburg_norm: upper bracket expansion failed");
    hi *= 2.0;
  }

  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double residual = scaled_modular(f, q, dom, mid) - 1.0;
    if (std::abs(residual) <= 1e-12 || mid == lo || mid == hi)
      return mid;
    if (residual > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  std::ostringstream msg;
  msg << "luxemburg_norm: bisection did not converge in [" << lo << ", " << hi << "]";
  throw NumericalError(msg.str());
}

bool check_modular_norm_bounds(std::span<const double> f, const ExponentField& q,
                               const DomainSpec& dom) {
  const double rho = modular(f, q, dom);
  const double norm = luxemburg_norm(f, q, dom);
  const double a = std::pow(norm, q.q1());
  const double b = std::pow(norm, q.q2());
  const double lower = std::min(a, b);
  const double upper = std::max(a, b);
  constexpr double rel = 1e-8;
  return rho >= lower * (1.0 - rel) && rho <= upper * (1.0 + rel);
}

} // namespace viscodecay
