#pragma once

#include "viscodecay/domain.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace viscodecay {

/// Log-Hölder modulus |q(x) - q(y)| <= -A / log|x - y| for |x - y| < delta.
struct LogHolderCertificate {
  double A = 0.0;
  double delta = 0.5;
  bool valid = false;
};

/// Variable exponent q(x) sampled at grid nodes. Used for both the damping
/// exponent m(x) and the source exponent p(x).
class ExponentField {
public:
  ExponentField() = default;
  explicit ExponentField(std::vector<double> values);

  static ExponentField constant(const DomainSpec& dom, double value);
  /// q(x) = left + (right - left) * x / L along the first axis.
  static ExponentField linear(const DomainSpec& dom, double left, double right);
  /// q(x) = base + amplitude * prod_axes sin^2(pi x_a / L_a).
  static ExponentField sine_bump(const DomainSpec& dom, double base, double amplitude);

  std::span<const double> values() const { return values_; }
  double operator[](std::size_t k) const { return values_[k]; }
  std::size_t size() const { return values_.size(); }
  double q1() const { return q1_; }
  double q2() const { return q2_; }
  bool is_constant() const { return q1_ == q2_; }

  const LogHolderCertificate& log_holder() const { return certificate_; }
  void set_log_holder(LogHolderCertificate certificate) { certificate_ = certificate; }

private:
  std::vector<double> values_;
  double q1_ = 0.0;
  double q2_ = 0.0;
  LogHolderCertificate certificate_;
};

struct ValidationReport {
  bool ok = true;
  std::optional<std::size_t> worst_node;
  double worst_value = 0.0;
  double q1 = 0.0;
  double q2 = 0.0;
  std::string message;
};

/// Checks 2 <= q(x) <= q_max at every node. The worst offender is the node
/// furthest outside the admissible band.
ValidationReport validate_exponent_bounds(const ExponentField& field, double q_max);

struct LogHolderReport {
  bool ok = true;
  bool vacuous = false;
  std::size_t node_a = 0;
  std::size_t node_b = 0;
  double A_required = 0.0;
};

/// Pairwise sweep of |q(x) - q(y)| * (-log|x - y|) over node pairs closer than delta.
LogHolderReport log_holder_check(const ExponentField& field, const DomainSpec& dom, double A,
                                 double delta);

/// Trapezoidal modular  int |f|^{q(x)} dx.
double modular(std::span<const double> f, const ExponentField& q, const DomainSpec& dom);

/// Luxemburg norm inf{lambda > 0 : modular(f / lambda) <= 1}, by bisection.
double luxemburg_norm(std::span<const double> f, const ExponentField& q, const DomainSpec& dom);

/// min{|f|^q1, |f|^q2} <= modular(f) <= max{|f|^q1, |f|^q2}, relative tolerance 1e-8.
bool check_modular_norm_bounds(std::span<const double> f, const ExponentField& q,
                               const DomainSpec& dom);

} // namespace viscodecay
