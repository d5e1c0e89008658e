#include "viscodecay/embedding.hpp"

#include "viscodecay/errors.hpp"

#include <cmath>

namespace viscodecay {

namespace {

double planar_even_chain(double omega1, int k) {
  // B_{2k}^k = (k / 2) B_{2k-2}^{k-1}
  double b = 1.0 / std::sqrt(omega1);
  for (int j = 2; j <= k; ++j)
    b = std::pow(0.5 * j * std::pow(b, j - 1), 1.0 / j);
  return b;
}

} // namespace

double constant_exponent_embedding(const DomainSpec& dom, double s) {
  if (!(s >= 2.0) || !std::isfinite(s))
    throw InputError("constant_exponent_embedding: exponent must be finite and >= 2");
  const double omega1 = first_eigenvalue(dom);

  if (dom.dim() == 1) {
    const double sup_const = 0.5 * std::sqrt(dom.length(0));
    return std::pow(sup_const, 1.0 - 2.0 / s) * std::pow(omega1, -1.0 / s);
  }

  const int k0 = static_cast<int>(std::floor(s / 2.0));
  const double s0 = 2.0 * k0;
  if (s == s0)
    return planar_even_chain(omega1, k0);
  const double s1 = s0 + 2.0;
  // 1/s = theta/s0 + (1 - theta)/s1
  const double theta = (1.0 / s - 1.0 / s1) / (1.0 / s0 - 1.0 / s1);
  return std::pow(planar_even_chain(omega1, k0), theta) *
         std::pow(planar_even_chain(omega1, k0 + 1), 1.0 - theta);
}

double embedding_constant(const DomainSpec& dom, const ExponentField& q,
                          std::optional<double> override_value) {
  if (override_value) {
    if (!(*override_value > 0.0))
      throw InputError("embedding constant override must be positive");
    return *override_value;
  }
  if (q.is_constant())
    return constant_exponent_embedding(dom, q.q1());
  const double b1 = constant_exponent_embedding(dom, q.q1());
  const double b2 = constant_exponent_embedding(dom, q.q2());
  return (dom.measure() + 1.0) * std::max(b1, b2);
}

} // namespace viscodecay
