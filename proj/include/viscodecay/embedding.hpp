#pragma once

#include "viscodecay/domain.hpp"
#include "viscodecay/varexp.hpp"

#include <optional>

namespace viscodecay {

/// Upper bound for the constant B_s in ||u||_s <= B_s ||grad u||_2 on H^1_0.
///
/// 1D: ||u||_inf <= (sqrt(L) / 2) ||u'||_2 and Poincaré ||u||_2 <= ||u'||_2 / sqrt(omega1),
/// combined through ||u||_s <= ||u||_inf^{1 - 2/s} ||u||_2^{2/s}.
///
/// 2D: with ||f||_2 <= (1/2) ||grad f||_1 applied to f = |u|^k one gets
/// ||u||_{2k}^k <= (k/2) ||u||_{2k-2}^{k-1} ||grad u||_2, seeded at k = 1 by Poincaré.
/// Exponents between consecutive even integers use Hölder interpolation.
double constant_exponent_embedding(const DomainSpec& dom, double s);

/// Bound B for ||u||_{q(x)} <= B ||grad u||_2. Constant exponents use the
/// constant-exponent chain directly; variable exponents inflate by |Omega| + 1
/// from the L^{q2} -> L^{q(x)} embedding:
///   B = (|Omega| + 1) * max{B_{q1}, B_{q2}}.
/// A positive override is returned unchanged.
double embedding_constant(const DomainSpec& dom, const ExponentField& q,
                          std::optional<double> override_value = std::nullopt);

} // namespace viscodecay
