#pragma once

#include "viscodecay/domain.hpp"
#include "viscodecay/kernel.hpp"
#include "viscodecay/varexp.hpp"

namespace viscodecay {

/// Physical data of the damped viscoelastic wave problem
///   u_tt - Lap u + int_0^t g(t-s) Lap u(s) ds + a |u_t|^{m(x)-2} u_t = b |u|^{p(x)-2} u
/// with homogeneous Dirichlet data on the boundary of the domain.
struct Model {
  DomainSpec dom;
  RelaxationKernel kernel = RelaxationKernel::zero();
  ExponentField m;
  ExponentField p;
  double a = 0.0;
  double b = 0.0;
};

} // namespace viscodecay
