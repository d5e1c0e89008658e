#pragma once

#include "viscodecay/domain.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace vt {

using namespace viscodecay;

inline constexpr double pi = std::numbers::pi;

/// Random nodal values in [-1, 1] with zero boundary.
inline Field random_dirichlet(const DomainSpec& dom, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Field f(dom.size());
  for (double& x : f)
    x = u(rng);
  apply_dirichlet(f, dom);
  return f;
}

/// Random combination of the first few sine modes (smooth, Dirichlet).
inline Field random_smooth(const DomainSpec& dom, std::mt19937_64& rng, int modes = 4) {
  std::normal_distribution<double> n(0.0, 1.0);
  Field f = dom.zeros();
  const int ky_max = dom.dim() == 2 ? modes : 1;
  for (int kx = 1; kx <= modes; ++kx) {
    for (int ky = 1; ky <= ky_max; ++ky) {
      const double c = n(rng) / (kx * ky);
      for (std::size_t j = 0; j < dom.nodes(1); ++j) {
        for (std::size_t i = 0; i < dom.nodes(0); ++i) {
          double v = c * std::sin(kx * pi * dom.coordinate(0, i) / dom.length(0));
          if (dom.dim() == 2)
            v *= std::sin(ky * pi * dom.coordinate(1, j) / dom.length(1));
          f[dom.index(i, j)] += v;
        }
      }
    }
  }
  apply_dirichlet(f, dom);
  return f;
}

/// sin(k pi x / L) on a 1D grid, exact zeros at the ends.
inline Field sine_mode(const DomainSpec& dom, double amplitude = 1.0, int k = 1) {
  Field f(dom.size());
  for (std::size_t i = 0; i < dom.nodes(0); ++i)
    f[i] = amplitude * std::sin(k * pi * dom.coordinate(0, i) / dom.length(0));
  apply_dirichlet(f, dom);
  return f;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

} // namespace vt
