#include "viscodecay/domain.hpp"

#include "viscodecay/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace viscodecay {

DomainSpec::DomainSpec(double length, std::size_t nodes)
    : dim_(1), lengths_{length, 1.0}, nodes_{nodes, 1} {
  finalize();
}

DomainSpec::DomainSpec(std::array<double, 2> lengths, std::array<std::size_t, 2> nodes)
    : dim_(2), lengths_(lengths), nodes_(nodes) {
  finalize();
}

void DomainSpec::finalize() {
  for (int axis = 0; axis < dim_; ++axis) {
    if (!(lengths_[axis] > 0.0) || !std::isfinite(lengths_[axis]))
      throw InputError("domain length must be positive and finite");
    if (nodes_[axis] < 3)
      throw InputError("domain needs at least 3 nodes per axis");
    h_[axis] = lengths_[axis] / static_cast<double>(nodes_[axis] - 1);
  }
  if (dim_ == 1) {
    lengths_[1] = 1.0;
    nodes_[1] = 1;
    h_[1] = 1.0;
  }

  auto axis_weights = [this](int axis) {
    std::vector<double> w(nodes_[axis], h_[axis]);
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
  };
  const auto wx = axis_weights(0);
  const auto wy = dim_ == 2 ? axis_weights(1) : std::vector<double>{1.0};
  weights_.assign(size(), 0.0);
  for (std::size_t j = 0; j < nodes_[1]; ++j)
    for (std::size_t i = 0; i < nodes_[0]; ++i)
      weights_[index(i, j)] = wx[i] * wy[j];
}

double DomainSpec::min_spacing() const {
  return dim_ == 1 ? h_[0] : std::min(h_[0], h_[1]);
}

double DomainSpec::measure() const {
  return dim_ == 1 ? lengths_[0] : lengths_[0] * lengths_[1];
}

bool DomainSpec::on_boundary(std::size_t idx) const {
  const std::size_t i = idx % nodes_[0];
  if (i == 0 || i + 1 == nodes_[0])
    return true;
  if (dim_ == 2) {
    const std::size_t j = idx / nodes_[0];
    return j == 0 || j + 1 == nodes_[1];
  }
  return false;
}

void DomainSpec::require_field(std::span<const double> f, const char* what) const {
  if (f.size() != size())
    throw InputError(std::string(what) + ": field has " + std::to_string(f.size()) +
                     " nodes, grid has " + std::to_string(size()));
}

bool DomainSpec::operator==(const DomainSpec& other) const {
  return dim_ == other.dim_ && lengths_ == other.lengths_ && nodes_ == other.nodes_;
}

double integrate(std::span<const double> f, const DomainSpec& dom) {
  dom.require_field(f, "integrate");
  const auto& w = dom.weights();
  double sum = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k)
    sum += w[k] * f[k];
  return sum;
}

double inner(std::span<const double> a, std::span<const double> b, const DomainSpec& dom) {
  dom.require_field(a, "inner");
  dom.require_field(b, "inner");
  const auto& w = dom.weights();
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    sum += w[k] * a[k] * b[k];
  return sum;
}

Field laplacian(std::span<const double> u, const DomainSpec& dom) {
  dom.require_field(u, "laplacian");
  Field out(u.size(), 0.0);
  const std::size_t nx = dom.nodes(0);
  const double ihx2 = 1.0 / (dom.spacing(0) * dom.spacing(0));
  if (dom.dim() == 1) {
    for (std::size_t i = 1; i + 1 < nx; ++i)
      out[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * ihx2;
    return out;
  }
  const std::size_t ny = dom.nodes(1);
  const double ihy2 = 1.0 / (dom.spacing(1) * dom.spacing(1));
  for (std::size_t j = 1; j + 1 < ny; ++j) {
    for (std::size_t i = 1; i + 1 < nx; ++i) {
      const std::size_t k = dom.index(i, j);
      out[k] = (u[k + 1] - 2.0 * u[k] + u[k - 1]) * ihx2 +
               (u[k + nx] - 2.0 * u[k] + u[k - nx]) * ihy2;
    }
  }
  return out;
}

double grad_inner(std::span<const double> u, std::span<const double> v, const DomainSpec& dom) {
  dom.require_field(u, "grad_inner");
  dom.require_field(v, "grad_inner");
  const std::size_t nx = dom.nodes(0);
  const std::size_t ny = dom.nodes(1);
  const double hx = dom.spacing(0);
  double sum = 0.0;

  // x-faces, weighted by the trapezoidal weight of their row
  for (std::size_t j = 0; j < ny; ++j) {
    double wy = 1.0;
    if (dom.dim() == 2)
      wy = (j == 0 || j + 1 == ny) ? 0.5 * dom.spacing(1) : dom.spacing(1);
    double row = 0.0;
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      const std::size_t k = dom.index(i, j);
      row += (u[k + 1] - u[k]) * (v[k + 1] - v[k]);
    }
    sum += row * wy / hx;
  }
  if (dom.dim() == 1)
    return sum;

  const double hy = dom.spacing(1);
  for (std::size_t j = 0; j + 1 < ny; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < nx; ++i) {
      const double wx = (i == 0 || i + 1 == nx) ? 0.5 * hx : hx;
      const std::size_t k = dom.index(i, j);
      col += wx * (u[k + nx] - u[k]) * (v[k + nx] - v[k]);
    }
    sum += col / hy;
  }
  return sum;
}

double grad_sq_norm(std::span<const double> u, const DomainSpec& dom) {
  return grad_inner(u, u, dom);
}

double first_eigenvalue(const DomainSpec& dom) {
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  double lambda = pi2 / (dom.length(0) * dom.length(0));
  if (dom.dim() == 2)
    lambda += pi2 / (dom.length(1) * dom.length(1));
  return lambda;
}

double discrete_first_eigenvalue(const DomainSpec& dom) {
  auto axis = [&](int a) {
    const double h = dom.spacing(a);
    const double s = std::sin(std::numbers::pi * h / (2.0 * dom.length(a)));
    return 4.0 * s * s / (h * h);
  };
  return dom.dim() == 1 ? axis(0) : axis(0) + axis(1);
}

void apply_dirichlet(Field& u, const DomainSpec& dom) {
  const std::size_t nx = dom.nodes(0);
  const std::size_t ny = dom.nodes(1);
  if (dom.dim() == 1) {
    u.front() = 0.0;
    u.back() = 0.0;
    return;
  }
  for (std::size_t i = 0; i < nx; ++i) {
    u[dom.index(i, 0)] = 0.0;
    u[dom.index(i, ny - 1)] = 0.0;
  }
  for (std::size_t j = 0; j < ny; ++j) {
    u[dom.index(0, j)] = 0.0;
    u[dom.index(nx - 1, j)] = 0.0;
  }
}

} // namespace viscodecay
