#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace viscodecay {

/// Nodal values on a DomainSpec grid, boundary nodes included. Node (i, j)
/// lives at index i + nodes[0] * j.
using Field = std::vector<double>;

/// Uniform tensor grid on an interval (dim 1) or a rectangle (dim 2) with
/// homogeneous Dirichlet data on the boundary.
class DomainSpec {
public:
  DomainSpec() : DomainSpec(1.0, 3) {}
  DomainSpec(double length, std::size_t nodes);
  DomainSpec(std::array<double, 2> lengths, std::array<std::size_t, 2> nodes);

  int dim() const { return dim_; }
  double length(int axis) const { return lengths_[axis]; }
  std::size_t nodes(int axis) const { return nodes_[axis]; }
  double spacing(int axis) const { return h_[axis]; }
  /// Smallest spacing over the active axes.
  double min_spacing() const;
  std::size_t size() const { return nodes_[0] * nodes_[1]; }
  double measure() const;

  std::size_t index(std::size_t i, std::size_t j = 0) const { return i + nodes_[0] * j; }
  double coordinate(int axis, std::size_t k) const { return static_cast<double>(k) * h_[axis]; }
  bool on_boundary(std::size_t idx) const;

  /// Tensor-trapezoidal quadrature weights, one per node.
  const std::vector<double>& weights() const { return weights_; }

  Field zeros() const { return Field(size(), 0.0); }
  void require_field(std::span<const double> f, const char* what) const;

  bool operator==(const DomainSpec& other) const;

private:
  void finalize();

  int dim_ = 1;
  std::array<double, 2> lengths_{1.0, 1.0};
  std::array<std::size_t, 2> nodes_{3, 1};
  std::array<double, 2> h_{0.5, 1.0};
  std::vector<double> weights_;
};

/// Trapezoidal approximation of the integral of f over the domain.
double integrate(std::span<const double> f, const DomainSpec& dom);

/// Discrete L2 inner product under the trapezoidal weights.
double inner(std::span<const double> a, std::span<const double> b, const DomainSpec& dom);

/// Second-order five-point (three-point in 1D) Laplacian. Boundary rows are zero.
Field laplacian(std::span<const double> u, const DomainSpec& dom);

/// Gradient bilinear form from forward differences on cell faces, weighted so
/// that inner(-laplacian(u), v) == grad_inner(u, v) for Dirichlet fields.
double grad_inner(std::span<const double> u, std::span<const double> v, const DomainSpec& dom);

/// ||grad u||_2^2 with the same face quadrature as grad_inner.
double grad_sq_norm(std::span<const double> u, const DomainSpec& dom);

/// First Dirichlet eigenvalue of -Laplacian on the continuum interval or rectangle.
double first_eigenvalue(const DomainSpec& dom);

/// First eigenvalue of the discrete Laplacian; differs from the continuum
/// value by O(h^2). Diagnostic only.
double discrete_first_eigenvalue(const DomainSpec& dom);

/// Sets boundary nodes of a state field to zero.
void apply_dirichlet(Field& u, const DomainSpec& dom);

} // namespace viscodecay
