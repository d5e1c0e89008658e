#pragma once

#include "viscodecay/domain.hpp"
#include "viscodecay/kernel.hpp"

#include <cstddef>
#include <vector>

namespace viscodecay {

enum class MemoryMode {
  /// Stores every history_stride-th displacement snapshot; O(steps) work per query.
  Full,
  /// Running exponential sums; exact re-arrangement of the same trapezoidal
  /// rule, valid for exponential kernels at stride 1 only.
  Recursive,
};

/// History of u used by the convolution integrals
///   int_0^t g(t - s) u(s) ds   and   int_0^t w(t - s) ||grad u(t) - grad u(s)||^2 ds.
/// Both use the trapezoidal rule in s over the stored snapshots, with the
/// current displacement as the last node.
class MemoryHistory {
public:
  MemoryHistory() = default;
  MemoryHistory(const RelaxationKernel& kernel, const DomainSpec& dom, MemoryMode mode,
                std::size_t stride, double dt);

  /// Registers u at step n (time t). Full mode keeps it when n % stride == 0.
  void record(std::size_t n, double t, const Field& u);

  MemoryMode mode() const { return mode_; }
  std::size_t snapshot_count() const;
  double last_time() const { return last_t_; }

  /// Trapezoidal  int_0^t g(t - s) u(s) ds.
  Field convolve(const RelaxationKernel& kernel, double t, const Field& u_now) const;

  /// Trapezoidal  int_0^t g(t - s) ||grad u(t) - grad u(s)||^2 ds.
  double gap(const RelaxationKernel& kernel, double t, const Field& u_now) const;

  /// Same integral with g' in place of g.
  double gap_rate(const RelaxationKernel& kernel, double t, const Field& u_now,
                  double fd_step) const;

private:
  struct Node {
    double t;
    const Field* u;
  };
  std::vector<Node> nodes(double t, const Field& u_now) const;
  static std::vector<double> trapezoid_weights(const std::vector<Node>& nodes);

  template <class Weight>
  double full_gap(Weight&& weight, double t, const Field& u_now) const;

  DomainSpec dom_;
  MemoryMode mode_ = MemoryMode::Full;
  std::size_t stride_ = 1;
  double dt_ = 0.0;
  double last_t_ = 0.0;
  std::size_t count_ = 0;
  bool zero_ = false;

  // Full
  std::vector<double> times_;
  std::vector<Field> snapshots_;

  // Recursive: sums over j <= n of e^{-k (t_n - t_j)} times u_j, ||grad u_j||^2 and 1
  double rate_ = 0.0;
  double g0_ = 0.0;
  Field first_;
  double first_grad_sq_ = 0.0;
  Field last_;
  double last_grad_sq_ = 0.0;
  Field sum_u_;
  double sum_grad_sq_ = 0.0;
  double sum_weight_ = 0.0;
};

} // namespace viscodecay
