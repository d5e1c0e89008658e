#include "viscodecay/memory.hpp"

#include "viscodecay/errors.hpp"

#include <cmath>
#include <sstream>

namespace viscodecay {

MemoryHistory::MemoryHistory(const RelaxationKernel& kernel, const DomainSpec& dom,
                             MemoryMode mode, std::size_t stride, double dt)
    : dom_(dom), mode_(mode), stride_(stride), dt_(dt), zero_(kernel.is_zero()) {
  if (stride_ == 0)
    throw InputError("history stride must be positive");
  if (mode_ == MemoryMode::Recursive) {
    const auto k = kernel.exponential_rate();
    if (!k)
      throw InputError("recursive memory requires an exponential kernel");
    if (stride_ != 1)
      throw InputError("recursive memory requires history stride 1");
    rate_ = *k;
    g0_ = kernel.g0();
  }
}

std::size_t MemoryHistory::snapshot_count() const {
  return mode_ == MemoryMode::Full ? snapshots_.size() : count_;
}

void MemoryHistory::record(std::size_t n, double t, const Field& u) {
  if (count_ > 0 && !(t > last_t_))
    throw NumericalError("memory history: times must increase");
  if (zero_) {
    last_t_ = t;
    ++count_;
    return;
  }
  if (mode_ == MemoryMode::Full) {
    if (n % stride_ == 0) {
      times_.push_back(t);
      snapshots_.push_back(u);
    }
    last_t_ = t;
    ++count_;
    return;
  }

  const double gsq = grad_sq_norm(u, dom_);
  if (count_ == 0) {
    first_ = u;
    first_grad_sq_ = gsq;
    sum_u_ = u;
    sum_grad_sq_ = gsq;
    sum_weight_ = 1.0;
  } else {
    if (std::abs((t - last_t_) - dt_) > 1e-9 * dt_)
      throw NumericalError("recursive memory history needs uniform steps");
    const double decay = std::exp(-rate_ * (t - last_t_));
    for (std::size_t k = 0; k < u.size(); ++k)
      sum_u_[k] = decay * sum_u_[k] + u[k];
    sum_grad_sq_ = decay * sum_grad_sq_ + gsq;
    sum_weight_ = decay * sum_weight_ + 1.0;
  }
  last_ = u;
  last_grad_sq_ = gsq;
  last_t_ = t;
  ++count_;
}

std::vector<MemoryHistory::Node> MemoryHistory::nodes(double t, const Field& u_now) const {
  std::vector<Node> out;
  out.reserve(times_.size() + 1);
  for (std::size_t j = 0; j < times_.size(); ++j) {
    if (times_[j] > t + 1e-12 * std::max(1.0, t))
      throw NumericalError("memory history: snapshot stored after the query time");
    out.push_back({times_[j], &snapshots_[j]});
  }
  if (out.empty() || t > out.back().t + 1e-12 * std::max(1.0, t))
    out.push_back({t, &u_now});
  else
    out.back().u = &u_now;

  const double max_gap = 2.0 * dt_ * static_cast<double>(stride_) * (1.0 + 1e-9);
  if (out.front().t > max_gap)
    throw NumericalError("memory history does not start at t = 0");
  for (std::size_t j = 1; j < out.size(); ++j) {
    if (out[j].t - out[j - 1].t > max_gap) {
      std::ostringstream msg;
      msg << "memory history gap " << out[j].t - out[j - 1].t << " at t = " << out[j].t
          << " exceeds 2 dt stride";
      throw NumericalError(msg.str());
    }
  }
  return out;
}

std::vector<double> MemoryHistory::trapezoid_weights(const std::vector<Node>& nodes) {
  std::vector<double> w(nodes.size(), 0.0);
  for (std::size_t j = 0; j + 1 < nodes.size(); ++j) {
    const double half = 0.5 * (nodes[j + 1].t - nodes[j].t);
    w[j] += half;
    w[j + 1] += half;
  }
  return w;
}

Field MemoryHistory::convolve(const RelaxationKernel& kernel, double t, const Field& u_now) const {
  Field out(u_now.size(), 0.0);
  if (zero_ || count_ == 0 || t == 0.0)
    return out;

  if (mode_ == MemoryMode::Recursive) {
    if (std::abs(t - last_t_) > 1e-12 * std::max(1.0, t))
      throw NumericalError("recursive memory queried away from the last recorded time");
    const double first_weight = std::exp(-rate_ * t);
    const double scale = g0_ * dt_;
    for (std::size_t k = 0; k < out.size(); ++k)
      out[k] = scale * (sum_u_[k] - 0.5 * first_weight * first_[k] - 0.5 * last_[k]);
    return out;
  }

  const auto ns = nodes(t, u_now);
  const auto w = trapezoid_weights(ns);
  for (std::size_t j = 0; j < ns.size(); ++j) {
    const double c = w[j] * kernel.g(t - ns[j].t);
    if (c == 0.0)
      continue;
    const Field& u = *ns[j].u;
    for (std::size_t k = 0; k < out.size(); ++k)
      out[k] += c * u[k];
  }
  return out;
}

template <class Weight>
double MemoryHistory::full_gap(Weight&& weight, double t, const Field& u_now) const {
  const auto ns = nodes(t, u_now);
  const auto w = trapezoid_weights(ns);
  Field diff(u_now.size());
  double sum = 0.0;
  // the last node is u_now itself and contributes nothing
  for (std::size_t j = 0; j + 1 < ns.size(); ++j) {
    const double c = w[j] * weight(t - ns[j].t);
    if (c == 0.0)
      continue;
    const Field& u = *ns[j].u;
    for (std::size_t k = 0; k < diff.size(); ++k)
      diff[k] = u_now[k] - u[k];
    sum += c * grad_sq_norm(diff, dom_);
  }
  return sum;
}

double MemoryHistory::gap(const RelaxationKernel& kernel, double t, const Field& u_now) const {
  if (zero_ || count_ == 0 || t == 0.0)
    return 0.0;
  if (mode_ == MemoryMode::Full)
    return full_gap([&](double s) { return kernel.g(s); }, t, u_now);

  if (std::abs(t - last_t_) > 1e-12 * std::max(1.0, t))
    throw NumericalError("recursive memory queried away from the last recorded time");
  // sum_j w_j g_j ||grad u_n - grad u_j||^2 expanded into three running sums
  const double first_weight = std::exp(-rate_ * t);
  const double scale = g0_ * dt_;
  const double weight_total = scale * (sum_weight_ - 0.5 * first_weight - 0.5);
  const double sq_total =
      scale * (sum_grad_sq_ - 0.5 * first_weight * first_grad_sq_ - 0.5 * last_grad_sq_);
  const Field conv = convolve(kernel, t, u_now);
  const double cross = grad_inner(u_now, conv, dom_);
  return std::max(0.0, weight_total * last_grad_sq_ - 2.0 * cross + sq_total);
}

double MemoryHistory::gap_rate(const RelaxationKernel& kernel, double t, const Field& u_now,
                               double fd_step) const {
  if (zero_ || count_ == 0 || t == 0.0)
    return 0.0;
  if (mode_ == MemoryMode::Recursive)
    return -rate_ * gap(kernel, t, u_now);
  return full_gap([&](double s) { return kernel.derivative(s, fd_step); }, t, u_now);
}

} // namespace viscodecay
