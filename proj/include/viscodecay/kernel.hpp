#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace viscodecay {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// g(t) = g0 exp(-k t); satisfies g' = -k g, so xi(t) = k.
struct ExponentialKernel {
  double g0 = 0.5;
  double k = 1.0;
};

/// Exact solution of g' + C g^alpha = 0 with g(0) = g0:
///   g(t) = (g0^{1 - alpha} + C (alpha - 1) t)^{-1 / (alpha - 1)}.
struct PowerLawKernel {
  double g0 = 0.5;
  double C = 1.0;
  double alpha = 1.5;
};

/// Analytic continuation of a sampled kernel past its last sample T.
struct TailModel {
  enum class Kind { Exponential, Power };
  Kind kind = Kind::Exponential;
  /// Exponential: g(T) e^{-rate (t - T)}. Power: g(T) ((1 + t) / (1 + T))^{-rate}, rate > 1.
  double rate = 1.0;
};

struct SampledKernel {
  std::vector<double> t;
  std::vector<double> g;
  std::optional<TailModel> tail;
  std::optional<double> xi_constant;
};

/// g identically zero. Used to switch the memory term off.
struct ZeroKernel {};

/// Nonincreasing rate function xi(t) with g' <= -xi g.
class XiFunction {
public:
  XiFunction(std::function<double(double)> xi, std::function<double(double)> cumulative);

  static XiFunction constant(double value);

  double operator()(double t) const { return xi_(t); }
  double xi0() const { return xi_(0.0); }
  /// int_0^t xi(s) ds
  double cumulative(double t) const { return cumulative_(t); }

private:
  std::function<double(double)> xi_;
  std::function<double(double)> cumulative_;
};

struct Admissibility {
  double l = 0.0;
  double mass = 0.0;
  bool g0_positive = false;
  bool nonincreasing = false;
  bool ok = false;
};

class RelaxationKernel {
public:
  using Kind = std::variant<ExponentialKernel, PowerLawKernel, SampledKernel, ZeroKernel>;

  static RelaxationKernel exponential(double g0, double k);
  static RelaxationKernel power_law(double g0, double C, double alpha);
  static RelaxationKernel sampled(std::vector<double> t, std::vector<double> g,
                                  std::optional<TailModel> tail = std::nullopt,
                                  std::optional<double> xi_constant = std::nullopt);
  static RelaxationKernel zero();

  const Kind& kind() const { return kind_; }
  std::string name() const;

  /// g(t) for t >= 0.
  double g(double t) const;
  /// g'(t). Analytic kinds ignore fd_step; sampled kernels use central
  /// differences of width fd_step (one-sided at t = 0).
  double derivative(double t, double fd_step = 1e-6) const;
  /// int_0^t g(s) ds; t may be kInfinity.
  double mass(double t) const;
  /// 1 - int_0^inf g.
  double l() const;
  double g0() const { return g(0.0); }

  bool is_zero() const { return std::holds_alternative<ZeroKernel>(kind_); }
  /// k when g(t) = g0 e^{-kt}; enables the O(1) convolution recursion.
  std::optional<double> exponential_rate() const;
  /// C' with g(t) <= C' (1 + t)^{-1/(alpha-1)} for power-law kernels.
  std::optional<double> power_bound_constant() const;

  /// Rate function for the g' <= -xi g hypothesis.
  XiFunction xi() const;

private:
  explicit RelaxationKernel(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

double eval_g(const RelaxationKernel& kernel, double t);
double kernel_mass(const RelaxationKernel& kernel, double t);
Admissibility admissibility(const RelaxationKernel& kernel);

struct TypeIClass {
  XiFunction xi;
};
struct TypeIIClass {
  double C;
  double alpha;
};
using DecayClass = std::variant<TypeIClass, TypeIIClass>;

struct DecayClassReport {
  bool ok = true;
  double worst_t = 0.0;
  /// Largest value of g' + xi g (Type I) or g' + C g^alpha (Type II) on the grid.
  double worst_residual = -kInfinity;
};

/// Checks the differential inequality on a time grid with g' from finite
/// differences (central inside, second-order one-sided at the ends), with
/// tolerance 1e-8 g(0).
DecayClassReport decay_class_check(const RelaxationKernel& kernel, const DecayClass& cls,
                                   std::span<const double> grid);

/// Largest kernel mass allowed by the blow-up theorem:
/// (p1/2 - 1) / (p1/2 - 1 + 1/(2 p1)).
double blowup_mass_bound(double p1);

} // namespace viscodecay
