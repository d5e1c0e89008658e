#pragma once

#include "viscodecay/kernel.hpp"
#include "viscodecay/state.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace viscodecay {

/// Potential-well constants. lambda2, Ctilde and omega_small are filled by
/// complete_constants() once E(0) is known.
struct StableSetConstants {
  double B = 0.0;
  double B1 = 1.0;
  double lambda1 = 0.0;
  double E1 = 0.0;
  double lambda0 = 0.0;
  double lambda2 = 0.0;
  double Ctilde = 0.0;
  double omega_small = 0.0;
  double l = 1.0;
  double b = 1.0;
  double p1 = 2.0;
  double p2 = 2.0;
  bool has_lambda2 = false;
  bool has_Ctilde = false;
};

/// B1 = max{1, B / sqrt(l), 1 / sqrt(b)}, lambda1 = (1 / (b B1^p1))^{1/(p1-2)},
/// E1 = (1/2 - 1/p1) lambda1^2.
StableSetConstants stable_set_constants(double B, double l, double b, double p1, double p2);

/// Same block with B1 given directly.
StableSetConstants stable_set_constants_from_B1(double B1, double l, double b, double p1, double p2);

/// f(lambda) = lambda^2 / 2 - (b / p1) B1^p1 max{lambda^p1, lambda^p2}.
double f_lambda(double lambda, const StableSetConstants& c);

/// Structured result of a computation that is only defined under conditions.
struct Verdict {
  bool ok = false;
  double value = 0.0;
  std::string reason;
};

/// Root of f(lambda) = E0 in (0, lambda1], bisection to 1e-12.
Verdict solve_lambda2(double E0, const StableSetConstants& c);

/// Ctilde = s / (1 - s), s = (2 b B1^p2 / p1) lambda2^{p1 - 2}.
Verdict compute_Ctilde(double lambda2, const StableSetConstants& c);

/// Fills lambda0, lambda2, Ctilde and omega = (1 - 2/p2) Ctilde p2 where defined.
StableSetConstants complete_constants(StableSetConstants c, double E0, double lambda0);

struct ConditionItem {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  /// Positive when the inequality holds with room to spare.
  double margin = 0.0;
  bool pass = false;
};

struct ConditionReport {
  std::vector<ConditionItem> items;
  bool ok = false;

  const ConditionItem* find(const std::string& name) const;
};

/// Decay hypotheses: 0 < E0 < (p1/p2)^{1/(p1-2)} lambda1^2 (1/2 - 1/p2),
/// lambda1 > lambda(0), kernel admissible, and the consequence omega < 2.
ConditionReport check_decay_conditions(double E0, const StableSetConstants& c,
                                       const Admissibility& kernel);

/// Blow-up hypotheses: m2 < p1, int g < blowup_mass_bound(p1),
/// E0 < (1 - (1 - l) / (p1 (p1 - 2) l)) E1, lambda1 < lambda(0).
ConditionReport check_blowup_conditions(double E0, const StableSetConstants& c,
                                        const Admissibility& kernel, double m2);

struct InvariantSetReport {
  bool ok = true;
  double worst_t = 0.0;
  /// max over records of lambda(t)^2 - lambda2^2
  double worst_excess = 0.0;
};

/// lambda(t)^2 <= lambda2^2 + tol on every record.
InvariantSetReport check_invariant_set(const Trajectory& traj, double lambda2, double tol);

enum class DampingCase {
  /// m1 > 2
  Superlinear,
  /// m2 > m1 = 2
  Mixed,
  /// m identically 2
  Linear,
};

struct DecayInputs {
  StableSetConstants c;
  double m1 = 2.0;
  double m2 = 2.0;
  double a = 1.0;
  double domain_measure = 1.0;
  double omega1 = 1.0;
  double E0 = 0.0;
};

/// Young/Cauchy parameters picked so the balance-equation terms share
/// (2 - omega)/2 equally.
struct BalanceSplit {
  double eps_young = 0.0;
  double eps_cauchy = 0.0;
  double delta = 0.0;
  /// Factor (<= 1) applied to every per-term target to keep all parameters below 1.
  double shrink = 1.0;
  double per_term_target = 0.0;
  int terms = 3;
};

struct KResult {
  bool ok = false;
  double K = 0.0;
  double gamma = 0.0;
  DampingCase damping = DampingCase::Linear;
  BalanceSplit split;
  std::string reason;
};

DampingCase damping_case(double m1, double m2);

/// Type I decay constant K for g' <= -xi g.
KResult compute_K(const DecayInputs& in, double xi0);

/// Type II decay constant K(alpha, sigma) for g' + C g^alpha <= 0, with
/// C_bound the constant of g(t) <= C_bound (1 + t)^{-1/(alpha-1)}.
KResult compute_K_alpha_sigma(const DecayInputs& in, double alpha, double sigma, double C_ode,
                              double C_bound);

enum class EnvelopeKind { TypeIPoly, TypeIExp, TypeIIPoly, TypeIIExp };

std::string to_string(EnvelopeKind kind);

struct DecayEnvelope {
  EnvelopeKind kind = EnvelopeKind::TypeIExp;
  double gamma = 0.0;
  double K = 0.0;
  double sigma = 0.0;
  double alpha = 0.0;
  double E0 = 0.0;
  double m2 = 2.0;
  /// int_0^t xi; Type II envelopes use xi = 1.
  std::function<double(double)> xi_cumulative;
};

/// Builds the envelope matching the kernel class and whether m2 > 2.
DecayEnvelope make_envelope(bool type_two, const KResult& k, double E0, double m2,
                            std::function<double(double)> xi_cumulative, double alpha = 0.0,
                            double sigma = 0.0);

double envelope(double t, const DecayEnvelope& env);

struct EnvelopeReport {
  bool ok = true;
  /// max over records of E(t) - envelope(t) (1 + tol)
  double max_violation = 0.0;
  double worst_t = 0.0;
  /// envelope(t_i) - E(t_i)
  std::vector<double> margins;
};

EnvelopeReport verify_envelope(const Trajectory& traj, const DecayEnvelope& env, double tol);

/// Allowance for the gap between discrete and continuum energies, c (dt + h^2).
double scheme_allowance(double dt, double h);

struct KomornikReport {
  bool inconclusive = false;
  bool hypothesis_ok = false;
  bool conclusion_ok = false;
  /// min over the grid of rhs - lhs
  double hypothesis_margin = 0.0;
  double conclusion_margin = 0.0;
  double worst_t = 0.0;
};

/// Checks the integral hypothesis
///   int_t^inf E^{1+sigma} phi' <= (1/omega) E(0)^sigma E(t)
/// on every sample time and the decay it implies. tail(T) must return
/// int_T^inf E^{1+sigma} phi' past the last sample; without it the result
/// is inconclusive.
KomornikReport komornik_check(std::span<const double> t, std::span<const double> E,
                              std::span<const double> phi, std::span<const double> dphi,
                              double sigma, double omega,
                              const std::function<double(double)>& tail);

struct DecayFit {
  enum class Class { Exponential, Polynomial, Undetermined };
  Class cls = Class::Undetermined;
  /// c in E ~ e^{-ct} or beta in E ~ (1+t)^{-beta}
  double rate = 0.0;
  double r2 = 0.0;
  double r2_exponential = 0.0;
  double r2_polynomial = 0.0;
  std::size_t used = 0;
  bool near_zero_rate = false;
};

std::string to_string(DecayFit::Class cls);

DecayFit fit_decay(std::span<const double> t, std::span<const double> E);
DecayFit fit_decay(const Trajectory& traj);

} // namespace viscodecay
