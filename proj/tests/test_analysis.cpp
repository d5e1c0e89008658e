#include "support.hpp"

#include "viscodecay/analysis.hpp"
#include "viscodecay/errors.hpp"

#include <doctest.h>

#include <random>

using namespace vt;

namespace {

// b = 1, B1 = 1, p1 = p2 = 4, l = 0.5
StableSetConstants pinned(double E0 = 0.15, double lambda0 = 0.5) {
  return complete_constants(stable_set_constants_from_B1(1.0, 0.5, 1.0, 4.0, 4.0), E0, lambda0);
}

DecayInputs pinned_inputs(double m1, double m2) {
  DecayInputs in;
  in.c = pinned();
  in.m1 = m1;
  in.m2 = m2;
  in.a = 1.0;
  in.domain_measure = 1.0;
  in.omega1 = pi * pi;
  in.E0 = 0.15;
  return in;
}

Admissibility admissible(double l = 0.5, double mass = 0.5) {
  Admissibility adm;
  adm.ok = true;
  adm.l = l;
  adm.mass = mass;
  return adm;
}

Trajectory synthetic(const std::function<double(double)>& E, double t_end, std::size_t n) {
  Trajectory traj;
  for (std::size_t i = 0; i <= n; ++i) {
    TrajectoryPoint pt;
    pt.energy.t = t_end * static_cast<double>(i) / static_cast<double>(n);
    pt.energy.E = E(pt.energy.t);
    traj.points.push_back(pt);
  }
  return traj;
}

} // namespace

TEST_CASE("stable-set constants examples") {
  const auto c = pinned();
  CHECK(c.lambda1 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(c.E1 == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(f_lambda(0.0, c) == 0.0);
  CHECK(f_lambda(1.0, c) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(f_lambda(0.60625, c) == doctest::Approx(0.15).epsilon(1e-4));
  CHECK_THROWS_AS(f_lambda(-0.1, c), InputError);

  REQUIRE(c.has_lambda2);
  CHECK(std::abs(c.lambda2 - std::sqrt(1.0 - std::sqrt(0.4))) < 1e-12);
  CHECK(std::abs(c.lambda2 - 0.60625) < 1e-5);
  REQUIRE(c.has_Ctilde);
  CHECK(std::abs(c.Ctilde - 0.22514) < 1e-5);
  // omega = 2 Ctilde exactly here; 0.45028 is 2 x (Ctilde rounded to 5 digits)
  CHECK(std::abs(c.omega_small - 2.0 * (1.0 - std::sqrt(0.4)) / (1.0 + std::sqrt(0.4))) < 1e-12);
  CHECK(std::abs(c.omega_small - 0.45028) < 2e-5);

  const auto general = stable_set_constants(2.0, 0.5, 0.25, 3.0, 5.0);
  CHECK(general.B1 == doctest::Approx(std::max({1.0, 2.0 / std::sqrt(0.5), 2.0})));
  CHECK(general.lambda1 == doctest::Approx(1.0 / (0.25 * std::pow(general.B1, 3.0))));
  CHECK_THROWS_AS(stable_set_constants(1.0, 0.5, 1.0, 2.0, 4.0), InputError);
  CHECK_THROWS_AS(stable_set_constants(1.0, 0.5, 1.0, 4.0, 3.0), InputError);
}

TEST_CASE("solve_lambda2 examples") {
  const auto c = pinned();
  const auto small = solve_lambda2(1e-12, c);
  REQUIRE(small.ok);
  CHECK(small.value < 1e-5);
  const auto near = solve_lambda2(c.E1 * (1.0 - 1e-9), c);
  REQUIRE(near.ok);
  CHECK(near.value < c.lambda1);
  CHECK(std::abs(near.value - c.lambda1) < 1e-3);
  CHECK_FALSE(solve_lambda2(0.0, c).ok);
  CHECK_FALSE(solve_lambda2(0.3, c).ok);
  CHECK_FALSE(solve_lambda2(0.3, c).reason.empty());
}

TEST_CASE("compute_Ctilde examples") {
  const auto c = pinned();
  CHECK(compute_Ctilde(0.0, c).value == 0.0);
  const auto mid = compute_Ctilde(1.0, c);  // inner = 2/4 = 1/2
  REQUIRE(mid.ok);
  CHECK(mid.value == doctest::Approx(1.0));
  CHECK(compute_Ctilde(0.60625, c).value == doctest::Approx(0.22514).epsilon(1e-4));
  CHECK_FALSE(compute_Ctilde(1.5, c).ok);
}

TEST_CASE("decay condition examples") {
  const auto c = pinned();
  const auto report = check_decay_conditions(0.15, c, admissible());
  CHECK(report.ok);
  REQUIRE(report.find("E0_below_decay_threshold"));
  CHECK(report.find("E0_below_decay_threshold")->rhs == doctest::Approx(0.25));
  CHECK(report.find("omega_below_2")->pass);

  const auto outside = check_decay_conditions(0.15, pinned(0.15, 1.5), admissible());
  CHECK_FALSE(outside.ok);
  CHECK(outside.find("lambda0_below_lambda1")->margin == doctest::Approx(-0.5));
  CHECK(outside.find("E0_below_decay_threshold")->pass);

  auto bad_kernel = admissible();
  bad_kernel.ok = false;
  CHECK_FALSE(check_decay_conditions(0.15, c, bad_kernel).ok);
  CHECK_FALSE(check_decay_conditions(-0.01, c, admissible()).ok);
}

TEST_CASE("blow-up condition examples") {
  const auto base = stable_set_constants_from_B1(1.0, 0.5, 1.0, 4.0, 4.0);
  auto c = complete_constants(base, 0.1, 1.2);
  const auto report = check_blowup_conditions(0.1, c, admissible(0.5, 0.5), 2.0);
  REQUIRE(report.find("E0_below_blowup_threshold"));
  CHECK(report.find("E0_below_blowup_threshold")->rhs == doctest::Approx(0.875 * 0.25));
  CHECK(report.find("lambda0_above_lambda1")->pass);
  CHECK(report.find("m2_below_p1")->pass);

  auto degenerate = complete_constants(stable_set_constants_from_B1(1.0, 1.0, 1.0, 4.0, 4.0), 0.1, 1.2);
  const auto r1 = check_blowup_conditions(0.1, degenerate, admissible(1.0, 0.0), 2.0);
  CHECK(r1.find("E0_below_blowup_threshold")->rhs == doctest::Approx(0.25));

  c.lambda0 = 0.5;
  CHECK_FALSE(check_blowup_conditions(0.1, c, admissible(), 2.0).find("lambda0_above_lambda1")->pass);
  CHECK_FALSE(check_blowup_conditions(0.1, c, admissible(), 5.0).ok);
}

TEST_CASE("check_invariant_set examples") {
  Trajectory zero = synthetic([](double) { return 0.0; }, 1.0, 10);
  CHECK(check_invariant_set(zero, 0.6, 1e-6).ok);

  Trajectory out = zero;
  out.points[4].lambda = 0.9;
  const auto r = check_invariant_set(out, 0.6, 1e-6);
  CHECK_FALSE(r.ok);
  CHECK(r.worst_t == doctest::Approx(0.4));
  CHECK(r.worst_excess == doctest::Approx(0.81 - 0.36));
}

TEST_CASE("compute_K examples") {
  // m = 2: two balance terms
  const auto lin = compute_K(pinned_inputs(2.0, 2.0), 1.0);
  REQUIRE(lin.ok);
  CHECK(lin.damping == DampingCase::Linear);
  CHECK(lin.gamma == 0.0);
  CHECK(lin.split.terms == 2);
  CHECK(lin.split.eps_young == 0.0);
  CHECK(lin.split.per_term_target == doctest::Approx((2.0 - pinned().omega_small) / 4.0));
  CHECK(lin.K == 0.031976868754366561);

  // m = 3: three terms share (2 - omega)/2
  const auto sup = compute_K(pinned_inputs(3.0, 3.0), 1.0);
  REQUIRE(sup.ok);
  CHECK(sup.split.terms == 3);
  CHECK(std::abs(sup.split.per_term_target - 0.25829) < 1e-5);
  CHECK(sup.split.shrink == 1.0);
  for (double p : {sup.split.eps_young, sup.split.eps_cauchy, sup.split.delta}) {
    CHECK(p > 0.0);
    CHECK(p < 1.0);
  }
  CHECK(sup.K == 0.0060621138948621089);

  const auto mixed = compute_K(pinned_inputs(2.0, 3.0), 1.0);
  REQUIRE(mixed.ok);
  CHECK(mixed.damping == DampingCase::Mixed);
  CHECK(mixed.gamma == 0.5);
  CHECK(mixed.K == 0.0052501264472465782);

  const auto doubled = compute_K(pinned_inputs(2.0, 2.0), 2.0);
  REQUIRE(doubled.ok);
  CHECK(doubled.K == 0.017894551021504258);
  CHECK(doubled.K < lin.K);

  auto unavailable = pinned_inputs(2.0, 2.0);
  unavailable.c.omega_small = 2.5;
  const auto fail = compute_K(unavailable, 1.0);
  CHECK_FALSE(fail.ok);
  CHECK_FALSE(fail.reason.empty());
}

TEST_CASE("compute_K balance shrink keeps parameters below the cap") {
  auto in = pinned_inputs(3.0, 3.0);
  in.a = 1e-4;  // tiny delta coefficient forces the shrink
  const auto k = compute_K(in, 1.0);
  REQUIRE(k.ok);
  CHECK(k.split.shrink < 1.0);
  CHECK(k.split.delta <= 0.99 + 1e-12);
  CHECK(k.split.eps_young < 1.0);
  CHECK(k.split.eps_cauchy < 1.0);
}

TEST_CASE("compute_K_alpha_sigma examples") {
  const auto in = pinned_inputs(2.0, 2.0);
  const auto k = compute_K_alpha_sigma(in, 1.4, 0.1, 1.0, 1.0);
  REQUIRE(k.ok);
  CHECK(k.K == 0.0091292625272082154);
  CHECK_THROWS_AS(compute_K_alpha_sigma(in, 1.5, 0.2, 1.0, 1.0), InputError);
  CHECK_THROWS_AS(compute_K_alpha_sigma(in, 2.5, 0.1, 1.0, 1.0), InputError);
  CHECK_THROWS_AS(compute_K_alpha_sigma(in, 1.4, 0.0, 1.0, 1.0), InputError);

  // the sigma / (C (sigma + alpha - 1)) rate term vanishes as sigma -> 0, so
  // K moves by less than the history term changes
  const auto k_small = compute_K_alpha_sigma(in, 1.4, 1e-6, 1.0, 1.0);
  CHECK(k_small.ok);
  CHECK(k_small.K > 0.0);
}

TEST_CASE("envelope examples") {
  KResult k;
  k.ok = true;
  k.K = 1.0;
  const auto unit = [](double t) { return t; };

  const auto exp_env = make_envelope(false, k, 2.0, 2.0, unit);
  CHECK(exp_env.kind == EnvelopeKind::TypeIExp);
  CHECK(envelope(0.0, exp_env) == doctest::Approx(2.0 * std::exp(1.0)));
  CHECK(envelope(3.0, exp_env) == doctest::Approx(2.0 * std::exp(-2.0)));

  const auto poly = make_envelope(false, k, 2.0, 4.0, unit);
  CHECK(poly.kind == EnvelopeKind::TypeIPoly);
  CHECK(poly.gamma == 1.0);
  CHECK(envelope(0.0, poly) == doctest::Approx(4.0));
  CHECK(envelope(1.0, poly) == doctest::Approx(2.0));
  CHECK(envelope(3.0, poly) == doctest::Approx(1.0));

  const auto two = make_envelope(true, k, 1.0, 2.0, nullptr, 1.4, 0.1);
  CHECK(two.kind == EnvelopeKind::TypeIIExp);
  CHECK(envelope(2.0, two) == doctest::Approx(std::exp(-1.0)));
  CHECK(make_envelope(true, k, 1.0, 3.0, nullptr, 1.4, 0.1).kind == EnvelopeKind::TypeIIPoly);

  CHECK_THROWS_AS(make_envelope(false, k, 1.0, 2.0, nullptr), InputError);
  KResult bad;
  CHECK_THROWS_AS(make_envelope(false, bad, 1.0, 2.0, unit), InputError);
}

TEST_CASE("verify_envelope examples") {
  KResult k;
  k.ok = true;
  k.K = 0.5;
  const auto env = make_envelope(false, k, 1.0, 2.0, [](double t) { return t; });

  CHECK(verify_envelope(synthetic([](double) { return 0.0; }, 10.0, 100), env, 1e-3).ok);

  const auto inside = synthetic([](double t) { return std::exp(-0.5 * t); }, 10.0, 100);
  const auto r = verify_envelope(inside, env, 1e-3);
  CHECK(r.ok);
  CHECK(r.margins.size() == inside.points.size());

  const auto scaled = synthetic([](double t) { return 10.0 * std::exp(-0.5 * t); }, 10.0, 100);
  const auto bad = verify_envelope(scaled, env, 1e-3);
  CHECK_FALSE(bad.ok);
  CHECK(bad.max_violation > 0.0);
  CHECK(bad.worst_t == 0.0);
}

TEST_CASE("komornik_check examples") {
  const double E0 = 2.0, omega = 0.8;
  std::vector<double> t, phi, dphi, E;
  for (int i = 0; i <= 4000; ++i) {
    t.push_back(0.005 * i);
    phi.push_back(t.back());
    dphi.push_back(1.0);
  }

  SUBCASE("exponential family, sigma = 0") {
    for (double s : t)
      E.push_back(E0 * std::exp(-omega * s));
    const auto r = komornik_check(t, E, phi, dphi, 0.0, omega,
                                  [&](double T) { return E0 * std::exp(-omega * T) / omega; });
    CHECK(r.hypothesis_ok);
    CHECK(r.conclusion_ok);
    CHECK_FALSE(r.inconclusive);
  }
  SUBCASE("power family, sigma = 1") {
    for (double s : t)
      E.push_back(E0 / (1.0 + omega * s));
    const auto r = komornik_check(t, E, phi, dphi, 1.0, omega,
                                  [&](double T) { return E0 * E0 / (omega * (1.0 + omega * T)); });
    CHECK(r.hypothesis_ok);
    CHECK(r.conclusion_ok);
  }
  SUBCASE("constant energy fails the hypothesis") {
    E.assign(t.size(), E0);
    const auto r = komornik_check(t, E, phi, dphi, 0.0, 1.0,
                                  [](double) { return std::numeric_limits<double>::infinity(); });
    CHECK_FALSE(r.hypothesis_ok);
  }
  SUBCASE("missing tail is inconclusive") {
    E.assign(t.size(), E0);
    CHECK(komornik_check(t, E, phi, dphi, 0.0, 1.0, nullptr).inconclusive);
  }
  SUBCASE("input validation") {
    E.assign(t.size(), E0);
    E[10] = 3.0;
    CHECK_THROWS_AS(komornik_check(t, E, phi, dphi, 0.0, 1.0, nullptr), InputError);
    E.assign(t.size(), E0);
    phi[0] = 0.1;
    CHECK_THROWS_AS(komornik_check(t, E, phi, dphi, 0.0, 1.0, nullptr), InputError);
  }
}

TEST_CASE("property: komornik hypothesis implies conclusion on randomized families") {
  std::mt19937_64 rng(20261018);
  std::uniform_real_distribution<double> U(0.1, 3.0);
  for (int trial = 0; trial < 40; ++trial) {
    const double E0 = U(rng), omega = U(rng), sigma = trial % 2 == 0 ? 0.0 : U(rng) / 3.0;
    // faster than the equality case by a random factor in [1.05, 2)
    const double slack = 1.05 + 0.95 * U(rng) / 3.0;
    const double rate = omega * slack;
    std::vector<double> t, phi, dphi, E;
    for (int i = 0; i <= 2000; ++i) {
      t.push_back(0.01 * i);
      phi.push_back(t.back());
      dphi.push_back(1.0);
    }
    std::function<double(double)> tail;
    if (sigma == 0.0) {
      for (double s : t)
        E.push_back(E0 * std::exp(-rate * s));
      tail = [=](double T) { return E0 * std::exp(-rate * T) / rate; };
    } else {
      // E = E0 (1 + c t)^{-1/sigma}: int_t^inf E^{1+sigma} = (omega sigma / c) E0^sigma E(t) / omega
      const double c = omega * sigma * slack;
      for (double s : t)
        E.push_back(E0 * std::pow(1.0 + c * s, -1.0 / sigma));
      tail = [=](double T) {
        return std::pow(E0, 1.0 + sigma) * std::pow(1.0 + c * T, -1.0 / sigma) * sigma / c;
      };
    }
    const auto r = komornik_check(t, E, phi, dphi, sigma, omega, tail);
    CHECK(r.hypothesis_ok);
    if (r.hypothesis_ok)
      CHECK(r.conclusion_ok);
  }
}

TEST_CASE("fit_decay examples") {
  const auto expo = fit_decay(synthetic([](double t) { return 2.0 * std::exp(-0.7 * t); }, 20.0, 400));
  CHECK(expo.cls == DecayFit::Class::Exponential);
  CHECK(std::abs(expo.rate - 0.7) < 0.02 * 0.7);

  const auto poly = fit_decay(synthetic([](double t) { return 3.0 * std::pow(1.0 + t, -1.5); }, 200.0, 400));
  CHECK(poly.cls == DecayFit::Class::Polynomial);
  CHECK(std::abs(poly.rate - 1.5) < 0.05 * 1.5);

  const auto flat = fit_decay(synthetic([](double) { return 0.4; }, 20.0, 400));
  CHECK((flat.cls == DecayFit::Class::Undetermined ||
         (flat.cls == DecayFit::Class::Exponential && flat.near_zero_rate)));
  CHECK(flat.near_zero_rate);

  const auto few = fit_decay(synthetic([](double t) { return std::exp(-t); }, 1.0, 20));
  CHECK(few.cls == DecayFit::Class::Undetermined);

  auto nonpositive = synthetic([](double) { return 0.0; }, 1.0, 100);
  CHECK(fit_decay(nonpositive).cls == DecayFit::Class::Undetermined);
  CHECK(fit_decay(nonpositive).used == 0);
}

TEST_CASE("property: f_lambda shape and solve_lambda2 inverse") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double p1 = 2.2 + 3.0 * U(rng);
    const double p2 = p1 + 2.0 * U(rng);
    const double B = 0.2 + 3.0 * U(rng), l = 0.1 + 0.9 * U(rng), b = 0.1 + 4.0 * U(rng);
    const auto c = stable_set_constants(B, l, b, p1, p2);
    CHECK(std::abs(f_lambda(c.lambda1, c) - c.E1) <= 1e-10 * c.E1);
    double prev = 0.0;
    for (int i = 1; i < 100; ++i) {
      const double lam = c.lambda1 * i / 100.0;
      const double f = f_lambda(lam, c);
      CHECK(f > prev);
      prev = f;
      const auto root = solve_lambda2(f, c);
      REQUIRE(root.ok);
      CHECK(std::abs(root.value - lam) <= 1e-10 * std::max(1.0, c.lambda1));
    }
    for (int i = 1; i < 20; ++i)
      CHECK(f_lambda(c.lambda1 * (1.0 + 0.05 * i), c) < f_lambda(c.lambda1 * (1.0 + 0.05 * (i - 1)), c));
    // larger embedding constant never raises lambda1
    CHECK(stable_set_constants(2.0 * B, l, b, p1, p2).lambda1 <= c.lambda1);
  }
}

TEST_CASE("property: passing decay conditions give positive K and decreasing envelopes") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int passed = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const double p = 3.0 + 2.0 * U(rng);
    const auto base = stable_set_constants(0.2 + U(rng), 0.3 + 0.7 * U(rng), 0.5 + U(rng), p, p);
    const double E0 = base.E1 * U(rng);
    const auto c = complete_constants(base, E0, base.lambda1 * U(rng));
    if (!check_decay_conditions(E0, c, admissible(c.l, 1.0 - c.l)).ok)
      continue;
    ++passed;
    CHECK(c.omega_small < 2.0);
    DecayInputs in;
    in.c = c;
    in.m1 = 2.0;
    in.m2 = trial % 2 == 0 ? 2.0 : 3.0;
    in.a = 0.5 + U(rng);
    in.domain_measure = 1.0;
    in.omega1 = pi * pi;
    in.E0 = E0;
    const auto k = compute_K(in, 1.0);
    REQUIRE(k.ok);
    CHECK(k.K > 0.0);
    const auto env = make_envelope(false, k, E0, in.m2, [](double t) { return t; });
    double prev = envelope(0.0, env);
    for (int i = 1; i <= 50; ++i) {
      const double v = envelope(i * 10.0, env);
      CHECK(v < prev);
      prev = v;
    }
    CHECK(envelope(1e12, env) < 1e-6 * E0);
  }
  CHECK(passed > 20);
}
