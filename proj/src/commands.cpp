#include "viscodecay/commands.hpp"

#include "viscodecay/embedding.hpp"
#include "viscodecay/energy.hpp"
#include "viscodecay/solver.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

namespace viscodecay {

namespace {


Json header(const std::string& command, const RunSpec* spec) {
  Json j = Json::object();
  j["schema"] = "viscodecay/1";
  j["command"] = command;
  if (spec)
    j["spec"] = spec->document;
  return j;
}

Json items_json(const ConditionReport& report) {
  Json j = Json::object();
  j["ok"] = report.ok;
  j["items"] = Json::array();
  for (const auto& it : report.items)
    j["items"].push_back({{"name", it.name}, {"lhs", it.lhs}, {"rhs", it.rhs},
                          {"margin", it.margin}, {"pass", it.pass}});
  return j;
}

std::string damping_name(DampingCase c) {
  switch (c) {
  case DampingCase::Superlinear:
    return "m1>2";
  case DampingCase::Mixed:
    return "m2>m1=2";
  case DampingCase::Linear:
    return "m=2";
  }
  return "unknown";
}

double h_of(const DomainSpec& dom) { return dom.min_spacing(); }

struct DecayConstant {
  KResult k;
  bool type_two = false;
};

DecayConstant decay_constant(const RunSpec& spec, const Prepared& prep) {
  DecayConstant out;
  out.type_two = spec.analysis.type_two;
  if (!prep.constants) {
    out.k.reason = prep.constants_reason;
    return out;
  }
  DecayInputs in;
  in.c = *prep.constants;
  in.m1 = spec.m.q1();
  in.m2 = spec.m.q2();
  in.a = spec.a;
  in.domain_measure = spec.dom.measure();
  in.omega1 = first_eigenvalue(spec.dom);
  in.E0 = prep.E0;
  if (!prep.admissibility.ok) {
    out.k.reason = "kernel not admissible";
    return out;
  }
  if (out.type_two) {
    const auto& pk = std::get<PowerLawKernel>(spec.kernel.kind());
    out.k = compute_K_alpha_sigma(in, pk.alpha, spec.analysis.sigma, pk.C,
                                  *spec.kernel.power_bound_constant());
  } else {
    out.k = compute_K(in, spec.kernel.xi().xi0());
  }
  return out;
}

Json decay_constant_json(const DecayConstant& dc) {
  Json j = Json::object();
  j["class"] = dc.type_two ? "typeII" : "typeI";
  j["ok"] = dc.k.ok;
  j["K"] = dc.k.ok ? Json(dc.k.K) : Json(nullptr);
  j["gamma"] = dc.k.gamma;
  j["damping_case"] = damping_name(dc.k.damping);
  j["split"] = {{"terms", dc.k.split.terms},
                {"eps_young", dc.k.split.eps_young},
                {"eps_cauchy", dc.k.split.eps_cauchy},
                {"delta", dc.k.split.delta},
                {"shrink", dc.k.split.shrink},
                {"per_term_target", dc.k.split.per_term_target}};
  j["reason"] = dc.k.reason;
  return j;
}

Json constants_json(const Prepared& prep) {
  if (!prep.constants)
    return Json(nullptr);
  const auto& c = *prep.constants;
  Json j = Json::object();
  j["B"] = c.B;
  j["B1"] = c.B1;
  j["lambda1"] = c.lambda1;
  j["E1"] = c.E1;
  j["lambda2"] = c.has_lambda2 ? Json(c.lambda2) : Json(nullptr);
  j["Ctilde"] = c.has_Ctilde ? Json(c.Ctilde) : Json(nullptr);
  j["omega"] = c.has_Ctilde ? Json(c.omega_small) : Json(nullptr);
  return j;
}

Json inputs_json(const RunSpec& spec, const Prepared& prep) {
  Json j = Json::object();
  j["E0"] = prep.E0;
  j["lambda0"] = prep.lambda0;
  j["B"] = prep.B;
  j["l"] = prep.admissibility.l;
  j["kernel_mass"] = prep.admissibility.mass;
  j["kernel_admissible"] = prep.admissibility.ok;
  j["omega1"] = first_eigenvalue(spec.dom);
  j["domain_measure"] = spec.dom.measure();
  j["m1"] = spec.m.q1();
  j["m2"] = spec.m.q2();
  j["p1"] = spec.p.q1();
  j["p2"] = spec.p.q2();
  return j;
}

struct Audit {
  double max_increase = 0.0;
  double allowance = 0.0;
  bool monotone = true;
  ResidualSeries residual;
};

Audit audit(const Trajectory& traj, const RunSpec& spec) {
  Audit a;
  const double E0 = traj.points.empty() ? 0.0 : traj.points.front().energy.E;
  a.allowance = scheme_allowance(spec.time.dt, h_of(spec.dom)) * std::abs(E0);
  for (std::size_t i = 1; i < traj.points.size(); ++i)
    a.max_increase = std::max(a.max_increase, traj.points[i].energy.E - traj.points[i - 1].energy.E);
  a.monotone = a.max_increase <= a.allowance;
  if (traj.points.size() >= 2)
    a.residual = energy_identity_residual(traj);
  return a;
}

Json simulation_json(const Trajectory& traj, const Audit& a) {
  Json j = Json::object();
  j["outcome"] = {{"kind", traj.outcome.blew_up() ? "blew_up" : "completed"},
                  {"time", traj.outcome.time}};
  j["records"] = traj.points.size();
  const auto& last = traj.points.back().energy;
  j["final"] = {{"t", last.t}, {"E", last.E}, {"lambda", traj.points.back().lambda}};
  j["audit"] = {{"max_energy_increase", a.max_increase},
                {"allowance", a.allowance},
                {"monotone", a.monotone},
                {"identity_residual_max", a.residual.max_abs},
                {"identity_residual_rms", a.residual.l2}};
  return j;
}

Json fit_json(const DecayFit& fit) {
  Json j = Json::object();
  j["class"] = to_string(fit.cls);
  j["rate"] = fit.rate;
  j["r2"] = fit.r2;
  j["r2_exponential"] = fit.r2_exponential;
  j["r2_polynomial"] = fit.r2_polynomial;
  j["records_used"] = fit.used;
  j["near_zero_rate"] = fit.near_zero_rate;
  return j;
}

template <class F>
CommandResult guarded(const std::string& command, const RunSpec* spec, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    CommandResult r;
    r.exit_code = kExitError;
    r.report = header(command, spec);
    r.report["error"] = e.what();
    r.report["exit_code"] = r.exit_code;
    return r;
  }
}

} // namespace

Prepared prepare(const RunSpec& spec) {
  Prepared prep;
  prep.model = spec.model();
  prep.admissibility = admissibility(spec.kernel);
  prep.B = embedding_constant(spec.dom, spec.p, spec.analysis.B_override);

  if (!(spec.b > 0.0))
    prep.constants_reason = "potential-well constants need b > 0";
  else if (!(spec.p.q1() > 2.0))
    prep.constants_reason = "potential-well constants need p1 > 2";
  else if (!(prep.admissibility.l > 0.0))
    prep.constants_reason = "potential-well constants need l > 0";
  else
    prep.constants = stable_set_constants(prep.B, prep.admissibility.l, spec.b, spec.p.q1(), spec.p.q2());

  const double sqrt_l = spec.kernel.is_zero() ? 1.0 : std::sqrt(std::max(0.0, prep.admissibility.l));
  prep.u0 = profile_field(spec.u0, spec.dom);
  prep.u1 = profile_field(spec.u1, spec.dom);
  if (spec.u0.kind == "scaled-eigenmode") {
    if (!prep.constants)
      throw InputError("initial.u0 = scaled-eigenmode needs lambda1: " + prep.constants_reason);
    const double lam = sqrt_l * std::sqrt(grad_sq_norm(prep.u0, spec.dom));
    const double scale = spec.u0.amplitude * prep.constants->lambda1 / lam;
    for (double& x : prep.u0)
      x *= scale;
  }

  SimState s0 = initialize(prep.model, spec.time, prep.u0, prep.u1);
  prep.E0 = total_energy(s0, prep.model, spec.time.dt).E;
  prep.lambda0 = sqrt_l * std::sqrt(grad_sq_norm(prep.u0, spec.dom));
  if (prep.constants)
    prep.constants = complete_constants(*prep.constants, prep.E0, prep.lambda0);
  return prep;
}

CommandResult command_check(const RunSpec& spec) {
  return guarded("check", &spec, [&] {
    CommandResult r;
    r.report = header("check", &spec);
    const Prepared prep = prepare(spec);
    r.report["inputs"] = inputs_json(spec, prep);
    r.report["constants"] = constants_json(prep);
    if (!prep.constants) {
      r.report["constants_reason"] = prep.constants_reason;
      r.report["decay_conditions"] = nullptr;
      r.report["blowup_conditions"] = nullptr;
      r.exit_code = kExitConditionsUnmet;
    } else {
      const auto decay = check_decay_conditions(prep.E0, *prep.constants, prep.admissibility);
      const auto blow = check_blowup_conditions(prep.E0, *prep.constants, prep.admissibility, spec.m.q2());
      r.report["decay_conditions"] = items_json(decay);
      r.report["blowup_conditions"] = items_json(blow);
      r.exit_code = decay.ok ? kExitOk : kExitConditionsUnmet;
    }
    r.report["decay_constant"] = decay_constant_json(decay_constant(spec, prep));
    r.report["exit_code"] = r.exit_code;
    return r;
  });
}

CommandResult command_simulate(const RunSpec& spec) {
  return guarded("simulate", &spec, [&] {
    CommandResult r;
    r.report = header("simulate", &spec);
    const Prepared prep = prepare(spec);
    const Trajectory traj = run(prep.model, spec.time, prep.u0, prep.u1);
    r.report["simulation"] = simulation_json(traj, audit(traj, spec));
    r.report["exit_code"] = r.exit_code;
    r.files.emplace_back("trajectory.csv", trajectory_csv(traj));
    return r;
  });
}

CommandResult command_verify(const RunSpec& spec) {
  return guarded("verify", &spec, [&] {
    CommandResult r;
    r.report = header("verify", &spec);
    const Prepared prep = prepare(spec);
    r.report["inputs"] = inputs_json(spec, prep);
    r.report["constants"] = constants_json(prep);

    auto short_circuit = [&](const std::string& reason, Json detail) {
      r.report["verdict"] = {{"ok", false}, {"reason", reason}, {"detail", std::move(detail)}};
      r.exit_code = kExitConditionsUnmet;
      r.report["exit_code"] = r.exit_code;
      return r;
    };
    if (!prep.constants)
      return short_circuit("decay conditions unmet", prep.constants_reason);
    const auto decay = check_decay_conditions(prep.E0, *prep.constants, prep.admissibility);
    r.report["decay_conditions"] = items_json(decay);
    if (!decay.ok) {
      Json failed = Json::array();
      for (const auto& it : decay.items)
        if (!it.pass)
          failed.push_back(it.name);
      return short_circuit("decay conditions unmet", failed);
    }
    const DecayConstant dc = decay_constant(spec, prep);
    r.report["decay_constant"] = decay_constant_json(dc);
    if (!dc.k.ok)
      return short_circuit("decay constant unavailable", dc.k.reason);

    const Trajectory traj = run(prep.model, spec.time, prep.u0, prep.u1);
    const Audit a = audit(traj, spec);
    r.report["simulation"] = simulation_json(traj, a);

    const double allowance = scheme_allowance(spec.time.dt, h_of(spec.dom));
    std::function<double(double)> cumulative;
    if (!dc.type_two) {
      const XiFunction xi = spec.kernel.xi();
      cumulative = [xi](double t) { return xi.cumulative(t); };
    }
    const auto env = make_envelope(dc.type_two, dc.k, prep.E0, spec.m.q2(), cumulative,
                                   dc.type_two ? std::get<PowerLawKernel>(spec.kernel.kind()).alpha : 0.0,
                                   spec.analysis.sigma);
    const double env_tol = 1e-3 + allowance;
    const auto er = verify_envelope(traj, env, env_tol);
    r.report["envelope"] = {{"kind", to_string(env.kind)},
                            {"K", env.K},
                            {"tolerance", env_tol},
                            {"ok", er.ok},
                            {"max_violation", er.max_violation},
                            {"worst_t", er.worst_t}};

    const double inv_tol = 1e-6 + allowance;
    const auto inv = check_invariant_set(traj, prep.constants->lambda2, inv_tol);
    r.report["invariant_set"] = {{"lambda2", prep.constants->lambda2},
                                 {"tolerance", inv_tol},
                                 {"ok", inv.ok},
                                 {"worst_excess", inv.worst_excess},
                                 {"worst_t", inv.worst_t}};

    if (spec.analysis.fit)
      r.report["fit"] = fit_json(fit_decay(traj));

    const bool ok = er.ok && inv.ok && a.monotone && !traj.outcome.blew_up();
    r.report["verdict"] = {{"ok", ok}, {"reason", ok ? "envelope, invariant set and monotonicity hold"
                                                      : "audit failed"}};
    r.exit_code = ok ? kExitOk : kExitConditionsUnmet;
    r.report["exit_code"] = r.exit_code;

    std::string csv = "t,E,envelope,margin\n";
    for (std::size_t i = 0; i < traj.points.size(); ++i) {
      const double t = traj.points[i].energy.t;
      csv += format17(t) + "," + format17(traj.points[i].energy.E) + "," + format17(envelope(t, env)) +
             "," + format17(er.margins[i]) + "\n";
    }
    r.files.emplace_back("trajectory.csv", trajectory_csv(traj));
    r.files.emplace_back("envelope.csv", std::move(csv));
    return r;
  });
}

CommandResult command_fit(const RunSpec& spec) {
  return guarded("fit", &spec, [&] {
    CommandResult r;
    r.report = header("fit", &spec);
    const Prepared prep = prepare(spec);
    const Trajectory traj = run(prep.model, spec.time, prep.u0, prep.u1);
    r.report["simulation"] = simulation_json(traj, audit(traj, spec));
    r.report["fit"] = fit_json(fit_decay(traj));
    r.report["exit_code"] = r.exit_code;
    r.files.emplace_back("trajectory.csv", trajectory_csv(traj));
    return r;
  });
}

CommandResult command_fit_csv(const std::string& csv_text) {
  return guarded("fit", nullptr, [&] {
    CommandResult r;
    r.report = header("fit", nullptr);
    std::vector<double> t, E;
    read_trajectory_csv(csv_text, t, E);
    r.report["fit"] = fit_json(fit_decay(t, E));
    r.report["exit_code"] = r.exit_code;
    return r;
  });
}

namespace {

CommandResult dispatch(const std::string& command, const RunSpec& spec) {
  if (command == "check")
    return command_check(spec);
  if (command == "simulate")
    return command_simulate(spec);
  if (command == "verify")
    return command_verify(spec);
  if (command == "fit")
    return command_fit(spec);
  throw InputError("unknown command \"" + command + "\"");
}

std::string run_dir(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "run_%04zu", index);
  return buf;
}

} // namespace

CommandResult command_sweep(const Json& base, const std::vector<SweepAxis>& axes,
                            const std::string& command, unsigned jobs) {
  if (command != "check" && command != "simulate" && command != "verify" && command != "fit")
    throw InputError("sweep --command must be check, simulate, verify or fit");
  std::vector<std::vector<std::string>> points{{}};
  for (const auto& axis : axes) {
    if (axis.values.empty())
      throw InputError("sweep axis " + axis.key + " has no values");
    std::vector<std::vector<std::string>> next;
    for (const auto& prefix : points)
      for (const auto& v : axis.values) {
        auto p = prefix;
        p.push_back(axis.key + "=" + v);
        next.push_back(std::move(p));
      }
    points = std::move(next);
  }

  std::vector<CommandResult> results(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        Json doc = base;
        for (const auto& o : points[i])
          apply_override(doc, o);
        results[i] = dispatch(command, parse_spec(doc));
      } catch (const std::exception& e) {
        results[i].exit_code = kExitError;
        results[i].report = header(command, nullptr);
        results[i].report["error"] = e.what();
        results[i].report["exit_code"] = kExitError;
      }
    }
  };
  const unsigned n_workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(points.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < n_workers; ++w)
    pool.emplace_back(worker);
  for (auto& th : pool)
    th.join();

  CommandResult r;
  r.report = header("sweep", nullptr);
  r.report["base"] = base;
  r.report["sweep_command"] = command;
  r.report["runs"] = Json::array();
  bool any_error = false, any_unmet = false;
  for (std::size_t i = 0; i < points.size(); ++i) {
    any_error = any_error || results[i].exit_code == kExitError;
    any_unmet = any_unmet || results[i].exit_code == kExitConditionsUnmet;
    r.report["runs"].push_back({{"index", i},
                                {"directory", run_dir(i)},
                                {"overrides", points[i]},
                                {"exit_code", results[i].exit_code},
                                {"report", std::move(results[i].report)}});
    for (auto& [name, contents] : results[i].files)
      r.files.emplace_back(run_dir(i) + "/" + name, std::move(contents));
  }
  r.exit_code = any_error ? kExitError : any_unmet ? kExitConditionsUnmet : kExitOk;
  r.report["exit_code"] = r.exit_code;
  return r;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw InputError("cannot write " + path.string());
  out << contents;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"viscoelastic wave equation lab: potential-well constants, simulation and decay audits",
               "viscodecay"};
  app.require_subcommand(1);
  std::string spec_path, out_dir, csv_path, sweep_command = "verify";
  std::vector<std::string> overrides, vary;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());

  auto add_common = [&](CLI::App* sub, bool spec_required) {
    auto* opt = sub->add_option("--spec", spec_path, "JSON run specification");
    if (spec_required)
      opt->required();
    sub->add_option("--out", out_dir, "directory for the report and artifacts");
    sub->add_option("--override", overrides, "dotted-path override key=value (value parsed as JSON)");
  };
  auto* check = app.add_subcommand("check", "constants and condition checks");
  auto* simulate = app.add_subcommand("simulate", "run the solver and write the energy trajectory");
  auto* verify = app.add_subcommand("verify", "check, simulate and audit the decay envelope");
  auto* fit = app.add_subcommand("fit", "fit the decay class of E(t)");
  auto* sweep = app.add_subcommand("sweep", "run one command over a parameter grid");
  add_common(check, true);
  add_common(simulate, true);
  add_common(verify, true);
  add_common(fit, false);
  add_common(sweep, true);
  fit->add_option("--csv", csv_path, "trajectory CSV to fit instead of simulating");
  sweep->add_option("--vary", vary, "axis key=v1,v2,... (repeatable; cartesian product)")->required();
  sweep->add_option("--command", sweep_command, "check, simulate, verify or fit");
  sweep->add_option("--jobs", jobs, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kExitOk : kExitError;
  }

  std::string name;
  CommandResult result;
  try {
    if (fit->parsed() && !csv_path.empty()) {
      name = "fit";
      result = command_fit_csv(read_file(csv_path));
    } else if (sweep->parsed()) {
      name = "sweep";
      Json base = Json::parse(read_file(spec_path), nullptr, false);
      if (base.is_discarded() || !base.is_object())
        throw InputError("run specification is not a JSON object");
      for (const auto& o : overrides)
        apply_override(base, o);
      std::vector<SweepAxis> axes;
      for (const auto& v : vary) {
        const auto eq = v.find('=');
        if (eq == std::string::npos || eq == 0)
          throw InputError("--vary \"" + v + "\" must look like key=v1,v2");
        SweepAxis axis{v.substr(0, eq), {}};
        std::stringstream values(v.substr(eq + 1));
        for (std::string item; std::getline(values, item, ',');)
          axis.values.push_back(item);
        axes.push_back(std::move(axis));
      }
      result = command_sweep(base, axes, sweep_command, jobs);
    } else {
      if (spec_path.empty())
        throw InputError("--spec is required");
      name = check->parsed() ? "check" : simulate->parsed() ? "simulate" : verify->parsed() ? "verify" : "fit";
      const RunSpec spec = parse_spec(read_file(spec_path), overrides);
      result = dispatch(name, spec);
    }
  } catch (const SpecError& e) {
    err << "invalid run specification:\n";
    for (const auto& v : e.violations())
      err << "  - " << v << "\n";
    Json report = header(name.empty() ? "parse" : name, nullptr);
    report["violations"] = e.violations();
    report["exit_code"] = kExitError;
    out << dump17(report);
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }

  const std::string report_text = dump17(result.report);
  out << report_text;
  if (result.report.contains("error"))
    err << "error: " << result.report["error"].get<std::string>() << "\n";
  if (!out_dir.empty()) {
    try {
      const std::filesystem::path dir(out_dir);
      write_file(dir / (name + ".json"), report_text);
      for (const auto& [file, contents] : result.files)
        write_file(dir / file, contents);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kExitError;
    }
  }
  return result.exit_code;
}

} // namespace viscodecay
