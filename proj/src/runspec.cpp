#include "viscodecay/runspec.hpp"

#include <cmath>
#include <numbers>
#include <set>

namespace viscodecay {

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty())
      out += "; ";
    out += s;
  }
  return out;
}

// Reads one JSON object, recording the effective value of every key it is
// asked for and reporting keys nobody asked for.
class Block {
public:
  Block(const Json* obj, std::string path, std::vector<std::string>& violations, Json& out)
      : obj_(obj), path_(std::move(path)), violations_(violations), out_(out) {
    out_ = Json::object();
    if (obj_ && !obj_->is_null() && !obj_->is_object()) {
      violations_.push_back(path_ + " must be an object");
      obj_ = nullptr;
    }
  }

  bool has(const std::string& key) const {
    return obj_ && obj_->is_object() && obj_->contains(key) && !(*obj_)[key].is_null();
  }

  double number(const std::string& key, double fallback) {
    const Json* v = take(key);
    double x = fallback;
    if (v) {
      if (v->is_number())
        x = v->get<double>();
      else
        violations_.push_back(name(key) + " must be a number");
    }
    out_[key] = x;
    return x;
  }

  std::optional<double> optional_number(const std::string& key) {
    const Json* v = take(key);
    if (!v) {
      out_[key] = nullptr;
      return std::nullopt;
    }
    if (!v->is_number()) {
      violations_.push_back(name(key) + " must be a number or null");
      out_[key] = nullptr;
      return std::nullopt;
    }
    out_[key] = v->get<double>();
    return v->get<double>();
  }

  long long integer(const std::string& key, long long fallback) {
    const Json* v = take(key);
    long long x = fallback;
    if (v) {
      if (v->is_number_integer())
        x = v->get<long long>();
      else if (v->is_number_float() && std::floor(v->get<double>()) == v->get<double>())
        x = static_cast<long long>(v->get<double>());
      else
        violations_.push_back(name(key) + " must be an integer");
    }
    out_[key] = x;
    return x;
  }

  bool boolean(const std::string& key, bool fallback) {
    const Json* v = take(key);
    bool x = fallback;
    if (v) {
      if (v->is_boolean())
        x = v->get<bool>();
      else
        violations_.push_back(name(key) + " must be true or false");
    }
    out_[key] = x;
    return x;
  }

  std::string string(const std::string& key, const std::string& fallback,
                     std::initializer_list<const char*> allowed) {
    const Json* v = take(key);
    std::string x = fallback;
    if (v) {
      if (v->is_string())
        x = v->get<std::string>();
      else
        violations_.push_back(name(key) + " must be a string");
    }
    bool known = allowed.size() == 0;
    std::string list;
    for (const char* a : allowed) {
      known = known || x == a;
      list += list.empty() ? "" : ", ";
      list += a;
    }
    if (!known) {
      violations_.push_back(name(key) + " = \"" + x + "\" is not one of: " + list);
      x = fallback;
    }
    out_[key] = x;
    return x;
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    const Json* v = take(key);
    if (v) {
      if (v->is_array() && std::all_of(v->begin(), v->end(), [](const Json& e) { return e.is_number(); })) {
        fallback.clear();
        for (const auto& e : *v)
          fallback.push_back(e.get<double>());
      } else {
        violations_.push_back(name(key) + " must be an array of numbers");
      }
    }
    out_[key] = fallback;
    return fallback;
  }

  const Json* child(const std::string& key) {
    const Json* v = take(key);
    return v;
  }

  Json& out(const std::string& key) { return out_[key]; }

  void finish() {
    if (!obj_ || !obj_->is_object())
      return;
    for (auto it = obj_->begin(); it != obj_->end(); ++it)
      if (!seen_.count(it.key()))
        violations_.push_back("unknown key " + name(it.key()));
  }

  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
  const Json* take(const std::string& key) {
    seen_.insert(key);
    if (!has(key))
      return nullptr;
    return &(*obj_)[key];
  }

  const Json* obj_;
  std::string path_;
  std::vector<std::string>& violations_;
  Json& out_;
  std::set<std::string> seen_;
};

void require(bool ok, std::vector<std::string>& violations, const std::string& message) {
  if (!ok)
    violations.push_back(message);
}

ExponentField parse_exponent(Block& parent, const std::string& key, const DomainSpec& dom,
                             double fallback, std::vector<std::string>& violations) {
  Block blk(parent.child(key), parent.name(key), violations, parent.out(key));
  const std::string profile =
      blk.string("profile", "constant", {"constant", "const", "linear", "sine-bump", "nodal"});
  ExponentField field;
  if (profile == "constant" || profile == "const") {
    field = ExponentField::constant(dom, blk.number("value", fallback));
  } else if (profile == "linear") {
    const double left = blk.number("left", fallback);
    const double right = blk.number("right", fallback);
    field = ExponentField::linear(dom, left, right);
  } else if (profile == "nodal") {
    auto values = blk.numbers("values", {});
    if (values.size() != dom.size()) {
      violations.push_back(blk.name("values") + " needs one entry per grid node (" +
                           std::to_string(dom.size()) + ")");
      values.assign(dom.size(), fallback);
    }
    field = ExponentField(std::move(values));
  } else {
    const double base = blk.number("base", fallback);
    const double amplitude = blk.number("amplitude", 0.0);
    field = ExponentField::sine_bump(dom, base, amplitude);
  }
  blk.finish();
  return field;
}

InitialProfile parse_profile(Block& parent, const std::string& key, const DomainSpec& dom,
                             InitialProfile fallback, bool allow_scaled,
                             std::vector<std::string>& violations) {
  Block blk(parent.child(key), parent.name(key), violations, parent.out(key));
  InitialProfile prof;
  prof.kind = blk.string("profile", fallback.kind, {"zero", "sine-mode", "bump", "scaled-eigenmode"});
  if (prof.kind == "scaled-eigenmode" && !allow_scaled)
    violations.push_back(blk.name("profile") + " = \"scaled-eigenmode\" is only defined for u0");
  if (prof.kind == "zero") {
    blk.finish();
    return prof;
  }
  prof.amplitude = blk.number("amplitude", fallback.amplitude);
  if (prof.kind == "sine-mode") {
    std::vector<double> modes = blk.numbers("mode", std::vector<double>(dom.dim(), 1.0));
    require(modes.size() == static_cast<std::size_t>(dom.dim()), violations,
            blk.name("mode") + " needs one entry per dimension");
    for (std::size_t k = 0; k < modes.size() && k < 2; ++k) {
      require(modes[k] >= 1.0 && std::floor(modes[k]) == modes[k], violations,
              blk.name("mode") + " entries must be positive integers");
      prof.mode[k] = static_cast<int>(modes[k]);
    }
  } else if (prof.kind == "bump") {
    std::vector<double> centre(dom.dim());
    for (int a = 0; a < dom.dim(); ++a)
      centre[a] = 0.5 * dom.length(a);
    centre = blk.numbers("center", centre);
    prof.width = blk.number("width", 0.25 * dom.length(0));
    require(centre.size() == static_cast<std::size_t>(dom.dim()), violations,
            blk.name("center") + " needs one entry per dimension");
    require(prof.width > 0.0, violations, blk.name("width") + " must be positive");
    for (std::size_t k = 0; k < centre.size() && k < 2; ++k) {
      prof.center[k] = centre[k];
      require(centre[k] - prof.width >= 0.0 && centre[k] + prof.width <= dom.length(static_cast<int>(k)),
              violations, blk.name("center") + " +- width must stay inside the domain");
    }
  }
  blk.finish();
  return prof;
}

} // namespace

SpecError::SpecError(std::vector<std::string> violations)
    : InputError("invalid run specification: " + join(violations)),
      violations_(std::move(violations)) {}

void apply_override(Json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw InputError("override \"" + assignment + "\" must look like key.path=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded())
    value = text;

  Json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty())
      throw InputError("override path \"" + path + "\" has an empty segment");
    Json* next = nullptr;
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        std::size_t used = 0;
        idx = std::stoul(key, &used);
        if (used != key.size())
          throw std::invalid_argument(key);
      } catch (const std::exception&) {
        throw InputError("override path \"" + path + "\": \"" + key + "\" is not an array index");
      }
      if (idx >= node->size())
        throw InputError("override path \"" + path + "\": index " + key + " out of range");
      next = &(*node)[idx];
    } else {
      if (node->is_null())
        *node = Json::object();
      if (!node->is_object())
        throw InputError("override path \"" + path + "\" descends into a non-object");
      next = &(*node)[key];
    }
    if (dot == std::string::npos) {
      *next = value;
      return;
    }
    node = next;
    start = dot + 1;
  }
}

RunSpec parse_spec(const Json& doc) {
  std::vector<std::string> violations;
  RunSpec spec;
  spec.document = Json::object();
  Block root(&doc, "", violations, spec.document);
  spec.document["schema"] = "viscodecay/1";

  // domain
  {
    Block blk(root.child("domain"), "domain", violations, root.out("domain"));
    const long long dim = blk.integer("dim", 1);
    if (dim != 1 && dim != 2) {
      violations.push_back("domain.dim must be 1 or 2");
    } else {
      const auto n = static_cast<std::size_t>(dim);
      const auto lengths = blk.numbers("lengths", std::vector<double>(n, 1.0));
      const auto nodes = blk.numbers("nodes", std::vector<double>(n, 51.0));
      bool ok = true;
      if (lengths.size() != n || nodes.size() != n) {
        violations.push_back("domain.lengths and domain.nodes need one entry per dimension");
        ok = false;
      }
      for (std::size_t k = 0; ok && k < n; ++k) {
        if (!(lengths[k] > 0.0) || !std::isfinite(lengths[k])) {
          violations.push_back("domain.lengths entries must be positive");
          ok = false;
        }
        if (!(nodes[k] >= 3.0) || std::floor(nodes[k]) != nodes[k]) {
          violations.push_back("domain.nodes entries must be integers >= 3");
          ok = false;
        }
      }
      if (ok) {
        spec.dom = n == 1 ? DomainSpec(lengths[0], static_cast<std::size_t>(nodes[0]))
                          : DomainSpec({lengths[0], lengths[1]},
                                       {static_cast<std::size_t>(nodes[0]), static_cast<std::size_t>(nodes[1])});
      }
    }
    blk.finish();
  }

  // exponents
  {
    Block blk(root.child("exponents"), "exponents", violations, root.out("exponents"));
    spec.m = parse_exponent(blk, "m", spec.dom, 2.0, violations);
    spec.p = parse_exponent(blk, "p", spec.dom, 4.0, violations);
    spec.q_max = blk.number("q_max", 6.0);
    for (const auto& [label, field] : {std::pair{"exponents.m", &spec.m}, std::pair{"exponents.p", &spec.p}}) {
      const auto rep = validate_exponent_bounds(*field, spec.q_max);
      if (!rep.ok)
        violations.push_back(std::string(label) + ": " + rep.message);
    }
    blk.finish();
  }

  // kernel
  bool power_kernel = false;
  double alpha = 0.0;
  {
    Block blk(root.child("kernel"), "kernel", violations, root.out("kernel"));
    const std::string kind = blk.string("kind", "exponential", {"exponential", "power", "sampled", "zero"});
    try {
      if (kind == "exponential") {
        const double g0 = blk.number("g0", 0.5);
        const double k = blk.number("k", 1.0);
        spec.kernel = RelaxationKernel::exponential(g0, k);
      } else if (kind == "power") {
        const double g0 = blk.number("g0", 0.5);
        const double C = blk.number("C", 1.0);
        alpha = blk.number("alpha", 1.5);
        power_kernel = true;
        spec.kernel = RelaxationKernel::power_law(g0, C, alpha);
      } else if (kind == "sampled") {
        const auto t = blk.numbers("t", {});
        const auto g = blk.numbers("g", {});
        std::optional<TailModel> tail;
        if (const Json* tail_doc = blk.child("tail")) {
          Block tb(tail_doc, "kernel.tail", violations, blk.out("tail"));
          TailModel tm;
          tm.kind = tb.string("kind", "exponential", {"exponential", "power"}) == "power"
                        ? TailModel::Kind::Power
                        : TailModel::Kind::Exponential;
          tm.rate = tb.number("rate", 1.0);
          tb.finish();
          tail = tm;
        } else {
          blk.out("tail") = nullptr;
        }
        const auto xi = blk.optional_number("xi");
        spec.kernel = RelaxationKernel::sampled(t, g, tail, xi);
      } else {
        spec.kernel = RelaxationKernel::zero();
      }
    } catch (const InputError& e) {
      violations.push_back(std::string("kernel: ") + e.what());
    }
    blk.finish();
  }

  // coefficients
  {
    Block blk(root.child("coefficients"), "coefficients", violations, root.out("coefficients"));
    spec.a = blk.number("a", 1.0);
    spec.b = blk.number("b", 1.0);
    require(spec.a >= 0.0, violations, "coefficients.a must be nonnegative");
    require(spec.b >= 0.0, violations, "coefficients.b must be nonnegative");
    blk.finish();
  }

  // initial data
  {
    Block blk(root.child("initial"), "initial", violations, root.out("initial"));
    InitialProfile default_u0;
    default_u0.kind = "sine-mode";
    default_u0.amplitude = 0.3;
    spec.u0 = parse_profile(blk, "u0", spec.dom, default_u0, true, violations);
    spec.u1 = parse_profile(blk, "u1", spec.dom, InitialProfile{}, false, violations);
    blk.finish();
  }

  // time
  {
    Block blk(root.child("time"), "time", violations, root.out("time"));
    spec.time.dt = blk.number("dt", 0.005);
    spec.time.t_end = blk.number("t_end", 20.0);
    const long long out_stride = blk.integer("output_stride", 1);
    const long long hist_stride = blk.integer("history_stride", 1);
    spec.time.blowup_threshold = blk.number("blowup_threshold", 1e6);
    const std::string memory = blk.string("memory", "full", {"full", "recursive"});
    require(out_stride > 0, violations, "time.output_stride must be positive");
    require(hist_stride > 0, violations, "time.history_stride must be positive");
    spec.time.output_stride = static_cast<std::size_t>(std::max(1LL, out_stride));
    spec.time.history_stride = static_cast<std::size_t>(std::max(1LL, hist_stride));
    spec.time.memory = memory == "recursive" ? MemoryMode::Recursive : MemoryMode::Full;
    if (spec.time.memory == MemoryMode::Recursive) {
      require(spec.kernel.exponential_rate().has_value() || spec.kernel.is_zero(), violations,
              "time.memory = \"recursive\" needs an exponential kernel");
      require(spec.time.history_stride == 1, violations,
              "time.memory = \"recursive\" needs time.history_stride = 1");
    }
    for (auto& v : spec.time.violations(spec.dom))
      violations.push_back(std::move(v));
    blk.finish();
  }

  // analysis
  {
    Block blk(root.child("analysis"), "analysis", violations, root.out("analysis"));
    const std::string env = blk.string("envelope", "auto", {"auto", "typeI", "typeII"});
    spec.analysis.envelope = env == "typeI"    ? EnvelopeRequest::TypeI
                             : env == "typeII" ? EnvelopeRequest::TypeII
                                               : EnvelopeRequest::Auto;
    spec.analysis.fit = blk.boolean("fit", true);
    spec.analysis.B_override = blk.optional_number("B_override");
    if (spec.analysis.B_override)
      require(*spec.analysis.B_override > 0.0, violations, "analysis.B_override must be positive");
    const auto sigma = blk.optional_number("sigma");

    spec.analysis.type_two = spec.analysis.envelope == EnvelopeRequest::TypeII ||
                             (spec.analysis.envelope == EnvelopeRequest::Auto && power_kernel);
    if (spec.analysis.type_two) {
      if (!power_kernel) {
        violations.push_back("analysis.envelope = \"typeII\" needs kernel.kind = \"power\"");
      } else {
        spec.analysis.sigma = sigma.value_or(0.5 * (3.0 - 2.0 * alpha));
        blk.out("sigma") = spec.analysis.sigma;
        require(spec.analysis.sigma > 0.0 && spec.analysis.sigma < 1.0, violations,
                "analysis.sigma must lie in (0, 1)");
        if (!(2.0 * alpha + spec.analysis.sigma < 3.0))
          violations.push_back("2α+σ<3 required (alpha = " + format17(alpha) +
                               ", sigma = " + format17(spec.analysis.sigma) + ")");
      }
    }
    blk.finish();
  }

  root.child("schema");
  if (doc.is_object() && doc.contains("schema") &&
      !(doc["schema"].is_string() && doc["schema"] == "viscodecay/1"))
    violations.push_back("schema must be \"viscodecay/1\"");
  root.finish();

  if (!violations.empty())
    throw SpecError(std::move(violations));
  return spec;
}

RunSpec parse_spec(const std::string& text, const std::vector<std::string>& overrides) {
  Json doc = Json::parse(text, nullptr, false);
  if (doc.is_discarded())
    throw SpecError({"run specification is not valid JSON"});
  if (!doc.is_object())
    throw SpecError({"run specification must be a JSON object"});
  for (const auto& o : overrides)
    apply_override(doc, o);
  return parse_spec(doc);
}

Field profile_field(const InitialProfile& profile, const DomainSpec& dom) {
  Field u = dom.zeros();
  if (profile.kind == "zero")
    return u;
  for (std::size_t j = 0; j < dom.nodes(1); ++j) {
    for (std::size_t i = 0; i < dom.nodes(0); ++i) {
      const std::size_t idx = dom.index(i, j);
      const double x[2] = {dom.coordinate(0, i), dom.coordinate(1, j)};
      double value = profile.amplitude;
      if (profile.kind == "bump") {
        double r2 = 0.0;
        for (int a = 0; a < dom.dim(); ++a)
          r2 += (x[a] - profile.center[a]) * (x[a] - profile.center[a]);
        r2 /= profile.width * profile.width;
        value = r2 < 1.0 ? value * std::exp(1.0 - 1.0 / (1.0 - r2)) : 0.0;
      } else {
        // sine-mode; scaled-eigenmode starts from the first mode
        for (int a = 0; a < dom.dim(); ++a) {
          const int k = profile.kind == "sine-mode" ? profile.mode[a] : 1;
          value *= std::sin(k * std::numbers::pi * x[a] / dom.length(a));
        }
      }
      u[idx] = value;
    }
  }
  apply_dirichlet(u, dom);
  return u;
}

} // namespace viscodecay
