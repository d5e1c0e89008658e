#pragma once

#include "viscodecay/errors.hpp"
#include "viscodecay/model.hpp"
#include "viscodecay/report.hpp"
#include "viscodecay/state.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace viscodecay {

/// Initial-data profile.
///   zero
///   sine-mode         amplitude * prod_a sin(mode_a pi x_a / L_a)
///   bump              amplitude * exp(1 - 1 / (1 - r^2)) for r = |x - center| / width < 1
///   scaled-eigenmode  first sine mode scaled so that sqrt(l) ||grad u0|| = amplitude * lambda1
struct InitialProfile {
  std::string kind = "zero";
  double amplitude = 0.0;
  std::array<int, 2> mode{1, 1};
  std::array<double, 2> center{0.5, 0.5};
  double width = 0.25;
};

enum class EnvelopeRequest { Auto, TypeI, TypeII };

struct AnalysisOptions {
  EnvelopeRequest envelope = EnvelopeRequest::Auto;
  bool fit = true;
  std::optional<double> B_override;
  /// Type II exponent; only set when the resolved envelope is Type II.
  double sigma = 0.0;
  bool type_two = false;
};

struct RunSpec {
  /// Effective document with every default filled in.
  Json document;
  DomainSpec dom;
  ExponentField m;
  ExponentField p;
  double q_max = 6.0;
  RelaxationKernel kernel = RelaxationKernel::zero();
  double a = 1.0;
  double b = 1.0;
  InitialProfile u0;
  InitialProfile u1;
  SimConfig time;
  AnalysisOptions analysis;

  Model model() const { return Model{dom, kernel, m, p, a, b}; }
};

/// Raised by parse_spec with every violation found, not just the first.
class SpecError : public InputError {
public:
  explicit SpecError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

private:
  std::vector<std::string> violations_;
};

/// Sets a dotted path ("time.dt", "domain.nodes.0") to a value parsed as JSON,
/// or as a string when it is not valid JSON. Missing objects are created.
void apply_override(Json& doc, const std::string& assignment);

/// Validates a JSON run specification and fills defaults.
RunSpec parse_spec(const Json& doc);
RunSpec parse_spec(const std::string& text, const std::vector<std::string>& overrides = {});

/// Displacement field for a profile that does not depend on the constants.
Field profile_field(const InitialProfile& profile, const DomainSpec& dom);

} // namespace viscodecay
