#pragma once

#include "viscodecay/state.hpp"

#include <json.hpp>

#include <string>

namespace viscodecay {

using Json = nlohmann::ordered_json;

/// "%.17g"; non-finite values become "nan", "inf" or "-inf".
std::string format17(double x);

/// Serializes with every floating-point number at 17 significant digits.
/// Non-finite numbers are written as null.
std::string dump17(const Json& value, int indent = 2);

/// Trajectory as CSV with columns
/// t,E,scriptE,kinetic,elastic,memory,source_modular,lambda_t,dissipation.
std::string trajectory_csv(const Trajectory& traj);

/// Reads a CSV written by trajectory_csv back into (t, E) columns.
void read_trajectory_csv(const std::string& text, std::vector<double>& t, std::vector<double>& E);

} // namespace viscodecay
