#include "viscodecay/report.hpp"

#include "viscodecay/errors.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace viscodecay {

std::string format17(double x) {
  if (std::isnan(x))
    return "nan";
  if (std::isinf(x))
    return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void dump_into(std::string& out, const Json& v, int indent, int depth) {
  const auto newline = [&](int d) {
    if (indent < 0)
      return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (v.type()) {
  case Json::value_t::object: {
    if (v.empty()) {
      out += "{}";
      return;
    }
    out += '{';
    bool first = true;
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (!first)
        out += ',';
      first = false;
      newline(depth + 1);
      out += Json(it.key()).dump();
      out += indent < 0 ? ":" : ": ";
      dump_into(out, it.value(), indent, depth + 1);
    }
    newline(depth);
    out += '}';
    return;
  }
  case Json::value_t::array: {
    if (v.empty()) {
      out += "[]";
      return;
    }
    out += '[';
    bool first = true;
    for (const auto& item : v) {
      if (!first)
        out += ',';
      first = false;
      newline(depth + 1);
      dump_into(out, item, indent, depth + 1);
    }
    newline(depth);
    out += ']';
    return;
  }
  case Json::value_t::number_float: {
    const double x = v.get<double>();
    out += std::isfinite(x) ? format17(x) : "null";
    return;
  }
  default:
    out += v.dump();
  }
}

} // namespace

std::string dump17(const Json& value, int indent) {
  std::string out;
  dump_into(out, value, indent, 0);
  out += '\n';
  return out;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t,E,scriptE,kinetic,elastic,memory,source_modular,lambda_t,dissipation\n";
  for (const auto& pt : traj.points) {
    const auto& e = pt.energy;
    for (double x : {e.t, e.E, e.scriptE, e.kinetic, e.elastic, e.memory, e.source_modular, pt.lambda}) {
      out += format17(x);
      out += ',';
    }
    out += format17(e.dissipation);
    out += '\n';
  }
  return out;
}

void read_trajectory_csv(const std::string& text, std::vector<double>& t, std::vector<double>& E) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || (line != "t,E" && line.rfind("t,E,", 0) != 0))
    throw InputError("trajectory CSV must start with the header t,E,...");
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty())
      continue;
    std::istringstream cells(line);
    std::string a, b;
    if (!std::getline(cells, a, ',') || !std::getline(cells, b, ','))
      throw InputError("trajectory CSV row " + std::to_string(row) + " has fewer than 2 columns");
    try {
      t.push_back(std::stod(a));
      E.push_back(std::stod(b));
    } catch (const std::exception&) {
      throw InputError("trajectory CSV row " + std::to_string(row) + " is not numeric");
    }
  }
}

} // namespace viscodecay
