#include "uclab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace uclab {

Json json_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

namespace {

void write_string(std::ostream& os, const std::string& s) {
  // Reuse the library's escaping for strings.
  os << Json(s).dump();
}

void write_value(std::ostream& os, const Json& v, int indent, int depth) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  const char* sep = indent > 0 ? ": " : ":";
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        os << "{}";
        return;
      }
      os << '{' << nl;
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) os << ',' << nl;
        first = false;
        os << pad;
        write_string(os, it.key());
        os << sep;
        write_value(os, it.value(), indent, depth + 1);
      }
      os << nl << close_pad << '}';
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        os << "[]";
        return;
      }
      os << '[' << nl;
      bool first = true;
      for (const auto& e : v) {
        if (!first) os << ',' << nl;
        first = false;
        os << pad;
        write_value(os, e, indent, depth + 1);
      }
      os << nl << close_pad << ']';
      return;
    }
    case Json::value_t::number_float: {
      const double d = v.get<double>();
      if (!std::isfinite(d)) {
        write_value(os, json_number(d), indent, depth);
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", d == 0.0 ? 0.0 : d);  // no "-0"
      os << buf;
      return;
    }
    default:
      os << v.dump();
  }
}

}  // namespace

std::string dump_json(const Json& value, int indent) {
  std::ostringstream os;
  write_value(os, value, indent, 0);
  return os.str();
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::kPass: return "pass";
    case Verdict::kHypothesisViolation: return "hypothesis_violation";
    case Verdict::kFail: return "fail";
  }
  return "unknown";
}

Check& VerificationReport::add_check(std::string name, double lhs, double rhs, double tolerance,
                                     bool conditional) {
  Check c;
  c.name = std::move(name);
  c.lhs = lhs;
  c.rhs = rhs;
  c.margin = lhs - rhs;
  c.tolerance = tolerance;
  c.pass = c.margin >= -tolerance;
  c.conditional = conditional;
  checks.push_back(std::move(c));
  return checks.back();
}

Verdict VerificationReport::verdict() const {
  for (const auto& c : checks) {
    if (!c.pass && (!c.conditional || hypothesis_ok)) return Verdict::kFail;
  }
  return hypothesis_ok ? Verdict::kPass : Verdict::kHypothesisViolation;
}

double VerificationReport::worst_margin() const {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& c : checks) {
    if (c.conditional && !hypothesis_ok) continue;
    worst = std::min(worst, c.margin);
  }
  return worst;
}

Json to_json(const Check& c) {
  Json j;
  j["name"] = c.name;
  j["lhs"] = json_number(c.lhs);
  j["rhs"] = json_number(c.rhs);
  j["margin"] = json_number(c.margin);
  j["tolerance"] = c.tolerance;
  j["pass"] = c.pass;
  if (c.conditional) j["conditional"] = true;
  return j;
}

Json to_json(const VerificationReport& r) {
  Json j;
  j["subject"] = r.subject;
  j["verdict"] = to_string(r.verdict());
  j["hypothesis_ok"] = r.hypothesis_ok;
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  j["checks"] = std::move(checks);
  j["details"] = r.details;
  return j;
}

}  // namespace uclab
