#pragma once

// Shared result types for inequality checks and their JSON form.

#include <string>
#include <vector>

#include <json.hpp>

namespace uclab {

using Json = nlohmann::ordered_json;

/// Encodes a real for reports: finite values as numbers, infinities as the
/// strings "inf" / "-inf", NaN as "nan".
Json json_number(double value);

/// Serializes with every floating-point number printed to 17 significant
/// digits, so identical inputs give identical bytes.
std::string dump_json(const Json& value, int indent = 2);

/// One inequality lhs >= rhs, judged with slack `tolerance`.
struct Check {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // lhs - rhs
  double tolerance = 0.0;
  bool pass = true;
  /// Only binding when the report's hypothesis holds.
  bool conditional = false;
};

enum class Verdict { kPass, kHypothesisViolation, kFail };

const char* to_string(Verdict v) noexcept;

struct VerificationReport {
  std::string subject;
  bool hypothesis_ok = true;
  std::vector<Check> checks;
  Json details = Json::object();

  Check& add_check(std::string name, double lhs, double rhs, double tolerance,
                   bool conditional = false);

  /// A failing unconditional check, or a failing conditional one while the
  /// hypothesis holds, is kFail. Otherwise kHypothesisViolation if the
  /// hypothesis is off, else kPass.
  Verdict verdict() const;
  bool passed() const { return verdict() == Verdict::kPass; }
  /// Smallest margin among checks that count toward the verdict.
  double worst_margin() const;
};

Json to_json(const Check& c);
Json to_json(const VerificationReport& r);

}  // namespace uclab
