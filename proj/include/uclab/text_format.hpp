#pragma once

// Line-oriented text formats.
//
//   distribution:  "n=<int>" header, then "<set> <mass>" per line
//   family:        optional "n=<int>" header, then "<set>" per line
//   instance:      "<q> <p>" per line
//
// A set is a comma-separated list of 1-based elements, or "-" for the empty
// set. '#' starts a comment; blank lines are ignored.

#include <iosfwd>
#include <string>
#include <string_view>

#include "uclab/lemma_instance.hpp"
#include "uclab/subset_dist.hpp"

namespace uclab {

class SetFamily;

std::string format_set(Mask mask);

/// Parses a set token. Elements must lie in [1, max_element].
Mask parse_set(std::string_view token, int max_element, std::size_t line = 0);

SubsetDistribution parse_distribution(std::istream& in);
void write_distribution(std::ostream& out, const SubsetDistribution& d);

/// Without a header, n is the largest element mentioned (at least 1).
SetFamily parse_family(std::istream& in);
void write_family(std::ostream& out, const SetFamily& f);

LemmaInstance parse_instance(std::istream& in, double mu = kDefaultMu,
                             double threshold = kDefaultThreshold);
void write_instance(std::ostream& out, const LemmaInstance& inst);

/// Convenience wrappers that open a file and prefix errors with its path.
SubsetDistribution load_distribution(const std::string& path);
SetFamily load_family(const std::string& path);
LemmaInstance load_instance(const std::string& path, double mu = kDefaultMu,
                            double threshold = kDefaultThreshold);

/// "%.17g".
std::string format_real(double v);

}  // namespace uclab
