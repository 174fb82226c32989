#include "uclab/text_format.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "uclab/errors.hpp"
#include "uclab/families.hpp"

namespace uclab {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string_view strip_comment(std::string_view s) {
  const auto hash = s.find('#');
  return hash == std::string_view::npos ? s : s.substr(0, hash);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

double parse_real(std::string_view token, std::size_t line) {
  const std::string buf(token);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size() || errno == ERANGE) {
    throw ParseError(line, "expected a number, got '" + buf + "'");
  }
  return v;
}

int parse_int(std::string_view token, std::size_t line) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(line, "expected an integer, got '" + std::string(token) + "'");
  }
  return v;
}

// Returns true and sets n if the line is an "n=<int>" header.
bool parse_header(std::string_view body, std::size_t line, int& n) {
  if (body.size() < 2 || body[0] != 'n' || trim(body.substr(1)).empty() || trim(body.substr(1))[0] != '=') {
    return false;
  }
  n = parse_int(trim(trim(body.substr(1)).substr(1)), line);
  if (n < 1 || n > kMaxSparseBits) throw ParseError(line, "n out of range");
  return true;
}

template <typename Fn>
void for_each_line(std::istream& in, Fn fn) {
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto body = trim(strip_comment(raw));
    if (!body.empty()) fn(body, line);
  }
}

// Largest element named in a set token, without range checks.
int max_element_in(std::string_view token, std::size_t line) {
  if (token == "-") return 0;
  int top = 0;
  std::size_t start = 0;
  while (start <= token.size()) {
    const auto comma = token.find(',', start);
    const auto piece = token.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    top = std::max(top, parse_int(trim(piece), line));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return top;
}

template <typename T, typename Parse>
T load_with(const std::string& path, Parse parse) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path);
  try {
    return parse(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.detail(), path);
  }
}

}  // namespace

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_set(Mask mask) {
  if (mask == 0) return "-";
  std::string out;
  for (int i = 0; mask != 0; ++i, mask >>= 1) {
    if (mask & 1u) {
      if (!out.empty()) out += ',';
      out += std::to_string(i + 1);
    }
  }
  return out;
}

Mask parse_set(std::string_view token, int max_element, std::size_t line) {
  token = trim(token);
  if (token == "-") return 0;
  if (token.empty()) throw ParseError(line, "empty set token (use '-' for the empty set)");
  Mask mask = 0;
  std::size_t start = 0;
  while (true) {
    const auto comma = token.find(',', start);
    const auto piece = trim(token.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (piece.empty()) throw ParseError(line, "empty element in set '" + std::string(token) + "'");
    const int e = parse_int(piece, line);
    if (e < 1 || e > max_element) {
      throw ParseError(line, "element " + std::to_string(e) + " outside [1, " + std::to_string(max_element) + "]");
    }
    mask |= Mask{1} << (e - 1);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return mask;
}

SubsetDistribution parse_distribution(std::istream& in) {
  int n = 0;
  std::vector<SubsetDistribution::Entry> pairs;
  for_each_line(in, [&](std::string_view body, std::size_t line) {
    if (n == 0) {
      if (!parse_header(body, line, n)) throw ParseError(line, "expected header 'n=<int>'");
      return;
    }
    const auto fields = split_ws(body);
    if (fields.size() != 2) throw ParseError(line, "expected '<set> <mass>'");
    const Mask m = parse_set(fields[0], n, line);
    const double mass = parse_real(fields[1], line);
    if (!(mass >= 0.0)) throw ParseError(line, "mass must be nonnegative");
    pairs.push_back({m, mass});
  });
  if (n == 0) throw ParseError(0, "missing header 'n=<int>'");
  if (pairs.empty()) throw ParseError(0, "distribution has no entries");
  try {
    return make_distribution(n, pairs);
  } catch (const std::exception& e) {
    throw ParseError(0, e.what());
  }
}

void write_distribution(std::ostream& out, const SubsetDistribution& d) {
  out << "n=" << d.n() << '\n';
  for (const auto& e : d.entries()) out << format_set(e.mask) << ' ' << format_real(e.mass) << '\n';
}

SetFamily parse_family(std::istream& in) {
  int n = 0;
  bool first = true;
  std::vector<std::pair<std::string, std::size_t>> tokens;
  for_each_line(in, [&](std::string_view body, std::size_t line) {
    if (first) {
      first = false;
      if (parse_header(body, line, n)) return;
    }
    const auto fields = split_ws(body);
    if (fields.size() != 1) throw ParseError(line, "expected one set per line");
    tokens.emplace_back(std::string(fields[0]), line);
  });
  if (tokens.empty()) throw ParseError(0, "family has no members");
  if (n == 0) {
    for (const auto& [tok, line] : tokens) n = std::max(n, max_element_in(tok, line));
    n = std::max(n, 1);
    if (n > kMaxSparseBits) throw ParseError(0, "n out of range");
  }
  std::vector<Mask> members;
  members.reserve(tokens.size());
  for (const auto& [tok, line] : tokens) members.push_back(parse_set(tok, n, line));
  return SetFamily(n, std::move(members));
}

void write_family(std::ostream& out, const SetFamily& f) {
  out << "n=" << f.n() << '\n';
  for (Mask m : f.members()) out << format_set(m) << '\n';
}

LemmaInstance parse_instance(std::istream& in, double mu, double threshold) {
  std::vector<LemmaEntry> entries;
  for_each_line(in, [&](std::string_view body, std::size_t line) {
    const auto fields = split_ws(body);
    if (fields.size() != 2) throw ParseError(line, "expected '<q> <p>'");
    const double q = parse_real(fields[0], line);
    const double p = parse_real(fields[1], line);
    if (!(q >= 0.0)) throw ParseError(line, "weight must be nonnegative");
    if (!(p >= 0.0 && p <= 1.0)) throw ParseError(line, "p must lie in [0, 1]");
    entries.push_back({q, p});
  });
  if (entries.empty()) throw ParseError(0, "instance has no entries");
  try {
    return LemmaInstance(std::move(entries), mu, threshold);
  } catch (const std::exception& e) {
    throw ParseError(0, e.what());
  }
}

void write_instance(std::ostream& out, const LemmaInstance& inst) {
  for (const auto& e : inst.entries()) out << format_real(e.weight) << ' ' << format_real(e.p) << '\n';
}

SubsetDistribution load_distribution(const std::string& path) {
  return load_with<SubsetDistribution>(path, [](std::istream& in) { return parse_distribution(in); });
}

SetFamily load_family(const std::string& path) {
  return load_with<SetFamily>(path, [](std::istream& in) { return parse_family(in); });
}

LemmaInstance load_instance(const std::string& path, double mu, double threshold) {
  return load_with<LemmaInstance>(path, [&](std::istream& in) { return parse_instance(in, mu, threshold); });
}

}  // namespace uclab
