#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace flowsparse {

/// Exact capacity arithmetic. Every structural operation (cuts, splicing,
/// capacity rounding) runs on this type; LP solves use the double view.
using Rational = boost::multiprecision::mpq_rational;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

/// Exact conversion: every finite double is a dyadic rational.
inline Rational from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite value cannot become a capacity");
  return Rational(x);
}

// Error taxonomy. The CLI maps these onto exit codes 2 (input/structure)
// and 3 (budget).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class StructureError : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class InternalError : public Error {
 public:
  using Error::Error;
};

/// Parses "3", "2.5", "-1e3" or "p/q". Decimal strings are converted exactly
/// ("0.1" is 1/10, not the nearest double).
inline Rational parse_rational(std::string_view text) {
  auto fail = [&] { throw InputError("malformed number: '" + std::string(text) + "'"); };
  if (text.empty()) fail();
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational num = parse_rational(text.substr(0, slash));
    Rational den = parse_rational(text.substr(slash + 1));
    if (den == 0) throw InputError("zero denominator in '" + std::string(text) + "'");
    return num / den;
  }
  std::size_t pos = 0;
  bool negative = false;
  if (text[pos] == '+' || text[pos] == '-') negative = text[pos++] == '-';
  boost::multiprecision::mpz_int mantissa = 0;
  long exponent = 0;
  bool any_digit = false;
  bool seen_point = false;
  for (; pos < text.size(); ++pos) {
    char c = text[pos];
    if (c >= '0' && c <= '9') {
      mantissa = mantissa * 10 + (c - '0');
      if (seen_point) --exponent;
      any_digit = true;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) fail();
  if (pos < text.size()) {
    if (text[pos] != 'e' && text[pos] != 'E') fail();
    ++pos;
    std::string rest(text.substr(pos));
    if (rest.empty()) fail();
    char* end = nullptr;
    long e = std::strtol(rest.c_str(), &end, 10);
    if (end == nullptr || *end != '\0') fail();
    exponent += e;
  }
  Rational value(mantissa);
  Rational ten(10);
  if (exponent > 0) {
    for (long i = 0; i < exponent; ++i) value *= ten;
  } else {
    for (long i = 0; i < -exponent; ++i) value /= ten;
  }
  return negative ? Rational(-value) : value;
}

inline std::string to_string(const Rational& q) { return q.str(); }

/// Numeric tolerances shared by the LP-based routines.
struct Tolerances {
  double feasibility = 1e-9;  // absolute
  double optimality = 1e-6;   // relative
};

/// Enumeration budget; FLOWSPARSE_BUDGET overrides the compiled default.
inline std::uint64_t enumeration_budget(std::uint64_t fallback = 1'000'000) {
  if (const char* env = std::getenv("FLOWSPARSE_BUDGET")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::uint64_t>(v);
  }
  return fallback;
}

/// FNV-1a, used wherever a platform-stable hash of a string is required
/// (RNG substreams, manifests).
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace flowsparse
