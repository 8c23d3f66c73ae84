#include "qmod/units.h"

#include <cctype>
#include <cmath>
#include <limits>

#include "qmod/errors.h"

namespace qmod {

namespace {

Nanos unit_scale(std::string_view unit) {
  if (unit == "ns") return 1;
  if (unit == "us") return kNanosPerMicro;
  if (unit == "ms") return kNanosPerMilli;
  if (unit == "s") return kNanosPerSecond;
  return 0;
}

}  // namespace

Nanos parse_duration(std::string_view text) {
  const std::string original(text);
  auto fail = [&](const char* why) -> Nanos {
    throw ConfigError("invalid duration '" + original + "': " + why);
  };

  std::size_t pos = 0;
  while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  bool negative = false;
  if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
    negative = text[pos] == '-';
    ++pos;
  }

  std::string int_digits;
  std::string frac_digits;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
    int_digits.push_back(text[pos++]);
  }
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      frac_digits.push_back(text[pos++]);
    }
  }
  if (int_digits.empty() && frac_digits.empty()) return fail("missing number");
  while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  std::string_view unit = text.substr(pos);
  while (!unit.empty() && std::isspace(static_cast<unsigned char>(unit.back()))) unit.remove_suffix(1);
  if (unit.empty()) return fail("missing unit suffix (ns, us, ms, s)");
  const Nanos scale = unit_scale(unit);
  if (scale == 0) return fail("unknown unit suffix");

  // Strip trailing zeros in the fraction so "2.50us" behaves like "2.5us".
  while (!frac_digits.empty() && frac_digits.back() == '0') frac_digits.pop_back();

  constexpr Nanos kMax = std::numeric_limits<Nanos>::max();
  Nanos whole = 0;
  for (char c : int_digits) {
    if (whole > (kMax - (c - '0')) / 10) return fail("overflow");
    whole = whole * 10 + (c - '0');
  }
  if (whole > kMax / scale) return fail("overflow");
  Nanos result = whole * scale;

  Nanos frac_scale = scale;
  for (char c : frac_digits) {
    if (frac_scale % 10 != 0) return fail("not a whole number of nanoseconds");
    frac_scale /= 10;
    result += (c - '0') * frac_scale;
  }
  return negative ? -result : result;
}

std::string format_duration(Nanos ns) { return std::to_string(ns) + "ns"; }

Nanos round_half_up(double ns) {
  if (!std::isfinite(ns)) throw std::domain_error("cannot round a non-finite duration");
  return static_cast<Nanos>(std::floor(ns + 0.5));
}

}  // namespace qmod
