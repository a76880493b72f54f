#include "molcurr/fraction.hpp"

#include <charconv>
#include <limits>

namespace molcurr {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    const __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::int64_t narrow(__int128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
    throw std::overflow_error("Fraction: value exceeds 64-bit range");
  return static_cast<std::int64_t>(v);
}

}  // namespace

Fraction Fraction::make(__int128 num, __int128 den) {
  if (den == 0) throw std::domain_error("Fraction: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const __int128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  Fraction f;
  f.num_ = narrow(num);
  f.den_ = narrow(den);
  return f;
}

void Fraction::assign(std::int64_t num, std::int64_t den) { *this = make(num, den); }

Fraction Fraction::parse(std::string_view text) {
  auto bad = [&]() { return std::invalid_argument("not an exact decimal: '" + std::string(text) + "'"); };
  if (text.empty()) throw bad();
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const Fraction n = parse(text.substr(0, slash));
    const Fraction d = parse(text.substr(slash + 1));
    return n / d;
  }
  bool negative = false;
  std::size_t pos = 0;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    pos = 1;
  }
  __int128 num = 0, den = 1;
  bool seen_digit = false, seen_point = false;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (c == '.' && !seen_point) {
      seen_point = true;
      continue;
    }
    if (c < '0' || c > '9') throw bad();
    seen_digit = true;
    num = num * 10 + (c - '0');
    if (seen_point) den *= 10;
    if (num > std::numeric_limits<std::int64_t>::max() || den > std::numeric_limits<std::int64_t>::max())
      throw bad();
  }
  if (!seen_digit) throw bad();
  return make(negative ? -num : num, den);
}

std::string Fraction::str() const {
  return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

}  // namespace molcurr
