#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace molcurr {

// Exact rational with int64 storage; products are formed in 128 bits and
// reduced before narrowing. Overflow after reduction throws.
class Fraction {
 public:
  constexpr Fraction() = default;
  Fraction(std::int64_t num, std::int64_t den = 1) { assign(num, den); }

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
  bool is_integer() const noexcept { return den_ == 1; }

  // Accepts "3", "-2", "0.125", "1/8", "1e-1" is rejected.
  static Fraction parse(std::string_view text);
  std::string str() const;

  friend Fraction operator+(const Fraction &a, const Fraction &b) {
    return make(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                static_cast<__int128>(a.den_) * b.den_);
  }
  friend Fraction operator-(const Fraction &a, const Fraction &b) { return a + Fraction(-b.num_, b.den_); }
  friend Fraction operator*(const Fraction &a, const Fraction &b) {
    return make(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
  }
  friend Fraction operator/(const Fraction &a, const Fraction &b) {
    if (b.num_ == 0) throw std::domain_error("Fraction: division by zero");
    return make(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
  }
  Fraction &operator+=(const Fraction &o) { return *this = *this + o; }
  Fraction &operator*=(const Fraction &o) { return *this = *this * o; }

  friend bool operator==(const Fraction &, const Fraction &) = default;
  friend std::strong_ordering operator<=>(const Fraction &a, const Fraction &b) {
    return static_cast<__int128>(a.num_) * b.den_ <=> static_cast<__int128>(b.num_) * a.den_;
  }

 private:
  static Fraction make(__int128 num, __int128 den);
  void assign(std::int64_t num, std::int64_t den);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace molcurr
