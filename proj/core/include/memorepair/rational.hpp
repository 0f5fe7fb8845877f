// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace memorepair {

// Exact rational over int64 with overflow-checked arithmetic. Selection
// profits, capacities, and reported metric aggregates go through this type so
// that min-cut optimality and metric comparisons are exact, not float-ish.
class Rational {
  public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den);
    static Rational integer(std::int64_t n) { return Rational(n, 1); }

    // Parses decimal strings like "0.3", "-1.25", "10" exactly.
    static Rational from_decimal(std::string_view text);
    // Nearest rational on the 1/scale grid; used to quantize float scores
    // before exact selection.
    static Rational from_double_scaled(double x, std::int64_t scale = 1000000);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    Rational operator/(const Rational& o) const;
    Rational operator-() const;

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }

    bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const Rational& o) const { return !(*this == o); }
    bool operator<(const Rational& o) const;
    bool operator>(const Rational& o) const { return o < *this; }
    bool operator<=(const Rational& o) const { return !(o < *this); }
    bool operator>=(const Rational& o) const { return !(*this < o); }

    bool is_zero() const { return num_ == 0; }
    bool negative() const { return num_ < 0; }
    bool positive() const { return num_ > 0; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    std::string str() const;

  private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

// Formats with half-up (away from zero) rounding at the given number of
// decimals. Reports use decimals=1 for percentages and decimals=2 for
// normalized cost.
std::string format_fixed(const Rational& value, int decimals);

}  // namespace memorepair
