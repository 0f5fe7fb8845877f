// SPDX-License-Identifier: Apache-2.0
#include "memorepair/rational.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace memorepair {

namespace {

using i128 = __int128;

std::int64_t checked_narrow(i128 v, const char* what) {
    if (v > i128(INT64_MAX) || v < i128(INT64_MIN)) {
        throw std::overflow_error(std::string("rational overflow in ") + what);
    }
    return static_cast<std::int64_t>(v);
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    num_ = num;
    den_ = den;
}

Rational Rational::from_decimal(std::string_view text) {
    if (text.empty()) throw std::invalid_argument("empty decimal string");
    bool neg = false;
    size_t i = 0;
    if (text[0] == '+' || text[0] == '-') {
        neg = text[0] == '-';
        i = 1;
    }
    i128 num = 0;
    i128 den = 1;
    bool after_point = false;
    bool any_digit = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c == '.') {
            if (after_point) throw std::invalid_argument("malformed decimal: " + std::string(text));
            after_point = true;
            continue;
        }
        if (c < '0' || c > '9') {
            throw std::invalid_argument("malformed decimal: " + std::string(text));
        }
        any_digit = true;
        num = num * 10 + (c - '0');
        if (after_point) den *= 10;
        if (num > i128(INT64_MAX) || den > i128(INT64_MAX)) {
            throw std::overflow_error("decimal literal too large: " + std::string(text));
        }
    }
    if (!any_digit) throw std::invalid_argument("malformed decimal: " + std::string(text));
    if (neg) num = -num;
    return Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

Rational Rational::from_double_scaled(double x, std::int64_t scale) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite value");
    double scaled = x * static_cast<double>(scale);
    if (scaled > 9.0e18 || scaled < -9.0e18) throw std::overflow_error("value out of range");
    return Rational(static_cast<std::int64_t>(std::llround(scaled)), scale);
}

Rational Rational::operator+(const Rational& o) const {
    i128 n = i128(num_) * o.den_ + i128(o.num_) * den_;
    i128 d = i128(den_) * o.den_;
    // Reduce in 128 bits before narrowing.
    i128 x = n < 0 ? -n : n, y = d;
    while (y != 0) {
        i128 t = x % y;
        x = y;
        y = t;
    }
    if (x > 1) {
        n /= x;
        d /= x;
    }
    return Rational(checked_narrow(n, "add"), checked_narrow(d, "add"));
}

Rational Rational::operator-(const Rational& o) const { return *this + (-o); }

Rational Rational::operator-() const {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
}

Rational Rational::operator*(const Rational& o) const {
    std::int64_t g1 = std::gcd(num_ < 0 ? -num_ : num_, o.den_);
    std::int64_t g2 = std::gcd(o.num_ < 0 ? -o.num_ : o.num_, den_);
    i128 n = i128(num_ / g1) * (o.num_ / g2);
    i128 d = i128(den_ / g2) * (o.den_ / g1);
    return Rational(checked_narrow(n, "mul"), checked_narrow(d, "mul"));
}

Rational Rational::operator/(const Rational& o) const {
    if (o.num_ == 0) throw std::invalid_argument("rational division by zero");
    Rational inv;
    inv.num_ = o.num_ < 0 ? -o.den_ : o.den_;
    inv.den_ = o.num_ < 0 ? -o.num_ : o.num_;
    return *this * inv;
}

bool Rational::operator<(const Rational& o) const {
    return i128(num_) * o.den_ < i128(o.num_) * den_;
}

std::string Rational::str() const {
    return std::to_string(num_) + "/" + std::to_string(den_);
}

std::string format_fixed(const Rational& value, int decimals) {
    i128 pow = 1;
    for (int i = 0; i < decimals; ++i) pow *= 10;
    // round(|v| * 10^d + 1/2), half away from zero
    i128 n = i128(value.num() < 0 ? -value.num() : value.num()) * pow;
    i128 d = value.den();
    i128 scaled = (2 * n + d) / (2 * d);
    std::string digits = std::to_string((long long)(scaled % pow));
    while ((int)digits.size() < decimals) digits.insert(digits.begin(), '0');
    std::string out = std::to_string((long long)(scaled / pow));
    if (decimals > 0) out += "." + digits;
    if (value.num() < 0 && scaled != 0) out.insert(out.begin(), '-');
    return out;
}

}  // namespace memorepair
