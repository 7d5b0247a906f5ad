#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "agcal/errors.hpp"

namespace agcal {

// Exact rational on int64 with 128-bit intermediates. Exponents and
// coefficients in the expression fragment stay tiny, so anything that
// overflows int64 after reduction is treated as leaving the fragment.
class Rational {
public:
    constexpr Rational() : num_(0), den_(1) {}
    Rational(std::int64_t n) : num_(n), den_(1) {} // NOLINT: implicit by design
    Rational(std::int64_t n, std::int64_t d) {
        if (d == 0) throw ArgumentError("rational with zero denominator");
        if (d < 0) { n = -n; d = -d; }
        const std::int64_t g = std::gcd(n, d);
        num_ = g ? n / g : n;
        den_ = g ? d / g : d;
    }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool isZero() const { return num_ == 0; }
    bool isInteger() const { return den_ == 1; }
    bool isNegative() const { return num_ < 0; }
    bool isPositive() const { return num_ > 0; }
    int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }

    double toDouble() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    Rational operator-() const { return Rational(-num_, den_, Reduced{}); }
    Rational abs() const { return num_ < 0 ? -*this : *this; }

    friend Rational operator+(const Rational& a, const Rational& b) {
        const I128 n = I128(a.num_) * b.den_ + I128(b.num_) * a.den_;
        const I128 d = I128(a.den_) * b.den_;
        return fromWide(n, d);
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return fromWide(I128(a.num_) * b.num_, I128(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.isZero()) throw ArgumentError("rational division by zero");
        return fromWide(I128(a.num_) * b.den_, I128(a.den_) * b.num_);
    }

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return I128(a.num_) * b.den_ < I128(b.num_) * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    // Integer power; negative exponents invert.
    Rational powInt(std::int64_t e) const {
        if (e == 0) return Rational(1);
        if (isZero()) {
            if (e < 0) throw ArgumentError("zero to a negative power");
            return Rational(0);
        }
        Rational base = e > 0 ? *this : Rational(den_, num_);
        std::int64_t k = e > 0 ? e : -e;
        Rational acc(1);
        while (k > 0) {
            if (k & 1) acc *= base;
            base = (k >>= 1) ? base * base : base;
        }
        return acc;
    }

    // Smallest integer >= value.
    std::int64_t ceilToInt() const {
        std::int64_t q = num_ / den_;
        if (num_ % den_ != 0 && num_ > 0) ++q;
        return q;
    }
    std::int64_t floorToInt() const {
        std::int64_t q = num_ / den_;
        if (num_ % den_ != 0 && num_ < 0) --q;
        return q;
    }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

private:
    using I128 = __int128;
    struct Reduced {};
    Rational(std::int64_t n, std::int64_t d, Reduced) : num_(n), den_(d) {}

    static Rational fromWide(I128 n, I128 d) {
        if (d == 0) throw ArgumentError("rational division by zero");
        if (d < 0) { n = -n; d = -d; }
        const I128 g = gcdWide(n < 0 ? -n : n, d);
        if (g != 0) { n /= g; d /= g; }
        constexpr I128 lo = static_cast<I128>(INT64_MIN);
        constexpr I128 hi = static_cast<I128>(INT64_MAX);
        if (n < lo || n > hi || d > hi)
            throw FragmentError("rational magnitude exceeds 64-bit range");
        return Rational(static_cast<std::int64_t>(n), static_cast<std::int64_t>(d), Reduced{});
    }
    static I128 gcdWide(I128 a, I128 b) {
        while (b != 0) { const I128 t = a % b; a = b; b = t; }
        return a;
    }

    std::int64_t num_;
    std::int64_t den_;
};

} // namespace agcal
