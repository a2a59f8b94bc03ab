#pragma once

#include <cstdint>
#include <compare>
#include <string>
#include <vector>

#include "tft/error.hpp"

namespace tft {

// Exact dyadic rational m / 2^k, kept in normal form (m odd or k == 0).
// The full range of values needed here is modest; int64 numerators with
// __int128 intermediates are plenty.
struct Dyadic {
    std::int64_t m = 0;
    int k = 0; // exponent, k >= 0

    Dyadic() = default;
    Dyadic(std::int64_t num, int exp);
    static Dyadic integer(std::int64_t n) { return Dyadic(n, 0); }

    double to_double() const;
    bool is_integer() const { return k == 0; }

    Dyadic operator+(const Dyadic& o) const;
    Dyadic operator-(const Dyadic& o) const;
    Dyadic operator-() const { return Dyadic(-m, k); }
    Dyadic operator*(const Dyadic& o) const;
    // Multiply by 2^j (j may be negative).
    Dyadic times_pow2(int j) const;

    std::strong_ordering operator<=>(const Dyadic& o) const;
    bool operator==(const Dyadic& o) const = default;

    std::string str() const;
};

// Exact rational used for correlation-function sample points (these may be
// non-dyadic, e.g. 1/7).  Always normalized with q > 0, gcd(p, q) = 1.
struct Rational {
    std::int64_t p = 0;
    std::int64_t q = 1;

    Rational() = default;
    Rational(std::int64_t num, std::int64_t den);
    Rational(const Dyadic& d);

    double to_double() const;
    bool is_dyadic() const; // q a power of two
    Dyadic to_dyadic() const;

    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    Rational operator/(const Rational& o) const;

    std::strong_ordering operator<=>(const Rational& o) const;
    bool operator==(const Rational& o) const = default;

    std::string str() const;
};

// Parse "3/8", "0.375" or "1" exactly.
Rational parse_rational(const std::string& text);

// A standard dyadic partition 0 = x_0 < x_1 < ... < x_n = 1, stored via its
// interior breakpoints plus the endpoints.  Validity (every interval standard
// dyadic, i.e. of the form [j/2^s, (j+1)/2^s]) is checked on construction.
struct DyadicPartition {
    std::vector<Dyadic> points; // includes 0 and 1

    DyadicPartition() = default;
    explicit DyadicPartition(std::vector<Dyadic> pts);

    std::size_t intervals() const { return points.empty() ? 0 : points.size() - 1; }
};

bool is_standard_dyadic_interval(const Dyadic& a, const Dyadic& b);

} // namespace tft
