#include "tft/dyadic.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace tft {

namespace {

std::int64_t checked_cast(__int128 v, const char* what) {
    if (v > INT64_MAX || v < INT64_MIN)
        throw DyadicError(std::string("integer overflow in ") + what);
    return static_cast<std::int64_t>(v);
}

} // namespace

Dyadic::Dyadic(std::int64_t num, int exp) : m(num), k(exp) {
    if (k < 0) throw DyadicError("negative exponent in dyadic");
    while (k > 0 && m % 2 == 0) {
        m /= 2;
        --k;
    }
    if (m == 0) k = 0;
}

double Dyadic::to_double() const { return std::ldexp(static_cast<double>(m), -k); }

Dyadic Dyadic::operator+(const Dyadic& o) const {
    int kk = std::max(k, o.k);
    __int128 a = static_cast<__int128>(m) << (kk - k);
    __int128 b = static_cast<__int128>(o.m) << (kk - o.k);
    return Dyadic(checked_cast(a + b, "dyadic add"), kk);
}

Dyadic Dyadic::operator-(const Dyadic& o) const { return *this + Dyadic(-o.m, o.k); }

Dyadic Dyadic::operator*(const Dyadic& o) const {
    __int128 prod = static_cast<__int128>(m) * o.m;
    return Dyadic(checked_cast(prod, "dyadic mul"), k + o.k);
}

Dyadic Dyadic::times_pow2(int j) const {
    if (j >= 0) {
        __int128 v = static_cast<__int128>(m) << j;
        return Dyadic(checked_cast(v, "dyadic shift"), k);
    }
    return Dyadic(m, k - j);
}

std::strong_ordering Dyadic::operator<=>(const Dyadic& o) const {
    int kk = std::max(k, o.k);
    __int128 a = static_cast<__int128>(m) << (kk - k);
    __int128 b = static_cast<__int128>(o.m) << (kk - o.k);
    if (a < b) return std::strong_ordering::less;
    if (a > b) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::string Dyadic::str() const {
    std::ostringstream os;
    if (k == 0)
        os << m;
    else
        os << m << "/" << (std::int64_t(1) << k);
    return os.str();
}

Rational::Rational(std::int64_t num, std::int64_t den) : p(num), q(den) {
    if (q == 0) throw DyadicError("zero denominator");
    if (q < 0) {
        p = -p;
        q = -q;
    }
    std::int64_t g = std::gcd(p < 0 ? -p : p, q);
    if (g > 1) {
        p /= g;
        q /= g;
    }
}

Rational::Rational(const Dyadic& d) : Rational(d.m, std::int64_t(1) << d.k) {}

double Rational::to_double() const { return static_cast<double>(p) / static_cast<double>(q); }

bool Rational::is_dyadic() const {
    std::int64_t d = q;
    while (d % 2 == 0) d /= 2;
    return d == 1;
}

Dyadic Rational::to_dyadic() const {
    if (!is_dyadic()) throw DyadicError("rational " + str() + " is not dyadic");
    int k = 0;
    std::int64_t d = q;
    while (d > 1) {
        d /= 2;
        ++k;
    }
    return Dyadic(p, k);
}

namespace {
// reduce a/b by their gcd in 128-bit before narrowing to int64
void reduce128(__int128& a, __int128& b) {
    __int128 x = a < 0 ? -a : a, y = b;
    while (y) {
        __int128 t = x % y;
        x = y;
        y = t;
    }
    if (x > 1) {
        a /= x;
        b /= x;
    }
}
} // namespace

Rational Rational::operator+(const Rational& o) const {
    __int128 num = static_cast<__int128>(p) * o.q + static_cast<__int128>(o.p) * q;
    __int128 den = static_cast<__int128>(q) * o.q;
    reduce128(num, den);
    return Rational(checked_cast(num, "rational add"), checked_cast(den, "rational add"));
}

Rational Rational::operator-(const Rational& o) const { return *this + Rational(-o.p, o.q); }

Rational Rational::operator*(const Rational& o) const {
    __int128 num = static_cast<__int128>(p) * o.p;
    __int128 den = static_cast<__int128>(q) * o.q;
    reduce128(num, den);
    return Rational(checked_cast(num, "rational mul"), checked_cast(den, "rational mul"));
}

Rational Rational::operator/(const Rational& o) const {
    if (o.p == 0) throw DyadicError("rational division by zero");
    __int128 num = static_cast<__int128>(p) * o.q;
    __int128 den = static_cast<__int128>(q) * o.p;
    if (den < 0) {
        num = -num;
        den = -den;
    }
    reduce128(num, den);
    return Rational(checked_cast(num, "rational div"), checked_cast(den, "rational div"));
}

std::strong_ordering Rational::operator<=>(const Rational& o) const {
    __int128 a = static_cast<__int128>(p) * o.q;
    __int128 b = static_cast<__int128>(o.p) * q;
    if (a < b) return std::strong_ordering::less;
    if (a > b) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::string Rational::str() const {
    std::ostringstream os;
    if (q == 1)
        os << p;
    else
        os << p << "/" << q;
    return os.str();
}

namespace {
std::int64_t parse_int(const std::string& s, const std::string& whole) {
    try {
        std::size_t used = 0;
        std::int64_t v = std::stoll(s, &used);
        if (used != s.size()) throw ParseError("bad number: " + whole);
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError("bad number: " + whole);
    }
}
} // namespace

Rational parse_rational(const std::string& text) {
    if (text.empty()) throw ParseError("empty number");
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        std::int64_t num = parse_int(text.substr(0, slash), text);
        std::int64_t den = parse_int(text.substr(slash + 1), text);
        return Rational(num, den);
    }
    auto dot = text.find('.');
    if (dot == std::string::npos) return Rational(parse_int(text, text), 1);
    std::string whole = text.substr(0, dot);
    std::string frac = text.substr(dot + 1);
    if (frac.size() > 15) throw ParseError("too many decimal digits: " + text);
    bool neg = !whole.empty() && whole[0] == '-';
    std::int64_t w = whole.empty() || whole == "-" ? 0 : parse_int(whole, text);
    if (neg) w = -w;
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    std::int64_t f = frac.empty() ? 0 : parse_int(frac, text);
    Rational r = Rational(w, 1) + Rational(f, scale);
    return neg ? Rational(-r.p, r.q) : r;
}

bool is_standard_dyadic_interval(const Dyadic& a, const Dyadic& b) {
    Dyadic len = b - a;
    if (len.m != 1) return false; // length must be 1/2^s
    // left endpoint must be an integer multiple of the length
    return a.k <= len.k;
}

DyadicPartition::DyadicPartition(std::vector<Dyadic> pts) : points(std::move(pts)) {
    if (points.size() < 2) throw PartitionError("partition needs at least two points");
    if (points.front() != Dyadic(0, 0) || points.back() != Dyadic(1, 0))
        throw PartitionError("partition must span [0, 1]");
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (points[i] >= points[i + 1]) throw PartitionError("partition points must increase");
        if (!is_standard_dyadic_interval(points[i], points[i + 1]))
            throw PartitionError("interval [" + points[i].str() + ", " + points[i + 1].str() +
                                 "] is not standard dyadic");
    }
}

} // namespace tft
