#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <iosfwd>
#include <ostream>

namespace mlsg {

/// Thrown when a rational result no longer fits in 64-bit storage.
struct RationalOverflow : std::overflow_error {
    using std::overflow_error::overflow_error;
};

/// Thrown on malformed rational literals ("3/0", "1.2.3", ...).
struct RationalParseError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Exact rational number.
///
/// Stored in lowest terms with a positive denominator.  All intermediate
/// products go through 128-bit arithmetic and narrowing back to 64 bits is
/// checked, so arithmetic either yields the exact value or throws
/// RationalOverflow.  There is no rounding anywhere.
class Rational {
public:
    constexpr Rational() : num_(0), den_(1) {}
    Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT: implicit by design
    Rational(std::int64_t n, std::int64_t d) { assign(n, d); }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_positive() const { return num_ > 0; }
    bool is_negative() const { return num_ < 0; }

    friend Rational operator+(const Rational& a, const Rational& b) {
        __int128 n = i128(a.num_) * b.den_ + i128(b.num_) * a.den_;
        __int128 d = i128(a.den_) * b.den_;
        return from128(n, d);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        __int128 n = i128(a.num_) * b.den_ - i128(b.num_) * a.den_;
        __int128 d = i128(a.den_) * b.den_;
        return from128(n, d);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return from128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
        return from128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
    }
    Rational operator-() const {
        Rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }
    Rational& operator+=(const Rational& b) { return *this = *this + b; }
    Rational& operator-=(const Rational& b) { return *this = *this - b; }
    Rational& operator*=(const Rational& b) { return *this = *this * b; }
    Rational& operator/=(const Rational& b) { return *this = *this / b; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    Rational abs() const { return num_ < 0 ? -*this : *this; }

    /// Canonical text form: "p/q", or just "p" for integers.
    std::string str() const {
        std::string s = std::to_string(num_);
        if (den_ != 1) {
            s += '/';
            s += std::to_string(den_);
        }
        return s;
    }

    /// Parses "p", "p/q" or a decimal literal like "-2.75"; all exact.
    static Rational parse(std::string_view text);

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
        return os << r.str();
    }

private:
    static __int128 i128(std::int64_t v) { return static_cast<__int128>(v); }

    static std::int64_t narrow(__int128 v) {
        if (v > INT64_MAX || v < INT64_MIN) throw RationalOverflow("Rational: 64-bit overflow");
        return static_cast<std::int64_t>(v);
    }

    static Rational from128(__int128 n, __int128 d) {
        if (d == 0) throw std::domain_error("Rational: zero denominator");
        if (d < 0) {
            n = -n;
            d = -d;
        }
        __int128 g = gcd128(n < 0 ? -n : n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        Rational r;
        r.num_ = narrow(n);
        r.den_ = narrow(d);
        return r;
    }

    static __int128 gcd128(__int128 a, __int128 b) {
        while (b != 0) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        return a == 0 ? 1 : a;
    }

    void assign(std::int64_t n, std::int64_t d) {
        Rational r = from128(i128(n), i128(d));
        num_ = r.num_;
        den_ = r.den_;
    }

    std::int64_t num_;
    std::int64_t den_;  // > 0, gcd(|num|, den) == 1
};

inline Rational Rational::parse(std::string_view text) {
    auto fail = [&]() -> Rational {
        throw RationalParseError("bad rational literal: '" + std::string(text) + "'");
    };
    if (text.empty()) return fail();

    std::size_t pos = 0;
    bool neg = false;
    if (text[pos] == '+' || text[pos] == '-') {
        neg = text[pos] == '-';
        ++pos;
    }
    if (pos >= text.size()) return fail();

    auto digits = [&](std::size_t& i) -> std::pair<__int128, int> {
        __int128 v = 0;
        int count = 0;
        while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
            v = v * 10 + (text[i] - '0');
            if (v > static_cast<__int128>(INT64_MAX) * 1000000) throw RationalOverflow("rational literal too large");
            ++i;
            ++count;
        }
        return {v, count};
    };

    auto [intPart, intCount] = digits(pos);
    if (intCount == 0) return fail();

    __int128 num = intPart;
    __int128 den = 1;
    if (pos < text.size() && text[pos] == '/') {
        ++pos;
        auto [d, dCount] = digits(pos);
        if (dCount == 0 || pos != text.size()) return fail();
        if (d == 0) return fail();
        den = d;
    } else if (pos < text.size() && text[pos] == '.') {
        ++pos;
        auto [frac, fracCount] = digits(pos);
        if (fracCount == 0 || pos != text.size()) return fail();
        num = intPart;
        for (int i = 0; i < fracCount; ++i) {
            den *= 10;
            num *= 10;
        }
        num += frac;
    } else if (pos != text.size()) {
        return fail();
    }
    if (neg) num = -num;
    return from128(num, den);
}

}  // namespace mlsg
