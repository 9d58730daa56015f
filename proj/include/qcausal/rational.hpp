#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qcausal {

// Exact fraction over int64 with gcd normalization. Used where a quantity
// really is a finite probability table (classical strategies at small d, n),
// so equality and total-variation comparisons carry no rounding at all.
// Intermediates go through __int128; anything that would overflow throws.
struct Rational {
    std::int64_t num;
    std::int64_t den;

    Rational() : num(0), den(1) {}
    Rational(std::int64_t n) : num(n), den(1) {}
    Rational(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) throw std::invalid_argument("Rational: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    static std::int64_t checked(__int128 v, const char *op) {
        if (v > INT64_MAX || v < INT64_MIN)
            throw std::overflow_error(std::string("Rational ") + op + ": overflow");
        return static_cast<std::int64_t>(v);
    }

    friend Rational operator+(const Rational &a, const Rational &b) {
        const __int128 n = (__int128)a.num * b.den + (__int128)b.num * a.den;
        const __int128 d = (__int128)a.den * b.den;
        return make(n, d, "add");
    }
    friend Rational operator-(const Rational &a, const Rational &b) {
        const __int128 n = (__int128)a.num * b.den - (__int128)b.num * a.den;
        const __int128 d = (__int128)a.den * b.den;
        return make(n, d, "sub");
    }
    friend Rational operator*(const Rational &a, const Rational &b) {
        return make((__int128)a.num * b.num, (__int128)a.den * b.den, "mul");
    }
    friend Rational operator/(const Rational &a, const Rational &b) {
        if (b.num == 0) throw std::invalid_argument("Rational: division by zero");
        return make((__int128)a.num * b.den, (__int128)a.den * b.num, "div");
    }
    Rational &operator+=(const Rational &o) { return *this = *this + o; }
    Rational &operator-=(const Rational &o) { return *this = *this - o; }
    Rational &operator*=(const Rational &o) { return *this = *this * o; }

    friend bool operator==(const Rational &a, const Rational &b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator!=(const Rational &a, const Rational &b) { return !(a == b); }
    friend bool operator<(const Rational &a, const Rational &b) {
        return (__int128)a.num * b.den < (__int128)b.num * a.den;
    }
    friend bool operator<=(const Rational &a, const Rational &b) { return !(b < a); }
    friend bool operator>(const Rational &a, const Rational &b) { return b < a; }
    friend bool operator>=(const Rational &a, const Rational &b) { return !(a < b); }

    Rational abs() const { return num < 0 ? Rational(-num, den) : *this; }

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

    std::string to_string() const {
        return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
    }

private:
    static Rational make(__int128 n, __int128 d, const char *op) {
        if (d == 0) throw std::invalid_argument("Rational: zero denominator");
        // reduce in 128 bits first so in-range results never spuriously overflow
        __int128 an = n < 0 ? -n : n;
        __int128 ad = d < 0 ? -d : d;
        while (ad != 0) {
            const __int128 t = an % ad;
            an = ad;
            ad = t;
        }
        if (an > 1) {
            n /= an;
            d /= an;
        }
        Rational r;
        r.num = checked(n, op);
        r.den = checked(d, op);
        r.normalize();
        return r;
    }
};

}  // namespace qcausal
