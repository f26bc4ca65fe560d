#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>

#include "pacil/errors.hpp"

namespace pacil {

/// Arbitrary-precision rational, always in canonical form: positive
/// denominator, gcd(|num|, den) = 1. Value type over GMP's mpq_class.
class Rational {
public:
    Rational() : q_(0) {}
    Rational(long n) : q_(n) {}  // NOLINT: implicit by design, mirrors integer literals
    Rational(long n, long d) : q_(n, 1) {
        if (d == 0) throw Error("rational with zero denominator");
        q_ /= mpq_class(d, 1);
    }
    explicit Rational(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }
    explicit Rational(const mpz_class& n) : q_(n) {}

    /// Exact conversion; every finite double is a dyadic rational.
    static Rational from_double(double x) {
        if (!(x == x) || x - x != 0.0) throw Error("cannot convert non-finite double to rational");
        return Rational(mpq_class(x));
    }

    /// Accepts "p", "p/q", and decimal forms like "-3.25".
    static std::optional<Rational> parse(std::string_view text);

    const mpz_class& num() const { return q_.get_num(); }
    const mpz_class& den() const { return q_.get_den(); }

    int sign() const { return sgn(q_); }
    bool is_zero() const { return sign() == 0; }
    bool is_integer() const { return q_.get_den() == 1; }

    Rational abs() const { return Rational(mpq_class(::abs(q_))); }
    Rational reciprocal() const {
        if (is_zero()) throw Error("reciprocal of zero");
        return Rational(mpq_class(1) / q_);
    }

    mpz_class floor() const {
        mpz_class r;
        mpz_fdiv_q(r.get_mpz_t(), num().get_mpz_t(), den().get_mpz_t());
        return r;
    }
    mpz_class ceil() const {
        mpz_class r;
        mpz_cdiv_q(r.get_mpz_t(), num().get_mpz_t(), den().get_mpz_t());
        return r;
    }
    long floor_long() const { return static_cast<long>(floor().get_si()); }
    long ceil_long() const { return static_cast<long>(ceil().get_si()); }

    double to_double() const { return q_.get_d(); }

    /// "p/q", with "/q" omitted when q = 1.
    std::string to_string() const;

    /// Exact finite decimal when the denominator is of the form 2^a*5^b,
    /// otherwise falls back to "p/q".
    std::string to_decimal_string() const;

    Rational operator-() const { return Rational(mpq_class(-q_)); }
    Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
    Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
    Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero()) throw Error("division by zero");
        q_ /= o.q_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) == 0; }
    friend bool operator!=(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) != 0; }
    friend bool operator<(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) < 0; }
    friend bool operator<=(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) <= 0; }
    friend bool operator>(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) > 0; }
    friend bool operator>=(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) >= 0; }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
        return os << r.to_string();
    }

private:
    mpq_class q_;
};

inline std::string Rational::to_string() const {
    std::string s = num().get_str();
    if (!is_integer()) s += "/" + den().get_str();
    return s;
}

inline std::string Rational::to_decimal_string() const {
    mpz_class d = den();
    unsigned twos = 0, fives = 0;
    while (mpz_even_p(d.get_mpz_t())) {
        d /= 2;
        ++twos;
    }
    while (mpz_divisible_ui_p(d.get_mpz_t(), 5)) {
        d /= 5;
        ++fives;
    }
    if (d != 1) return to_string();

    unsigned digits = std::max(twos, fives);
    mpz_class scaled = num();
    for (unsigned i = twos; i < digits; ++i) scaled *= 2;
    for (unsigned i = fives; i < digits; ++i) scaled *= 5;

    bool neg = scaled < 0;
    mpz_class mag = ::abs(scaled);
    std::string s = mag.get_str();
    if (s.size() <= digits) s.insert(0, digits - s.size() + 1, '0');
    std::string out = neg ? "-" : "";
    out += s.substr(0, s.size() - digits);
    if (digits > 0) {
        std::string frac = s.substr(s.size() - digits);
        while (!frac.empty() && frac.back() == '0') frac.pop_back();
        if (!frac.empty()) out += "." + frac;
    }
    return out;
}

inline std::optional<Rational> Rational::parse(std::string_view text) {
    if (text.empty()) return std::nullopt;
    std::string s(text);
    auto slash = s.find('/');
    auto dot = s.find('.');
    try {
        // mpz_class string constructors auto-detect the base by default;
        // pin base 10 so leading zeros cannot flip a literal to octal.
        if (slash != std::string::npos) {
            if (dot != std::string::npos) return std::nullopt;
            mpz_class n(s.substr(0, slash), 10), d(s.substr(slash + 1), 10);
            if (d == 0) return std::nullopt;
            mpq_class q(n);
            q /= mpq_class(d);
            return Rational(std::move(q));
        }
        if (dot != std::string::npos) {
            std::string whole = s.substr(0, dot), frac = s.substr(dot + 1);
            if (frac.empty()) return std::nullopt;
            for (char c : frac)
                if (c < '0' || c > '9') return std::nullopt;
            bool neg = !whole.empty() && whole[0] == '-';
            if (whole == "-" || whole == "+" || whole.empty()) whole += "0";
            mpz_class w(whole, 10);
            mpz_class f(frac, 10);
            mpz_class scale = 1;
            for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
            mpq_class q(::abs(w) * scale + f);
            q /= mpq_class(scale);
            if (neg) q = -q;
            return Rational(std::move(q));
        }
        return Rational(mpq_class(mpz_class(s, 10)));
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

/// Rational plus a coefficient on a symbolic infinitesimal delta > 0,
/// ordered lexicographically. Carrier for models of strict inequalities:
/// x < c is represented as x <= c - delta.
class DeltaRational {
public:
    DeltaRational() = default;
    DeltaRational(Rational real) : r_(std::move(real)) {}  // NOLINT: implicit by design
    DeltaRational(Rational real, Rational delta) : r_(std::move(real)), d_(std::move(delta)) {}

    const Rational& real() const { return r_; }
    const Rational& delta() const { return d_; }
    bool has_delta() const { return !d_.is_zero(); }

    DeltaRational operator-() const { return {-r_, -d_}; }
    DeltaRational& operator+=(const DeltaRational& o) { r_ += o.r_; d_ += o.d_; return *this; }
    DeltaRational& operator-=(const DeltaRational& o) { r_ -= o.r_; d_ -= o.d_; return *this; }

    friend DeltaRational operator+(DeltaRational a, const DeltaRational& b) { return a += b; }
    friend DeltaRational operator-(DeltaRational a, const DeltaRational& b) { return a -= b; }
    friend DeltaRational operator*(const Rational& c, const DeltaRational& v) {
        return {c * v.r_, c * v.d_};
    }
    friend DeltaRational operator/(const DeltaRational& v, const Rational& c) {
        return {v.r_ / c, v.d_ / c};
    }

    friend bool operator==(const DeltaRational& a, const DeltaRational& b) {
        return a.r_ == b.r_ && a.d_ == b.d_;
    }
    friend bool operator!=(const DeltaRational& a, const DeltaRational& b) { return !(a == b); }
    friend bool operator<(const DeltaRational& a, const DeltaRational& b) {
        return a.r_ < b.r_ || (a.r_ == b.r_ && a.d_ < b.d_);
    }
    friend bool operator<=(const DeltaRational& a, const DeltaRational& b) { return !(b < a); }
    friend bool operator>(const DeltaRational& a, const DeltaRational& b) { return b < a; }
    friend bool operator>=(const DeltaRational& a, const DeltaRational& b) { return !(a < b); }

    std::string to_string() const {
        if (d_.is_zero()) return r_.to_string();
        return r_.to_string() + (d_.sign() > 0 ? " + " : " - ") + d_.abs().to_string() + "*delta";
    }

    friend std::ostream& operator<<(std::ostream& os, const DeltaRational& v) {
        return os << v.to_string();
    }

private:
    Rational r_;
    Rational d_;
};

}  // namespace pacil
