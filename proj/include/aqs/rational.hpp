// rational.hpp — exact arbitrary-precision arithmetic (GMP) plus small helpers.
#pragma once

#include <gmpxx.h>

#include <cmath>
#include <string>

#include "aqs/errors.hpp"

namespace aqs {

using Rational = mpq_class;
using Integer = mpz_class;

inline Rational make_rational(long num, long den = 1) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

// Accepts "p", "-p", "p/q" with optional sign; canonicalizes.
inline Rational parse_rational(const std::string& text) {
    if (text.empty()) throw ConfigError("empty rational literal");
    try {
        Rational q(text);
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        throw ConfigError("bad rational literal: '" + text + "'");
    }
}

inline std::string to_string(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline std::string to_string(const Integer& z) { return z.get_str(); }

inline double to_double(const Rational& q) { return q.get_d(); }

// Natural log of a positive big integer; exact up to double rounding even when
// the value overflows double range.
inline double log_positive(const Integer& z) {
    if (z <= 0) throw Error("log_positive: nonpositive integer");
    signed long exp2 = 0;
    const double mant = mpz_get_d_2exp(&exp2, z.get_mpz_t());
    return std::log(mant) + static_cast<double>(exp2) * M_LN2;
}

inline double log_positive(const Rational& q) {
    if (q <= 0) throw Error("log_positive: nonpositive rational");
    return log_positive(Integer(q.get_num())) - log_positive(Integer(q.get_den()));
}

inline Integer lcm(const Integer& a, const Integer& b) {
    Integer out;
    mpz_lcm(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return out;
}

inline Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

}  // namespace aqs
