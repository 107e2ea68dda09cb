#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace svcp {

/// Exact rational number used for every workload and objective quantity.
using Rational = mpq_class;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rational r{mpz_class{static_cast<long>(num)}, mpz_class{static_cast<long>(den)}};
    r.canonicalize();
    return r;
}

inline Rational positive_part(const Rational& r) { return sgn(r) > 0 ? r : Rational{0}; }

/// "p/q" in lowest terms; integers keep the "/1".
inline std::string to_fraction_string(const Rational& r) {
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

/// Accepts "p/q", "p" or a plain decimal such as "-3.25".
inline Rational parse_rational(std::string_view text) {
    std::string s{text};
    if (s.empty()) throw std::invalid_argument("empty rational");
    try {
        if (auto slash = s.find('/'); slash != std::string::npos) {
            mpz_class num{s.substr(0, slash)};
            mpz_class den{s.substr(slash + 1)};
            if (den == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
            Rational r{num, den};
            r.canonicalize();
            return r;
        }
        if (auto dot = s.find('.'); dot != std::string::npos) {
            std::string frac = s.substr(dot + 1);
            std::string digits = s.substr(0, dot) + frac;
            if (digits == "-" || digits == "+" || digits.empty())
                throw std::invalid_argument("malformed decimal '" + s + "'");
            mpz_class den;
            mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
            Rational r{mpz_class{digits}, den};
            r.canonicalize();
            return r;
        }
        return Rational{mpz_class{s}};
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("malformed rational '" + s + "'");
    }
}

/// Fixed-point decimal rendering with `significant` significant digits,
/// rounding half to even. Trailing fractional zeros are dropped.
inline std::string to_decimal_string(const Rational& value, int significant = 12) {
    if (sgn(value) == 0) return "0";
    const bool negative = sgn(value) < 0;
    const mpz_class num = abs(value.get_num());
    const mpz_class& den = value.get_den();

    auto pow10 = [](long e) {
        mpz_class p;
        mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(e));
        return p;
    };
    // exponent e with 10^e <= |value| < 10^(e+1)
    long e = static_cast<long>(mpz_sizeinbase(num.get_mpz_t(), 10)) -
             static_cast<long>(mpz_sizeinbase(den.get_mpz_t(), 10));
    auto at_least_pow = [&](long k) {  // |value| >= 10^k
        return k >= 0 ? num >= den * pow10(k) : num * pow10(-k) >= den;
    };
    while (!at_least_pow(e)) --e;
    while (at_least_pow(e + 1)) ++e;

    // scaled = |value| * 10^(significant-1-e), rounded half-even
    const long shift = significant - 1 - e;
    mpz_class n = num, d = den;
    if (shift >= 0) n *= pow10(shift); else d *= pow10(-shift);
    mpz_class q, rem;
    mpz_fdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
    const int cmp_half = cmp(mpz_class{rem * 2}, d);
    if (cmp_half > 0 || (cmp_half == 0 && mpz_odd_p(q.get_mpz_t()))) q += 1;
    if (q == pow10(significant)) {
        q = pow10(significant - 1);
        ++e;
    }

    std::string digits = q.get_str();  // exactly `significant` digits
    std::string out;
    if (e >= significant - 1) {
        out = digits + std::string(static_cast<std::size_t>(e - (significant - 1)), '0');
    } else if (e >= 0) {
        out = digits.substr(0, static_cast<std::size_t>(e + 1)) + "." + digits.substr(static_cast<std::size_t>(e + 1));
    } else {
        out = "0." + std::string(static_cast<std::size_t>(-e - 1), '0') + digits;
    }
    if (out.find('.') != std::string::npos) {
        while (out.back() == '0') out.pop_back();
        if (out.back() == '.') out.pop_back();
    }
    return negative ? "-" + out : out;
}

inline double to_double(const Rational& r) { return r.get_d(); }

}  // namespace svcp
