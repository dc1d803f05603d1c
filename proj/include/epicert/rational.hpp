#pragma once

#include <gmpxx.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace epicert {

using Rational = mpq_class;
using Integer = mpz_class;

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline Rational parse_rational(std::string_view s)
{
    std::string t(s);
    if (t.empty()) throw std::invalid_argument("empty rational");
    if (t[0] == '+') t.erase(0, 1);
    std::size_t slash = t.find('/');
    auto digits = [](const std::string& u, bool allow_sign) {
        std::size_t i = (allow_sign && !u.empty() && u[0] == '-') ? 1 : 0;
        if (i >= u.size()) return false;
        for (; i < u.size(); ++i)
            if (u[i] < '0' || u[i] > '9') return false;
        return true;
    };
    if (slash == std::string::npos) {
        if (!digits(t, true)) throw std::invalid_argument("bad rational: " + t);
        return Rational(Integer(t));
    }
    std::string num = t.substr(0, slash), den = t.substr(slash + 1);
    if (!digits(num, true) || !digits(den, false)) throw std::invalid_argument("bad rational: " + t);
    Integer d(den);
    if (d == 0) throw std::invalid_argument("zero denominator");
    Rational q(Integer(num), d);
    q.canonicalize();
    return q;
}

inline double to_double(const Rational& q) { return q.get_d(); }

// Best rational approximation with denominator at most max_den.
inline Rational best_rational(double x, const Integer& max_den)
{
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite value");
    Rational exact(x);
    bool neg = exact < 0;
    if (neg) exact = -exact;
    Integer p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    Rational r = exact;
    Rational best;
    while (true) {
        Integer a = r.get_num() / r.get_den();
        Integer p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > max_den) {
            Integer k = (max_den - q0) / q1;
            Rational semi(k * p1 + p0, k * q1 + q0), conv(p1, q1);
            semi.canonicalize();
            conv.canonicalize();
            best = abs(semi - exact) < abs(conv - exact) ? semi : conv;
            break;
        }
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        Rational frac = r - Rational(a);
        if (frac == 0) {
            best = Rational(p1, q1);
            best.canonicalize();
            break;
        }
        r = 1 / frac;
    }
    return neg ? Rational(-best) : best;
}

inline Integer lcm_den(const Integer& a, const Integer& b)
{
    Integer r;
    mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

}  // namespace epicert
