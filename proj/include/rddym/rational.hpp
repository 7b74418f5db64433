#pragma once

#include <gmpxx.h>
#include <string>

namespace rddym {

// Exact rational coefficients. mpq_class keeps values canonical
// (reduced, positive denominator) as long as every expression-template
// result is materialized, which the helpers below guarantee.
using Rational = mpq_class;

inline Rational rat(long n, long d = 1) {
    Rational q(n, d);
    q.canonicalize();
    return q;
}

inline bool is_zero(const Rational& q) { return sgn(q) == 0; }
inline bool is_one(const Rational& q) { return q == 1; }

inline Rational rat_pow(const Rational& base, long e) {
    Rational out = 1;
    Rational b = base;
    unsigned long n = static_cast<unsigned long>(e < 0 ? -e : e);
    while (n) {
        if (n & 1) out = Rational(out * b);
        b = Rational(b * b);
        n >>= 1;
    }
    if (e < 0) out = Rational(1 / out);
    return out;
}

// prints "p" or "p/q"
inline std::string rat_str(const Rational& q) { return q.get_str(); }

inline double rat_double(const Rational& q) { return q.get_d(); }

}  // namespace rddym
