#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hairball {

// Exact arbitrary-precision rational. GMP keeps values canonical
// (lowest terms, positive denominator), which the whole toolkit relies on:
// equality of values implies equality of representations.
using Rat = mpq_class;
using Int = mpz_class;

using RatVec = std::vector<Rat>;

inline Rat rat(long num, long den = 1) { return Rat(num, den); }

inline Rat rat_abs(const Rat& x) { return x < 0 ? Rat(-x) : x; }

inline const Rat& rat_min(const Rat& a, const Rat& b) { return b < a ? b : a; }
inline const Rat& rat_max(const Rat& a, const Rat& b) { return a < b ? b : a; }

// 2^e for e possibly negative.
inline Rat pow2(long e) {
    Rat r(1);
    if (e >= 0)
        mpz_mul_2exp(r.get_num_mpz_t(), r.get_num_mpz_t(), static_cast<unsigned long>(e));
    else
        mpz_mul_2exp(r.get_den_mpz_t(), r.get_den_mpz_t(), static_cast<unsigned long>(-e));
    return r;
}

// Number of bits of |v|; bits(0) = 1 so a stored zero still has width.
inline unsigned long bit_length(const Int& v) {
    if (v == 0) return 1;
    return mpz_sizeinbase(v.get_mpz_t(), 2);
}

// Smallest integer s with s*s >= v (v >= 0).
inline Int ceil_isqrt(const Int& v) {
    if (v <= 0) return 0;
    Int r;
    mpz_sqrt(r.get_mpz_t(), v.get_mpz_t());
    if (r * r < v) r += 1;
    return r;
}

// Smallest integer s with s*s >= x, for rational x >= 0.
inline Int ceil_isqrt(const Rat& x) {
    if (x <= 0) return 0;
    Int num = x.get_num(), den = x.get_den();
    // ceil of sqrt(num/den) = smallest s with s^2*den >= num
    Int s = ceil_isqrt(Int((num + den - 1) / den));
    while (s * s * den < num) s += 1;
    while (s >= 1 && (s - 1) * (s - 1) * den >= num) s -= 1;
    return s;
}

// Smallest e >= 0 with 2^e >= x.
inline long ceil_log2(const Rat& x) {
    if (x <= 1) return 0;
    long e = 0;
    Rat p(1);
    while (p < x) { p *= 2; ++e; }
    return e;
}

// Rational lower/upper bounds on sqrt(x) with |bound - sqrt(x)| <= 2^-prec.
Rat sqrt_lower(const Rat& x, unsigned prec);
Rat sqrt_upper(const Rat& x, unsigned prec);

// Exact sign of a + b*sqrt(s), s >= 0 rational.
int sign_quadratic(const Rat& a, const Rat& b, const Rat& s);

inline Rat dot(const RatVec& a, const RatVec& b) {
    Rat s(0);
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline Rat norm2_sq(const RatVec& a) { return dot(a, a); }

inline Rat norm_inf(const RatVec& a) {
    Rat m(0);
    for (const Rat& x : a) {
        Rat ax = rat_abs(x);
        if (ax > m) m = ax;
    }
    return m;
}

inline Rat norm1(const RatVec& a) {
    Rat m(0);
    for (const Rat& x : a) m += rat_abs(x);
    return m;
}

std::string rat_to_string(const Rat& x);
// Parses "p/q" or "p"; returns nullopt on malformed input.
std::optional<Rat> rat_from_string(const std::string& s);

} // namespace hairball
