#pragma once

#include "hairball/rational.hpp"

#include <cstdint>

namespace hairball {

// splitmix64: tiny, seedable, identical output on every platform. Standard
// library distributions are not portable across implementations, so all
// randomized fixtures draw through this.
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, n)
    uint64_t below(uint64_t n) {
        if (n == 0) return 0;
        uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t v;
        do { v = next(); } while (v >= limit);
        return v % n;
    }

    int64_t range(int64_t lo, int64_t hi) { // inclusive
        return lo + static_cast<int64_t>(below(static_cast<uint64_t>(hi - lo + 1)));
    }

    bool coin() { return next() & 1; }

    // Random rational with numerator in [-mag, mag], denominator in [1, mag].
    Rat rational(int64_t mag) {
        Int num(static_cast<long>(range(-mag, mag)));
        Int den(static_cast<long>(range(1, mag)));
        Rat r(num, den);
        mpq_canonicalize(r.get_mpq_t());
        return r;
    }

    RatVec rational_vec(size_t n, int64_t mag) {
        RatVec v(n);
        for (auto& x : v) x = rational(mag);
        return v;
    }

  private:
    uint64_t state_;
};

} // namespace hairball
