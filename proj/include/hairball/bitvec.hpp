#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace hairball {

// Fixed-capacity bit string used as a graph vertex. Instances declare a
// width n <= 256; words beyond the width stay zero so comparisons and
// hashing work on the raw words.
struct BitVec {
    static constexpr unsigned kWords = 4;
    static constexpr unsigned kMaxBits = kWords * 64;
    std::array<uint64_t, kWords> w{0, 0, 0, 0};

    BitVec() = default;
    explicit BitVec(uint64_t v) { w[0] = v; }

    bool bit(unsigned i) const { return (w[i / 64] >> (i % 64)) & 1; }
    void set_bit(unsigned i, bool v) {
        uint64_t mask = uint64_t(1) << (i % 64);
        if (v) w[i / 64] |= mask;
        else w[i / 64] &= ~mask;
    }

    // Reads/writes `width` bits starting at `pos` (width <= 64).
    uint64_t field(unsigned pos, unsigned width) const {
        uint64_t out = 0;
        for (unsigned i = 0; i < width; ++i) out |= uint64_t(bit(pos + i)) << i;
        return out;
    }
    void set_field(unsigned pos, unsigned width, uint64_t v) {
        for (unsigned i = 0; i < width; ++i) set_bit(pos + i, (v >> i) & 1);
    }

    uint64_t low64() const { return w[0]; }
    bool is_zero() const { return !(w[0] | w[1] | w[2] | w[3]); }

    friend bool operator==(const BitVec&, const BitVec&) = default;
    friend std::strong_ordering operator<=>(const BitVec& a, const BitVec& b) {
        for (int i = kWords - 1; i >= 0; --i)
            if (a.w[i] != b.w[i]) return a.w[i] <=> b.w[i];
        return std::strong_ordering::equal;
    }

    std::string to_string(unsigned width) const {
        std::string s(width, '0');
        for (unsigned i = 0; i < width; ++i)
            if (bit(i)) s[width - 1 - i] = '1';
        return s;
    }
};

struct BitVecHash {
    size_t operator()(const BitVec& v) const {
        uint64_t h = 0x9e3779b97f4a7c15ull;
        for (uint64_t x : v.w) {
            x ^= h;
            x *= 0xbf58476d1ce4e5b9ull;
            x ^= x >> 31;
            h = x;
        }
        return static_cast<size_t>(h);
    }
};

} // namespace hairball

template <>
struct std::hash<hairball::BitVec> {
    size_t operator()(const hairball::BitVec& v) const { return hairball::BitVecHash{}(v); }
};
