#pragma once

#include "hairball/rng.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace hairball {

struct VbError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvalidGridInstance : VbError {
    using VbError::VbError;
};

// Axis-aligned unit arrow.
struct Arrow {
    int dx = 0, dy = 0;
    bool operator==(const Arrow&) const = default;
};
inline Arrow opposite(Arrow a) { return {-a.dx, -a.dy}; }

// Arrow field on [2^n] x [2^n] with the inward boundary conditions enforced
// syntactically by a wrapper over the raw map.
class VbInstance {
  public:
    VbInstance(unsigned n, std::function<Arrow(uint64_t, uint64_t)> raw);
    static VbInstance table(unsigned n, std::vector<Arrow> cells); // row-major, y slowest

    unsigned n() const { return n_; }
    uint64_t side() const { return uint64_t(1) << n_; }
    // 1-based coordinates; boundary rules take precedence over the raw map
    Arrow arrow(uint64_t x, uint64_t y) const;
    Arrow raw_arrow(uint64_t x, uint64_t y) const { return raw_(x, y); }

  private:
    unsigned n_;
    std::function<Arrow(uint64_t, uint64_t)> raw_;
};

struct VbSolution {
    uint64_t x1 = 0, y1 = 0, x2 = 0, y2 = 0;
};

bool verify_vb_solution(const VbInstance& inst, const VbSolution& sol);

// Lexicographically first solution; total thanks to the boundary conditions.
VbSolution brute_force_vb(const VbInstance& inst);

// Degree-<=1 digraph on the [2^n] x [2^n] grid with orthogonal edges and the
// origin (1,1) as the known source.
struct GridEolInstance {
    unsigned n = 1;
    std::vector<uint32_t> succ, pred; // node index = (x-1) + (y-1) * 2^n

    uint64_t side() const { return uint64_t(1) << n; }
    uint32_t index(uint64_t x, uint64_t y) const {
        return static_cast<uint32_t>((x - 1) + (y - 1) * side());
    }
    std::pair<uint64_t, uint64_t> coords(uint32_t idx) const {
        return {idx % side() + 1, idx / side() + 1};
    }
    void validate() const; // orthogonal moves, reciprocated edges, origin source
    bool endpoint(uint32_t idx) const {
        return (succ[idx] == idx) != (pred[idx] == idx);
    }
};

struct GridEolReduction {
    VbInstance vb;
    // maps a solution of the arrow instance to a grid end of line
    std::function<uint32_t(const VbSolution&)> decode;
};

// Embeds the grid graph into an arrow field on [2^(n+3)]^2: every node
// becomes an 8x8 block, paths become width-2 corridors of up-arrows with
// horizontal shielding, everything else points down.
GridEolReduction grid_eol_to_vb(const GridEolInstance& g);

// Random vertex-disjoint orthogonal paths with the origin a source.
GridEolInstance random_grid_eol(Rng& rng, unsigned n);

VbInstance random_vb_instance(Rng& rng, unsigned n);

} // namespace hairball
