#pragma once

#include "hairball/eol.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace hairball {

struct InvalidVertex : EolError {
    using EolError::EolError;
};
struct DuplicateSources : EolError {
    using EolError::EolError;
};

// Vertex of the level-l reduction graph: either a set of l original vertices,
// or a list of path vertices paired with a deeper vertex.
struct GkVertex {
    enum class Kind : uint8_t { Set, Pair };
    Kind kind = Kind::Set;
    std::vector<uint64_t> elems; // Set: the l elements; Pair: the i path vertices
    std::shared_ptr<const GkVertex> inner; // Pair only, level l - i

    unsigned level() const {
        if (kind == Kind::Set) return static_cast<unsigned>(elems.size());
        return static_cast<unsigned>(elems.size()) + inner->level();
    }

    static GkVertex set(std::vector<uint64_t> xs);
    static GkVertex pair(std::vector<uint64_t> paths, GkVertex inner);

    bool operator==(const GkVertex& o) const;
    // Every original vertex mentioned anywhere in the structure.
    void flatten(std::vector<uint64_t>& out) const;
};

// Fixed-width binary layout: 1 tag bit, then for Pair a (l-1)-bit split
// field, then sorted n-bit vertex fields, then the inner encoding; always
// zero-padded to width(l). Non-canonical strings decode to nothing.
class GkCodec {
  public:
    GkCodec(unsigned k, unsigned n);

    unsigned k() const { return k_; }
    unsigned n() const { return n_; }
    unsigned width(unsigned level) const { return widths_[level]; }
    unsigned total_width() const { return widths_[k_]; }

    BitVec encode(const GkVertex& v) const;
    std::optional<GkVertex> decode(const BitVec& bits, unsigned level) const;
    std::optional<GkVertex> decode(const BitVec& bits) const { return decode(bits, k_); }

    static constexpr unsigned width_for(unsigned level, unsigned n) {
        if (level <= 1) return n;
        unsigned best = level * n; // Set payload
        for (unsigned i = 1; i < level; ++i) {
            unsigned w = i * n + width_for(level - i, n);
            if (w > best) best = w;
        }
        return 1 + (level - 1) + best;
    }

  private:
    unsigned k_, n_;
    std::vector<unsigned> widths_;

    void encode_at(const GkVertex& v, BitVec& out, unsigned pos) const;
    std::optional<GkVertex> decode_at(const BitVec& bits, unsigned pos, unsigned level) const;
    bool zero_beyond(const BitVec& bits, unsigned pos, unsigned end) const;
};

enum class Dir { Succ, Pred };

// Is v a vertex of G_l over the (normalized) base graph? Set elements must be
// non-isolated; Pair path lists must contain path vertices only.
bool is_gk_vertex(const EolInstance& base, const GkVertex& v);

// One step of the recursive successor/predecessor construction. Requires a
// normalized base; throws InvalidVertex when v is not a vertex of its level.
GkVertex gk_step(const EolInstance& base, const GkVertex& v, Dir dir);

struct SourceRelabel {
    MsEolInstance ms;                       // sources are exactly {0..k-1}
    std::function<Vertex(const Vertex&)> map; // involution; map(original s_i) < k
};
// Applies an involutive bijection on vertex labels so the listed sources
// become 0..k-1. Throws DuplicateSources.
SourceRelabel relabel_sources(const MsEolInstance& ms);

struct GkReduction {
    EolInstance eol; // single-source instance; known source is the all-zero string
    unsigned k = 0;
    std::shared_ptr<GkCodec> codec;
    // Maps any solution of `eol` back to a solution of the original instance.
    std::function<Vertex(const Vertex&)> decode;
    // Set when a listed source violates its promise; the reduction is then
    // skipped and this vertex is the answer.
    std::optional<Vertex> immediate;
};

GkReduction ms_to_eol(const MsEolInstance& ms);

} // namespace hairball
