#include "hairball/sperner.hpp"

#include <algorithm>
#include <cassert>

namespace hairball {

namespace {

using YVec = std::vector<int64_t>;

// Vertices of a Kuhn cell in y-space: v_0 = base, v_{i+1} = v_i + e_perm[i].
std::vector<YVec> kuhn_vertices(const YVec& base, const std::vector<uint8_t>& perm) {
    std::vector<YVec> out;
    out.reserve(perm.size() + 1);
    out.push_back(base);
    for (uint8_t axis : perm) {
        YVec next = out.back();
        ++next[axis];
        out.push_back(std::move(next));
    }
    return out;
}

bool in_order_simplex(const YVec& y, int64_t M) {
    if (y.empty()) return true;
    if (y.front() > M || y.back() < 0) return false;
    for (size_t i = 0; i + 1 < y.size(); ++i)
        if (y[i] < y[i + 1]) return false;
    return true;
}

bool valid_kuhn_cell(const YVec& base, const std::vector<uint8_t>& perm, int64_t M) {
    if (base.size() != perm.size()) return false;
    std::vector<bool> seen(perm.size(), false);
    for (uint8_t a : perm) {
        if (a >= perm.size() || seen[a]) return false;
        seen[a] = true;
    }
    for (const YVec& v : kuhn_vertices(base, perm))
        if (!in_order_simplex(v, M)) return false;
    return true;
}

struct Wall {
    enum class Kind { Top, Equal, Bottom } kind;
    unsigned index = 0; // Equal: y[index] == y[index+1]
};

struct Pivot {
    bool wall = false;
    YVec base;
    std::vector<uint8_t> perm;
    Wall wall_info{Wall::Kind::Top, 0};
};

// The unique cell sharing the facet obtained by dropping vertex `drop`, or
// the boundary wall that facet lies in.
Pivot kuhn_pivot(const YVec& base, const std::vector<uint8_t>& perm, unsigned drop, int64_t M) {
    const size_t d = perm.size();
    Pivot out;
    out.base = base;
    out.perm = perm;
    if (drop == 0) {
        ++out.base[perm[0]];
        std::rotate(out.perm.begin(), out.perm.begin() + 1, out.perm.end());
    } else if (drop == d) {
        --out.base[perm[d - 1]];
        std::rotate(out.perm.begin(), out.perm.end() - 1, out.perm.end());
    } else {
        std::swap(out.perm[drop - 1], out.perm[drop]);
    }
    if (valid_kuhn_cell(out.base, out.perm, M)) return out;

    // facet lies on the boundary of the order simplex: find its plane
    std::vector<YVec> verts = kuhn_vertices(base, perm);
    verts.erase(verts.begin() + drop);
    out.wall = true;
    auto all = [&](auto&& pred) {
        for (const YVec& v : verts)
            if (!pred(v)) return false;
        return true;
    };
    if (all([&](const YVec& v) { return v[0] == M; })) {
        out.wall_info = {Wall::Kind::Top, 0};
        return out;
    }
    for (unsigned i = 0; i + 1 < d; ++i) {
        if (all([&](const YVec& v) { return v[i] == v[i + 1]; })) {
            out.wall_info = {Wall::Kind::Equal, i};
            return out;
        }
    }
    if (all([&](const YVec& v) { return v[d - 1] == 0; })) {
        out.wall_info = {Wall::Kind::Bottom, 0};
        return out;
    }
    throw InvalidKey("pivot left the domain without a common wall");
}

// Rebuild a Kuhn cell key from its ascending vertex chain.
void chain_to_cell(const std::vector<YVec>& chain, YVec& base, std::vector<uint8_t>& perm) {
    base = chain.front();
    perm.clear();
    for (size_t i = 0; i + 1 < chain.size(); ++i) {
        int axis = -1;
        for (size_t a = 0; a < base.size(); ++a) {
            if (chain[i + 1][a] == chain[i][a]) continue;
            if (chain[i + 1][a] != chain[i][a] + 1 || axis >= 0)
                throw InvalidKey("broken vertex chain");
            axis = static_cast<int>(a);
        }
        if (axis < 0) throw InvalidKey("broken vertex chain");
        perm.push_back(static_cast<uint8_t>(axis));
    }
}

YVec y_to_z(const YVec& y) {
    const size_t k = y.size();
    YVec z(k);
    for (size_t i = 0; i + 1 < k; ++i) z[i] = y[i] - y[i + 1];
    z[k - 1] = y[k - 1];
    return z;
}

uint32_t all_negative_mask(unsigned k) { return (uint32_t(1) << k) - 1; }

bool facet_is_door(const std::vector<unsigned>& colours, unsigned dropped, unsigned k) {
    std::vector<bool> seen(k + 1, false);
    for (size_t i = 0; i < colours.size(); ++i) {
        if (i == dropped) continue;
        unsigned c = colours[i];
        if (c == 0 || c > k || seen[c]) return false;
        seen[c] = true;
    }
    return true;
}

bool is_panchromatic(const std::vector<unsigned>& colours, unsigned k) {
    std::vector<bool> seen(k + 1, false);
    for (unsigned c : colours) {
        if (c > k || seen[c]) return false;
        seen[c] = true;
    }
    return true;
}

} // namespace

SpernerComplex::SpernerComplex(UnfoldedProblem problem)
    : SpernerComplex(std::move(problem), nullptr) {}

SpernerComplex::SpernerComplex(UnfoldedProblem problem, std::function<unsigned(const RatVec&)> colour)
    : up_(std::move(problem)), real_colour_(std::move(colour)) {
    k_ = up_.field->k();
    if (up_.params.q > 62) throw GeometryError("grid exponent too large for this build");
    M_ = int64_t(1) << up_.params.q;
    h_ = Rat(up_.params.m) * pow2(-static_cast<long>(up_.params.q));
    mu_ = Rat(1, 4) / Rat(static_cast<long>(M_));
    if (!real_colour_) {
        auto f = up_.field;
        real_colour_ = [f](const RatVec& z) { return f->colour(z); };
    }
}

bool SpernerComplex::cell_valid(const CellKey& key) const {
    if (const auto* s = std::get_if<SimplexKey>(&key)) {
        if (s->base.size() != k_ || s->perm.size() != k_) return false;
        if (s->orthant >= (uint32_t(1) << k_)) return false;
        return valid_kuhn_cell(s->base, s->perm, M_);
    }
    const auto& l = std::get<LayerKey>(key);
    if (l.base.size() != k_ - 1 || l.perm.size() != k_ - 1) return false;
    if (l.j < 1 || l.j > k_) return false;
    return valid_kuhn_cell(l.base, l.perm, M_);
}

std::vector<SpernerComplex::VertexRef> SpernerComplex::cell_vertex_refs(const CellKey& key) const {
    std::vector<VertexRef> out;
    if (const auto* s = std::get_if<SimplexKey>(&key)) {
        for (const YVec& y : kuhn_vertices(s->base, s->perm)) {
            VertexRef r;
            r.z = y_to_z(y);
            for (unsigned i = 0; i < k_; ++i)
                if (s->orthant >> i & 1) r.z[i] = -r.z[i];
            out.push_back(std::move(r));
        }
        return out;
    }
    const auto& l = std::get<LayerKey>(key);
    std::vector<YVec> face = kuhn_vertices(l.base, l.perm); // k vertices, ascending
    auto make_ref = [&](const YVec& tail, bool artificial) {
        YVec y(k_);
        y[0] = M_;
        std::copy(tail.begin(), tail.end(), y.begin() + 1);
        VertexRef r;
        r.z = y_to_z(y);
        if (l.negative_side)
            for (auto& c : r.z) c = -c;
        r.artificial = artificial;
        return r;
    };
    for (unsigned i = 0; i < l.j; ++i) out.push_back(make_ref(face[i], false));
    for (unsigned i = l.j - 1; i < k_; ++i) out.push_back(make_ref(face[i], true));
    return out;
}

std::vector<RatVec> SpernerComplex::cell_vertices(const CellKey& key) const {
    if (!cell_valid(key)) throw InvalidKey("invalid cell key");
    std::vector<RatVec> out;
    for (const VertexRef& r : cell_vertex_refs(key)) out.push_back(vertex_point(r));
    return out;
}

RatVec SpernerComplex::vertex_point(const VertexRef& v) const {
    RatVec p(k_);
    for (unsigned i = 0; i < k_; ++i) p[i] = Rat(static_cast<long>(v.z[i])) * h_;
    if (v.artificial)
        for (Rat& c : p) c *= 1 + mu_;
    return p;
}

unsigned SpernerComplex::vertex_colour(const std::vector<int64_t>& z, bool artificial) const {
    if (artificial) {
        for (unsigned i = 0; i < k_; ++i)
            if (z[i] != 0) return i + 1;
        throw InvalidKey("artificial vertex at the origin");
    }
    RatVec p(k_);
    for (unsigned i = 0; i < k_; ++i) p[i] = Rat(static_cast<long>(z[i])) * h_;
    unsigned c = real_colour_(p);

    // Sperner boundary conditions on the two outer faces
    int64_t l1 = 0;
    bool nonneg = true, nonpos = true;
    for (unsigned i = 0; i < k_; ++i) {
        l1 += z[i] < 0 ? -z[i] : z[i];
        nonneg = nonneg && z[i] >= 0;
        nonpos = nonpos && z[i] <= 0;
    }
    if (l1 == M_ && (nonneg || nonpos)) {
        bool allowed = c != 0 && z[c - 1] != 0;
        if (!allowed) throw BoundaryViolation(p);
    }
    return c;
}

SpernerComplex::Neighbor SpernerComplex::neighbor_across(const CellKey& key, unsigned dropped) const {
    Neighbor nb;
    if (const auto* s = std::get_if<SimplexKey>(&key)) {
        if (dropped > k_) throw InvalidKey("facet index out of range");
        Pivot p = kuhn_pivot(s->base, s->perm, dropped, M_);
        if (!p.wall) {
            nb.cell = SimplexKey{s->orthant, std::move(p.base), std::move(p.perm)};
            return nb;
        }
        switch (p.wall_info.kind) {
            case Wall::Kind::Equal: {
                SimplexKey m = *s;
                m.orthant ^= uint32_t(1) << p.wall_info.index;
                nb.cell = std::move(m);
                return nb;
            }
            case Wall::Kind::Bottom: {
                SimplexKey m = *s;
                m.orthant ^= uint32_t(1) << (k_ - 1);
                nb.cell = std::move(m);
                return nb;
            }
            case Wall::Kind::Top: {
                bool positive = s->orthant == 0;
                bool negative = s->orthant == all_negative_mask(k_);
                if (!positive && !negative) {
                    nb.exposed = true; // outer boundary outside the two faces
                    nb.cell = key;
                    return nb;
                }
                // facet vertices all have y_1 = M: enter the prism over them
                std::vector<YVec> verts = kuhn_vertices(s->base, s->perm);
                verts.erase(verts.begin() + dropped);
                std::vector<YVec> tails;
                for (const YVec& v : verts) tails.emplace_back(v.begin() + 1, v.end());
                LayerKey l;
                l.negative_side = negative;
                chain_to_cell(tails, l.base, l.perm);
                l.j = k_;
                nb.cell = std::move(l);
                return nb;
            }
        }
    }
    const auto& l = std::get<LayerKey>(key);
    if (dropped > k_) throw InvalidKey("facet index out of range");
    if (dropped == l.j - 1) {
        if (l.j == 1) {
            nb.exposed = true; // top facet of the outermost prism simplex
            nb.cell = key;
            return nb;
        }
        LayerKey m = l;
        m.j = l.j - 1;
        nb.cell = std::move(m);
        return nb;
    }
    if (dropped == l.j) {
        if (l.j == k_) {
            // bottom facet: back into the main triangulation
            SimplexKey s;
            s.orthant = l.negative_side ? all_negative_mask(k_) : 0;
            s.base.assign(k_, 0);
            s.base[0] = M_ - 1;
            std::copy(l.base.begin(), l.base.end(), s.base.begin() + 1);
            s.perm.assign(k_, 0);
            for (unsigned i = 0; i + 1 < k_; ++i) s.perm[i + 1] = static_cast<uint8_t>(l.perm[i] + 1);
            nb.cell = std::move(s);
            return nb;
        }
        LayerKey m = l;
        m.j = l.j + 1;
        nb.cell = std::move(m);
        return nb;
    }
    // wall over a facet of the face cell
    unsigned t = dropped < l.j ? dropped : dropped - 1;
    Pivot p = kuhn_pivot(l.base, l.perm, t, M_);
    if (p.wall) {
        nb.exposed = true; // prism side wall on the augmented boundary
        nb.cell = key;
        return nb;
    }
    LayerKey m;
    m.negative_side = l.negative_side;
    m.base = std::move(p.base);
    m.perm = std::move(p.perm);
    // the split vertex keeps its role; recompute its chain position
    std::vector<YVec> old_chain = kuhn_vertices(l.base, l.perm);
    const YVec& split = old_chain[l.j - 1];
    std::vector<YVec> new_chain = kuhn_vertices(m.base, m.perm);
    auto it = std::find(new_chain.begin(), new_chain.end(), split);
    if (it == new_chain.end()) throw InvalidKey("split vertex lost across a prism wall");
    m.j = static_cast<unsigned>(it - new_chain.begin()) + 1;
    nb.cell = std::move(m);
    return nb;
}

int SpernerComplex::facet_orientation(const CellKey& cell, unsigned dropped,
                                      const std::vector<unsigned>& colours) const {
    auto refs = cell_vertex_refs(cell);
    std::vector<RatVec> by_colour(k_);
    std::vector<bool> filled(k_, false);
    RatVec opposite;
    for (unsigned i = 0; i <= k_; ++i) {
        if (i == dropped) {
            opposite = vertex_point(refs[i]);
            continue;
        }
        unsigned c = colours[i];
        if (c == 0 || c > k_ || filled[c - 1])
            throw InvalidKey("orientation of a non-door facet");
        by_colour[c - 1] = vertex_point(refs[i]);
        filled[c - 1] = true;
    }
    // rows w_2-w_1, ..., w_k-w_1, v-w_1
    std::vector<RatVec> rows;
    for (unsigned c = 1; c < k_; ++c) {
        RatVec r(k_);
        for (unsigned i = 0; i < k_; ++i) r[i] = by_colour[c][i] - by_colour[0][i];
        rows.push_back(std::move(r));
    }
    RatVec last(k_);
    for (unsigned i = 0; i < k_; ++i) last[i] = opposite[i] - by_colour[0][i];
    rows.push_back(std::move(last));

    // exact determinant sign by elimination
    int sign = 1;
    for (unsigned col = 0; col < k_; ++col) {
        unsigned piv = col;
        while (piv < k_ && rows[piv][col] == 0) ++piv;
        if (piv == k_) return 0;
        if (piv != col) {
            std::swap(rows[piv], rows[col]);
            sign = -sign;
        }
        if (rows[col][col] < 0) sign = -sign;
        for (unsigned r = col + 1; r < k_; ++r) {
            if (rows[r][col] == 0) continue;
            Rat f = rows[r][col] / rows[col][col];
            for (unsigned c2 = col; c2 < k_; ++c2) rows[r][c2] -= f * rows[col][c2];
        }
    }
    return sign;
}

std::pair<DoorFacet, DoorFacet> SpernerComplex::start_doors() const {
    auto make = [&](bool negative) {
        LayerKey l;
        l.negative_side = negative;
        l.base.assign(k_ - 1, M_ - 1);
        l.perm.resize(k_ - 1);
        for (unsigned i = 0; i + 1 < k_; ++i) l.perm[i] = static_cast<uint8_t>(i);
        l.j = 1;
        CellKey cell = l;
        auto refs = cell_vertex_refs(cell);
        std::vector<unsigned> colours(refs.size());
        for (size_t i = 0; i < refs.size(); ++i)
            colours[i] = vertex_colour(refs[i].z, refs[i].artificial);
        if (!facet_is_door(colours, 0, k_))
            throw GeometryError("canonical top facet is not a door");
        DoorFacet d;
        d.cell = cell;
        d.dropped_vertex = 0;
        d.orientation = facet_orientation(cell, 0, colours);
        return d;
    };
    return {make(false), make(true)};
}

PanchromaticCell SpernerComplex::follow_path(const DoorFacet& door, uint64_t budget) const {
    CellKey cur = door.cell;
    unsigned entered = door.dropped_vertex;

    // per-cell state; all but one vertex is shared with the previous cell
    std::vector<VertexRef> refs = cell_vertex_refs(cur);
    std::vector<unsigned> cols(refs.size());
    for (size_t i = 0; i < refs.size(); ++i) cols[i] = vertex_colour(refs[i].z, refs[i].artificial);

    for (uint64_t steps = 0; steps <= budget; ++steps) {
        if (is_panchromatic(cols, k_)) {
            unsigned zi = 0;
            while (cols[zi] != 0) ++zi;
            if (refs[zi].artificial) throw GeometryError("artificial vertex coloured 0");
            return PanchromaticCell{cur, vertex_point(refs[zi]), steps};
        }
        unsigned exit_door = k_ + 1;
        for (unsigned d = 0; d <= k_; ++d) {
            if (d == entered) continue;
            if (facet_is_door(cols, d, k_)) {
                exit_door = d;
                break;
            }
        }
        if (exit_door > k_) throw GeometryError("path cell lost its second door");
        Neighbor nb = neighbor_across(cur, exit_door);
        if (nb.exposed)
            throw WalkFailure(WalkFailure::Kind::BoundaryExit,
                              "path reached the boundary outside the start doors");
        std::vector<VertexRef> nrefs = cell_vertex_refs(nb.cell);
        std::vector<unsigned> ncols(nrefs.size());
        unsigned nentered = k_ + 1;
        for (unsigned i = 0; i <= k_; ++i) {
            bool known = false;
            for (unsigned o = 0; o <= k_; ++o)
                if (o != exit_door && refs[o] == nrefs[i]) {
                    ncols[i] = cols[o];
                    known = true;
                    break;
                }
            if (!known) {
                if (nentered <= k_) throw GeometryError("facet mismatch while crossing");
                nentered = i;
            }
        }
        if (nentered > k_) throw GeometryError("could not identify the entered facet");
        ncols[nentered] = vertex_colour(nrefs[nentered].z, nrefs[nentered].artificial);
        cur = std::move(nb.cell);
        refs = std::move(nrefs);
        cols = std::move(ncols);
        entered = nentered;
    }
    throw WalkFailure(WalkFailure::Kind::Budget, "path exceeded the step budget");
}

std::vector<CellKey> SpernerComplex::enumerate_cells() const {
    std::vector<CellKey> out;
    std::vector<uint8_t> perm(k_);
    for (unsigned i = 0; i < k_; ++i) perm[i] = static_cast<uint8_t>(i);
    std::vector<std::vector<uint8_t>> perms;
    do {
        perms.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));

    YVec base(k_, 0);
    auto scan_bases = [&](auto&& self, unsigned i) -> void {
        if (i == k_) {
            for (const auto& pm : perms)
                if (valid_kuhn_cell(base, pm, M_))
                    for (uint32_t o = 0; o < (uint32_t(1) << k_); ++o)
                        out.push_back(SimplexKey{o, base, pm});
            return;
        }
        for (base[i] = 0; base[i] < M_; ++base[i]) self(self, i + 1);
        base[i] = 0;
    };
    scan_bases(scan_bases, 0);

    std::vector<uint8_t> fperm(k_ - 1);
    for (unsigned i = 0; i + 1 < k_; ++i) fperm[i] = static_cast<uint8_t>(i);
    std::vector<std::vector<uint8_t>> fperms;
    do {
        fperms.push_back(fperm);
    } while (std::next_permutation(fperm.begin(), fperm.end()));
    YVec fbase(k_ - 1, 0);
    auto scan_face = [&](auto&& self, unsigned i) -> void {
        if (i == k_ - 1) {
            for (const auto& pm : fperms)
                if (valid_kuhn_cell(fbase, pm, M_))
                    for (int side = 0; side < 2; ++side)
                        for (unsigned j = 1; j <= k_; ++j)
                            out.push_back(LayerKey{side == 1, fbase, pm, j});
            return;
        }
        for (fbase[i] = 0; fbase[i] < M_; ++fbase[i]) self(self, i + 1);
        fbase[i] = 0;
    };
    scan_face(scan_face, 0);
    return out;
}

SpherePoint solve_sphere(const HairyBallInstance& inst, bool paper_bounds, uint64_t budget) {
    UnfoldedProblem up;
    try {
        up = choose_params(inst, paper_bounds);
    } catch (const ImmediateSolution& s) {
        return s.point;
    }
    SpernerComplex cx(up);
    auto [dplus, dminus] = cx.start_doors();
    if (dplus.orientation != dminus.orientation)
        throw GeometryError("start doors disagree in orientation");
    if (budget == 0) budget = std::max<uint64_t>(default_step_budget(), uint64_t(1) << 26);
    PanchromaticCell pc = cx.follow_path(dplus, budget);
    SpherePoint sol = up.field->unrotate(sp_inv(pc.z0));
    if (!verify_hb_solution(inst, sol))
        throw GeometryError("panchromatic cell failed to verify; parameter selection bug");
    return sol;
}

namespace {

unsigned perm_bits(unsigned n) {
    unsigned long fact = 1;
    for (unsigned i = 2; i <= n; ++i) fact *= i;
    unsigned b = 0;
    while ((1ul << b) < fact) ++b;
    return b == 0 ? 1 : b;
}

uint64_t lehmer_encode(const std::vector<uint8_t>& perm) {
    uint64_t code = 0;
    for (size_t i = 0; i < perm.size(); ++i) {
        unsigned smaller = 0;
        for (size_t j = i + 1; j < perm.size(); ++j)
            if (perm[j] < perm[i]) ++smaller;
        code = code * (perm.size() - i) + smaller;
    }
    return code;
}

bool lehmer_decode(uint64_t code, unsigned n, std::vector<uint8_t>& out) {
    std::vector<uint64_t> digits(n, 0);
    for (unsigned i = 0; i < n; ++i) {
        digits[n - 1 - i] = code % (i + 1);
        code /= (i + 1);
    }
    if (code != 0) return false;
    std::vector<uint8_t> avail(n);
    for (unsigned i = 0; i < n; ++i) avail[i] = static_cast<uint8_t>(i);
    out.clear();
    for (unsigned i = 0; i < n; ++i) {
        out.push_back(avail[digits[i]]);
        avail.erase(avail.begin() + digits[i]);
    }
    return true;
}

} // namespace

SpernerEmission emit_two_source_eol(const HairyBallInstance& inst, bool paper_bounds) {
    auto up = choose_params(inst, paper_bounds); // ImmediateSolution propagates
    auto cx = std::make_shared<SpernerComplex>(up);
    const unsigned k = cx->k();
    const unsigned q = up.params.q;
    const unsigned pk = perm_bits(k), pk1 = perm_bits(k - 1);
    const unsigned main_width = 1 + k + k * q + pk;
    const unsigned layer_width = 2 + k + (k - 1) * q + pk1; // j-1 stored in k bits
    const unsigned width = std::max(main_width, layer_width);
    if (width > BitVec::kMaxBits) throw GeometryError("cell encoding exceeds vertex capacity");

    auto encode_cell = [k, q, pk, pk1](const CellKey& key) {
        BitVec v;
        if (const auto* s = std::get_if<SimplexKey>(&key)) {
            v.set_bit(0, false);
            v.set_field(1, k, s->orthant);
            for (unsigned i = 0; i < k; ++i)
                v.set_field(1 + k + i * q, q, static_cast<uint64_t>(s->base[i]));
            v.set_field(1 + k + k * q, pk, lehmer_encode(s->perm));
            return v;
        }
        const auto& l = std::get<LayerKey>(key);
        v.set_bit(0, true);
        v.set_bit(1, l.negative_side);
        v.set_field(2, k, l.j - 1);
        for (unsigned i = 0; i + 1 < k; ++i)
            v.set_field(2 + k + i * q, q, static_cast<uint64_t>(l.base[i]));
        v.set_field(2 + k + (k - 1) * q, pk1, lehmer_encode(l.perm));
        return v;
    };

    auto decode_raw = [k, q, pk, pk1, cx](const Vertex& v) -> std::optional<CellKey> {
        auto zero_tail = [&](unsigned from) {
            for (unsigned i = from; i < BitVec::kMaxBits; ++i)
                if (v.bit(i)) return false;
            return true;
        };
        if (!v.bit(0)) {
            SimplexKey s;
            s.orthant = static_cast<uint32_t>(v.field(1, k));
            s.base.resize(k);
            for (unsigned i = 0; i < k; ++i)
                s.base[i] = static_cast<int64_t>(v.field(1 + k + i * q, q));
            if (!lehmer_decode(v.field(1 + k + k * q, pk), k, s.perm)) return std::nullopt;
            if (!zero_tail(1 + k + k * q + pk)) return std::nullopt;
            CellKey key = s;
            if (!cx->cell_valid(key)) return std::nullopt;
            return key;
        }
        LayerKey l;
        l.negative_side = v.bit(1);
        uint64_t j1 = v.field(2, k);
        if (j1 >= k) return std::nullopt;
        l.j = static_cast<unsigned>(j1) + 1;
        l.base.resize(k - 1);
        for (unsigned i = 0; i + 1 < k; ++i)
            l.base[i] = static_cast<int64_t>(v.field(2 + k + i * q, q));
        if (!lehmer_decode(v.field(2 + k + (k - 1) * q, pk1), k - 1, l.perm)) return std::nullopt;
        if (!zero_tail(2 + k + (k - 1) * q + pk1)) return std::nullopt;
        CellKey key = l;
        if (!cx->cell_valid(key)) return std::nullopt;
        return key;
    };

    auto [dplus, dminus] = cx->start_doors();
    if (dplus.orientation != dminus.orientation)
        throw GeometryError("start doors disagree in orientation");
    const int source_sign = dplus.orientation; // doors with this sign are entrances

    auto step = [cx, k, source_sign](const CellKey& key, bool forward) -> std::optional<CellKey> {
        auto refs = cx->cell_vertex_refs(key);
        std::vector<unsigned> cols(refs.size());
        for (size_t i = 0; i < refs.size(); ++i)
            cols[i] = cx->vertex_colour(refs[i].z, refs[i].artificial);
        for (unsigned d = 0; d <= k; ++d) {
            if (!facet_is_door(cols, d, k)) continue;
            int orient = cx->facet_orientation(key, d, cols);
            bool exit_door = orient == -source_sign;
            if (exit_door != forward) continue;
            auto nb = cx->neighbor_across(key, d);
            if (nb.exposed) return std::nullopt;
            return nb.cell;
        }
        return std::nullopt;
    };

    SpernerEmission out;
    out.complex = cx;
    out.width = width;
    out.encode_cell = encode_cell;
    out.decode_cell = [decode_raw](const Vertex& v) {
        auto c = decode_raw(v);
        if (!c) throw InvalidKey("not a cell encoding");
        return *c;
    };

    auto succ = [decode_raw, step, encode_cell](const Vertex& v) {
        auto key = decode_raw(v);
        if (!key) return v;
        auto nxt = step(*key, true);
        return nxt ? encode_cell(*nxt) : v;
    };
    auto pred = [decode_raw, step, encode_cell](const Vertex& v) {
        auto key = decode_raw(v);
        if (!key) return v;
        auto nxt = step(*key, false);
        return nxt ? encode_cell(*nxt) : v;
    };
    out.ms.graph = EolInstance(width, succ, pred, Backing::Generated);
    out.ms.sources = {encode_cell(dplus.cell), encode_cell(dminus.cell)};
    for (const Vertex& s : out.ms.sources) {
        if (!(out.ms.graph.pred(s) == s) || out.ms.graph.succ(s) == s)
            throw GeometryError("start cell is not a source of the emitted instance");
    }

    auto field = up.field;
    out.decode = [cx, decode_raw, field, k](const Vertex& v) -> SpherePoint {
        auto key = decode_raw(v);
        if (!key) throw InvalidKey("solution does not decode to a cell");
        auto refs = cx->cell_vertex_refs(*key);
        std::vector<unsigned> cols(refs.size());
        for (size_t i = 0; i < refs.size(); ++i)
            cols[i] = cx->vertex_colour(refs[i].z, refs[i].artificial);
        if (!is_panchromatic(cols, k))
            throw GeometryError("reduced solution is not a panchromatic cell");
        unsigned zi = 0;
        while (cols[zi] != 0) ++zi;
        return field->unrotate(sp_inv(cx->vertex_point(refs[zi])));
    };
    return out;
}

} // namespace hairball
