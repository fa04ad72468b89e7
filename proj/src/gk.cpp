#include "hairball/gk.hpp"

#include <algorithm>
#include <cassert>

namespace hairball {

GkVertex GkVertex::set(std::vector<uint64_t> xs) {
    std::sort(xs.begin(), xs.end());
    GkVertex v;
    v.kind = Kind::Set;
    v.elems = std::move(xs);
    return v;
}

GkVertex GkVertex::pair(std::vector<uint64_t> paths, GkVertex inner) {
    std::sort(paths.begin(), paths.end());
    GkVertex v;
    v.kind = Kind::Pair;
    v.elems = std::move(paths);
    v.inner = std::make_shared<const GkVertex>(std::move(inner));
    return v;
}

bool GkVertex::operator==(const GkVertex& o) const {
    if (kind != o.kind || elems != o.elems) return false;
    if (kind == Kind::Set) return true;
    return *inner == *o.inner;
}

void GkVertex::flatten(std::vector<uint64_t>& out) const {
    out.insert(out.end(), elems.begin(), elems.end());
    if (kind == Kind::Pair) inner->flatten(out);
}

GkCodec::GkCodec(unsigned k, unsigned n) : k_(k), n_(n), widths_(k + 1, 0) {
    for (unsigned l = 1; l <= k; ++l) widths_[l] = width_for(l, n);
    if (total_width() > BitVec::kMaxBits) throw EolError("G_k encoding exceeds vertex capacity");
}

// The recursive width stays within the k*n + k^2 budget.
namespace {
constexpr bool codec_widths_ok() {
    for (unsigned k = 1; k <= 8; ++k)
        for (unsigned n = 1; n <= 16; ++n)
            if (GkCodec::width_for(k, n) > k * n + k * k) return false;
    return true;
}
static_assert(codec_widths_ok());
} // namespace

void GkCodec::encode_at(const GkVertex& v, BitVec& out, unsigned pos) const {
    unsigned l = v.level();
    if (l == 1) {
        // level 1 is a bare vertex, no tag
        out.set_field(pos, n_, v.kind == GkVertex::Kind::Set ? v.elems[0] : 0);
        return;
    }
    if (v.kind == GkVertex::Kind::Set) {
        out.set_bit(pos, false);
        for (unsigned j = 0; j < l; ++j) out.set_field(pos + 1 + j * n_, n_, v.elems[j]);
    } else {
        unsigned i = static_cast<unsigned>(v.elems.size());
        out.set_bit(pos, true);
        out.set_field(pos + 1, l - 1, i);
        for (unsigned j = 0; j < i; ++j) out.set_field(pos + l + j * n_, n_, v.elems[j]);
        encode_at(*v.inner, out, pos + l + i * n_);
    }
}

BitVec GkCodec::encode(const GkVertex& v) const {
    if (v.level() != k_) throw InvalidVertex("encode: wrong level");
    BitVec out;
    encode_at(v, out, 0);
    return out;
}

bool GkCodec::zero_beyond(const BitVec& bits, unsigned pos, unsigned end) const {
    for (unsigned i = pos; i < end; ++i)
        if (bits.bit(i)) return false;
    return true;
}

std::optional<GkVertex> GkCodec::decode_at(const BitVec& bits, unsigned pos, unsigned level) const {
    if (level == 1) {
        GkVertex v;
        v.kind = GkVertex::Kind::Set;
        v.elems = {bits.field(pos, n_)};
        return v;
    }
    if (!bits.bit(pos)) {
        std::vector<uint64_t> xs(level);
        for (unsigned j = 0; j < level; ++j) xs[j] = bits.field(pos + 1 + j * n_, n_);
        for (unsigned j = 0; j + 1 < level; ++j)
            if (xs[j] >= xs[j + 1]) return std::nullopt; // must be strictly ascending
        if (!zero_beyond(bits, pos + 1 + level * n_, pos + width(level))) return std::nullopt;
        GkVertex v;
        v.kind = GkVertex::Kind::Set;
        v.elems = std::move(xs);
        return v;
    }
    uint64_t i = bits.field(pos + 1, level - 1);
    if (i < 1 || i >= level) return std::nullopt;
    std::vector<uint64_t> paths(i);
    for (unsigned j = 0; j < i; ++j) paths[j] = bits.field(pos + level + j * n_, n_);
    for (unsigned j = 0; j + 1 < i; ++j)
        if (paths[j] >= paths[j + 1]) return std::nullopt;
    unsigned inner_pos = pos + level + static_cast<unsigned>(i) * n_;
    auto inner = decode_at(bits, inner_pos, level - static_cast<unsigned>(i));
    if (!inner) return std::nullopt;
    if (!zero_beyond(bits, inner_pos + width(level - static_cast<unsigned>(i)), pos + width(level)))
        return std::nullopt;
    GkVertex v;
    v.kind = GkVertex::Kind::Pair;
    v.elems = std::move(paths);
    v.inner = std::make_shared<const GkVertex>(std::move(*inner));
    return v;
}

std::optional<GkVertex> GkCodec::decode(const BitVec& bits, unsigned level) const {
    if (!zero_beyond(bits, width(level), BitVec::kMaxBits)) return std::nullopt;
    return decode_at(bits, 0, level);
}

bool is_gk_vertex(const EolInstance& base, const GkVertex& v) {
    auto sorted_distinct = [](const std::vector<uint64_t>& xs) {
        for (size_t j = 0; j + 1 < xs.size(); ++j)
            if (xs[j] >= xs[j + 1]) return false;
        return true;
    };
    if (!sorted_distinct(v.elems)) return false;
    for (uint64_t x : v.elems) {
        if (base.n() < 64 && x >= (uint64_t(1) << base.n())) return false;
        VertexClass c = classify(base, Vertex(x));
        if (v.kind == GkVertex::Kind::Set) {
            if (c == VertexClass::Isolated) return false;
        } else {
            if (c != VertexClass::Path) return false;
        }
    }
    if (v.kind == GkVertex::Kind::Pair) {
        if (v.elems.empty() || !v.inner) return false;
        return is_gk_vertex(base, *v.inner);
    }
    return !v.elems.empty();
}

namespace {

GkVertex step_unchecked(const EolInstance& base, const GkVertex& v, Dir dir);

GkVertex step_set(const EolInstance& base, const GkVertex& v, Dir dir) {
    std::vector<uint64_t> sources, sinks, paths;
    for (uint64_t x : v.elems) {
        switch (classify(base, Vertex(x))) {
            case VertexClass::Source: sources.push_back(x); break;
            case VertexClass::Sink: sinks.push_back(x); break;
            case VertexClass::Path: paths.push_back(x); break;
            case VertexClass::Isolated: return v; // not a vertex; self-map
        }
    }
    if (!sources.empty() && !sinks.empty()) return v; // isolated by construction

    if (dir == Dir::Succ) {
        if (sinks.empty()) {
            std::vector<uint64_t> img;
            img.reserve(v.elems.size());
            for (uint64_t x : v.elems) img.push_back(base.succ(Vertex(x)).low64());
            return GkVertex::set(std::move(img));
        }
        if (paths.empty()) return v; // all sinks: a sink of this level
        return GkVertex::pair(std::move(paths), GkVertex::set(std::move(sinks)));
    }
    // Dir::Pred
    if (sources.empty()) {
        std::vector<uint64_t> img;
        img.reserve(v.elems.size());
        for (uint64_t x : v.elems) img.push_back(base.pred(Vertex(x)).low64());
        return GkVertex::set(std::move(img));
    }
    if (paths.empty()) return v; // all sources: a source of this level
    return GkVertex::pair(std::move(paths), GkVertex::set(std::move(sources)));
}

GkVertex step_pair(const EolInstance& base, const GkVertex& v, Dir dir) {
    // The inner level runs in the reversed direction; when the inner vertex is
    // an endpoint of its level, the pair merges back into a plain set.
    const GkVertex& z = *v.inner;
    Dir rev = dir == Dir::Succ ? Dir::Pred : Dir::Succ;
    GkVertex zstep = step_unchecked(base, z, rev);
    if (zstep == z) {
        GkVertex zother = step_unchecked(base, z, dir);
        if (zother == z) return v; // inner isolated
        // z is an endpoint of its level, hence an all-sink/all-source set.
        assert(z.kind == GkVertex::Kind::Set);
        std::vector<uint64_t> merged = v.elems;
        merged.insert(merged.end(), z.elems.begin(), z.elems.end());
        return GkVertex::set(std::move(merged));
    }
    GkVertex out;
    out.kind = GkVertex::Kind::Pair;
    out.elems = v.elems;
    out.inner = std::make_shared<const GkVertex>(std::move(zstep));
    return out;
}

GkVertex step_unchecked(const EolInstance& base, const GkVertex& v, Dir dir) {
    if (v.kind == GkVertex::Kind::Set) return step_set(base, v, dir);
    return step_pair(base, v, dir);
}

} // namespace

GkVertex gk_step(const EolInstance& base, const GkVertex& v, Dir dir) {
    if (!is_gk_vertex(base, v)) throw InvalidVertex("gk_step: not a vertex at its level");
    return step_unchecked(base, v, dir);
}

SourceRelabel relabel_sources(const MsEolInstance& ms) {
    const unsigned k = static_cast<unsigned>(ms.sources.size());
    {
        auto s = ms.sources;
        std::sort(s.begin(), s.end());
        if (std::adjacent_find(s.begin(), s.end()) != s.end())
            throw DuplicateSources("duplicate source in list");
    }
    // Involution: sources already < k keep their label; the rest are paired
    // with the unused labels below k.
    std::vector<Vertex> big_sources, free_labels;
    std::vector<bool> taken(k, false);
    for (const Vertex& s : ms.sources) {
        if (!(s.w[1] | s.w[2] | s.w[3]) && s.low64() < k)
            taken[static_cast<size_t>(s.low64())] = true;
        else
            big_sources.push_back(s);
    }
    for (uint64_t i = 0; i < k; ++i)
        if (!taken[static_cast<size_t>(i)]) free_labels.push_back(Vertex(i));

    auto swaps = std::make_shared<std::vector<std::pair<Vertex, Vertex>>>();
    for (size_t i = 0; i < big_sources.size(); ++i)
        swaps->push_back({big_sources[i], free_labels[i]});

    auto map = [swaps](const Vertex& x) {
        for (const auto& [a, b] : *swaps) {
            if (x == a) return b;
            if (x == b) return a;
        }
        return x;
    };

    EolInstance base = ms.graph;
    auto succ = [base, map](const Vertex& x) { return map(base.succ(map(x))); };
    auto pred = [base, map](const Vertex& x) { return map(base.pred(map(x))); };

    MsEolInstance out;
    out.graph = EolInstance(ms.graph.n(), succ, pred, Backing::Generated);
    for (uint64_t i = 0; i < k; ++i) out.sources.push_back(Vertex(i));
    return SourceRelabel{std::move(out), map};
}

GkReduction ms_to_eol(const MsEolInstance& ms) {
    const unsigned k = static_cast<unsigned>(ms.sources.size());
    if (k == 0) throw EolError("ms_to_eol: empty source list");
    if (ms.graph.n() > 64) throw EolError("ms_to_eol: base width above 64 bits");

    GkReduction out;
    out.k = k;

    // Listed sources must be genuine and properly attached; a violator is an
    // immediate solution of the instance.
    for (const Vertex& s : ms.sources) {
        if (!(ms.graph.pred(s) == s) || ms.graph.succ(s) == s ||
            ms.graph.pred(ms.graph.succ(s)) != s) {
            out.immediate = s;
            return out;
        }
    }

    SourceRelabel rl = relabel_sources(ms);
    EolInstance base = normalize(rl.ms.graph).inst;
    auto relabel_map = rl.map;

    auto codec = std::make_shared<GkCodec>(k, ms.graph.n());
    out.codec = codec;

    // Transposition putting the known source set {0..k-1} at the all-zero
    // string (which is never a canonical encoding for k >= 2).
    std::vector<uint64_t> known(k);
    for (unsigned i = 0; i < k; ++i) known[i] = i;
    BitVec e0 = codec->encode(GkVertex::set(known));
    auto sw = [e0](const BitVec& y) {
        if (y == e0) return BitVec();
        if (y.is_zero()) return e0;
        return y;
    };

    auto apply = [codec, base](const BitVec& bits, Dir dir) -> BitVec {
        auto v = codec->decode(bits);
        if (!v || !is_gk_vertex(base, *v)) return bits;
        return codec->encode(gk_step(base, *v, dir));
    };

    unsigned width = codec->total_width();
    auto succ = [sw, apply](const Vertex& y) { return sw(apply(sw(y), Dir::Succ)); };
    auto pred = [sw, apply](const Vertex& y) { return sw(apply(sw(y), Dir::Pred)); };
    out.eol = EolInstance(width, succ, pred, Backing::Generated);

    MsEolInstance original = ms;
    out.decode = [codec, base, sw, relabel_map, original, k](const Vertex& y) -> Vertex {
        auto v = codec->decode(sw(y));
        if (v && is_gk_vertex(base, *v)) {
            GkVertex s = gk_step(base, *v, Dir::Succ);
            GkVertex p = gk_step(base, *v, Dir::Pred);
            if (v->kind == GkVertex::Kind::Set) {
                if (s == *v && !(p == *v)) {
                    // sink set: every element is a sink of the base graph
                    return relabel_map(Vertex(v->elems.front()));
                }
                if (p == *v && !(s == *v)) {
                    // source set other than {0..k-1}: pick an unknown source
                    for (uint64_t e : v->elems)
                        if (e >= k) return relabel_map(Vertex(e));
                }
            }
        }
        // Fallback: any mentioned element that happens to solve the original.
        if (v) {
            std::vector<uint64_t> all;
            v->flatten(all);
            for (uint64_t e : all) {
                Vertex cand = relabel_map(Vertex(e));
                if (verify_ms_solution(original, cand)) return cand;
            }
        }
        throw EolError("decode: reduced solution does not map back");
    };
    return out;
}

} // namespace hairball
