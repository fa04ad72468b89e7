#include "hairball/eol.hpp"

#include <algorithm>
#include <cstdlib>

namespace hairball {

uint64_t default_step_budget() {
    static uint64_t budget = [] {
        if (const char* env = std::getenv("HAIRBALL_STEP_BUDGET")) {
            char* end = nullptr;
            unsigned long long v = strtoull(env, &end, 10);
            if (end && *end == '\0' && v > 0) return static_cast<uint64_t>(v);
        }
        return uint64_t(1) << 20;
    }();
    return budget;
}

EolInstance::EolInstance(unsigned n, std::function<Vertex(const Vertex&)> succ,
                         std::function<Vertex(const Vertex&)> pred, Backing backing)
    : n_(n), backing_(backing), succ_(std::move(succ)), pred_(std::move(pred)) {
    if (n > BitVec::kMaxBits) throw EolError("vertex width too large");
}

EolInstance EolInstance::table(std::vector<uint64_t> succ, std::vector<uint64_t> pred) {
    if (succ.size() != pred.size() || succ.empty() || (succ.size() & (succ.size() - 1)))
        throw EolError("table size must be a power of two");
    unsigned n = 0;
    while ((uint64_t(1) << n) < succ.size()) ++n;
    auto st = std::make_shared<const std::vector<uint64_t>>(std::move(succ));
    auto pt = std::make_shared<const std::vector<uint64_t>>(std::move(pred));
    EolInstance inst(
        n, [st](const Vertex& v) { return Vertex((*st)[v.low64()]); },
        [pt](const Vertex& v) { return Vertex((*pt)[v.low64()]); }, Backing::Table);
    inst.succ_tab_ = st;
    inst.pred_tab_ = pt;
    return inst;
}

bool edge_exists(const EolInstance& inst, const Vertex& x, const Vertex& y) {
    return inst.succ(x) == y && inst.pred(y) == x;
}

VertexClass classify(const EolInstance& inst, const Vertex& x) {
    bool succ_self = inst.succ(x) == x;
    bool pred_self = inst.pred(x) == x;
    if (pred_self && !succ_self) return VertexClass::Source;
    if (succ_self && !pred_self) return VertexClass::Sink;
    if (succ_self && pred_self) return VertexClass::Isolated;
    return VertexClass::Path;
}

Normalized normalize(const EolInstance& inst) {
    EolInstance base = inst;
    auto succ = [base](const Vertex& x) {
        Vertex y = base.succ(x);
        if (y == x || base.pred(y) != x) return x;
        return y;
    };
    auto pred = [base](const Vertex& x) {
        Vertex y = base.pred(x);
        if (y == x || base.succ(y) != x) return x;
        return y;
    };
    Normalized out{EolInstance(inst.n(), succ, pred, inst.backing()), std::nullopt};
    if (inst.enumerable()) {
        for (uint64_t v = 0; v < inst.vertex_count(); ++v) {
            Vertex x(v);
            Vertex y = inst.succ(x);
            if ((y != x && inst.pred(y) != x) ||
                (inst.pred(x) != x && inst.succ(inst.pred(x)) != x)) {
                out.found = x;
                break;
            }
        }
    }
    return out;
}

bool verify_eol_solution(const EolInstance& inst, const Vertex& x) {
    if (inst.pred(inst.succ(x)) != x) return true;
    return inst.succ(inst.pred(x)) != x && !x.is_zero();
}

bool verify_ms_solution(const MsEolInstance& ms, const Vertex& x) {
    if (ms.graph.pred(ms.graph.succ(x)) != x) return true;
    if (ms.graph.succ(ms.graph.pred(x)) != x)
        return std::find(ms.sources.begin(), ms.sources.end(), x) == ms.sources.end();
    return false;
}

Vertex solve_sink_from(const EolInstance& inst, const Vertex& from, uint64_t step_budget) {
    Vertex x = from;
    for (uint64_t steps = 0; steps <= step_budget; ++steps) {
        if (inst.pred(inst.succ(x)) != x) return x; // sink or broken edge
        x = inst.succ(x);
    }
    throw StepBudgetExceeded("sink walk exceeded step budget");
}

Vertex solve_eol_table(const EolInstance& inst, uint64_t step_budget) {
    Vertex zero;
    // A healthy walk from 0 ends at a sink (or hits a broken edge, which is
    // itself a solution).
    try {
        Vertex x = zero;
        for (uint64_t steps = 0; steps <= step_budget; ++steps) {
            Vertex y = inst.succ(x);
            if (inst.pred(y) != x || y == x) {
                if (verify_eol_solution(inst, x)) return x;
                break; // malformed start (e.g. 0 isolated); fall through
            }
            x = y;
        }
        if (!inst.enumerable()) throw StepBudgetExceeded("path walk exceeded step budget");
    } catch (const StepBudgetExceeded&) {
        if (!inst.enumerable()) throw;
    }
    for (uint64_t v = 0; v < inst.vertex_count(); ++v)
        if (verify_eol_solution(inst, Vertex(v))) return Vertex(v);
    throw NoSolutionFound("instance has no end of line");
}

std::vector<Vertex> enumerate_class(const EolInstance& inst, VertexClass cls) {
    if (!inst.enumerable()) throw EolError("enumerate_class needs table backing");
    std::vector<Vertex> out;
    for (uint64_t v = 0; v < inst.vertex_count(); ++v)
        if (classify(inst, Vertex(v)) == cls) out.push_back(Vertex(v));
    return out;
}

// Lays down random vertex-disjoint chains (and occasional cycles) over a
// shuffled vertex set.
EolInstance random_table_instance(Rng& rng, unsigned n, bool require_zero_source) {
    uint64_t count = uint64_t(1) << n;
    std::vector<uint64_t> succ(count), pred(count);
    for (uint64_t v = 0; v < count; ++v) succ[v] = pred[v] = v;

    std::vector<uint64_t> order(count);
    for (uint64_t v = 0; v < count; ++v) order[v] = v;
    for (uint64_t i = count - 1; i > 0; --i)
        std::swap(order[i], order[rng.below(i + 1)]);
    if (require_zero_source) {
        auto it = std::find(order.begin(), order.end(), uint64_t(0));
        std::swap(*order.begin(), *it);
    }

    size_t pos = 0;
    bool first = true;
    while (pos < order.size()) {
        size_t remaining = order.size() - pos;
        size_t len = 1 + rng.below(std::min<uint64_t>(remaining, 5));
        bool cycle = !first && len >= 3 && rng.below(4) == 0;
        for (size_t i = 0; i + 1 < len; ++i) {
            succ[order[pos + i]] = order[pos + i + 1];
            pred[order[pos + i + 1]] = order[pos + i];
        }
        if (cycle) {
            succ[order[pos + len - 1]] = order[pos];
            pred[order[pos]] = order[pos + len - 1];
        }
        if (first && require_zero_source && len == 1) {
            // vertex 0 must not stay isolated
            continue;
        }
        pos += len;
        first = false;
    }
    return EolInstance::table(std::move(succ), std::move(pred));
}

MsEolInstance random_ms_instance(Rng& rng, unsigned n, unsigned min_sources) {
    for (;;) {
        EolInstance inst = random_table_instance(rng, n, false);
        auto sources = enumerate_class(inst, VertexClass::Source);
        if (sources.size() >= min_sources) return MsEolInstance{inst, sources};
    }
}

} // namespace hairball
