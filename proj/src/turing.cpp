#include "hairball/turing.hpp"

#include "hairball/gk.hpp"

#include <algorithm>

namespace hairball {

namespace {

// Finite edge-override layer consulted before the base maps. Overrides are
// reciprocated pairs succ(a) = b, pred(b) = a.
struct Overrides {
    std::vector<std::pair<Vertex, Vertex>> edges;

    EolInstance apply(const EolInstance& base) const {
        auto edges_copy = edges;
        auto succ = [base, edges_copy](const Vertex& x) {
            for (const auto& [a, b] : edges_copy)
                if (x == a) return b;
            return base.succ(x);
        };
        auto pred = [base, edges_copy](const Vertex& x) {
            for (const auto& [a, b] : edges_copy)
                if (x == b) return a;
            return base.pred(x);
        };
        return EolInstance(base.n(), succ, pred, Backing::Generated);
    }
};

} // namespace

KEolResult solve_k_eol(const EolInstance& inst, unsigned k, const EolOracle& oracle,
                       std::vector<Vertex> initial_sources) {
    KEolResult res;
    if (k == 0) return res;
    Overrides ov;
    std::vector<Vertex> known = std::move(initial_sources);
    std::vector<Vertex> all_known = known; // including consumed ones

    while (res.sinks.size() < k && res.new_sources.size() < k) {
        if (res.oracle_calls >= 2 * k)
            throw OracleBudgetExceeded("k-EoL loop exceeded 2k oracle calls");
        if (known.empty())
            throw SourcesExhausted("no known sources left; supply at least k up front");

        EolInstance cur = ov.apply(inst);
        MsEolInstance ms{cur, known};
        GkReduction red = ms_to_eol(ms);
        Vertex sol;
        if (red.immediate) {
            sol = *red.immediate;
        } else {
            Vertex y = oracle(red.eol);
            ++res.oracle_calls;
            sol = red.decode(y);
        }

        bool succ_self = cur.succ(sol) == sol;
        bool pred_self = cur.pred(sol) == sol;
        if (pred_self && !succ_self) {
            // New source of the overridden graph = source of the original.
            if (std::find(all_known.begin(), all_known.end(), sol) != all_known.end())
                throw EolError("oracle returned an already-known source");
            res.new_sources.push_back(sol);
            known.push_back(sol);
            all_known.push_back(sol);
        } else if (succ_self && !pred_self) {
            res.sinks.push_back(sol);
            Vertex w = known.back();
            known.pop_back();
            ov.edges.push_back({sol, w});
        } else {
            throw EolError("oracle solution is neither sink nor source of a well-formed instance");
        }
    }
    if (res.sinks.size() < k) res.sinks.clear();
    else res.new_sources.clear();
    return res;
}

KSinksResult solve_k_sinks(const EolInstance& inst, unsigned k, const SinkOracle& oracle,
                           std::vector<Vertex> initial_sources) {
    if (initial_sources.empty())
        for (uint64_t i = 0; i < k; ++i) initial_sources.push_back(Vertex(i));
    if (initial_sources.size() < k)
        throw SourcesExhausted("k-Sinks needs k known sources");

    KSinksResult res;
    Overrides ov;
    std::vector<Vertex> known = std::move(initial_sources);

    for (unsigned round = 0; round < k; ++round) {
        EolInstance cur = ov.apply(inst);
        Vertex src = known.back();

        // Conjugate by the transposition src <-> 0 so the designated source
        // sits at the all-zero vertex.
        auto sw = [src](const Vertex& x) {
            if (x == src) return Vertex();
            if (x.is_zero()) return src;
            return x;
        };
        auto succ = [cur, sw](const Vertex& x) { return sw(cur.succ(sw(x))); };
        auto pred = [cur, sw](const Vertex& x) { return sw(cur.pred(sw(x))); };
        EolInstance swapped(cur.n(), succ, pred, Backing::Generated);

        Vertex t = sw(oracle(swapped));
        ++res.oracle_calls;
        if (!(cur.succ(t) == t) || cur.pred(t) == t)
            throw EolError("sink oracle returned a non-sink");
        if (std::find(res.sinks.begin(), res.sinks.end(), t) != res.sinks.end())
            throw EolError("sink oracle repeated a retired sink");
        res.sinks.push_back(t);
        known.pop_back();
        ov.edges.push_back({t, src});
    }
    return res;
}

} // namespace hairball
