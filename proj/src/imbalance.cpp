#include "hairball/imbalance.hpp"

#include <algorithm>

namespace hairball {

ImbalanceInstance ImbalanceInstance::table(unsigned n, unsigned d,
                                           std::vector<std::vector<uint64_t>> succ,
                                           std::vector<std::vector<uint64_t>> pred, uint64_t z) {
    auto clean = [n, d](std::vector<std::vector<uint64_t>>& lists) {
        for (uint64_t x = 0; x < lists.size(); ++x) {
            auto& l = lists[x];
            std::sort(l.begin(), l.end());
            l.erase(std::unique(l.begin(), l.end()), l.end());
            l.erase(std::remove(l.begin(), l.end(), x), l.end());
            if (l.size() > d) throw EolError("imbalance list longer than degree bound");
            for (uint64_t y : l)
                if (y >= (uint64_t(1) << n)) throw EolError("imbalance list entry out of range");
        }
    };
    clean(succ);
    clean(pred);
    auto st = std::make_shared<const std::vector<std::vector<uint64_t>>>(std::move(succ));
    auto pt = std::make_shared<const std::vector<std::vector<uint64_t>>>(std::move(pred));
    ImbalanceInstance imb;
    imb.n = n;
    imb.d = d;
    imb.z = z;
    imb.succ_list = [st](uint64_t x) { return (*st)[x]; };
    imb.pred_list = [pt](uint64_t x) { return (*pt)[x]; };
    return imb;
}

bool verify_imbalance_solution(const ImbalanceInstance& imb, const ImbalanceSolution& sol) {
    if (sol.unbalanced) {
        if (sol.x == imb.z) return false;
        return imb.succ_list(sol.x).size() != imb.pred_list(sol.x).size();
    }
    if (!sol.ill_partner) return false;
    uint64_t x = sol.x, y = *sol.ill_partner;
    auto contains = [](const std::vector<uint64_t>& l, uint64_t v) {
        return std::find(l.begin(), l.end(), v) != l.end();
    };
    bool fwd = contains(imb.succ_list(x), y) != contains(imb.pred_list(y), x);
    bool bwd = contains(imb.pred_list(x), y) != contains(imb.succ_list(y), x);
    return fwd || bwd;
}

namespace {

// {y in S(x) : x in P(y)}, sorted; the well-defined successor list.
std::vector<uint64_t> pruned(const std::function<std::vector<uint64_t>(uint64_t)>& fwd,
                             const std::function<std::vector<uint64_t>(uint64_t)>& bwd, uint64_t x) {
    std::vector<uint64_t> out;
    for (uint64_t y : fwd(x)) {
        auto back = bwd(y);
        if (std::find(back.begin(), back.end(), x) != back.end()) out.push_back(y);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<uint64_t> ill_edge_at(const ImbalanceInstance& imb, uint64_t x) {
    auto contains = [](const std::vector<uint64_t>& l, uint64_t v) {
        return std::find(l.begin(), l.end(), v) != l.end();
    };
    for (uint64_t y : imb.succ_list(x))
        if (!contains(imb.pred_list(y), x)) return y;
    for (uint64_t y : imb.pred_list(x))
        if (!contains(imb.succ_list(y), x)) return y;
    return std::nullopt;
}

} // namespace

ChessplayerReduction imbalance_to_ms(const ImbalanceInstance& imb) {
    ChessplayerReduction out;
    auto raw_s = imb.succ_list, raw_p = imb.pred_list;
    if (raw_s(imb.z).size() == raw_p(imb.z).size())
        throw BalancedWitness("witness vertex is balanced");

    std::function<std::vector<uint64_t>(uint64_t)> succ_w = [raw_s, raw_p](uint64_t x) {
        return pruned(raw_s, raw_p, x);
    };
    std::function<std::vector<uint64_t>(uint64_t)> pred_w = [raw_s, raw_p](uint64_t x) {
        return pruned(raw_p, raw_s, x);
    };

    size_t out_deg = succ_w(imb.z).size(), in_deg = pred_w(imb.z).size();
    if (out_deg == in_deg) {
        // Pruning balanced z, so some edge at z is ill-defined; that is
        // already a solution of the instance.
        ImbalanceSolution sol;
        sol.x = imb.z;
        sol.ill_partner = ill_edge_at(imb, imb.z);
        out.immediate = sol;
        return out;
    }
    bool swapped = out_deg < in_deg;
    if (swapped) std::swap(succ_w, pred_w);
    out.swapped = swapped;

    unsigned lb = 0;
    while ((uint64_t(1) << lb) < imb.d) ++lb;
    out.copy_bits = lb;
    unsigned width = imb.n + lb;

    auto pack = [n = imb.n, lb](uint64_t x, uint64_t copy) {
        Vertex v(x);
        v.set_field(n, lb, copy - 1); // copies are 1-based
        return v;
    };
    auto unpack_x = [n = imb.n](const Vertex& v) { return v.field(0, n); };
    auto unpack_copy = [n = imb.n, lb](const Vertex& v) { return v.field(n, lb) + 1; };

    auto index_of = [](const std::vector<uint64_t>& l, uint64_t v) -> uint64_t {
        return static_cast<uint64_t>(std::find(l.begin(), l.end(), v) - l.begin()) + 1;
    };

    auto step = [=](const Vertex& v, bool forward) {
        uint64_t x = unpack_x(v), c = unpack_copy(v);
        auto fwd = forward ? succ_w : pred_w;
        auto bwd = forward ? pred_w : succ_w;
        auto list = fwd(x);
        if (c > list.size()) return v;
        uint64_t y = list[c - 1];
        return pack(y, index_of(bwd(y), x));
    };

    MsEolInstance ms;
    ms.graph = EolInstance(
        width, [step](const Vertex& v) { return step(v, true); },
        [step](const Vertex& v) { return step(v, false); }, Backing::Generated);
    size_t i = pred_w(imb.z).size(), j = succ_w(imb.z).size() - i;
    for (size_t c = i + 1; c <= i + j; ++c) ms.sources.push_back(pack(imb.z, c));
    out.ms = std::move(ms);

    ImbalanceInstance original = imb;
    out.decode = [original, unpack_x](const Vertex& v) {
        ImbalanceSolution sol;
        sol.x = unpack_x(v);
        if (original.succ_list(sol.x).size() != original.pred_list(sol.x).size()) {
            sol.unbalanced = true;
            return sol;
        }
        sol.ill_partner = ill_edge_at(original, sol.x);
        return sol;
    };
    return out;
}

ImbalanceInstance random_imbalance_instance(Rng& rng, unsigned n, unsigned d, bool noisy) {
    uint64_t count = uint64_t(1) << n;
    std::vector<std::vector<uint64_t>> succ(count), pred(count);
    auto deg_ok = [&](const std::vector<uint64_t>& l) { return l.size() < d; };
    auto contains = [](const std::vector<uint64_t>& l, uint64_t v) {
        return std::find(l.begin(), l.end(), v) != l.end();
    };

    uint64_t edges = count + rng.below(count * std::max(1u, d / 2));
    for (uint64_t e = 0; e < edges; ++e) {
        uint64_t x = rng.below(count), y = rng.below(count);
        if (x == y) continue;
        if (!deg_ok(succ[x]) || !deg_ok(pred[y])) continue;
        if (contains(succ[x], y)) continue;
        succ[x].push_back(y);
        pred[y].push_back(x);
    }
    if (noisy) {
        for (unsigned t = 0; t < 1 + rng.below(3); ++t) {
            uint64_t x = rng.below(count), y = rng.below(count);
            if (x == y) continue;
            if (deg_ok(succ[x]) && !contains(succ[x], y)) succ[x].push_back(y); // unreciprocated
        }
    }
    // Force an imbalance at some vertex and pick it as the witness.
    for (uint64_t x = 0; x < count; ++x) {
        if (succ[x].size() != pred[x].size())
            return ImbalanceInstance::table(n, d, std::move(succ), std::move(pred), x);
    }
    // All balanced: remove one incoming edge somewhere.
    for (uint64_t x = 0; x < count; ++x) {
        if (!pred[x].empty()) {
            uint64_t y = pred[x].back();
            pred[x].pop_back();
            auto& sl = succ[y];
            sl.erase(std::remove(sl.begin(), sl.end(), x), sl.end());
            if (succ[x].size() != pred[x].size())
                return ImbalanceInstance::table(n, d, std::move(succ), std::move(pred), x);
            return ImbalanceInstance::table(n, d, std::move(succ), std::move(pred), y);
        }
    }
    // Empty graph: add a single edge.
    succ[0].push_back(1);
    pred[1].push_back(0);
    return ImbalanceInstance::table(n, d, std::move(succ), std::move(pred), 0);
}

} // namespace hairball
