#pragma once

#include "hairball/eol.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace hairball {

struct BalancedWitness : EolError {
    using EolError::EolError;
};

// A digraph with out/in-degree up to d, given by potential successor and
// predecessor lists (no duplicates, no self entries), plus a vertex z whose
// in- and out-degree differ.
struct ImbalanceInstance {
    unsigned n = 0;
    unsigned d = 1;
    std::function<std::vector<uint64_t>(uint64_t)> succ_list, pred_list;
    uint64_t z = 0;

    static ImbalanceInstance table(unsigned n, unsigned d,
                                   std::vector<std::vector<uint64_t>> succ,
                                   std::vector<std::vector<uint64_t>> pred, uint64_t z);
};

struct ImbalanceSolution {
    uint64_t x = 0;
    bool unbalanced = false;               // |S(x)| != |P(x)|
    std::optional<uint64_t> ill_partner;   // y with y in S(x) xor x in P(y) (or the P-side analogue)
};

bool verify_imbalance_solution(const ImbalanceInstance& imb, const ImbalanceSolution& sol);

struct ChessplayerReduction {
    MsEolInstance ms;      // vertices are (x, copy) on n + ceil(log2 d) bits
    unsigned copy_bits = 0;
    bool swapped = false;  // roles of succ/pred were exchanged to put z in deficit
    std::function<ImbalanceSolution(const Vertex&)> decode;
    std::optional<ImbalanceSolution> immediate; // ill-defined edge at z balanced it
};

// Vertex-splitting Euler-style reduction: copy (x, i) chains the i-th
// successor of x to the matching predecessor slot. Known sources are the
// excess copies of z. Throws BalancedWitness when z is balanced outright.
ChessplayerReduction imbalance_to_ms(const ImbalanceInstance& imb);

// Random fixture with explicit lists; `noisy` leaves some edges
// unreciprocated. Guarantees z is unbalanced in the raw lists.
ImbalanceInstance random_imbalance_instance(Rng& rng, unsigned n, unsigned d, bool noisy);

} // namespace hairball
