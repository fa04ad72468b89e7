#pragma once

#include "hairball/eol.hpp"

#include <functional>
#include <vector>

namespace hairball {

struct OracleBudgetExceeded : EolError {
    using EolError::EolError;
};
struct SourcesExhausted : EolError {
    using EolError::EolError;
};

// Returns any solution of a single-known-source instance (source = 0).
using EolOracle = std::function<Vertex(const EolInstance&)>;
// Returns a vertex with P(S(x)) != x, i.e. a sink (or broken edge).
using SinkOracle = std::function<Vertex(const EolInstance&)>;

struct KEolResult {
    std::vector<Vertex> sinks;       // k entries when sinks won
    std::vector<Vertex> new_sources; // k entries when sources won
    unsigned oracle_calls = 0;
};

// Repeated multiple-source solving with an edge-override layer: every round
// reduces the current instance through ms_to_eol and asks the oracle. A found
// sink is retired by an override edge onto a known source (consuming it); a
// found source joins the known list. Stops with k sinks or k new sources in
// at most 2k calls. `initial_sources` must list at least k known sources for
// the 2k bound to be guaranteed.
KEolResult solve_k_eol(const EolInstance& inst, unsigned k, const EolOracle& oracle,
                       std::vector<Vertex> initial_sources = {Vertex()});

struct KSinksResult {
    std::vector<Vertex> sinks; // exactly k
    unsigned oracle_calls = 0;
};

// Exactly k sink-oracle calls; each round retires the found sink with an
// override edge onto a known source. Defaults to known sources 0..k-1.
KSinksResult solve_k_sinks(const EolInstance& inst, unsigned k, const SinkOracle& oracle,
                           std::vector<Vertex> initial_sources = {});

} // namespace hairball
