#pragma once

#include "hairball/bitvec.hpp"
#include "hairball/rng.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace hairball {

using Vertex = BitVec;

enum class VertexClass { Source, Sink, Path, Isolated };

enum class Backing { Table, Generated };

struct EolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StepBudgetExceeded : EolError {
    using EolError::EolError;
};
struct NoSolutionFound : EolError {
    using EolError::EolError;
};

uint64_t default_step_budget(); // 2^20 unless HAIRBALL_STEP_BUDGET overrides

// A degree-<=1 digraph on width-n bit strings, given by total successor and
// predecessor maps. Table backing stores explicit arrays (n <= 24); generated
// backing wraps closures produced by reductions.
class EolInstance {
  public:
    EolInstance() = default;
    EolInstance(unsigned n, std::function<Vertex(const Vertex&)> succ,
                std::function<Vertex(const Vertex&)> pred,
                Backing backing = Backing::Generated);

    static EolInstance table(std::vector<uint64_t> succ, std::vector<uint64_t> pred);

    unsigned n() const { return n_; }
    Backing backing() const { return backing_; }
    Vertex succ(const Vertex& v) const { return succ_(v); }
    Vertex pred(const Vertex& v) const { return pred_(v); }

    bool enumerable() const { return backing_ == Backing::Table; }
    uint64_t vertex_count() const { return uint64_t(1) << n_; }

    const std::vector<uint64_t>* succ_table() const { return succ_tab_ ? succ_tab_.get() : nullptr; }
    const std::vector<uint64_t>* pred_table() const { return pred_tab_ ? pred_tab_.get() : nullptr; }

  private:
    unsigned n_ = 0;
    Backing backing_ = Backing::Generated;
    std::function<Vertex(const Vertex&)> succ_, pred_;
    std::shared_ptr<const std::vector<uint64_t>> succ_tab_, pred_tab_;
};

struct MsEolInstance {
    EolInstance graph;
    std::vector<Vertex> sources;
};

// true iff succ(x) = y and pred(y) = x; pre: x != y.
bool edge_exists(const EolInstance& inst, const Vertex& x, const Vertex& y);

VertexClass classify(const EolInstance& inst, const Vertex& x);

// Wraps succ/pred so every edge is reciprocated: succ'(x) = succ(x) only when
// pred(succ(x)) = x and succ(x) != x, else x (and symmetrically for pred').
// Solutions of the wrapped instance are solutions of the original. For table
// backing, `found` reports the first vertex whose raw maps already witness a
// violation.
struct Normalized {
    EolInstance inst;
    std::optional<Vertex> found;
};
Normalized normalize(const EolInstance& inst);

bool verify_eol_solution(const EolInstance& inst, const Vertex& x);
bool verify_ms_solution(const MsEolInstance& ms, const Vertex& x);

// Deterministic solver: path-following from 0, with lexicographic enumeration
// fallback for table backing. Throws StepBudgetExceeded for generated
// instances whose path exceeds the budget.
Vertex solve_eol_table(const EolInstance& inst, uint64_t step_budget = default_step_budget());

// Path-following from `from` until a vertex with succ-side violation
// (P(S(x)) != x) is reached; that is a sink or broken edge. Used as the
// sink-oracle in the Turing reductions.
Vertex solve_sink_from(const EolInstance& inst, const Vertex& from,
                       uint64_t step_budget = default_step_budget());

// All vertices of a table instance falling in each class; test/diagnostic use.
std::vector<Vertex> enumerate_class(const EolInstance& inst, VertexClass cls);

// Random table instance made of disjoint chains and cycles; always
// well-formed (every edge reciprocated) with vertex 0 a source when
// require_zero_source is set.
EolInstance random_table_instance(Rng& rng, unsigned n, bool require_zero_source = true);

// Random well-formed multi-source instance with at least `min_sources`
// sources; the listed sources are all of them.
MsEolInstance random_ms_instance(Rng& rng, unsigned n, unsigned min_sources);

} // namespace hairball
