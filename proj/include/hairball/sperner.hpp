#pragma once

#include "hairball/eol.hpp"
#include "hairball/unfold.hpp"

#include <variant>
#include <vector>

namespace hairball {

struct InvalidKey : GeometryError {
    using GeometryError::GeometryError;
};
struct BoundaryViolation : GeometryError {
    RatVec vertex;
    explicit BoundaryViolation(RatVec v)
        : GeometryError("boundary vertex coloured outside its face"), vertex(std::move(v)) {}
};
struct WalkFailure : GeometryError {
    enum class Kind { BoundaryExit, Budget } kind;
    WalkFailure(Kind k, const std::string& what) : GeometryError(what), kind(k) {}
};

// Kuhn cell of the triangulated simplex {M >= y_1 >= ... >= y_k >= 0},
// mirrored into an orthant of the cross-polytope. `base` and the permutation
// walk live in y-space; sign bits pick the orthant.
struct SimplexKey {
    uint32_t orthant = 0;          // bit i set = axis i negated
    std::vector<int64_t> base;     // k entries in [0, M)
    std::vector<uint8_t> perm;     // permutation of 0..k-1

    bool operator==(const SimplexKey&) const = default;
};

// Cell of the artificial prism layer glued over one of the two outer faces.
// The face cell is a (k-1)-dimensional Kuhn cell in coordinates y_2..y_k;
// j in [1, k] selects the staircase simplex of the prism.
struct LayerKey {
    bool negative_side = false;
    std::vector<int64_t> base;     // k-1 entries
    std::vector<uint8_t> perm;     // permutation of 0..k-2
    unsigned j = 1;

    bool operator==(const LayerKey&) const = default;
};

using CellKey = std::variant<SimplexKey, LayerKey>;

struct DoorFacet {
    CellKey cell;
    unsigned dropped_vertex = 0;
    int orientation = 0; // sign of the colour-ordered determinant
};

struct PanchromaticCell {
    CellKey cell;
    RatVec z0;            // the colour-0 vertex, exact chart coordinates
    uint64_t steps = 0;
};

// The assembled solver state for one instance: unfolded field, parameters,
// and lazy access to the augmented complex.
class SpernerComplex {
  public:
    explicit SpernerComplex(UnfoldedProblem problem);
    // Test seam: replaces the field-induced colouring of real vertices (the
    // override must still satisfy the Sperner boundary conditions).
    SpernerComplex(UnfoldedProblem problem, std::function<unsigned(const RatVec&)> colour);

    unsigned k() const { return k_; }
    int64_t M() const { return M_; }
    const Rat& h() const { return h_; }
    const UnfoldedProblem& problem() const { return up_; }

    // exact chart coordinates of a cell's k+1 vertices (layer tops pushed
    // radially out by a tiny factor so every cell is a genuine simplex)
    std::vector<RatVec> cell_vertices(const CellKey& key) const;

    // vertex colour with the boundary condition check; integer vertex data
    unsigned vertex_colour(const std::vector<int64_t>& z_signed, bool artificial) const;

    struct Neighbor {
        CellKey cell;
        bool exposed = false; // facet lies on the augmented boundary
    };
    Neighbor neighbor_across(const CellKey& key, unsigned dropped) const;

    bool cell_valid(const CellKey& key) const;

    // integer vertex descriptors: signed z coordinates plus the artificial
    // level flag (layer top copies)
    struct VertexRef {
        std::vector<int64_t> z;
        bool artificial = false;
        bool operator==(const VertexRef&) const = default;
    };
    std::vector<VertexRef> cell_vertex_refs(const CellKey& key) const;

    RatVec vertex_point(const VertexRef& v) const;

    // the two artificial start cells and their exposed door facets
    std::pair<DoorFacet, DoorFacet> start_doors() const;

    PanchromaticCell follow_path(const DoorFacet& door, uint64_t budget) const;

    int facet_orientation(const CellKey& cell, unsigned dropped,
                          const std::vector<unsigned>& colours) const;

    // diagnostics / exhaustive checks at small parameters
    std::vector<CellKey> enumerate_cells() const;

  private:
    UnfoldedProblem up_;
    unsigned k_;
    int64_t M_;
    Rat h_;  // chart units per grid step: m / M
    Rat mu_; // radial offset of the layer top copies
    std::function<unsigned(const RatVec&)> real_colour_;
};

// Full pipeline: parameter selection, door location, path following; the
// returned point is exact and verifies against the instance.
SpherePoint solve_sphere(const HairyBallInstance& inst, bool paper_bounds = false,
                         uint64_t budget = 0);

struct SpernerEmission {
    MsEolInstance ms;           // two listed sources over cell encodings
    std::shared_ptr<SpernerComplex> complex;
    unsigned width = 0;
    std::function<CellKey(const Vertex&)> decode_cell;
    std::function<Vertex(const CellKey&)> encode_cell;
    // maps any ms solution back to a sphere solution of the instance
    std::function<SpherePoint(const Vertex&)> decode;
};

SpernerEmission emit_two_source_eol(const HairyBallInstance& inst, bool paper_bounds = false);

} // namespace hairball
