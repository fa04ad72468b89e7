#pragma once

#include "hairball/circuit.hpp"

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace hairball {

struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct OffSphere : GeometryError {
    using GeometryError::GeometryError;
};
struct AtPole : GeometryError {
    using GeometryError::GeometryError;
};
struct TooFarFromSphere : GeometryError {
    using GeometryError::GeometryError;
};

// Point with exactly unit 2-norm; construction checks the invariant.
struct SpherePoint {
    RatVec coords;

    static SpherePoint checked(RatVec v) {
        if (norm2_sq(v) != 1) throw OffSphere("point is not exactly on the sphere");
        return SpherePoint{std::move(v)};
    }
    size_t dim() const { return coords.size(); } // ambient dimension k+1
    const Rat& operator[](size_t i) const { return coords[i]; }
};

struct HairyBallInstance {
    unsigned k = 2;      // even sphere dimension
    ArithCircuit field;  // linear class, k+1 inputs and outputs
    Rat eps;

    HairyBallInstance(unsigned k_, ArithCircuit field_, Rat eps_)
        : k(k_), field(std::move(field_)), eps(std::move(eps_)) {
        if (k < 2 || k % 2) throw GeometryError("sphere dimension must be even and >= 2");
        if (field.cls() != CircuitClass::Linear) throw WrongClass("field must be linear class");
        if (field.inputs() != k + 1 || field.num_outputs() != k + 1)
            throw ArityMismatch("field arity must be k+1 in and out");
        if (eps <= 0) throw GeometryError("eps must be positive");
    }
};

// v - <v,x> x ; exact, and exactly orthogonal to x.
RatVec tangent_project(const SpherePoint& x, const RatVec& v);

// || P_x[F(x)] ||_inf <= eps, decided exactly.
bool verify_hb_solution(const HairyBallInstance& inst, const SpherePoint& x);

// Exact rational sphere point within linf distance `tol` of z/||z||_2,
// constructed by rounding through the stereographic chart. Requires
// ||z||_2 in [1/2, 2].
SpherePoint snap_to_sphere(const RatVec& z, const Rat& tol);

struct GridBox {
    RatVec lo, hi; // per chart dimension; degenerate (lo = hi) axes allowed
};

// Brute-force oracle: scans both poles, then the inverse-stereographic images
// of the grid over `box` in lexicographic order (first coordinate slowest),
// returning the first point that verifies. Small k only.
std::optional<SpherePoint> grid_oracle(const HairyBallInstance& inst, const Rat& resolution,
                                       const std::optional<GridBox>& box = std::nullopt);

// Same scan, but returns the first point attaining the minimum of
// ||P_x[F(x)]||_inf over the grid. Useful for locating a refinement window.
std::pair<SpherePoint, Rat> grid_scan_min(const HairyBallInstance& inst, const Rat& resolution,
                                          const std::optional<GridBox>& box = std::nullopt);

struct LiftedInstance {
    HairyBallInstance lifted; // on S^(k+2), eps' = min(2^-l-1, eps/4)
    long ell = 1;
    Rat bound_L;
    // Sends any solution of the lifted instance to a solution of the original.
    std::function<SpherePoint(const SpherePoint&)> map_back;
};

// Dimension lift: pads the field with a rotation in the two new coordinates
// and fades it out away from the equator sphere. `paper_bound` switches the
// Lipschitz estimate from the certified per-gate bound to the coarse
// size-based one.
LiftedInstance lift_k_to_k2(const HairyBallInstance& inst, bool paper_bound = false);

} // namespace hairball
