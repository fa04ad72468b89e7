#pragma once

#include "hairball/sphere.hpp"

#include <memory>
#include <vector>

namespace hairball {

// Stereographic projection with respect to the pole p = (1, 0, ..., 0) and
// its inverse. Rational points map to rational points, exactly.
RatVec sp(const SpherePoint& x);          // throws AtPole when x_0 = 1
SpherePoint sp_inv(const RatVec& z);

// Orthonormal tangent basis b_1..b_k at x != p, as rows.
std::vector<RatVec> tangent_basis(const SpherePoint& x);

struct ImmediateSolution {
    SpherePoint point;
};

// The field conjugated by an exact rational rotation R (fixing the pole) so
// that the projected field at p points near the all-ones diagonal, unfolded
// through the stereographic chart into a map R^k -> R^k.
class UnfoldedField {
  public:
    UnfoldedField(HairyBallInstance inst, std::vector<RatVec> rotation);

    const HairyBallInstance& instance() const { return inst_; }
    unsigned k() const { return inst_.k; }
    const std::vector<RatVec>& rotation() const { return rot_; }

    // g(z)_i = < f~(x(z)), b_i(x(z)) >, computed exactly.
    RatVec evaluate(const RatVec& z) const;
    // rotated field f~(x) = R f(R^T x)
    RatVec rotated_field(const RatVec& x) const;
    // undo the rotation on a found solution
    SpherePoint unrotate(const SpherePoint& x) const;

    // 0 when every component is >= 0, else the smallest index attaining the
    // minimum (1-based colours 1..k).
    unsigned colour(const RatVec& z) const;

  private:
    HairyBallInstance inst_;
    std::vector<RatVec> rot_, rot_t_;
};

unsigned colour_of_direction(const RatVec& g);

// Scaled ideal direction: w~_i(z) = ||z||^2 - 2 z_i * sum_j z_j. A positive
// multiple of the ideal colouring, so signs and argmin agree with it.
RatVec ideal_direction_scaled(const RatVec& z);

struct SolverParams {
    Rat delta;      // colouring continuity scale
    Rat t;          // far-field radius
    Int m;          // cross-polytope radius, m >= t*sqrt(k)
    unsigned q = 0; // grid exponent: step m*2^-q <= delta
    Rat lip_g;      // certified local Lipschitz bound used for delta
};

struct UnfoldedProblem {
    std::shared_ptr<UnfoldedField> field;
    SolverParams params;
};

// Chooses the rotation and all discretisation parameters from certified
// bounds (or the coarse size-based bound when `paper_bounds`). Throws
// ImmediateSolution{p} when the field is already small at the pole.
UnfoldedProblem choose_params(const HairyBallInstance& inst, bool paper_bounds = false);

} // namespace hairball
