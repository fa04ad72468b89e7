#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hairball/rng.hpp"
#include "hairball/sphere.hpp"
#include "hairball/unfold.hpp"

using namespace hairball;

namespace {

SpherePoint pt(std::initializer_list<Rat> cs) { return SpherePoint::checked(RatVec(cs)); }

SpherePoint random_sphere_point(Rng& rng, unsigned k) {
    return sp_inv(rng.rational_vec(k, 6));
}

HairyBallInstance ones_instance(const Rat& eps) {
    return HairyBallInstance(2, constant_circuit({Rat(1), Rat(1), Rat(1)}, 3), eps);
}

} // namespace

TEST_CASE("tangent_project basics") {
    SpherePoint e0 = pt({Rat(1), Rat(0), Rat(0)});
    CHECK(tangent_project(e0, {Rat(5), Rat(0), Rat(0)}) == RatVec{Rat(0), Rat(0), Rat(0)});
    CHECK(tangent_project(e0, {Rat(0), Rat(2), Rat(3)}) == RatVec{Rat(0), Rat(2), Rat(3)});

    SpherePoint x = pt({Rat(3, 5), Rat(4, 5), Rat(0)});
    RatVec got = tangent_project(x, {Rat(1), Rat(0), Rat(0)});
    CHECK(got == RatVec{Rat(16, 25), Rat(-12, 25), Rat(0)});

    CHECK_THROWS_AS(SpherePoint::checked({Rat(1), Rat(1), Rat(0)}), OffSphere);
}

TEST_CASE("tangent_project: exact tangency and idempotence") {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        SpherePoint x = random_sphere_point(rng, 2);
        RatVec v = rng.rational_vec(3, 9);
        RatVec pv = tangent_project(x, v);
        CHECK(dot(pv, x.coords) == 0);
        CHECK(tangent_project(x, pv) == pv);
    }
}

TEST_CASE("verify_hb_solution") {
    SpherePoint e0 = pt({Rat(1), Rat(0), Rat(0)});
    CHECK(verify_hb_solution(ones_instance(Rat(2)), e0));        // projection (0,1,1)
    CHECK_FALSE(verify_hb_solution(ones_instance(Rat(1, 2)), e0));

    HairyBallInstance zero(2, constant_circuit({Rat(0), Rat(0), Rat(0)}, 3), Rat(1, 100));
    Rng rng(5);
    for (int i = 0; i < 20; ++i) CHECK(verify_hb_solution(zero, random_sphere_point(rng, 2)));
}

TEST_CASE("snap_to_sphere") {
    SpherePoint x = pt({Rat(3, 5), Rat(4, 5), Rat(0)});
    SpherePoint snapped = snap_to_sphere(x.coords, Rat(1, 1000));
    CHECK(snapped.coords == x.coords); // already exact

    RatVec z{Rat(1), Rat(1), Rat(1)};
    SpherePoint s = snap_to_sphere(z, pow2(-10));
    CHECK(norm2_sq(s.coords) == 1);
    // |s_i - 1/sqrt(3)| <= 2^-10, i.e. |s_i*sqrt(3) - 1| <= 2^-10*sqrt(3)
    for (int i = 0; i < 3; ++i) {
        CHECK(sign_quadratic(Rat(-1), s.coords[i] - pow2(-10), Rat(3)) <= 0);
        CHECK(sign_quadratic(Rat(1), -s.coords[i] - pow2(-10), Rat(3)) <= 0);
    }

    CHECK_THROWS_AS(snap_to_sphere({Rat(0), Rat(0), Rat(0)}, Rat(1, 4)), TooFarFromSphere);
}

TEST_CASE("grid_oracle on the constant field") {
    HairyBallInstance inst = ones_instance(Rat(1, 4));

    // zero field: the very first candidate (the pole) is returned
    HairyBallInstance zero(2, constant_circuit({Rat(0), Rat(0), Rat(0)}, 3), Rat(1));
    auto got = grid_oracle(zero, Rat(1));
    REQUIRE(got.has_value());
    CHECK(got->coords == RatVec{Rat(1), Rat(0), Rat(0)});

    // tightened eps pins the hit near +-(1,1,1)/sqrt(3)
    HairyBallInstance tight = ones_instance(Rat(1, 32));
    auto sol = grid_oracle(tight, Rat(1, 64));
    REQUIRE(sol.has_value());
    for (int i = 0; i < 3; ++i) {
        // | |x_i| - 1/sqrt(3) | <= 1/10  <=>  | |x_i|*sqrt(3) - 1 | <= sqrt(3)/10
        Rat a = rat_abs(sol->coords[i]);
        CHECK(sign_quadratic(Rat(-1), a - Rat(1, 10), Rat(3)) <= 0);
        CHECK(sign_quadratic(Rat(1), -a - Rat(1, 10), Rat(3)) <= 0);
    }

    // unreachable eps at this resolution: documented miss mode
    HairyBallInstance impossible = ones_instance(Rat(1, 1U << 30));
    CHECK_FALSE(grid_oracle(impossible, Rat(1, 2)).has_value());
}

TEST_CASE("lift: rotation component and clamp") {
    HairyBallInstance inst = ones_instance(Rat(1, 4));
    LiftedInstance lifted = lift_k_to_k2(inst);
    CHECK(lifted.lifted.k == 4);

    // at x = (0,...,0,1): last two output coordinates are (-1, 0)
    RatVec x(5, Rat(0));
    x[4] = 1;
    RatVec out = lifted.lifted.field.evaluate(x);
    CHECK(out[3] == Rat(-1));
    CHECK(out[4] == Rat(0));
    // and N = 1 >= 2^(1-l) makes the fade-out hit zero on the first coords
    for (int i = 0; i < 3; ++i) CHECK(out[i] == Rat(0));

    // generic point with tiny tail: inner field passes through
    RatVec y{Rat(1), Rat(0), Rat(0), Rat(0), Rat(0)};
    out = lifted.lifted.field.evaluate(y);
    CHECK(out[0] == Rat(1));
    CHECK(out[1] == Rat(1));
    CHECK(out[2] == Rat(1));
}

namespace {

ArithCircuit random_small_field(Rng& rng, unsigned dim) {
    CircuitBuilder b(CircuitClass::Linear, dim);
    std::vector<uint32_t> pool;
    for (unsigned i = 0; i < dim; ++i) pool.push_back(b.input(i));
    unsigned extra = 1 + rng.below(4);
    for (unsigned g = 0; g < extra; ++g) {
        uint32_t a = pool[rng.below(pool.size())], c = pool[rng.below(pool.size())];
        switch (rng.below(5)) {
            case 0: pool.push_back(b.add(a, c)); break;
            case 1: pool.push_back(b.sub(a, c)); break;
            case 2: pool.push_back(b.max(a, c)); break;
            case 3: pool.push_back(b.min(a, c)); break;
            default: pool.push_back(b.constant(rng.rational(2))); break;
        }
    }
    std::vector<uint32_t> outs;
    for (unsigned i = 0; i < dim; ++i) outs.push_back(pool[rng.below(pool.size())]);
    return std::move(b).build(std::move(outs));
}

} // namespace

TEST_CASE("lift soundness on random small fields") {
    Rng rng(2718);
    int done = 0;
    for (int trial = 0; trial < 60 && done < 10; ++trial) {
        HairyBallInstance base(2, random_small_field(rng, 3), Rat(1, 2));
        LiftedInstance lifted = lift_k_to_k2(base);
        HairyBallInstance tight(2, base.field, lifted.lifted.eps);

        // locate a base solution by coarse scan + local refinement, embed it
        // as (y, 0, 0): a degenerate 4d box for the lifted oracle
        auto [coarse, cnorm] = grid_scan_min(tight, Rat(1, 8));
        if (coarse.coords[0] == 1) continue;
        RatVec c2 = sp(coarse);
        GridBox fine{{c2[0] - Rat(1, 4), c2[1] - Rat(1, 4)}, {c2[0] + Rat(1, 4), c2[1] + Rat(1, 4)}};
        auto base_sol = grid_oracle(tight, Rat(1, 128), fine);
        if (!base_sol || base_sol->coords[0] == 1) continue;

        RatVec z2 = sp(*base_sol);
        GridBox box{{z2[0], z2[1], Rat(0), Rat(0)}, {z2[0], z2[1], Rat(0), Rat(0)}};
        auto lifted_sol = grid_oracle(lifted.lifted, Rat(1), box);
        REQUIRE(lifted_sol.has_value());
        SpherePoint back = lifted.map_back(*lifted_sol);
        CHECK(verify_hb_solution(base, back));
        ++done;
    }
    CHECK(done == 10);
}
