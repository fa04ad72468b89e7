#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hairball/rng.hpp"
#include "hairball/unfold.hpp"

using namespace hairball;

namespace {

HairyBallInstance ones_instance(const Rat& eps) {
    return HairyBallInstance(2, constant_circuit({Rat(1), Rat(1), Rat(1)}, 3), eps);
}

std::vector<RatVec> identity_rot(unsigned d) {
    std::vector<RatVec> r(d, RatVec(d, Rat(0)));
    for (unsigned i = 0; i < d; ++i) r[i][i] = 1;
    return r;
}

} // namespace

TEST_CASE("stereographic projection round trip") {
    CHECK(sp_inv({Rat(0), Rat(0)}).coords == RatVec{Rat(-1), Rat(0), Rat(0)});
    CHECK(sp(SpherePoint::checked({Rat(0), Rat(1), Rat(0)})) == RatVec{Rat(1), Rat(0)});
    CHECK(sp_inv({Rat(1), Rat(0)}).coords == RatVec{Rat(0), Rat(1), Rat(0)});
    CHECK_THROWS_AS(sp(SpherePoint::checked({Rat(1), Rat(0), Rat(0)})), AtPole);

    Rng rng(101);
    for (int i = 0; i < 1000; ++i) {
        RatVec z = rng.rational_vec(2, 9);
        SpherePoint x = sp_inv(z);
        CHECK(norm2_sq(x.coords) == 1);
        CHECK(sp(x) == z);
    }
}

TEST_CASE("tangent basis identities") {
    SpherePoint antipode = SpherePoint::checked({Rat(-1), Rat(0), Rat(0)});
    auto b = tangent_basis(antipode);
    CHECK(b[0] == RatVec{Rat(0), Rat(1), Rat(0)});
    CHECK(b[1] == RatVec{Rat(0), Rat(0), Rat(1)});

    Rng rng(55);
    for (int i = 0; i < 100; ++i) {
        SpherePoint x = sp_inv(rng.rational_vec(2, 7));
        auto basis = tangent_basis(x);
        for (size_t a = 0; a < basis.size(); ++a) {
            CHECK(dot(basis[a], x.coords) == 0);
            for (size_t c = a; c < basis.size(); ++c)
                CHECK(dot(basis[a], basis[c]) == (a == c ? Rat(1) : Rat(0)));
        }
    }
}

TEST_CASE("unfolded field values") {
    HairyBallInstance zero(2, constant_circuit({Rat(0), Rat(0), Rat(0)}, 3), Rat(1));
    UnfoldedField uz(zero, identity_rot(3));
    CHECK(uz.evaluate({Rat(3), Rat(-2)}) == RatVec{Rat(0), Rat(0)});

    UnfoldedField u(ones_instance(Rat(1, 4)), identity_rot(3));
    CHECK(u.evaluate({Rat(0), Rat(0)}) == RatVec{Rat(1), Rat(1)});

    // squared-norm identity |g(z)|^2 = |P_x f|^2 and agreement with the
    // explicit basis at random points
    Rng rng(77);
    for (int i = 0; i < 100; ++i) {
        RatVec z = rng.rational_vec(2, 8);
        SpherePoint x = sp_inv(z);
        RatVec g = u.evaluate(z);
        RatVec f = u.rotated_field(x.coords);
        CHECK(norm2_sq(g) == norm2_sq(tangent_project(x, f)));
        auto basis = tangent_basis(x);
        for (size_t j = 0; j < 2; ++j) CHECK(g[j] == dot(f, basis[j]));
    }
}

TEST_CASE("colour rules") {
    CHECK(colour_of_direction({Rat(1), Rat(1)}) == 0);
    CHECK(colour_of_direction({Rat(-1), Rat(-2)}) == 2);
    CHECK(colour_of_direction({Rat(-1), Rat(-1)}) == 1); // tie -> smallest index
    CHECK(colour_of_direction({Rat(0), Rat(0)}) == 0);
}

TEST_CASE("ideal direction: symmetry and norm identity") {
    Rng rng(31);
    for (int i = 0; i < 1000; ++i) {
        RatVec z = rng.rational_vec(2 + rng.below(3), 9);
        if (norm2_sq(z) == 0) continue;
        RatVec w = ideal_direction_scaled(z);
        RatVec zneg(z.size());
        for (size_t j = 0; j < z.size(); ++j) zneg[j] = -z[j];
        CHECK(ideal_direction_scaled(zneg) == w);
        Rat s = norm2_sq(z);
        CHECK(norm2_sq(w) == Rat(static_cast<long>(z.size())) * s * s);
    }
    // z = e1, k = 2: w = (-1, 1)
    CHECK(ideal_direction_scaled({Rat(1), Rat(0)}) == RatVec{Rat(-1), Rat(1)});
}

TEST_CASE("ideal direction: sign structure") {
    Rng rng(87);
    // if w(z) <= 0 componentwise then z >= 0 or z <= 0
    for (int i = 0; i < 2000; ++i) {
        RatVec z = rng.rational_vec(2 + rng.below(2), 5);
        if (norm2_sq(z) == 0) continue;
        RatVec w = ideal_direction_scaled(z);
        bool all_nonpos = true;
        for (const Rat& wi : w) all_nonpos = all_nonpos && wi <= 0;
        if (all_nonpos) {
            bool nonneg = true, nonpos = true;
            for (const Rat& zi : z) {
                nonneg = nonneg && zi >= 0;
                nonpos = nonpos && zi <= 0;
            }
            CHECK((nonneg || nonpos));
        }
    }

    // supported nonnegative z: w vanishes off the support and dips below
    // -|z|^2 * (scaled threshold) somewhere on it
    for (int i = 0; i < 500; ++i) {
        unsigned k = 2 + rng.below(3);
        RatVec z(k, Rat(0));
        unsigned support = 1 + rng.below(k);
        for (unsigned j = 0; j < support; ++j) z[j] = rat_abs(rng.rational(6));
        if (norm2_sq(z) == 0) continue;
        RatVec w = ideal_direction_scaled(z);
        for (unsigned j = support; j < k; ++j) CHECK(w[j] == norm2_sq(z)); // = |z|^2, positive
        // the paper's threshold w_i <= -1/sqrt(k) corresponds to
        // w~_i <= -|z|^2 here (scaling by sqrt(k)|z|^2)
        bool found = false;
        for (unsigned j = 0; j < support; ++j) found = found || w[j] <= -norm2_sq(z);
        CHECK(found);
    }
}

TEST_CASE("choose_params on the constant field") {
    UnfoldedProblem up = choose_params(ones_instance(Rat(1, 4)));
    // lip 0, range 1: the far-field radius comes from the range term alone
    CHECK(up.params.t == 512);
    CHECK(up.params.m == ceil_isqrt(Rat(512) * 512 * 2));
    CHECK(up.params.delta > 0);
    CHECK(Rat(up.params.m) * pow2(-static_cast<long>(up.params.q)) <= up.params.delta);

    // rotated field at the pole points near the diagonal
    RatVec fp = up.field->rotated_field({Rat(1), Rat(0), Rat(0)});
    Rat s1 = fp[1] + fp[2];
    CHECK(s1 > 0);

    // zero field short-circuits with the pole as an immediate solution
    HairyBallInstance zero(2, constant_circuit({Rat(0), Rat(0), Rat(0)}, 3), Rat(1, 8));
    CHECK_THROWS_AS(choose_params(zero), ImmediateSolution);

    // delta shrinks as eps shrinks
    UnfoldedProblem tighter = choose_params(ones_instance(Rat(1, 16)));
    CHECK(tighter.params.delta <= up.params.delta);
}

TEST_CASE("choose_params aligns a skewed field") {
    // constant field (5, -1, 2): nontrivial rotation required
    HairyBallInstance inst(2, constant_circuit({Rat(5), Rat(-1), Rat(2)}, 3), Rat(1, 4));
    UnfoldedProblem up = choose_params(inst);
    const auto& rot = up.field->rotation();
    // exact orthogonality is checked in the constructor; spot-check the pole row
    CHECK(rot[0] == RatVec{Rat(1), Rat(0), Rat(0)});

    // the rotated projected direction at p is diagonal within 2^-10:
    // certificate on squares
    RatVec fp = up.field->rotated_field({Rat(1), Rat(0), Rat(0)});
    RatVec u{fp[1], fp[2]};
    Rat dotd = u[0] + u[1];
    CHECK(dotd > 0);
    Rat sin2 = 1 - dotd * dotd / (norm2_sq(u) * 2);
    CHECK(sin2 <= pow2(-20));
}

TEST_CASE("far-field colour agreement for the constant field") {
    UnfoldedProblem up = choose_params(ones_instance(Rat(1, 4)));
    const Rat& t = up.params.t;
    Rng rng(1234);
    int checked = 0;
    for (int i = 0; i < 4000 && checked < 500; ++i) {
        RatVec z = rng.rational_vec(2, 12);
        Rat s0 = norm2_sq(z);
        if (s0 == 0) continue;
        // scale out to |z| in [t, ~3t]
        Int c = ceil_isqrt(t * t / s0) + 1;
        for (Rat& zi : z) zi *= Rat(c);
        Rat s = norm2_sq(z);
        if (s < t * t) continue;
        RatVec w = ideal_direction_scaled(z);
        // margin: robust colour under an inf-perturbation of |z|^2/4 in the
        // scaled units (the 1/(4 sqrt k) band)
        Rat band = s / 4;
        unsigned cw = colour_of_direction(w);
        bool robust = true;
        if (cw == 0) {
            for (const Rat& wi : w) robust = robust && wi > band;
        } else {
            robust = w[cw - 1] < -band;
            for (size_t j = 0; j < w.size() && robust; ++j)
                if (j != cw - 1) robust = w[j] - w[cw - 1] > 2 * band;
        }
        if (!robust) continue;
        CHECK(up.field->colour(z) == cw);
        ++checked;
    }
    CHECK(checked >= 300);
}
