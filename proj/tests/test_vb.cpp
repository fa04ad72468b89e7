#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hairball/vb.hpp"

#include <set>

using namespace hairball;

namespace {

// every adjacent opposite-arrow pair, lexicographic
std::vector<VbSolution> all_solutions(const VbInstance& inst) {
    std::vector<VbSolution> out;
    uint64_t s = inst.side();
    for (uint64_t x = 1; x <= s; ++x)
        for (uint64_t y = 1; y <= s; ++y)
            for (int dx = -1; dx <= 1; ++dx)
                for (int dy = -1; dy <= 1; ++dy) {
                    if (!dx && !dy) continue;
                    uint64_t nx = x + dx, ny = y + dy;
                    if (nx < 1 || nx > s || ny < 1 || ny > s) continue;
                    VbSolution sol{x, y, nx, ny};
                    if (verify_vb_solution(inst, sol)) out.push_back(sol);
                }
    return out;
}

} // namespace

TEST_CASE("verify_vb_solution") {
    // uniform up-arrows inside; boundary wrapped
    VbInstance inst(3, [](uint64_t, uint64_t) { return Arrow{0, 1}; });
    // adjacent cells with (1,0) and (-1,0): boundary columns x=1 vs x=8 not adjacent,
    // so build a custom table
    std::vector<Arrow> cells(64, Arrow{0, 1});
    cells[(3 - 1) + (3 - 1) * 8] = {1, 0};
    cells[(4 - 1) + (3 - 1) * 8] = {-1, 0};
    cells[(5 - 1) + (5 - 1) * 8] = {0, -1};
    cells[(6 - 1) + (6 - 1) * 8] = {0, 1};
    VbInstance t = VbInstance::table(3, std::move(cells));
    CHECK(verify_vb_solution(t, {3, 3, 4, 3}));
    CHECK(verify_vb_solution(t, {5, 5, 6, 6})); // diagonal adjacency counts
    CHECK_FALSE(verify_vb_solution(t, {3, 3, 3, 4}));
    CHECK_FALSE(verify_vb_solution(t, {2, 3, 2, 4})); // equal arrows
    CHECK_FALSE(verify_vb_solution(t, {3, 3, 5, 3})); // too far apart
}

TEST_CASE("boundary wrapper enforces the inward conditions") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        unsigned n = 1 + rng.below(5); // up to 2^6? n <= 5 here, exhaustive below
        VbInstance inst = random_vb_instance(rng, std::min(n, 4u));
        uint64_t s = inst.side();
        for (uint64_t a = 2; a <= s; ++a) {
            CHECK(inst.arrow(1, a) == Arrow{1, 0});
            CHECK(inst.arrow(a, s) == Arrow{0, -1});
        }
        for (uint64_t b = 1; b + 1 <= s; ++b) {
            CHECK(inst.arrow(b, 1) == Arrow{0, 1});
            CHECK(inst.arrow(s, b) == Arrow{-1, 0});
        }
    }
}

TEST_CASE("brute force: minimal and uniform instances") {
    // n = 1: all four boundary-legal 2x2 instances are fully forced
    VbInstance tiny(1, [](uint64_t, uint64_t) { return Arrow{0, 1}; });
    VbSolution sol = brute_force_vb(tiny);
    CHECK(verify_vb_solution(tiny, sol));

    // all-interior-(0,1): solution on the top boundary interface
    VbInstance up(3, [](uint64_t, uint64_t) { return Arrow{0, 1}; });
    VbSolution s2 = brute_force_vb(up);
    CHECK(verify_vb_solution(up, s2));
    CHECK(std::max(s2.y1, s2.y2) == 8); // touches the top row of down-arrows

    // totality on random boundary-legal instances
    Rng rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        VbInstance r = random_vb_instance(rng, 2 + rng.below(3));
        CHECK(verify_vb_solution(r, brute_force_vb(r)));
    }
}

TEST_CASE("grid embedding: single edge decodes to its sink") {
    GridEolInstance g;
    g.n = 1;
    g.succ = {1, 1, 2, 3};
    g.pred = {0, 0, 2, 3};
    // origin (1,1) -> (2,1); others isolated
    GridEolReduction red = grid_eol_to_vb(g);
    VbSolution sol = brute_force_vb(red.vb);
    CHECK(verify_vb_solution(red.vb, sol));
    CHECK(red.decode(sol) == 1); // the sink (2,1)
}

TEST_CASE("grid embedding: snake path decodes to its sink") {
    // (1,1) R (2,1) R (3,1) U (3,2) L (2,2) U (2,3) R (3,3) ... on a 4x4 grid
    GridEolInstance g;
    g.n = 2;
    uint64_t count = 16;
    g.succ.resize(count);
    g.pred.resize(count);
    for (uint32_t i = 0; i < count; ++i) g.succ[i] = g.pred[i] = i;
    std::vector<std::pair<uint64_t, uint64_t>> path = {
        {1, 1}, {2, 1}, {3, 1}, {3, 2}, {2, 2}, {2, 3}, {3, 3}, {4, 3}, {4, 4}, {3, 4}};
    for (size_t i = 0; i + 1 < path.size(); ++i) {
        uint32_t a = g.index(path[i].first, path[i].second);
        uint32_t b = g.index(path[i + 1].first, path[i + 1].second);
        g.succ[a] = b;
        g.pred[b] = a;
    }
    GridEolReduction red = grid_eol_to_vb(g);
    VbSolution sol = brute_force_vb(red.vb);
    CHECK(red.decode(sol) == g.index(3, 4));
}

TEST_CASE("grid embedding soundness over random instances") {
    Rng rng(4096);
    for (int trial = 0; trial < 50; ++trial) {
        unsigned n = 1 + rng.below(2); // n <= 2 keeps the full scan fast
        GridEolInstance g = random_grid_eol(rng, n);
        GridEolReduction red = grid_eol_to_vb(g);

        auto sols = all_solutions(red.vb);
        REQUIRE_FALSE(sols.empty());
        std::set<uint32_t> blocks_touched;
        for (const VbSolution& sol : sols) {
            uint32_t node = red.decode(sol); // throws if not an endpoint
            CHECK(g.endpoint(node));
            blocks_touched.insert(g.index((sol.x1 - 1) / 8 + 1, (sol.y1 - 1) / 8 + 1));
            blocks_touched.insert(g.index((sol.x2 - 1) / 8 + 1, (sol.y2 - 1) / 8 + 1));
        }
        // no solution touches the origin block or interior path blocks
        for (uint32_t b : blocks_touched) {
            CHECK(b != 0);
            bool path_interior = g.succ[b] != b && g.pred[b] != b;
            CHECK_FALSE(path_interior);
        }
    }
}
