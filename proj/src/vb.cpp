#include "hairball/vb.hpp"

#include <array>\n#include <optional>
#include <memory>

namespace hairball {

VbInstance::VbInstance(unsigned n, std::function<Arrow(uint64_t, uint64_t)> raw)
    : n_(n), raw_(std::move(raw)) {
    if (n == 0 || n > 24) throw VbError("grid exponent out of range");
}

VbInstance VbInstance::table(unsigned n, std::vector<Arrow> cells) {
    uint64_t side = uint64_t(1) << n;
    if (cells.size() != side * side) throw VbError("cell table size mismatch");
    auto data = std::make_shared<const std::vector<Arrow>>(std::move(cells));
    return VbInstance(n, [data, side](uint64_t x, uint64_t y) {
        return (*data)[(x - 1) + (y - 1) * side];
    });
}

Arrow VbInstance::arrow(uint64_t x, uint64_t y) const {
    uint64_t s = side();
    if (x < 1 || x > s || y < 1 || y > s) throw VbError("cell out of range");
    // inward boundary conditions, applied in a fixed order
    if (y == 1 && x <= s - 1) return {0, 1};
    if (x == 1 && y != 1) return {1, 0};
    if (x == s && y <= s - 1) return {-1, 0};
    if (y == s && x != 1) return {0, -1};
    return raw_(x, y);
}

bool verify_vb_solution(const VbInstance& inst, const VbSolution& sol) {
    uint64_t s = inst.side();
    auto in_range = [s](uint64_t c) { return c >= 1 && c <= s; };
    if (!in_range(sol.x1) || !in_range(sol.y1) || !in_range(sol.x2) || !in_range(sol.y2))
        return false;
    auto dist = [](uint64_t a, uint64_t b) { return a > b ? a - b : b - a; };
    if (dist(sol.x1, sol.x2) > 1 || dist(sol.y1, sol.y2) > 1) return false;
    return inst.arrow(sol.x1, sol.y1) == opposite(inst.arrow(sol.x2, sol.y2));
}

VbSolution brute_force_vb(const VbInstance& inst) {
    static constexpr std::array<std::pair<int, int>, 8> offsets{
        {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1}}};
    uint64_t s = inst.side();
    for (uint64_t x = 1; x <= s; ++x)
        for (uint64_t y = 1; y <= s; ++y) {
            Arrow a = inst.arrow(x, y);
            for (auto [dx, dy] : offsets) {
                uint64_t nx = x + dx, ny = y + dy;
                if (nx < 1 || nx > s || ny < 1 || ny > s) continue;
                if (inst.arrow(nx, ny) == opposite(a)) return {x, y, nx, ny};
            }
        }
    throw VbError("no solution found; boundary conditions violated?");
}

void GridEolInstance::validate() const {
    uint64_t s = side(), count = s * s;
    if (succ.size() != count || pred.size() != count)
        throw InvalidGridInstance("table size mismatch");
    auto orthogonal = [&](uint32_t a, uint32_t b) {
        auto [ax, ay] = coords(a);
        auto [bx, by] = coords(b);
        uint64_t dx = ax > bx ? ax - bx : bx - ax;
        uint64_t dy = ay > by ? ay - by : by - ay;
        return dx + dy == 1;
    };
    for (uint32_t i = 0; i < count; ++i) {
        if (succ[i] != i && (!orthogonal(i, succ[i]) || pred[succ[i]] != i))
            throw InvalidGridInstance("bad successor edge");
        if (pred[i] != i && (!orthogonal(i, pred[i]) || succ[pred[i]] != i))
            throw InvalidGridInstance("bad predecessor edge");
    }
    if (pred[0] != 0 || succ[0] == 0) throw InvalidGridInstance("origin is not a source");
}

namespace {

enum class Side { None, L, R, U, D };

enum class CellKind { Env, Corridor, Flank };

struct Stencil {
    std::array<Arrow, 64> arrow;
    std::array<CellKind, 64> kind;
    Stencil() {
        arrow.fill({0, -1});
        kind.fill(CellKind::Env);
    }
    Arrow& at(int u, int v) { return arrow[(u - 1) + (v - 1) * 8]; }
    CellKind& kat(int u, int v) { return kind[(u - 1) + (v - 1) * 8]; }
};

// corridor segment cells for a connection through one side
void segment_cells(Side s, std::vector<std::pair<int, int>>& out) {
    switch (s) {
        case Side::L:
            for (int u = 1; u <= 5; ++u)
                for (int v = 4; v <= 5; ++v) out.push_back({u, v});
            break;
        case Side::R:
            for (int u = 4; u <= 8; ++u)
                for (int v = 4; v <= 5; ++v) out.push_back({u, v});
            break;
        case Side::D:
            for (int v = 1; v <= 5; ++v)
                for (int u = 4; u <= 5; ++u) out.push_back({u, v});
            break;
        case Side::U:
            for (int v = 4; v <= 8; ++v)
                for (int u = 4; u <= 5; ++u) out.push_back({u, v});
            break;
        case Side::None: break;
    }
}

// flank value for one side of a travelling segment
Arrow side_value(int travel_axis_dir, int perp_dir, bool horizontal) {
    // left of the travel direction gets (1,0), right gets (-1,0)
    // horizontal travel (+-u): left is north (+v); vertical: left is west (-u)
    bool left;
    if (horizontal)
        left = (travel_axis_dir > 0) == (perp_dir > 0);
    else
        left = (travel_axis_dir > 0) == (perp_dir < 0);
    return left ? Arrow{1, 0} : Arrow{-1, 0};
}

struct Segment {
    Side side = Side::None;
    bool horizontal = false;
    int lo = 0, hi = 0; // axis range
    int travel = 0;     // +-1 along the axis, in the direction of the walk
};

Segment make_segment(Side s, bool incoming) {
    Segment seg;
    seg.side = s;
    if (s == Side::None) return seg;
    seg.horizontal = s == Side::L || s == Side::R;
    seg.lo = (s == Side::L || s == Side::D) ? 1 : 4;
    seg.hi = (s == Side::L || s == Side::D) ? 5 : 8;
    seg.travel = incoming ? (s == Side::L || s == Side::D ? +1 : -1)
                          : (s == Side::L || s == Side::D ? -1 : +1);
    return seg;
}

bool in_segment(const Segment& seg, int u, int v) {
    if (seg.side == Side::None) return false;
    int axis = seg.horizontal ? u : v;
    int cross = seg.horizontal ? v : u;
    return axis >= seg.lo && axis <= seg.hi && cross >= 4 && cross <= 5;
}

Stencil build_stencil(Side in, Side out, bool bottom_row) {
    Stencil st;
    std::array<Segment, 2> segs = {make_segment(in, true), make_segment(out, false)};
    auto corridor = [&](int u, int v) {
        return in_segment(segs[0], u, v) || in_segment(segs[1], u, v);
    };
    for (int v = 1; v <= 8; ++v)
        for (int u = 1; u <= 8; ++u) {
            if (corridor(u, v)) {
                st.at(u, v) = {0, 1};
                st.kat(u, v) = CellKind::Corridor;
                continue;
            }
            // flank value from adjacent corridor cells, straight contacts
            // first; votes only count within the owning segment's axis range
            std::optional<Arrow> value;
            for (int pass = 0; pass < 2 && !value; ++pass) {
                for (int dv = -1; dv <= 1 && !value; ++dv)
                    for (int du = -1; du <= 1 && !value; ++du) {
                        bool straight = (du == 0) != (dv == 0);
                        if ((pass == 0) != straight || (!du && !dv)) continue;
                        int nu = u - du, nv = v - dv;
                        if (nu < 1 || nu > 8 || nv < 1 || nv > 8 || !corridor(nu, nv)) continue;
                        for (const Segment& seg : segs) {
                            if (!in_segment(seg, nu, nv)) continue;
                            int axis_c = seg.horizontal ? u : v;
                            int perp = seg.horizontal ? dv : du;
                            if (perp == 0 || axis_c < seg.lo || axis_c > seg.hi) continue;
                            value = side_value(seg.travel, perp, seg.horizontal);
                            break;
                        }
                    }
            }
            if (value) {
                st.at(u, v) = *value;
                st.kat(u, v) = CellKind::Flank;
            }
        }
    // a turn leaves one unshielded cell diagonally outward of the elbow
    if (in != Side::None && out != Side::None && segs[0].horizontal != segs[1].horizontal) {
        auto dir = [](Side s) {
            switch (s) {
                case Side::L: return std::pair<int, int>{-1, 0};
                case Side::R: return std::pair<int, int>{1, 0};
                case Side::U: return std::pair<int, int>{0, 1};
                default: return std::pair<int, int>{0, -1};
            }
        };
        auto [iu, iv] = dir(in);
        auto [ou, ov] = dir(out);
        int gu = -(iu + ou), gv = -(iv + ov); // outward diagonal
        int eu = gu > 0 ? 5 : 4, ev = gv > 0 ? 5 : 4; // elbow corridor corner
        int cu = eu + gu, cv = ev + gv;
        if (st.kat(cu, cv) == CellKind::Env) {
            const Segment& s0 = segs[0].horizontal ? segs[0] : segs[1];
            st.at(cu, cv) = side_value(s0.travel, gv, true);
            st.kat(cu, cv) = CellKind::Flank;
        }
    }
    if (bottom_row) {
        for (int u = 1; u <= 8; ++u) {
            if (st.kat(u, 3) == CellKind::Flank) st.at(u, 3) = {-1, 0};
            if (st.kat(u, 6) == CellKind::Flank) st.at(u, 6) = {1, 0};
            if (st.kat(u, 2) == CellKind::Env) st.at(u, 2) = {-1, 0};
        }
    }
    return st;
}

// Hand-built origin stencils: the known source's corridor is fed from the
// instance boundary so that no arrow conflict appears in or around its block.
Stencil origin_stencil(Side out) {
    auto A = [](int dx, int dy) { return Arrow{dx, dy}; };
    Stencil st;
    if (out == Side::R) {
        const Arrow rows[8][8] = {
            {A(0,1), A(0,1), A(0,1), A(0,1), A(0,1), A(0,1), A(0,1), A(0,1)},
            {A(1,0), A(1,0), A(0,1), A(-1,0), A(-1,0), A(-1,0), A(-1,0), A(-1,0)},
            {A(1,0), A(0,1), A(0,1), A(-1,0), A(-1,0), A(-1,0), A(-1,0), A(-1,0)},
            {A(1,0), A(1,0), A(0,1), A(0,1), A(0,1), A(0,1), A(0,1), A(0,1)},
            {A(1,0), A(1,0), A(1,0), A(0,1), A(0,1), A(0,1), A(0,1), A(0,1)},
            {A(1,0), A(1,0), A(1,0), A(1,0), A(1,0), A(1,0), A(1,0), A(1,0)},
            {A(1,0), A(0,-1), A(0,-1), A(0,-1), A(0,-1), A(0,-1), A(0,-1), A(0,-1)},
            {A(1,0), A(0,-1), A(0,-1), A(0,-1), A(0,-1), A(0,-1), A(0,-1), A(0,-1)},
        };
        for (int v = 1; v <= 8; ++v)
            for (int u = 1; u <= 8; ++u) st.at(u, v) = rows[v - 1][u - 1];
        return st;
    }
    if (out == Side::U) {
        const Arrow cols[8][8] = {
            {A(0,1), A(1,0), A(1,0), A(1,0), A(1,0), A(1,0), A(1,0), A(1,0)},
            {A(0,1), A(1,0), A(0,-1), A(0,-1), A(0,-1), A(0,-1), A(0,-1), A(0,-1)},
            {A(0,1), A(1,0), A(1,0), A(1,0), A(1,0), A(1,0), A(1,0), A(1,0)},
            {A(0,1), A(0,1), A(0,1), A(0,1), A(0,1), A(0,1), A(0,1), A(0,1)},
            {A(0,1), A(0,1), A(0,1), A(0,1), A(0,1), A(0,1), A(0,1), A(0,1)},
            {A(0,1), A(-1,0), A(-1,0), A(-1,0), A(-1,0), A(-1,0), A(-1,0), A(-1,0)},
            {A(0,1), A(-1,0), A(0,-1), A(0,-1), A(0,-1), A(0,-1), A(0,-1), A(0,-1)},
            {A(0,1), A(-1,0), A(0,-1), A(0,-1), A(0,-1), A(0,-1), A(0,-1), A(0,-1)},
        };
        for (int u = 1; u <= 8; ++u)
            for (int v = 1; v <= 8; ++v) st.at(u, v) = cols[u - 1][v - 1];
        return st;
    }
    throw InvalidGridInstance("origin must leave rightwards or upwards");
}

Side direction_between(uint64_t fx, uint64_t fy, uint64_t tx, uint64_t ty) {
    if (tx == fx + 1) return Side::R;
    if (tx + 1 == fx) return Side::L;
    if (ty == fy + 1) return Side::U;
    (void)fy;
    return Side::D;
}

} // namespace

GridEolReduction grid_eol_to_vb(const GridEolInstance& g) {
    g.validate();
    uint64_t gside = g.side();
    unsigned n_out = g.n + 3;
    uint64_t side = uint64_t(1) << n_out;

    std::vector<Arrow> cells(side * side, Arrow{0, -1});
    for (uint64_t gy = 1; gy <= gside; ++gy) {
        for (uint64_t gx = 1; gx <= gside; ++gx) {
            uint32_t node = g.index(gx, gy);
            Side in = Side::None, out = Side::None;
            if (g.pred[node] != node) {
                auto [px, py] = g.coords(g.pred[node]);
                in = direction_between(gx, gy, px, py);
            }
            if (g.succ[node] != node) {
                auto [sx, sy] = g.coords(g.succ[node]);
                out = direction_between(gx, gy, sx, sy);
            }
            Stencil st = (gx == 1 && gy == 1) ? origin_stencil(out)
                                              : build_stencil(in, out, gy == 1);
            for (int v = 1; v <= 8; ++v)
                for (int u = 1; u <= 8; ++u) {
                    uint64_t X = (gx - 1) * 8 + u, Y = (gy - 1) * 8 + v;
                    cells[(X - 1) + (Y - 1) * side] = st.at(u, v);
                }
        }
    }

    GridEolReduction red{VbInstance::table(n_out, std::move(cells)), nullptr};
    GridEolInstance grid = g;
    red.decode = [grid](const VbSolution& sol) -> uint32_t {
        auto block = [&grid](uint64_t x, uint64_t y) {
            return grid.index((x - 1) / 8 + 1, (y - 1) / 8 + 1);
        };
        uint32_t b1 = block(sol.x1, sol.y1), b2 = block(sol.x2, sol.y2);
        if (grid.endpoint(b1)) return b1;
        if (grid.endpoint(b2)) return b2;
        throw VbError("solution does not map to a grid end of line");
    };
    return red;
}

GridEolInstance random_grid_eol(Rng& rng, unsigned n) {
    GridEolInstance g;
    g.n = n;
    uint64_t s = g.side(), count = s * s;
    g.succ.resize(count);
    g.pred.resize(count);
    for (uint32_t i = 0; i < count; ++i) g.succ[i] = g.pred[i] = i;
    std::vector<bool> used(count, false);

    auto walk = [&](uint32_t start, uint64_t max_len) {
        used[start] = true;
        uint32_t cur = start;
        for (uint64_t step = 1; step < max_len; ++step) {
            auto [x, y] = g.coords(cur);
            std::vector<uint32_t> cand;
            if (x > 1 && !used[g.index(x - 1, y)]) cand.push_back(g.index(x - 1, y));
            if (x < s && !used[g.index(x + 1, y)]) cand.push_back(g.index(x + 1, y));
            if (y > 1 && !used[g.index(x, y - 1)]) cand.push_back(g.index(x, y - 1));
            if (y < s && !used[g.index(x, y + 1)]) cand.push_back(g.index(x, y + 1));
            if (cand.empty()) break;
            uint32_t next = cand[rng.below(cand.size())];
            g.succ[cur] = next;
            g.pred[next] = cur;
            used[next] = true;
            cur = next;
            if (rng.below(4) == 0) break;
        }
        return cur;
    };

    // the origin path first, then a few extra disjoint paths
    walk(0, 2 + rng.below(2 * s));
    unsigned extra = rng.below(3);
    for (unsigned t = 0; t < extra; ++t) {
        uint32_t start = static_cast<uint32_t>(rng.below(count));
        if (used[start]) continue;
        walk(start, 2 + rng.below(s));
    }
    return g;
}

VbInstance random_vb_instance(Rng& rng, unsigned n) {
    uint64_t side = uint64_t(1) << n;
    static constexpr Arrow arrows[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    std::vector<Arrow> cells(side * side);
    for (auto& c : cells) c = arrows[rng.below(4)];
    return VbInstance::table(n, std::move(cells));
}

} // namespace hairball
