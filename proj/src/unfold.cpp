#include "hairball/unfold.hpp"

namespace hairball {

RatVec sp(const SpherePoint& x) {
    if (x.coords[0] == 1) throw AtPole("stereographic projection undefined at the pole");
    Rat d = 1 - x.coords[0];
    RatVec z(x.dim() - 1);
    for (size_t i = 1; i < x.dim(); ++i) z[i - 1] = x.coords[i] / d;
    return z;
}

SpherePoint sp_inv(const RatVec& z) {
    Rat s = norm2_sq(z);
    Rat denom = 1 + s;
    RatVec x(z.size() + 1);
    x[0] = (s - 1) / denom;
    for (size_t i = 0; i < z.size(); ++i) x[i + 1] = 2 * z[i] / denom;
    return SpherePoint{std::move(x)}; // unit by construction
}

std::vector<RatVec> tangent_basis(const SpherePoint& x) {
    if (x.coords[0] == 1) throw AtPole("tangent basis undefined at the pole");
    size_t k = x.dim() - 1;
    Rat d = 1 - x.coords[0];
    std::vector<RatVec> b(k, RatVec(k + 1, Rat(0)));
    for (size_t i = 1; i <= k; ++i) {
        RatVec& bi = b[i - 1];
        bi[0] = x.coords[i];
        for (size_t j = 1; j <= k; ++j)
            bi[j] = (j == i ? Rat(1) : Rat(0)) - x.coords[j] * x.coords[i] / d;
    }
    return b;
}

unsigned colour_of_direction(const RatVec& g) {
    unsigned arg = 0; // 0 means "all nonnegative"
    for (size_t i = 0; i < g.size(); ++i) {
        if (g[i] < 0 && (arg == 0 || g[i] < g[arg - 1])) arg = static_cast<unsigned>(i) + 1;
    }
    return arg;
}

RatVec ideal_direction_scaled(const RatVec& z) {
    Rat s = norm2_sq(z);
    if (s == 0) throw GeometryError("ideal direction undefined at the origin");
    Rat sum(0);
    for (const Rat& zi : z) sum += zi;
    RatVec w(z.size());
    for (size_t i = 0; i < z.size(); ++i) w[i] = s - 2 * z[i] * sum;
    return w;
}

UnfoldedField::UnfoldedField(HairyBallInstance inst, std::vector<RatVec> rotation)
    : inst_(std::move(inst)), rot_(std::move(rotation)) {
    size_t d = inst_.k + 1;
    if (rot_.size() != d) throw ArityMismatch("rotation dimension");
    rot_t_.assign(d, RatVec(d));
    for (size_t i = 0; i < d; ++i) {
        if (rot_[i].size() != d) throw ArityMismatch("rotation dimension");
        for (size_t j = 0; j < d; ++j) rot_t_[j][i] = rot_[i][j];
    }
    // exact orthogonality
    for (size_t i = 0; i < d; ++i)
        for (size_t j = i; j < d; ++j)
            if (dot(rot_[i], rot_[j]) != (i == j ? Rat(1) : Rat(0)))
                throw GeometryError("rotation is not exactly orthogonal");
}

static RatVec mat_apply(const std::vector<RatVec>& rows, const RatVec& v) {
    RatVec out(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) out[i] = dot(rows[i], v);
    return out;
}

RatVec UnfoldedField::rotated_field(const RatVec& x) const {
    return mat_apply(rot_, inst_.field.evaluate(mat_apply(rot_t_, x)));
}

SpherePoint UnfoldedField::unrotate(const SpherePoint& x) const {
    return SpherePoint{mat_apply(rot_t_, x.coords)};
}

RatVec UnfoldedField::evaluate(const RatVec& z) const {
    // b_i(x(z)) = (0, e_i) - (2 z_i / (1+|z|^2)) * (-1, z), so the inner
    // products collapse to one shared correction term.
    SpherePoint x = sp_inv(z);
    RatVec f = rotated_field(x.coords);
    Rat s = norm2_sq(z);
    Rat corr = -f[0];
    for (size_t i = 0; i < z.size(); ++i) corr += f[i + 1] * z[i];
    RatVec g(z.size());
    Rat scale = Rat(2) / (1 + s);
    for (size_t i = 0; i < z.size(); ++i) g[i] = f[i + 1] - scale * z[i] * corr;
    return g;
}

unsigned UnfoldedField::colour(const RatVec& z) const { return colour_of_direction(evaluate(z)); }

namespace {

// Householder reflection x -> x - 2 <x,v>/<v,v> v, as explicit rows.
std::vector<RatVec> householder(const RatVec& v) {
    size_t d = v.size();
    Rat vv = norm2_sq(v);
    std::vector<RatVec> rows(d, RatVec(d, Rat(0)));
    for (size_t i = 0; i < d; ++i) {
        rows[i][i] = 1;
        for (size_t j = 0; j < d; ++j) rows[i][j] -= 2 * v[i] * v[j] / vv;
    }
    return rows;
}

std::vector<RatVec> mat_mul(const std::vector<RatVec>& a, const std::vector<RatVec>& b) {
    size_t d = a.size();
    std::vector<RatVec> out(d, RatVec(d, Rat(0)));
    for (size_t i = 0; i < d; ++i)
        for (size_t j = 0; j < d; ++j) {
            Rat acc(0);
            for (size_t l = 0; l < d; ++l) acc += a[i][l] * b[l][j];
            out[i][j] = acc;
        }
    return out;
}

// angle(u, diag) <= 2^-10, certified on squares: requires <u, 1> > 0 and
// sin^2 <= (2^-10 * (1 - 2^-20))^2.
bool diagonal_aligned(const RatVec& u) {
    Rat ones_dot(0);
    for (const Rat& x : u) ones_dot += x;
    if (ones_dot <= 0) return false;
    Rat uu = norm2_sq(u);
    Rat dd = Rat(static_cast<long>(u.size()));
    Rat cos2 = ones_dot * ones_dot / (uu * dd);
    Rat sin2 = 1 - cos2;
    Rat bound = pow2(-10) * (1 - pow2(-20));
    return sin2 <= bound * bound;
}

} // namespace

UnfoldedProblem choose_params(const HairyBallInstance& inst, bool paper_bounds) {
    const unsigned k = inst.k;
    const size_t d = k + 1;

    RatVec pole(d, Rat(0));
    pole[0] = 1;
    SpherePoint p{pole};
    RatVec fp = inst.field.evaluate(p.coords);
    RatVec u = tangent_project(p, fp); // u[0] = 0
    RatVec u_tail(u.begin() + 1, u.end());
    if (norm_inf(u_tail) <= inst.eps) throw ImmediateSolution{p};

    // Rotation of the tangent coordinates aligning u with the diagonal.
    std::vector<RatVec> q(k, RatVec(k, Rat(0)));
    for (size_t i = 0; i < k; ++i) q[i][i] = 1;
    if (!diagonal_aligned(u_tail)) {
        for (unsigned prec = 64; prec <= 1024; prec *= 2) {
            // target c*(1,..,1) with k*c^2 close to |u|^2
            Rat c = sqrt_upper(norm2_sq(u_tail) / Rat(static_cast<long>(k)), prec);
            RatVec w(k);
            bool degenerate = true;
            for (size_t i = 0; i < k; ++i) {
                w[i] = u_tail[i] - c;
                if (w[i] != 0) degenerate = false;
            }
            if (degenerate) break; // u is exactly diagonal; identity works
            std::vector<RatVec> h1 = householder(w);
            RatVec r(k, Rat(0)); // e1 - e2 is orthogonal to the diagonal
            r[0] = 1;
            r[1] = -1;
            std::vector<RatVec> h2 = householder(r);
            std::vector<RatVec> cand = mat_mul(h2, h1);
            if (diagonal_aligned(mat_apply(cand, u_tail))) {
                q = std::move(cand);
                break;
            }
        }
        if (!diagonal_aligned(mat_apply(q, u_tail)))
            throw GeometryError("failed to align the pole direction");
    }

    std::vector<RatVec> rot(d, RatVec(d, Rat(0)));
    rot[0][0] = 1;
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j) rot[i + 1][j + 1] = q[i][j];

    auto field = std::make_shared<UnfoldedField>(inst, rot);

    // Lipschitz/range bounds for the rotated field via matrix infinity norms.
    Rat lip_f, range_f;
    if (paper_bounds) {
        CoarseLipschitz cl = lipschitz_coarse(inst.field, k);
        lip_f = cl.raw;
        range_f = cl.sup_on_ball;
    } else {
        CertifiedBounds cb = lipschitz_certified(inst.field, Rat(1));
        lip_f = cb.lip;
        range_f = cb.range;
    }
    auto row_norm = [&](const std::vector<RatVec>& m) {
        Rat best(0);
        for (const auto& row : m) best = rat_max(best, norm1(row));
        return best;
    };
    std::vector<RatVec> rot_t(d, RatVec(d));
    for (size_t i = 0; i < d; ++i)
        for (size_t j = 0; j < d; ++j) rot_t[i][j] = rot[j][i];
    Rat mr = row_norm(rot), mrt = row_norm(rot_t);
    Rat lip_rot = mr * lip_f * mrt;
    Rat range_rot = mr * range_f;

    // Local Lipschitz bound for g on pairs closer than 1/sqrt(k):
    //   |g(z)-g(z')|_inf <= sqrt(k(k+1)) * (5*lip + 9*range) * |z-z'|_inf
    Int sk = ceil_isqrt(Rat(static_cast<long>(k)));
    Int skk1 = ceil_isqrt(Rat(static_cast<long>(k) * (k + 1)));
    Rat lam = Rat(skk1) * (5 * lip_rot + 9 * range_rot);

    SolverParams params;
    params.lip_g = lam;
    params.delta = rat_min(inst.eps / (8 * Rat(sk) * lam), Rat(1) / Rat(sk));

    // Far-field radius t: past it, g stays close to the direction induced by
    // the projected field at the pole. The comparison target is the projected
    // field, so its variation has a range term on top of the raw Lipschitz
    // one:
    //   |g_i(z) - <f(p), b_i(x(z))>| <= (2/|z|) * sqrt(k+1) * (lip + range).
    // Error budget, all in units of 1/sqrt(k): normalisation factor at most
    // 17/16, this term at most 0.15, the 1/t^2 tail at most 1/16, rotation
    // slack below 1/256; total stays under the 1/4 band.
    Rat t(4);
    if (lip_rot + range_rot > 0)
        t = rat_max(t, Rat(15) * Rat(skk1) * (lip_rot + range_rot) / inst.eps);
    params.t = t;

    params.m = ceil_isqrt(t * t * Rat(static_cast<long>(k)));
    params.q = static_cast<unsigned>(ceil_log2(Rat(params.m) / params.delta));

    return UnfoldedProblem{field, params};
}

} // namespace hairball
