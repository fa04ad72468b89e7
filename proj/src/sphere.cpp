#include "hairball/sphere.hpp"

#include "hairball/unfold.hpp"

namespace hairball {

RatVec tangent_project(const SpherePoint& x, const RatVec& v) {
    if (v.size() != x.dim()) throw ArityMismatch("tangent_project dimension");
    Rat c = dot(v, x.coords);
    RatVec out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] - c * x.coords[i];
    return out;
}

bool verify_hb_solution(const HairyBallInstance& inst, const SpherePoint& x) {
    if (x.dim() != inst.k + 1) throw ArityMismatch("solution dimension");
    RatVec fx = inst.field.evaluate(x.coords);
    return norm_inf(tangent_project(x, fx)) <= inst.eps;
}

namespace {

// |a + b*sqrt(s)| <= c*sqrt(s), decided exactly (c >= 0).
bool abs_le_sqrt(const Rat& a, const Rat& b, const Rat& c, const Rat& s) {
    return sign_quadratic(a, b - c, s) <= 0 && sign_quadratic(-a, -b - c, s) <= 0;
}

} // namespace

SpherePoint snap_to_sphere(const RatVec& z, const Rat& tol) {
    Rat s = norm2_sq(z);
    if (s == 1) return SpherePoint{z};
    if (s < Rat(1, 4) || s > 4) throw TooFarFromSphere("norm out of [1/2, 2]");
    if (tol <= 0) throw GeometryError("tolerance must be positive");

    // Work on the hemisphere away from the projection pole.
    if (z[0] > 0) {
        RatVec neg(z.size());
        for (size_t i = 0; i < z.size(); ++i) neg[i] = -z[i];
        SpherePoint snapped = snap_to_sphere(neg, tol);
        for (Rat& c : snapped.coords) c = -c;
        return snapped;
    }

    for (unsigned prec = 16; prec <= 4096; prec *= 2) {
        Rat rho = sqrt_upper(s, prec); // rho >= ||z|| > -z0 >= 0, so rho - z0 > 0
        RatVec u(z.size() - 1);
        for (size_t i = 1; i < z.size(); ++i) u[i - 1] = z[i] / (rho - z[0]);
        SpherePoint cand = sp_inv(u);
        bool ok = true;
        for (size_t i = 0; i < z.size() && ok; ++i)
            ok = abs_le_sqrt(-z[i], cand.coords[i], tol, s); // |x_i*sqrt(s) - z_i| <= tol*sqrt(s)
        if (ok) return cand;
    }
    throw GeometryError("snap_to_sphere failed to converge");
}

std::optional<SpherePoint> grid_oracle(const HairyBallInstance& inst, const Rat& resolution,
                                       const std::optional<GridBox>& box) {
    const unsigned k = inst.k;
    GridBox b;
    if (box) {
        b = *box;
        if (b.lo.size() != k || b.hi.size() != k) throw ArityMismatch("grid box dimension");
    } else {
        b.lo.assign(k, Rat(-4));
        b.hi.assign(k, Rat(4));
    }

    RatVec pole(k + 1, Rat(0));
    pole[0] = 1;
    SpherePoint p{pole};
    if (verify_hb_solution(inst, p)) return p;
    pole[0] = -1;
    SpherePoint antipode{pole};
    if (verify_hb_solution(inst, antipode)) return antipode;

    std::vector<uint64_t> steps(k);
    for (unsigned i = 0; i < k; ++i) {
        Rat span = b.hi[i] - b.lo[i];
        if (span < 0) throw GeometryError("grid box is empty");
        Rat count = span / resolution;
        steps[i] = mpz_get_ui(Int(count.get_num() / count.get_den()).get_mpz_t()) + 1;
    }

    RatVec z(k);
    std::vector<uint64_t> idx(k, 0);
    for (;;) {
        bool in_range = true;
        for (unsigned i = 0; i < k; ++i) {
            z[i] = b.lo[i] + Rat(static_cast<long>(idx[i])) * resolution;
            if (z[i] > b.hi[i]) in_range = false;
        }
        if (in_range) {
            SpherePoint x = sp_inv(z);
            if (verify_hb_solution(inst, x)) return x;
        }
        // odometer, first coordinate slowest
        int d = static_cast<int>(k) - 1;
        while (d >= 0) {
            if (++idx[d] < steps[d]) break;
            idx[d] = 0;
            --d;
        }
        if (d < 0) break;
    }
    return std::nullopt;
}

std::pair<SpherePoint, Rat> grid_scan_min(const HairyBallInstance& inst, const Rat& resolution,
                                          const std::optional<GridBox>& box) {
    const unsigned k = inst.k;
    GridBox b;
    if (box) {
        b = *box;
    } else {
        b.lo.assign(k, Rat(-4));
        b.hi.assign(k, Rat(4));
    }
    auto residual = [&inst](const SpherePoint& x) {
        return norm_inf(tangent_project(x, inst.field.evaluate(x.coords)));
    };

    RatVec pole(k + 1, Rat(0));
    pole[0] = 1;
    SpherePoint best{pole};
    Rat best_norm = residual(best);

    std::vector<uint64_t> steps(k);
    for (unsigned i = 0; i < k; ++i) {
        Rat span = b.hi[i] - b.lo[i];
        if (span < 0) throw GeometryError("grid box is empty");
        Rat count = span / resolution;
        steps[i] = mpz_get_ui(Int(count.get_num() / count.get_den()).get_mpz_t()) + 1;
    }

    RatVec z(k, Rat(0));
    std::vector<uint64_t> idx(k, 0);
    for (;;) {
        bool in_range = true;
        for (unsigned i = 0; i < k; ++i) {
            z[i] = b.lo[i] + Rat(static_cast<long>(idx[i])) * resolution;
            if (z[i] > b.hi[i]) in_range = false;
        }
        if (in_range) {
            SpherePoint x = sp_inv(z);
            Rat r = residual(x);
            if (r < best_norm) {
                best = x;
                best_norm = r;
            }
        }
        int d = static_cast<int>(k) - 1;
        while (d >= 0) {
            if (++idx[d] < steps[d]) break;
            idx[d] = 0;
            --d;
        }
        if (d < 0) break;
    }
    return {best, best_norm};
}

LiftedInstance lift_k_to_k2(const HairyBallInstance& inst, bool paper_bound) {
    const unsigned k = inst.k;
    Rat L;
    if (paper_bound) {
        L = lipschitz_coarse(inst.field, k).projected;
    } else {
        CertifiedBounds cb = lipschitz_certified(inst.field, Rat(1));
        L = rat_max(cb.lip, cb.range);
    }
    long ell = 1;
    if (L > 0) ell = std::max<long>(1, (ceil_log2(Rat(32 * k) * L / inst.eps) + 1) / 2);
    Rat epsp = rat_min(pow2(-ell - 1), inst.eps / 4);

    CircuitBuilder bld(CircuitClass::Linear, k + 3);
    std::vector<uint32_t> in(k + 3);
    for (unsigned i = 0; i < k + 3; ++i) in[i] = bld.input(i);

    uint32_t n_gate = bld.max(bld.abs(in[k + 1]), bld.abs(in[k + 2]));
    std::vector<uint32_t> head(in.begin(), in.begin() + k + 1);
    std::vector<uint32_t> v = bld.splice(inst.field, head);
    // b = max(0, 2L - 2^l * L * N): fades the inner field to zero as the two
    // new coordinates grow
    uint32_t zero = bld.constant(Rat(0));
    uint32_t b_gate = bld.max(zero, bld.sub(bld.constant(2 * L), bld.mulc(pow2(ell) * L, n_gate)));
    uint32_t neg_b = bld.neg(b_gate);

    std::vector<uint32_t> outs;
    for (unsigned i = 0; i <= k; ++i) outs.push_back(bld.min(b_gate, bld.max(neg_b, v[i])));
    outs.push_back(bld.neg(in[k + 2]));
    outs.push_back(in[k + 1]);

    HairyBallInstance lifted(k + 2, std::move(bld).build(std::move(outs)), epsp);

    Rat tol = rat_min(Rat(1, 1024), L > 0 ? inst.eps / (2 * L) : Rat(1, 1024));
    HairyBallInstance base = inst;
    auto map_back = [base, tol](const SpherePoint& x) {
        RatVec head_coords(x.coords.begin(), x.coords.begin() + base.k + 1);
        return snap_to_sphere(head_coords, tol);
    };

    LiftedInstance out{std::move(lifted), ell, L, map_back};
    return out;
}

} // namespace hairball
