#include "nullprop/nullcurve.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace nullprop {

namespace {
constexpr cplx kI{0.0, 1.0};
}

WeierstrassData WeierstrassData::spinor_data(Laurent g, Laurent eta, CompactRegion domain) {
    WeierstrassData d;
    d.mode = Mode::spinor;
    d.g = std::move(g);
    d.eta = std::move(eta);
    d.domain = domain;
    return d;
}

WeierstrassData WeierstrassData::direct_data(LaurentTriple phi, CompactRegion domain) {
    WeierstrassData d;
    d.mode = Mode::direct;
    d.phi_direct = std::move(phi);
    d.domain = domain;
    return d;
}

WeierstrassData WeierstrassData::logpair_data(HoloPtr P, HoloPtr phi3, bool swapped,
                                              CompactRegion domain) {
    WeierstrassData d;
    d.mode = Mode::logpair;
    d.logP = std::move(P);
    d.phi3 = std::move(phi3);
    d.swapped = swapped;
    d.domain = domain;
    return d;
}

PhiPtr WeierstrassData::node() const {
    switch (mode) {
        case Mode::spinor: {
            const LaurentTriple t = phi_laurent();
            return std::make_shared<TripleRawNode>(make_laurent_fun(t.c1), make_laurent_fun(t.c2),
                                                   make_laurent_fun(t.c3));
        }
        case Mode::direct:
            return std::make_shared<TripleRawNode>(make_laurent_fun(phi_direct.c1),
                                                   make_laurent_fun(phi_direct.c2),
                                                   make_laurent_fun(phi_direct.c3));
        case Mode::logpair:
            return std::make_shared<LogPairNode>(logP, phi3, swapped);
    }
    throw Error("unreachable");
}

LaurentTriple WeierstrassData::phi_laurent() const {
    if (mode == Mode::spinor) {
        const Laurent g2 = g * g;
        const Laurent one = Laurent::constant(1.0, g.center);
        return {(one - g2) * eta * cplx(0.5), (one + g2) * eta * (kI * 0.5), g * eta};
    }
    if (mode == Mode::direct) return phi_direct;
    throw Error("phi_laurent: logpair data has no finite expansion");
}

Vec3c WeierstrassData::phi(cplx z) const {
    if (mode == Mode::logpair) {
        const cplx p = logP->eval(z);
        const cplx t = phi3->eval(z);
        const cplx q = -t * t / p;
        const cplx a = swapped ? q : p;
        const cplx b = swapped ? p : q;
        return {(a + b) / 2.0, (a - b) / (2.0 * kI), t};
    }
    return phi_laurent().eval(z);
}

double WeierstrassData::null_residual(double grid_scale) const {
    if (mode == Mode::spinor) {
        // structural: measure the expanded identity coefficientwise
        const LaurentTriple t = phi_laurent();
        const Laurent id = null_identity_poly(t);
        double scale = 0.0;
        for (const Laurent* s : {&t.c1, &t.c2, &t.c3}) {
            const double m = s->max_abs_coeff();
            scale = std::max(scale, m * m);
        }
        return scale > 0.0 ? id.max_abs_coeff() / scale : 0.0;
    }
    const SampleGrid grid = region_grid(domain, grid_scale);
    double num = 0.0, den = 0.0;
    for (const auto& p : grid.points) {
        const Vec3c v = phi(p.z);
        num = std::max(num, std::abs(sym_form(v, v)));
        den = std::max(den, std::real(herm_form(v, v)));
    }
    return den > 0.0 ? num / den : 0.0;
}

std::pair<double, double> WeierstrassData::regularity_floor(double grid_scale) const {
    const SampleGrid grid = region_grid(domain, grid_scale);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& p : grid.points) {
        const double h = std::real(herm_form(phi(p.z), phi(p.z)));
        if (!std::isfinite(h)) return {0.0, std::numeric_limits<double>::infinity()};
        lo = std::min(lo, h);
        hi = std::max(hi, h);
    }
    return {lo, kTolPosRel * hi};
}

void WeierstrassData::validate() const {
    if (mode == Mode::spinor && eta.trimmed(0.0).empty())
        throw ZeroData("spinor data with eta identically zero");
    if (mode == Mode::direct) {
        const Laurent id = null_identity_poly(phi_direct);
        double scale = 0.0;
        for (const Laurent* s : {&phi_direct.c1, &phi_direct.c2, &phi_direct.c3})
            scale = std::max(scale, s->max_abs_coeff() * s->max_abs_coeff());
        if (scale <= 0.0) throw ZeroData("direct data identically zero");
        if (id.max_abs_coeff() > kNullIdentityRel * scale)
            throw DegenerateInput("direct data violates the null identity");
    }
    auto [lo, floor] = regularity_floor();
    if (!(lo > floor))
        throw DegenerateInput("data fails the regularity floor on the domain grid");
    if (domain.kind == CompactRegion::Kind::annulus && mode != Mode::logpair) {
        const LaurentTriple t = phi_laurent();
        const double scale = std::max({t.c1.max_abs_coeff(), t.c2.max_abs_coeff(),
                                       t.c3.max_abs_coeff(), 1e-300});
        for (const Laurent* s : {&t.c1, &t.c2, &t.c3})
            if (std::abs(s->residue()) > 1e-12 * scale)
                throw NonExact("annulus data carries a z^-1 coefficient");
    }
}

WeierstrassData phi_from_spinor(const Laurent& g, const Laurent& eta,
                                const CompactRegion& domain) {
    if (eta.trimmed(0.0).empty()) throw ZeroData("phi_from_spinor: eta identically zero");
    return WeierstrassData::spinor_data(g, eta, domain);
}

PhiPtr NullCurveRep::phi_node() const {
    if (norm(rot.col[0] - Vec3c{1, 0, 0}) + norm(rot.col[1] - Vec3c{0, 1, 0}) +
            norm(rot.col[2] - Vec3c{0, 0, 1}) <
        1e-15)
        return data.node();
    return std::make_shared<MatAppliedNode>(rot, data.node());
}

Vec3c NullCurveRep::phi(cplx z) const { return rot.apply(data.phi(z)); }

Vec3c NullCurveRep::phi_deriv(cplx z) const { return rot.apply(data.node()->deriv(z)); }

Vec3c NullCurveRep::value(cplx z) const {
    const Vec3c raw = F0.eval(z);
    return rot.apply(raw) + basevalue;
}

double NullCurveRep::metric_density(cplx z, const ConformalMetric& sigma) const {
    const Vec3c v = phi(z);
    const double s = sigma(z);
    return 0.5 * std::real(herm_form(v, v)) / (s * s);
}

namespace {

struct ProjectionResult {
    LaurentTriple triple;
    double fidelity = std::numeric_limits<double>::infinity();
};

// adaptive spectral projection of a logpair triple onto finite Laurent series
ProjectionResult project_logpair(const WeierstrassData& data) {
    const CompactRegion& dom = data.domain;
    const bool annular = dom.kind == CompactRegion::Kind::annulus;
    const double R = dom.r_outer;
    const double r = annular ? dom.r_inner : 0.0;
    const double ring = annular ? std::sqrt(r * R) : R;
    const PhiPtr node = data.node();

    double scale = 1e-300;
    for (double rad : {annular ? 1.05 * r : 0.35 * R, 0.95 * R})
        for (int k = 0; k < 32; ++k) {
            const double th = 2.0 * M_PI * (k + 0.37) / 32.0;
            scale = std::max(scale,
                             norm(node->eval(dom.center + rad * cplx(std::cos(th), std::sin(th)))));
        }

    ProjectionResult best;
    for (int deg = 256; deg <= 2048; deg *= 2) {
        const int k_lo = annular ? -deg : 0;
        const int n = 4 * (deg - k_lo) + 64;
        LaurentTriple t;
        t.c1 = project_laurent(*node, 0, dom.center, ring, k_lo, deg, n);
        t.c2 = project_laurent(*node, 1, dom.center, ring, k_lo, deg, n);
        t.c3 = project_laurent(*node, 2, dom.center, ring, k_lo, deg, n);
        double err = 0.0;
        for (double rad : {annular ? 1.02 * r : 0.5 * R,
                           annular ? std::sqrt(ring * R) : 0.9 * R, 0.995 * R})
            for (int k = 0; k < 48; ++k) {
                const double th = 2.0 * M_PI * (k + 0.19) / 48.0;
                const cplx z = dom.center + rad * cplx(std::cos(th), std::sin(th));
                err = std::max(err, norm(node->eval(z) - t.eval(z)));
            }
        if (err < best.fidelity) {
            best.triple = t;
            best.fidelity = err;
        }
        if (err <= 1e-11 * scale) break;
    }
    return best;
}

void pin_at_basepoint(LaurentTriple& F0, cplx basepoint) {
    const Vec3c at_base = F0.eval(basepoint);
    F0.c1 = F0.c1 - Laurent::constant(at_base.z1, F0.c1.center);
    F0.c2 = F0.c2 - Laurent::constant(at_base.z2, F0.c2.center);
    F0.c3 = F0.c3 - Laurent::constant(at_base.z3, F0.c3.center);
}

} // namespace

NullCurveRep integrate(const WeierstrassData& data, cplx basepoint, const Vec3c& basevalue) {
    NullCurveRep rep;
    rep.data = data;
    rep.basepoint = basepoint;
    rep.basevalue = basevalue;
    if (data.mode == WeierstrassData::Mode::logpair) {
        ProjectionResult pr = project_logpair(data);
        rep.F0 = pr.triple.antiderivative(1e-9);
        rep.fidelity = pr.fidelity;
    } else {
        rep.F0 = data.phi_laurent().antiderivative();
    }
    pin_at_basepoint(rep.F0, basepoint);
    return rep;
}

Vec3c evaluate(const NullCurveRep& F, cplx P) {
    if (!F.domain().contains(P, 1e-9)) throw OutOfDomain("evaluate: point outside the domain");
    return F.value(P);
}

std::array<double, 3> associated_surface(const NullCurveRep& F, const UnitPhase& v, cplx P) {
    if (!F.domain().contains(P, 1e-9))
        throw OutOfDomain("associated_surface: point outside the domain");
    const Vec3c val = F.value(P);
    return {std::real(v.v * val.z1), std::real(v.v * val.z2), std::real(v.v * val.z3)};
}

double metric_density(const NullCurveRep& F, cplx P, const ConformalMetric& sigma) {
    if (!F.domain().contains(P, 1e-9))
        throw OutOfDomain("metric_density: point outside the domain");
    return F.metric_density(P, sigma);
}

FluxReport flux_periods(const NullCurveRep& F, cplx center, double radius, int n_samples) {
    if (!F.domain().contains(center + radius, 1e-9) ||
        !F.domain().contains(center - radius, 1e-9))
        throw OutOfDomain("flux_periods: cycle leaves the domain");
    int n = n_samples;
    if (n <= 0) {
        int deg = 64;
        if (F.data.mode != WeierstrassData::Mode::logpair) {
            const LaurentTriple t = F.data.phi_laurent();
            deg = std::max({std::abs(t.c1.k_min), std::abs(t.c2.k_min), std::abs(t.c3.k_min),
                            t.c1.k_max(), t.c2.k_max(), t.c3.k_max(), 1});
        }
        n = std::max(512, 4 * deg + 16);
    }
    Vec3c acc;
    for (int k = 0; k < n; ++k) {
        const double th = 2.0 * M_PI * k / n;
        const cplx e{std::cos(th), std::sin(th)};
        const cplx z = center + radius * e;
        acc = acc + F.phi(z) * (kI * radius * e);
    }
    FluxReport rep;
    rep.period = acc * (2.0 * M_PI / n);
    return rep;
}

NullCurveRep translate(const NullCurveRep& F, const Vec3c& v) {
    NullCurveRep out = F;
    out.basevalue = out.basevalue + v;
    return out;
}

NullCurveRep rotate_curve(const Mat3c& A, const NullCurveRep& F) {
    if (!A.is_orthogonal(1e-10)) throw DegenerateInput("rotate_curve: matrix not orthogonal");
    NullCurveRep out = F;
    out.basevalue = A.apply(F.basevalue);
    if (F.data.mode == WeierstrassData::Mode::logpair) {
        out.rot = A * F.rot;
        return out;
    }
    // bake the linear map into the coefficients; the null identity is
    // preserved up to rounding because A^T A = I
    const LaurentTriple t = F.data.phi_laurent();
    auto combine = [&](int row) {
        Laurent s = t.c1 * A.col[0][row];
        s = s + t.c2 * A.col[1][row];
        s = s + t.c3 * A.col[2][row];
        return s;
    };
    out.data = WeierstrassData::direct_data({combine(0), combine(1), combine(2)}, F.data.domain);
    out.rot = F.rot;
    out.F0 = out.data.phi_direct.antiderivative(1e-9);
    pin_at_basepoint(out.F0, out.basepoint);
    return out;
}

double flatness_score(const NullCurveRep& F, double grid_scale) {
    const SampleGrid grid = region_grid(F.domain(), grid_scale);
    Eigen::Matrix3cd gram = Eigen::Matrix3cd::Zero();
    size_t used = 0;
    for (const auto& p : grid.points) {
        const Vec3c v = F.phi(p.z);
        const double n = norm(v);
        if (n <= 0.0) continue;
        Eigen::Vector3cd w;
        w << v.z1 / n, v.z2 / n, v.z3 / n;
        gram += w * w.adjoint();
        ++used;
    }
    if (used == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(gram / static_cast<double>(used));
    const auto ev = es.eigenvalues();
    return ev(2) > 0.0 ? ev(1) / ev(2) : 0.0;
}

double SampledLeg::nullity_residual() const {
    double worst = 0.0;
    for (const auto& s : samples) {
        const double h = std::real(herm_form(s.dvalue, s.dvalue));
        if (h <= 0.0) continue;
        worst = std::max(worst, std::abs(sym_form(s.dvalue, s.dvalue)) / h);
    }
    return worst;
}

double SampledLeg::regularity_min() const {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& s : samples)
        lo = std::min(lo, std::real(herm_form(s.dvalue, s.dvalue)));
    return lo;
}

SampledLeg build_halfline_spur(const Vec3c& FQ, double t_end, int n_samples) {
    if (std::abs(FQ.z1) + std::abs(FQ.z2) <= 1e-12 * (1.0 + norm(FQ)))
        throw DegeneratePoint("build_halfline_spur: (|F1|+|F2|)(Q) vanishes");
    if (t_end <= 1.0) throw DegenerateInput("build_halfline_spur: t_end must exceed 1");
    const cplx root = std::sqrt(FQ.z1 * FQ.z1 + FQ.z2 * FQ.z2);
    const Vec3c dir{FQ.z1, FQ.z2, kI * root};
    SampledLeg leg;
    leg.samples.reserve(static_cast<size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i) {
        const double u = static_cast<double>(i) / (n_samples - 1);
        const double t = 1.0 + u * (t_end - 1.0);
        leg.samples.push_back(
            {u, Vec3c{t * FQ.z1, t * FQ.z2, FQ.z3 + (t - 1.0) * kI * root}, dir * (t_end - 1.0)});
    }
    return leg;
}

namespace {

Vec3c chart_vec(cplx g, int s) {
    return {(1.0 - g * g) / 2.0, cplx(0, s) * (1.0 + g * g) / 2.0, g};
}

} // namespace

NullBlend blend_null_tangents(const Vec3c& T0, const Vec3c& T1, int n_samples) {
    NullBlend out;
    const double n0 = norm(T0), n1 = norm(T1);
    if (n0 <= 0.0 || n1 <= 0.0 || n_samples < 2) return out;

    int chart = 0;
    double qual = -1.0;
    for (int s : {1, -1}) {
        const cplx ea = T0.z1 - cplx(0, s) * T0.z2;
        const cplx eb = T1.z1 - cplx(0, s) * T1.z2;
        const double q = std::min(std::abs(ea) / n0, std::abs(eb) / n1);
        if (q > qual) {
            qual = q;
            chart = s;
        }
    }
    if (qual < 1e-6) return out;

    const cplx eta0 = T0.z1 - cplx(0, chart) * T0.z2;
    const cplx eta1 = T1.z1 - cplx(0, chart) * T1.z2;
    const cplx g0 = T0.z3 / eta0;
    const cplx g1 = T1.z3 / eta1;
    // interpolate eta on a log spiral so large magnitude ratios stay clear
    // of zero; fall back to the linear path when the angle would wrap
    const cplx ratio = eta1 / eta0;
    const cplx lr = std::log(ratio);
    auto eta = [&](double s) { return eta0 * std::exp(lr * s); };
    auto gpath = [&](double s) { return g0 + (g1 - g0) * s; };
    auto tangent = [&](double s) { return eta(s) * chart_vec(gpath(s), chart); };

    static const double gx[8] = {0.01985507, 0.10166676, 0.23723380, 0.40828268,
                                 0.59171732, 0.76276620, 0.89833324, 0.98014493};
    static const double gw[8] = {0.05061427, 0.11119052, 0.15685332, 0.18134189,
                                 0.18134189, 0.15685332, 0.11119052, 0.05061427};

    out.samples.reserve(static_cast<size_t>(n_samples));
    Vec3c pos{0, 0, 0};
    double prev = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        const double s = static_cast<double>(i) / (n_samples - 1);
        for (int q = 0; q < 8; ++q) {
            const double x = prev + (s - prev) * gx[q];
            pos = pos + ((s - prev) * gw[q]) * tangent(x);
        }
        prev = s;
        const Vec3c t = tangent(s);
        if (std::real(herm_form(t, t)) <= 0.0) return out;
        out.samples.push_back({s, pos, t});
    }
    out.ok = true;
    return out;
}

SampledLeg build_blended_spur(const Vec3c& FQ, const std::function<Vec3c(double)>& jet,
                              double t_end, double blend_frac, int n_samples) {
    if (std::abs(FQ.z1) + std::abs(FQ.z2) <= 1e-12 * (1.0 + norm(FQ)))
        throw DegeneratePoint("build_blended_spur: (|F1|+|F2|)(Q) vanishes");
    if (t_end <= 1.0) throw DegenerateInput("build_blended_spur: t_end must exceed 1");
    const cplx root = std::sqrt(FQ.z1 * FQ.z1 + FQ.z2 * FQ.z2);
    const Vec3c ray_dir_raw{FQ.z1, FQ.z2, cplx(0, 1) * root};
    const double ray_len = (t_end - 1.0) * norm(ray_dir_raw);
    const Vec3c ray_hat = ray_dir_raw * (1.0 / norm(ray_dir_raw));

    const double w = std::clamp(blend_frac, 1e-3, 0.5);
    const Vec3c T0 = jet(0.0);
    const double s0 = std::max(norm(T0), 1e-10 * ray_len);

    // transition with all derivatives vanishing at both ends; the leg data
    // stays smooth to all orders at the junctions, which is what buys the
    // fit its convergence rate
    auto step_flat = [](double t) {
        if (t <= 0.0) return 0.0;
        if (t >= 1.0) return 1.0;
        const double a = std::exp(-1.0 / t);
        const double b = std::exp(-1.0 / (1.0 - t));
        return a / (a + b);
    };

    // chart shared by the whole leg, chosen for the best worst-case margin
    int chart = 0;
    {
        double qual = -1.0;
        for (int c : {1, -1}) {
            double q = std::numeric_limits<double>::infinity();
            for (int i = 0; i <= 16; ++i) {
                const Vec3c A = jet(w * i / 16.0);
                const double na = norm(A);
                if (na <= 0.0) {
                    q = -1.0;
                    break;
                }
                q = std::min(q, std::abs(A.z1 - cplx(0, c) * A.z2) / na);
            }
            q = std::min(q, std::abs(ray_hat.z1 - cplx(0, c) * ray_hat.z2) / norm(ray_hat));
            if (q > qual) {
                qual = q;
                chart = c;
            }
        }
        if (qual < 1e-6) {
            // no workable chart: fall back to the sharp exact ray
            SampledLeg leg;
            const Vec3c dir = ray_dir_raw * (t_end - 1.0);
            for (int i = 0; i < n_samples; ++i) {
                const double u = static_cast<double>(i) / (n_samples - 1);
                const double t = 1.0 + u * (t_end - 1.0);
                leg.samples.push_back(
                    {u, Vec3c{t * FQ.z1, t * FQ.z2, FQ.z3 + (t - 1.0) * cplx(0, 1) * root}, dir});
            }
            return leg;
        }
    }

    auto eta_of = [&](const Vec3c& v) { return v.z1 - cplx(0, chart) * v.z2; };
    auto g_of = [&](const Vec3c& v) { return v.z3 / eta_of(v); };
    const cplx eta_ray = eta_of(ray_hat);
    const cplx g_ray = g_of(ray_hat);

    // log-magnitude grows linearly along the ray with a flat start: the
    // profile a polynomial can follow naturally
    static const double gx24[12] = {0.00662236, 0.03465623, 0.08456931, 0.15637293,
                                    0.24840619, 0.35668325, 0.47495367, 0.59555408,
                                    0.71027504, 0.81132653, 0.89222197, 0.94869666};
    double sigma = std::max(1.0, std::log(ray_len / s0 + 2.0));
    auto lam_at = [&](double u) {
        // integral of step_flat(tau / w) over [0, u] by midpoint panels
        const int np = 48;
        double acc = 0.0;
        for (int i = 0; i < np; ++i) acc += step_flat(((i + 0.5) / np) * (u / w)) * (u / np);
        return acc;
    };
    (void)gx24;
    auto tangent = [&](double u) -> Vec3c {
        const double th = step_flat(u / w);
        const double lam = sigma * lam_at(u);
        cplx log_eta, g;
        if (th >= 1.0) {
            log_eta = std::log(eta_ray) + lam;
            g = g_ray;
        } else {
            // continuous branch for log eta along the analytic side
            cplx la = std::log(eta_of(jet(0.0)));
            const int nw = 24;
            cplx prev = eta_of(jet(0.0));
            for (int i = 1; i <= nw; ++i) {
                const cplx cur = eta_of(jet(u * i / nw));
                la += std::log(cur / prev);
                prev = cur;
            }
            log_eta = (1.0 - th) * la + th * (std::log(eta_ray) + lam);
            g = (1.0 - th) * g_of(jet(u)) + th * g_ray;
        }
        const cplx eta = std::exp(log_eta);
        return {(1.0 - g * g) * eta / 2.0, cplx(0, chart) * (1.0 + g * g) * eta / 2.0, g * eta};
    };
    for (int pass = 0; pass < 40; ++pass) {
        double len = 0.0;
        const int nq = 240;
        for (int i = 0; i < nq; ++i) len += norm(tangent((i + 0.5) / nq)) / nq;
        const double f = ray_len / std::max(len, 1e-300);
        if (std::abs(f - 1.0) < 1e-10) break;
        sigma += std::log(f);
        if (sigma < 0.05) {
            sigma = 0.05;
            break;
        }
    }

    // sample and integrate (Gauss-Legendre between consecutive samples)
    static const double gx[8] = {0.01985507, 0.10166676, 0.23723380, 0.40828268,
                                 0.59171732, 0.76276620, 0.89833324, 0.98014493};
    static const double gw[8] = {0.05061427, 0.11119052, 0.15685332, 0.18134189,
                                 0.18134189, 0.15685332, 0.11119052, 0.05061427};
    SampledLeg leg;
    leg.samples.reserve(static_cast<size_t>(n_samples));
    Vec3c pos = FQ;
    double prev_u = 0.0;
    const int n_blend = std::max(33, n_samples / 3);
    std::vector<double> us;
    for (int i = 1; i < n_blend; ++i) us.push_back(w * i / (n_blend - 1));
    const int n_ray = std::max(2, n_samples - n_blend);
    for (int i = 1; i <= n_ray; ++i) us.push_back(w + (1.0 - w) * i / n_ray);
    for (double u : us) {
        for (int q = 0; q < 8; ++q)
            pos = pos + ((u - prev_u) * gw[q]) * tangent(prev_u + (u - prev_u) * gx[q]);
        prev_u = u;
        leg.samples.push_back({u, pos, tangent(u)});
    }
    leg.samples.insert(leg.samples.begin(), CurveSample{0.0, FQ, T0});
    return leg;
}

Vec3c make_zeta_j(const Vec3c& zeta, const Vec3c& zeta_star, cplx a) {
    if (!is_null(zeta, 1e-8) || !is_null(zeta_star, 1e-8))
        throw DegenerateInput("make_zeta_j: zeta and zeta* must be null");
    const cplx pair = sym_form(zeta, zeta_star);
    const double scale = norm(zeta) * norm(zeta_star);
    if (std::abs(pair) < 1e-10 * std::max(scale, 1e-300))
        throw DegeneratePair("make_zeta_j: (zeta, zeta*) vanishes");
    return zeta - (a * a / (2.0 * pair)) * zeta_star;
}

SampledLeg build_h_arc(const Vec3c& G_Rn, cplx G3_Rn, std::span<const cplx> y_vals,
                       std::span<const cplx> y_derivs, const Vec3c& zeta_j, SqrtBranch branch) {
    if (y_vals.size() != y_derivs.size() || y_vals.size() < 2)
        throw DegenerateInput("build_h_arc: bad sample arrays");
    const cplx s = sym_form(zeta_j, zeta_j);
    if (std::abs(s) < 1e-14 * std::max(1.0, norm(zeta_j) * norm(zeta_j)))
        throw DegenerateInput("build_h_arc: (zeta_j, zeta_j) vanishes");

    cplx root = std::sqrt(s);
    if (branch == SqrtBranch::flipped) root = -root;
    if (branch == SqrtBranch::automatic) {
        // track u * zeta: the zeta_j coefficient i Y'/root should start near +1
        const cplx a = y_derivs[0];
        if (std::abs(kI * a - root) > std::abs(kI * a + root)) root = -root;
    }

    const size_t n = y_vals.size();
    SampledLeg leg;
    leg.samples.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        const double u = static_cast<double>(i) / static_cast<double>(n - 1);
        const cplx c = kI * (y_vals[i] - y_vals[0]) / root;
        const cplx dc = kI * y_derivs[i] / root;
        Vec3c val = G_Rn + c * zeta_j;
        val.z3 += y_vals[i] - G3_Rn;
        Vec3c dval = dc * zeta_j;
        dval.z3 += y_derivs[i];
        leg.samples.push_back({u, val, dval});
    }
    if (leg.nullity_residual() > 1e-9)
        throw BranchInconsistent("build_h_arc: sampled nullity residual too large");
    return leg;
}

Vec3c GeneralizedNullCurve::value_on_piece(size_t i, cplx z) const {
    const GNCPiece& p = pieces.at(i);
    return p.rep.value(z) + p.shift;
}

void GeneralizedNullCurve::validate(double leg_null_tol, double attach_tol) const {
    for (const auto& leg : legs) {
        if (leg.curve.samples.size() < 2)
            throw DegenerateInput("generalized curve: leg with too few samples");
        if (leg.curve.nullity_residual() > leg_null_tol)
            throw DegenerateInput("generalized curve: leg tangent not null at a sample");
        if (!(leg.curve.regularity_min() > 0.0))
            throw DegenerateInput("generalized curve: leg tangent vanishes at a sample");
        for (int end = 0; end < 2; ++end) {
            const cplx z = leg.arc.eval(end == 0 ? 0.0 : 1.0);
            const Vec3c leg_val =
                end == 0 ? leg.curve.samples.front().value : leg.curve.samples.back().value;
            for (size_t i = 0; i < pieces.size(); ++i) {
                if (!pieces[i].region.contains(z, 1e-9)) continue;
                const Vec3c piece_val = value_on_piece(i, z);
                if (norm(piece_val - leg_val) > attach_tol * (1.0 + norm(piece_val)))
                    throw DegenerateInput("generalized curve: leg detaches from its piece");
            }
        }
    }
}

WeierstrassData enneper_data(double radius) {
    return phi_from_spinor(Laurent::monomial(1), Laurent::constant(1.0),
                           CompactRegion::disk(0.0, radius));
}

WeierstrassData enneper2_data(double radius) {
    return phi_from_spinor(Laurent::monomial(2), Laurent::constant(1.0),
                           CompactRegion::disk(0.0, radius));
}

} // namespace nullprop
