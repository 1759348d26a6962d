#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "nullprop/nullcurve.hpp"

using namespace nullprop;

namespace {
constexpr cplx kI{0.0, 1.0};
std::mt19937_64 rng(424242);
}

TEST_CASE("spinor data: Enneper identity holds coefficientwise") {
    const WeierstrassData d = enneper_data();
    const LaurentTriple t = d.phi_laurent();
    // ((1 - z^2)/2, i (1 + z^2)/2, z)
    CHECK(std::abs(t.c1.coeff(0) - 0.5) < 1e-15);
    CHECK(std::abs(t.c1.coeff(2) + 0.5) < 1e-15);
    CHECK(std::abs(t.c2.coeff(0) - kI * 0.5) < 1e-15);
    CHECK(std::abs(t.c2.coeff(2) - kI * 0.5) < 1e-15);
    CHECK(std::abs(t.c3.coeff(1) - 1.0) < 1e-15);
    CHECK(null_identity_poly(t).max_abs_coeff() < 1e-15);
    CHECK(d.null_residual() < 1e-12);
}

TEST_CASE("flat spinor data and annulus residue freedom") {
    const WeierstrassData flat = phi_from_spinor(Laurent::constant(0.0), Laurent::constant(1.0),
                                                 CompactRegion::disk(0.0, 1.0));
    const LaurentTriple t = flat.phi_laurent();
    CHECK(std::abs(t.c1.coeff(0) - 0.5) < 1e-15);
    CHECK(std::abs(t.c2.coeff(0) - kI * 0.5) < 1e-15);
    CHECK(t.c3.max_abs_coeff() < 1e-15);

    // g = 1/z, eta = z^2 on an annulus: phi = ((z^2 - 1)/2, i (z^2 + 1)/2, z)
    const WeierstrassData ann = phi_from_spinor(Laurent::monomial(-1), Laurent::monomial(2),
                                                CompactRegion::annulus(0.0, 0.5, 2.0));
    const LaurentTriple ta = ann.phi_laurent();
    for (const Laurent* s : {&ta.c1, &ta.c2, &ta.c3}) CHECK(std::abs(s->residue()) < 1e-15);
    CHECK_NOTHROW(ann.validate());
    CHECK_THROWS_AS(phi_from_spinor(Laurent::monomial(1), Laurent::constant(0.0),
                                    CompactRegion::disk(0.0, 1.0)),
                    ZeroData);
}

TEST_CASE("integrate Enneper and evaluate the closed form") {
    const NullCurveRep F = integrate(enneper_data(), 0.0, Vec3c{});
    // F = (z/2 - z^3/6, i(z/2 + z^3/6), z^2/2)
    CHECK(norm(F.value(0.0)) < 1e-15);
    const Vec3c at1 = evaluate(F, 1.0);
    CHECK(std::abs(at1.z1 - cplx(1.0 / 3.0)) < 1e-14);
    CHECK(std::abs(at1.z2 - kI * (2.0 / 3.0)) < 1e-14);
    CHECK(std::abs(at1.z3 - 0.5) < 1e-14);
    // dF reproduces phi on samples
    for (int k = 0; k < 32; ++k) {
        const cplx z = 0.9 * std::polar(1.0, 2 * M_PI * k / 32.0);
        CHECK(norm(F.F0.eval_deriv(z) - F.data.phi(z)) < 1e-12);
    }
    CHECK_THROWS_AS(evaluate(F, cplx(2.0, 0.0)), OutOfDomain);

    const WeierstrassData cdata = WeierstrassData::direct_data(
        {Laurent::constant(1.0), Laurent::constant(kI), Laurent::constant(0.0)},
        CompactRegion::disk(0.0, 1.0));
    const NullCurveRep C = integrate(cdata, 0.0, Vec3c{5.0, 0.0, 0.0});
    const Vec3c v = C.value(0.5);
    CHECK(std::abs(v.z1 - 5.5) < 1e-15);
    CHECK(std::abs(v.z2 - kI * 0.5) < 1e-15);

    WeierstrassData bad = cdata;
    bad.phi_direct.c1 = Laurent::monomial(-1, 1.0);
    bad.domain = CompactRegion::annulus(0.0, 0.25, 1.0);
    CHECK_THROWS_AS(integrate(bad, 0.5, Vec3c{}), NonExact);
}

TEST_CASE("associated surface family") {
    const NullCurveRep F = integrate(enneper_data(), 0.0, Vec3c{});
    const auto x1 = associated_surface(F, UnitPhase(cplx(1, 0)), 1.0);
    CHECK(x1[0] == doctest::Approx(1.0 / 3.0));
    CHECK(x1[1] == doctest::Approx(0.0));
    CHECK(x1[2] == doctest::Approx(0.5));
    // conjugate surface is the phase -i
    const auto xs = associated_surface(F, UnitPhase(cplx(0, -1)), 0.7);
    const Vec3c val = F.value(0.7);
    CHECK(xs[0] == doctest::Approx(std::real(-kI * val.z1)));
    CHECK(xs[2] == doctest::Approx(std::real(-kI * val.z3)));
}

TEST_CASE("metric density and associated-family isometry") {
    const NullCurveRep F = integrate(enneper_data(), 0.0, Vec3c{});
    CHECK(metric_density(F, 0.0) == doctest::Approx(0.25));
    const WeierstrassData flat = phi_from_spinor(Laurent::constant(0.0), Laurent::constant(1.0),
                                                 CompactRegion::disk(0.0, 1.0));
    const NullCurveRep Fl = integrate(flat, 0.0, Vec3c{});
    CHECK(metric_density(Fl, 0.3) == doctest::Approx(0.25));
    CHECK(metric_density(Fl, cplx(0.1, -0.4)) == doctest::Approx(0.25));

    // |v| = 1 leaves the density invariant exactly
    const SampleGrid grid = area_grid(F.domain());
    for (int k = 0; k < 16; ++k) {
        const UnitPhase v = UnitPhase::from_turns(k / 16.0 + 0.013);
        double worst = 0.0;
        for (const auto& p : grid.points) {
            const Vec3c w = F.phi(p.z) * v.v;
            const double dv = 0.5 * std::real(herm_form(w, w));
            const double d0 = F.metric_density(p.z);
            worst = std::max(worst, std::abs(dv - d0) / std::max(d0, 1e-300));
        }
        CHECK(worst < 1e-14);
    }
}

TEST_CASE("flux periods vanish for exact data and catch injected residues") {
    const NullCurveRep F = integrate(enneper_data(), 0.0, Vec3c{});
    const FluxReport r = flux_periods(F, 0.0, 0.8);
    CHECK(norm(r.period) < 1e-10);

    // annulus data, residue-free
    const WeierstrassData ann = phi_from_spinor(Laurent::monomial(-1), Laurent::monomial(2),
                                                CompactRegion::annulus(0.0, 0.5, 2.0));
    const NullCurveRep Fa = integrate(ann, 1.0, Vec3c{});
    CHECK(norm(flux_periods(Fa, 0.0, 1.0).period) < 1e-8);

    // negative control: inject c z^-1 into one component and expect 2 pi i c
    const cplx c{0.3, -0.2};
    WeierstrassData bad = WeierstrassData::direct_data(
        {Laurent::monomial(-1, c), Laurent::constant(0.0), Laurent::constant(0.0)},
        CompactRegion::annulus(0.0, 0.5, 2.0));
    NullCurveRep Fb;
    Fb.data = bad;
    const Vec3c p = flux_periods(Fb, 0.0, 1.0).period;
    CHECK(std::abs(p.z1 - 2.0 * M_PI * kI * c) < 1e-8);
}

TEST_CASE("translate shifts values and the projection bound") {
    const NullCurveRep F = integrate(enneper_data(), 0.0, Vec3c{});
    CHECK(norm(translate(F, Vec3c{}).value(0.5) - F.value(0.5)) < 1e-15);

    const PhaseSet Z = PhaseSet::from_turns({0.0});
    const NullCurveRep G = translate(F, Vec3c{10.0, 0.0, 0.0});
    const SampleGrid bd = boundary_grid(F.domain());
    const double r = 2.0;
    for (const auto& pt : bd.points) {
        // |F| < |v^phase| - r pointwise gives mini > r after translation
        CHECK(norm(F.value(pt.z)) < 10.0 - r);
        CHECK(mini_Z(Vec2c{G.value(pt.z).z1, G.value(pt.z).z2}, Z) > r);
    }
    // phase-dependence: translating along (10i, 0, 0) does nothing for phase 1
    const NullCurveRep Gi = translate(F, Vec3c{cplx(0.0, 10.0), 0.0, 0.0});
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& pt : bd.points)
        worst = std::min(worst, mini_Z(Vec2c{Gi.value(pt.z).z1, Gi.value(pt.z).z2}, Z));
    CHECK(worst < r);
}

TEST_CASE("rotate_curve preserves nullity and round trips") {
    const NullCurveRep F = integrate(enneper_data(), 0.0, Vec3c{0.5, 0.0, 1.0});
    CHECK(norm(rotate_curve(Mat3c::identity(), F).value(0.3) - F.value(0.3)) < 1e-14);

    const Vec3c e{cplx(1, 1), cplx(0.2, -0.3), cplx(0.5, 0.1)};
    const Mat3c A = make_rotation(e);
    const NullCurveRep G = rotate_curve(A, F);
    CHECK(G.data.null_residual() < 1e-12);
    const NullCurveRep back = rotate_curve(A.inverse_orthogonal(), G);
    const LaurentTriple tf = F.data.phi_laurent();
    const LaurentTriple tb = back.data.phi_laurent();
    for (int k = 0; k <= 2; ++k) {
        CHECK(std::abs(tf.c1.coeff(k) - tb.c1.coeff(k)) < 1e-12);
        CHECK(std::abs(tf.c2.coeff(k) - tb.c2.coeff(k)) < 1e-12);
        CHECK(std::abs(tf.c3.coeff(k) - tb.c3.coeff(k)) < 1e-12);
    }
}

TEST_CASE("half-line spur algebra") {
    const SampledLeg leg = build_halfline_spur({1.0, 0.0, 0.0}, 3.0, 33);
    // d(t) = (t, 0, (t-1) i), tangent (1, 0, i) null
    CHECK(leg.nullity_residual() < 1e-15);
    const Vec3c last = leg.samples.back().value;
    CHECK(std::abs(last.z1 - 3.0) < 1e-14);
    CHECK(std::abs(last.z3 - kI * 2.0) < 1e-14);

    // ray property d(t)^v = t F^v(Q) for sampled phases
    const Vec3c FQ{cplx(1.2, 0.4), cplx(-0.7, 0.9), cplx(0.1, 0.2)};
    const SampledLeg ray = build_halfline_spur(FQ, 5.0, 33);
    for (int k = 0; k < 8; ++k) {
        const UnitPhase v = UnitPhase::from_turns(k / 8.0 + 0.05);
        const Vec2 base = phase_projection(FQ, v);
        for (const auto& s : ray.samples) {
            const double t = 1.0 + s.u * 4.0;
            const Vec2 proj = phase_projection(s.value, v);
            CHECK((proj - base * t).norm() < 1e-12 * t);
        }
    }
    CHECK_THROWS_AS(build_halfline_spur({0.0, 0.0, 5.0}, 3.0), DegeneratePoint);
}

TEST_CASE("make_zeta_j identity") {
    const Vec3c zeta{1.0, kI, 0.0};
    const Vec3c zstar{1.0, -kI, 0.0};
    const Vec3c zj = make_zeta_j(zeta, zstar, 2.0);
    CHECK(std::abs(zj.z1) < 1e-15);
    CHECK(std::abs(zj.z2 - kI * 2.0) < 1e-15);
    CHECK(std::abs(sym_form(zj, zj) + 4.0) < 1e-15);

    // a -> 0 recovers zeta
    const Vec3c z0 = make_zeta_j(zeta, zstar, 1e-8);
    CHECK(norm(z0 - zeta) < 1e-15);

    CHECK_THROWS_AS(make_zeta_j(zeta, zeta, 1.0), DegeneratePair);

    std::uniform_real_distribution<double> d(-2, 2);
    for (int k = 0; k < 100; ++k) {
        const cplx a{d(rng), d(rng)};
        if (std::abs(a) < 1e-3) continue;
        // random null pair in the horizontal plane with (zeta, zeta*) != 0
        const cplx s1{d(rng), d(rng)}, s2{d(rng), d(rng)};
        if (std::abs(s1) < 0.1 || std::abs(s2) < 0.1) continue;
        const Vec3c ze = s1 * Vec3c{1.0, kI, 0.0};
        const Vec3c zs = s2 * Vec3c{1.0, -kI, 0.0};
        const Vec3c out = make_zeta_j(ze, zs, a);
        CHECK(std::abs(sym_form(out, out) + a * a) <= 1e-12 * std::max(1.0, std::norm(a)));
    }
}

TEST_CASE("h-arc nullity across random draws") {
    std::uniform_real_distribution<double> d(-1.5, 1.5);
    int accepted = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const cplx s1{d(rng), d(rng)}, s2{d(rng), d(rng)};
        if (std::abs(s1) < 0.1 || std::abs(s2) < 0.1) continue;
        const Vec3c ze = s1 * Vec3c{1.0, kI, 0.0};
        const Vec3c zs = (2.0 / sym_form(s1 * Vec3c{1.0, kI, 0.0}, s2 * Vec3c{1.0, -kI, 0.0})) *
                         s2 * Vec3c{1.0, -kI, 0.0};
        // random polynomial Y with Y'(0) != 0
        const cplx c1{d(rng), d(rng)}, c2{d(rng), d(rng)}, c3{d(rng), d(rng)};
        if (std::abs(c1) < 0.05) continue;
        const Vec3c GR{d(rng), d(rng), d(rng)};
        const int n = 200;
        std::vector<cplx> yv(n), yd(n);
        for (int i = 0; i < n; ++i) {
            const double u = static_cast<double>(i) / (n - 1);
            // Y(0) matches the third coordinate at the attachment point
            yv[static_cast<size_t>(i)] = GR.z3 + c1 * u + c2 * u * u + c3 * u * u * u;
            yd[static_cast<size_t>(i)] = c1 + 2.0 * c2 * u + 3.0 * c3 * u * u;
        }
        const Vec3c zj = make_zeta_j(ze, zs, c1);
        const SampledLeg leg = build_h_arc(GR, GR.z3, yv, yd, zj);
        CHECK(leg.nullity_residual() < 1e-10);
        CHECK(norm(leg.samples.front().value - GR) < 1e-13);
        ++accepted;
    }
    CHECK(accepted > 50);
}

TEST_CASE("h-arc worked example on both branches") {
    // Y(u) = u, zeta_j = (0, 2i, 0), (zeta_j, zeta_j) = -4
    const int n = 65;
    std::vector<cplx> yv(n), yd(n, 1.0);
    for (int i = 0; i < n; ++i) yv[static_cast<size_t>(i)] = static_cast<double>(i) / (n - 1);
    const Vec3c zj{0.0, kI * 2.0, 0.0};
    const Vec3c GR{1.0, 2.0, 3.0};
    // both explicit branches are null here since zeta_j is horizontal
    const SampledLeg pr = build_h_arc(GR, GR.z3, yv, yd, zj, SqrtBranch::principal);
    const SampledLeg fl = build_h_arc(GR, GR.z3, yv, yd, zj, SqrtBranch::flipped);
    CHECK(pr.nullity_residual() < 1e-15);
    CHECK(fl.nullity_residual() < 1e-15);
    // but only one of them tracks +zeta_j; automatic picks it
    const SampledLeg au = build_h_arc(GR, GR.z3, yv, yd, zj, SqrtBranch::automatic);
    const Vec3c step = au.samples.back().value - au.samples.front().value;
    CHECK(std::real(step.z2 / zj.z2) > 0.0);
    // degenerate zeta_j rejected
    CHECK_THROWS_AS(build_h_arc(GR, GR.z3, yv, yd, Vec3c{0, 0, 0}), DegenerateInput);
}

TEST_CASE("flatness score separates flat from non-flat") {
    const NullCurveRep enneper = integrate(enneper_data(), 0.0, Vec3c{});
    CHECK(flatness_score(enneper) > 1e-3);
    const WeierstrassData flat = phi_from_spinor(Laurent::constant(0.0), Laurent::constant(1.0),
                                                 CompactRegion::disk(0.0, 1.0));
    CHECK(flatness_score(integrate(flat, 0.0, Vec3c{})) < 1e-12);
}

TEST_CASE("generalized curve validation") {
    GeneralizedNullCurve G;
    G.pieces.push_back({CompactRegion::disk(0.0, 1.0), integrate(enneper_data(), 0.0, Vec3c{}),
                        Vec3c{}});
    // attach a spur at Q = 1 (value F(1))
    const Vec3c FQ = G.pieces[0].rep.value(1.0);
    GNCLeg leg;
    leg.arc.coeffs = {cplx(1.0), cplx(1.0)};  // radial [1, 2]
    leg.arc.start_kind = AnalyticArc::EndKind::region_boundary;
    leg.curve = build_halfline_spur(FQ, 3.0);
    G.legs.push_back(leg);
    CHECK_NOTHROW(G.validate());

    // break continuity
    G.legs[0].curve.samples.front().value.z1 += 1.0;
    CHECK_THROWS_AS(G.validate(), DegenerateInput);
}
