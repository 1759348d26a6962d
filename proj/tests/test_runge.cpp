#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nullprop/runge.hpp"

using namespace nullprop;

namespace {

constexpr cplx kI{0.0, 1.0};

GeneralizedNullCurve plain_curve(const WeierstrassData& data, const Vec3c& shift = {}) {
    GeneralizedNullCurve G;
    NullCurveRep rep = integrate(data, data.domain.center, Vec3c{});
    rep = translate(rep, shift);
    G.pieces.push_back({data.domain, rep, Vec3c{}});
    return G;
}

AdmissibleSet set_of(const CompactRegion& region) {
    AdmissibleSet S;
    S.regions.push_back(region);
    if (region.kind == CompactRegion::Kind::annulus) S.puncture = region.center;
    return S;
}

// translated Enneper on disk(1) with three half-line spurs out to disk(2)
std::pair<GeneralizedNullCurve, AdmissibleSet> spur_composite(double t_end) {
    const CompactRegion M = CompactRegion::disk(0.0, 1.0);
    const CompactRegion V = CompactRegion::disk(0.0, 2.0);
    NullCurveRep F = integrate(enneper_data(), 0.0, Vec3c{});
    F = translate(F, Vec3c{8.0, 0.0, 0.0});

    const PhaseSet Z = PhaseSet::from_turns({0.0});
    auto values = [&](cplx z) {
        const Vec3c v = F.value(z);
        return Vec2c{v.z1, v.z2};
    };
    const BoundaryPartition part = partition_boundary(values, M, Z, 1.0);
    const AdmissibleSet S = attach_spurs(M, V, part);

    GeneralizedNullCurve G;
    G.pieces.push_back({M, F, Vec3c{}});
    for (const auto& arc : S.arcs) {
        GNCLeg leg;
        leg.arc = arc;
        const cplx Q = arc.eval(0.0);
        auto jet = [&F, arc](double u) { return F.phi(arc.eval(u)) * arc.deriv(u); };
        leg.curve = build_blended_spur(F.value(Q), jet, t_end);
        G.legs.push_back(leg);
    }
    G.validate();
    return {G, S};
}

} // namespace

TEST_CASE("fit_spinor round-trips Enneper exactly") {
    const GeneralizedNullCurve G = plain_curve(enneper_data());
    const std::vector<FitSample> samples = collect_samples(G, 1.0);
    auto [g, eta] = fit_spinor(samples, CompactRegion::disk(0.0, 2.0), 4);
    CHECK(std::abs(g.coeff(1) - 1.0) < 1e-10);
    for (int k : {0, 2, 3, 4}) CHECK(std::abs(g.coeff(k)) < 1e-10);
    CHECK(std::abs(eta.coeff(0) - 1.0) < 1e-10);
    for (int k = 1; k <= 4; ++k) CHECK(std::abs(eta.coeff(k)) < 1e-10);
}

TEST_CASE("fit_spinor recovers the flat family") {
    const WeierstrassData flat = phi_from_spinor(Laurent::constant(0.0), Laurent::constant(1.0),
                                                 CompactRegion::disk(0.0, 1.0));
    const GeneralizedNullCurve G = plain_curve(flat);
    const std::vector<FitSample> samples = collect_samples(G, 1.0);
    auto [g, eta] = fit_spinor(samples, CompactRegion::disk(0.0, 2.0), 4);
    CHECK(g.max_abs_coeff() < 1e-10);
    CHECK(std::abs(eta.coeff(0) - 1.0) < 1e-10);
}

TEST_CASE("approximate is a fixed point on exact null curves") {
    ApproxRequest req;
    req.G = plain_curve(enneper_data());
    req.S = set_of(CompactRegion::disk(0.0, 1.0));
    req.W = CompactRegion::disk(0.0, 2.0);
    req.epsilon = 1e-8;
    auto [H, report] = approximate(req);
    CHECK(report.achieved_c1 < 1e-8);
    CHECK(report.null_residual < 1e-12);
    CHECK(norm(H.value(0.5) - req.G.pieces[0].rep.value(0.5)) < 1e-9);
}

TEST_CASE("low caps report honest residuals and errors decrease with cap") {
    // a target needing genuine degree: g = z + z^3/2
    Laurent g = Laurent::monomial(1);
    g.set_coeff(3, 0.5);
    const WeierstrassData data =
        phi_from_spinor(g, Laurent::constant(1.0), CompactRegion::disk(0.0, 1.0));
    ApproxRequest req;
    req.G = plain_curve(data);
    req.S = set_of(CompactRegion::disk(0.0, 1.0));
    req.W = CompactRegion::disk(0.0, 2.0);
    req.report_only = true;
    req.degree_schedule = {1};
    auto [H1, rep1] = approximate(req);
    req.degree_schedule = {5};
    auto [H5, rep5] = approximate(req);
    CHECK(rep1.achieved_c1 > 1e-2);
    CHECK(rep5.achieved_c1 < 1e-10);
}

TEST_CASE("spur composite approximated through the degree schedule") {
    auto [G, S] = spur_composite(16.0);
    ApproxRequest req;
    req.G = G;
    req.S = S;
    req.W = CompactRegion::disk(0.0, 2.0);
    req.report_only = true;
    std::vector<double> errs;
    for (int cap : {8, 16, 32, 64, 128}) {
        req.degree_schedule = {cap};
        auto [H, rep] = approximate(req);
        errs.push_back(rep.achieved_c1);
        CHECK(rep.null_residual < 1e-12);
    }
    for (size_t i = 1; i < errs.size(); ++i) CHECK(errs[i] <= errs[i - 1] * 1.05);
    CHECK(errs.back() < 1e-3);
    MESSAGE("spur composite errors: ", errs[0], " ", errs[1], " ", errs[2], " ", errs[3], " ",
            errs[4]);
}

TEST_CASE("fix_third preserves the third coordinate exactly") {
    const GeneralizedNullCurve G = plain_curve(enneper_data());
    ApproxRequest req;
    req.G = G;
    req.S = set_of(CompactRegion::disk(0.0, 1.0));
    req.W = CompactRegion::disk(0.0, 2.0);
    req.epsilon = 1e-6;
    req.fix_third = true;
    auto [H, report] = approximate(req);
    CHECK(report.achieved_c1 < 1e-6);
    // the third component of the derivative is the same function object
    for (int k = 0; k < 64; ++k) {
        const cplx z = 0.97 * std::polar(1.0, 2 * M_PI * k / 64.0 + 0.1);
        const cplx got = H.phi(z).z3;
        const cplx want = G.pieces[0].rep.phi(z).z3;
        CHECK(got == want);
    }
    // and values integrate to the same third coordinate
    for (int k = 0; k < 16; ++k) {
        const cplx z = 0.9 * std::polar(1.0, 2 * M_PI * k / 16.0);
        CHECK(std::abs(H.value(z).z3 - G.pieces[0].rep.value(z).z3) < 1e-9);
    }
}

TEST_CASE("fix_third rejects vanishing third differential on arcs") {
    GeneralizedNullCurve G = plain_curve(enneper_data());
    GNCLeg leg;
    leg.arc.coeffs = {cplx(1.0), cplx(1.0)};
    leg.arc.start_kind = AnalyticArc::EndKind::region_boundary;
    // a spur whose direction has F1^2 + F2^2 = 0: third tangent vanishes
    const Vec3c FQ = G.pieces[0].rep.value(1.0);
    SampledLeg s;
    const Vec3c dir{1.0, kI, 0.0};  // null with zero third component
    for (int i = 0; i < 33; ++i) {
        const double u = i / 32.0;
        s.samples.push_back({u, FQ + u * dir, dir});
    }
    leg.curve = s;
    G.legs.push_back(leg);
    ApproxRequest req;
    req.G = G;
    req.S = set_of(CompactRegion::disk(0.0, 1.0));
    req.S.arcs.push_back(leg.arc);
    req.W = CompactRegion::disk(0.0, 2.0);
    req.fix_third = true;
    CHECK_THROWS_AS(approximate(req), ProvisoViolated);
}

TEST_CASE("annulus fit honors residue constraints") {
    // target: g = 1/z, eta = z^2 (residue-free by parity)
    const CompactRegion A = CompactRegion::annulus(0.0, 0.5, 2.0);
    const WeierstrassData data = phi_from_spinor(Laurent::monomial(-1), Laurent::monomial(2), A);
    ApproxRequest req;
    req.G = plain_curve(data);
    req.S = set_of(A);
    req.W = CompactRegion::annulus(0.0, 0.4, 2.5);
    req.epsilon = 1e-7;
    auto [H, report] = approximate(req);
    CHECK(report.achieved_c1 < 1e-7);
    const LaurentTriple t = H.data.phi_laurent();
    for (const Laurent* s : {&t.c1, &t.c2, &t.c3})
        CHECK(std::abs(s->residue()) < 1e-10 * std::max(1.0, s->max_abs_coeff()));
    CHECK(norm(flux_periods(H, 0.0, 1.0).period) < 1e-8);
}

TEST_CASE("fix_third on an annulus with winding and periods") {
    // P = exp(alpha / z^2), phi3 = z^2 + c: all cycle periods vanish by parity
    const CompactRegion A = CompactRegion::annulus(0.0, 0.6, 1.8);
    Laurent L(0.0, -2, {cplx(0.35, 0.1)});
    const auto P = std::make_shared<ExpWFun>(L, 0);
    Laurent p3 = Laurent::monomial(2, 1.0);
    p3.set_coeff(0, cplx(0.4, 0.0));
    const WeierstrassData data =
        WeierstrassData::logpair_data(P, make_laurent_fun(p3), false, A);
    ApproxRequest req;
    req.G = plain_curve(data);
    req.S = set_of(A);
    req.W = CompactRegion::annulus(0.0, 0.55, 2.0);
    req.epsilon = 5e-6;
    req.fix_third = true;
    auto [H, report] = approximate(req);
    CHECK(report.achieved_c1 < 5e-6);
    CHECK(norm(flux_periods(H, 0.0, 1.0, 4096).period) < 1e-8);
    // third coordinate exact
    const cplx z{1.1, 0.3};
    CHECK(H.phi(z).z3 == req.G.pieces[0].rep.phi(z).z3);
}
