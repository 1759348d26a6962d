#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "nullprop/plane.hpp"

using namespace nullprop;

namespace {

std::mt19937_64 rng(777001);

// brute-force best clearance over n_dir line angles
double brute_best_clearance(std::span<const Vec2> pts, int n_dir = 10000) {
    double best = -1.0;
    for (int i = 0; i < n_dir; ++i) {
        const VectorialLine L = VectorialLine::from_angle(M_PI * i / n_dir);
        double worst = std::numeric_limits<double>::infinity();
        for (const auto& p : pts) worst = std::min(worst, line_clearance(L, p));
        best = std::max(best, worst);
    }
    return best;
}

} // namespace

TEST_CASE("phase projection basics") {
    const Vec2c u{1.0, cplx(0, 1)};
    const Vec2 p1 = phase_projection(u, UnitPhase(cplx(1, 0)));
    CHECK(p1.x == doctest::Approx(1.0));
    CHECK(p1.y == doctest::Approx(0.0));
    const Vec2 p2 = phase_projection(u, UnitPhase(cplx(0, 1)));
    CHECK(p2.x == doctest::Approx(0.0));
    CHECK(p2.y == doctest::Approx(-1.0));
    const Vec2 p3 = phase_projection(Vec2c{0.0, 0.0}, UnitPhase(cplx(0, 1)));
    CHECK(p3.norm() == doctest::Approx(0.0));
}

TEST_CASE("mini_Z examples and monotonicity") {
    const Vec2c u{1.0, cplx(0, 1)};
    PhaseSet Z1 = PhaseSet::from_turns({0.0});
    CHECK(mini_Z(u, Z1) == doctest::Approx(1.0));
    PhaseSet Z2 = PhaseSet::from_turns({0.0, 0.25});
    CHECK(mini_Z(u, Z2) == doctest::Approx(1.0));
    CHECK(mini_Z(Vec2c{0.0, 0.0}, Z1) == doctest::Approx(0.0));
    CHECK_THROWS_AS(mini_Z(u, PhaseSet{}), EmptyPhaseSet);

    std::uniform_real_distribution<double> d(-3, 3);
    for (int k = 0; k < 200; ++k) {
        const Vec2c x{cplx(d(rng), d(rng)), cplx(d(rng), d(rng))};
        const PhaseSet Za = PhaseSet::from_turns({0.1, 0.4});
        const PhaseSet Zb = Za.with(UnitPhase::from_turns(0.7));
        CHECK(mini_Z(x, Zb) <= mini_Z(x, Za) + 1e-14);
    }
}

TEST_CASE("phase projection is R-linear in u") {
    std::uniform_real_distribution<double> d(-3, 3);
    for (int k = 0; k < 100; ++k) {
        const Vec2c a{cplx(d(rng), d(rng)), cplx(d(rng), d(rng))};
        const Vec2c b{cplx(d(rng), d(rng)), cplx(d(rng), d(rng))};
        const double s = d(rng), t = d(rng);
        const UnitPhase v = UnitPhase::from_turns(d(rng));
        const Vec2 lhs = phase_projection(a * s + b * t, v);
        const Vec2 rhs = phase_projection(a, v) * s + phase_projection(b, v) * t;
        CHECK((lhs - rhs).norm() < 1e-12);
    }
}

TEST_CASE("line clearance formula") {
    CHECK(line_clearance(VectorialLine::from_angle(M_PI / 2), {2, 0}) == doctest::Approx(2.0));
    CHECK(line_clearance(VectorialLine::from_angle(0.0), {2, 0}) == doctest::Approx(0.0));
    CHECK(line_clearance(VectorialLine::from_angle(M_PI / 4), {2, 0}) ==
          doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("select_line single and double point cases") {
    {
        const Vec2 pts[] = {{2, 0}};
        const VectorialLine L = select_line(pts, 1.0);
        CHECK(std::abs(L.angle - M_PI / 2) < 1e-9);
        CHECK(line_clearance(L, pts[0]) == doctest::Approx(2.0));
    }
    {
        const Vec2 pts[] = {{2, 0}, {0, 2}};
        const VectorialLine L = select_line(pts, 1.0);
        CHECK(std::abs(L.angle - M_PI / 4) < 1e-9);
        for (const auto& p : pts)
            CHECK(line_clearance(L, p) == doctest::Approx(std::sqrt(2.0)));
    }
    {
        const Vec2 pts[] = {{0.5, 0}};
        CHECK_THROWS_AS(select_line(pts, 1.0), PointInsideBall);
    }
}

TEST_CASE("select_line antipodal adversary") {
    const Vec2 pts[] = {{1.0 + 1e-6, 0.0}};
    const VectorialLine L = select_line(pts, 1.0);
    CHECK(std::abs(L.angle - M_PI / 2) < 1e-3);
}

TEST_CASE("select_line random property suite against brute force") {
    std::uniform_int_distribution<int> nd(1, 6);
    std::uniform_real_distribution<double> rd(1.0 + 1e-9, 10.0), ad(0.0, 2 * M_PI);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = nd(rng);
        std::vector<Vec2> pts;
        for (int j = 0; j < n; ++j) {
            const double r = rd(rng), a = ad(rng);
            pts.push_back({r * std::cos(a), r * std::sin(a)});
        }
        const VectorialLine L = select_line(pts, 1.0);
        double worst = std::numeric_limits<double>::infinity();
        for (const auto& p : pts) worst = std::min(worst, line_clearance(L, p));
        CHECK(worst > 1.0 / n);
        // brute force agrees a feasible line exists
        CHECK(brute_best_clearance(pts, 2000) > 1.0 / n);
    }
}

TEST_CASE("stability radius") {
    {
        const Vec2 pts[] = {{2, 0}};
        CHECK(stability_radius(pts, VectorialLine::from_angle(M_PI / 2), 1.0) ==
              doctest::Approx(1.0));
    }
    {
        const Vec2 pts[] = {{2, 0}, {0, 2}};
        CHECK(stability_radius(pts, VectorialLine::from_angle(M_PI / 4), 0.5) ==
              doctest::Approx(std::sqrt(2.0) - 0.5));
    }
    {
        const Vec2 pts[] = {{2, 0}};
        CHECK_THROWS_AS(stability_radius(pts, VectorialLine::from_angle(0.0), 1.0), NoMargin);
    }
}

TEST_CASE("sigma membership") {
    const PhaseSet Z = PhaseSet::from_turns({0.0});
    CHECK(sigma_contains(Vec2c{2.0, 0.0}, Z, 1.0));
    CHECK_FALSE(sigma_contains(Vec2c{0.5, 0.0}, Z, 1.0));
    CHECK_FALSE(sigma_contains(Vec2c{cplx(0, 2), 0.0}, Z, 1.0));
}

TEST_CASE("sigma_null_path crosses the forbidden tube") {
    const PhaseSet Z = PhaseSet::from_turns({0.0});
    const SigmaPoint v{Vec2c{2.0, 0.0}, 0.0};
    const SigmaPoint w{Vec2c{-2.0, 0.0}, 0.0};
    const SampledPath path = sigma_null_path(v, w, Z, 1.0);
    REQUIRE(path.samples.size() > 4);
    CHECK(norm(path.samples.front().point - Vec3c{2.0, 0.0, 0.0}) < 1e-12);
    CHECK(norm(path.samples.back().point - Vec3c{-2.0, 0.0, 0.0}) < 1e-8);
    for (const auto& s : path.samples) {
        CHECK(sigma_contains(Vec2c{s.point.z1, s.point.z2}, Z, 1.0));
        CHECK(is_null(s.tangent, 1e-9));
    }
}

TEST_CASE("sigma_null_path equal endpoints gives a null loop") {
    const PhaseSet Z = PhaseSet::from_turns({0.0});
    const SigmaPoint v{Vec2c{2.0, 0.0}, cplx(0.5, 0.25)};
    const SampledPath path = sigma_null_path(v, v, Z, 1.0);
    REQUIRE(path.samples.size() >= 2);
    CHECK(norm(path.samples.front().point - path.samples.back().point) < 1e-8);
    for (const auto& s : path.samples) CHECK(is_null(s.tangent, 1e-9));
}

TEST_CASE("sigma_null_path rejects bad endpoints") {
    const PhaseSet Z = PhaseSet::from_turns({0.0});
    const SigmaPoint v{Vec2c{2.0, 0.0}, 0.0};
    const SigmaPoint bad{Vec2c{0.5, 0.0}, 0.0};
    CHECK_THROWS_AS(sigma_null_path(v, bad, Z, 1.0), NotInSigma);
}

TEST_CASE("sigma_null_path connects random pairs with mismatched thirds") {
    const PhaseSet Z = PhaseSet::from_turns({0.0, 0.33});
    std::uniform_real_distribution<double> d(-4, 4), e(-2, 2);
    int done = 0;
    for (int trial = 0; trial < 40 && done < 12; ++trial) {
        const Vec2c a{cplx(d(rng), e(rng)), cplx(d(rng), e(rng))};
        const Vec2c b{cplx(d(rng), e(rng)), cplx(d(rng), e(rng))};
        if (!sigma_contains(a, Z, 0.5) || !sigma_contains(b, Z, 0.5)) continue;
        const SigmaPoint v{a, cplx(e(rng), e(rng))};
        const SigmaPoint w{b, cplx(e(rng), e(rng))};
        const SampledPath path = sigma_null_path(v, w, Z, 0.5);
        for (const auto& s : path.samples) {
            CHECK(sigma_contains(Vec2c{s.point.z1, s.point.z2}, Z, 0.5));
            CHECK(is_null(s.tangent, 1e-9));
        }
        const Vec3c last = path.samples.back().point;
        CHECK(norm(last - Vec3c{b.z1, b.z2, w.extra}) < 1e-7 * (1 + norm(last)));
        ++done;
    }
    CHECK(done >= 12);
}
