#include "nullprop/domains.hpp"

#include <algorithm>
#include <cmath>

namespace nullprop {

namespace {

double wrap_angle(double th) {
    th = std::fmod(th, 2.0 * M_PI);
    if (th < 0) th += 2.0 * M_PI;
    return th;
}

// is angle th inside [lo, hi] where the interval may wrap?
bool angle_in(double th, double lo, double hi, double tol = 0.0) {
    const double span = hi - lo;
    double d = wrap_angle(th - lo);
    return d >= -tol && d <= span + tol;
}

} // namespace

bool PolarPatch::contains_polar(double r, double th, double tol) const {
    if (r < r_lo - tol || r > r_hi + tol) return false;
    return angle_in(th, th_lo, th_hi, tol / std::max(r, 1e-12));
}

CompactRegion CompactRegion::disk(cplx center, double radius) {
    if (radius <= 0.0) throw GeometryFailure("disk needs positive radius");
    CompactRegion r;
    r.kind = Kind::disk;
    r.center = center;
    r.r_outer = radius;
    return r;
}

CompactRegion CompactRegion::annulus(cplx center, double r_inner, double r_outer) {
    if (!(0.0 < r_inner && r_inner < r_outer))
        throw GeometryFailure("annulus needs 0 < r_inner < r_outer");
    CompactRegion r;
    r.kind = Kind::annulus;
    r.center = center;
    r.r_inner = r_inner;
    r.r_outer = r_outer;
    return r;
}

CompactRegion CompactRegion::sector(cplx center, const PolarPatch& p) {
    if (!(0.0 <= p.r_lo && p.r_lo < p.r_hi && p.th_lo < p.th_hi))
        throw GeometryFailure("sector patch is degenerate");
    CompactRegion r;
    r.kind = Kind::sector;
    r.center = center;
    r.r_inner = p.r_lo;
    r.r_outer = p.r_hi;
    r.patch = p;
    return r;
}

CompactRegion CompactRegion::disk_notch(cplx center, double radius, const PolarPatch& removed) {
    CompactRegion r = disk(center, radius);
    r.kind = Kind::disk_notch;
    r.patch = removed;
    return r;
}

bool CompactRegion::contains(cplx z, double tol) const {
    const cplx w = z - center;
    const double r = std::abs(w);
    const double th = wrap_angle(std::arg(w));
    switch (kind) {
        case Kind::disk:
            return r <= r_outer + tol;
        case Kind::annulus:
            return r >= r_inner - tol && r <= r_outer + tol;
        case Kind::sector:
            return patch.contains_polar(r, th, tol);
        case Kind::disk_notch:
            if (r > r_outer + tol) return false;
            // the notch is removed as an open set; points on its edge stay in
            return !patch.contains_polar(r, th, -tol);
    }
    return false;
}

double CompactRegion::boundary_circumference() const {
    switch (kind) {
        case Kind::disk:
            return 2.0 * M_PI * r_outer;
        case Kind::annulus:
            return 2.0 * M_PI * (r_inner + r_outer);
        case Kind::sector:
            return (patch.th_hi - patch.th_lo) * (patch.r_lo + patch.r_hi) +
                   2.0 * (patch.r_hi - patch.r_lo);
        case Kind::disk_notch:
            return 2.0 * M_PI * r_outer;  // dominant circle; good enough for spacing
    }
    return 0.0;
}

cplx AnalyticArc::eval(double t) const {
    cplx v = 0.0;
    for (size_t i = coeffs.size(); i-- > 0;) v = v * t + coeffs[i];
    return v;
}

cplx AnalyticArc::deriv(double t) const {
    cplx v = 0.0;
    for (size_t i = coeffs.size(); i-- > 1;) v = v * t + coeffs[i] * static_cast<double>(i);
    return v;
}

double AnalyticArc::length(int n) const {
    double len = 0.0;
    cplx prev = eval(0.0);
    for (int i = 1; i <= n; ++i) {
        const cplx cur = eval(static_cast<double>(i) / n);
        len += std::abs(cur - prev);
        prev = cur;
    }
    return len;
}

void AnalyticArc::validate(double resolution) const {
    if (coeffs.size() < 2) throw GeometryFailure("arc must be non-constant");
    const int n = 256;
    std::vector<cplx> pts(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double t = static_cast<double>(i) / n;
        pts[static_cast<size_t>(i)] = eval(t);
        if (std::abs(deriv(t)) < resolution)
            throw GeometryFailure("arc derivative vanishes at a sample");
    }
    for (int i = 0; i <= n; ++i)
        for (int j = i + 2; j <= n; ++j)
            if (std::abs(pts[static_cast<size_t>(i)] - pts[static_cast<size_t>(j)]) < resolution &&
                !(i == 0 && j == n))
                throw GeometryFailure("arc self-intersects at sample resolution");
}

namespace {

bool regions_overlap(const CompactRegion& a, const CompactRegion& b) {
    SampleGrid ga = area_grid(a, 0.25);
    for (const auto& p : ga.points)
        if (b.contains(p.z)) return true;
    SampleGrid gb = area_grid(b, 0.25);
    for (const auto& p : gb.points)
        if (a.contains(p.z)) return true;
    return false;
}

} // namespace

void AdmissibleSet::validate() const {
    for (const auto& arc : arcs) arc.validate();

    for (size_t i = 0; i < regions.size(); ++i)
        for (size_t j = i + 1; j < regions.size(); ++j)
            if (regions_overlap(regions[i], regions[j]))
                throw GeometryFailure("admissible set: regions overlap");

    const int n_arc = 128;
    auto arc_point = [&](const AnalyticArc& a, int i) {
        return a.eval(static_cast<double>(i) / n_arc);
    };

    for (size_t i = 0; i < arcs.size(); ++i)
        for (size_t j = i + 1; j < arcs.size(); ++j) {
            double best = std::numeric_limits<double>::infinity();
            for (int a = 0; a <= n_arc; ++a)
                for (int b = 0; b <= n_arc; ++b)
                    best = std::min(best, std::abs(arc_point(arcs[i], a) - arc_point(arcs[j], b)));
            if (best < 1e-3)
                throw GeometryFailure("admissible set: arcs come closer than resolution");
        }

    for (const auto& arc : arcs) {
        for (int i = 1; i < n_arc; ++i) {
            const cplx z = arc_point(arc, i);
            for (const auto& reg : regions)
                if (reg.contains(z, -1e-9))
                    throw GeometryFailure("admissible set: arc interior meets a region");
        }
        // analytic extension clause: just past a boundary endpoint the
        // polynomial continues into the region
        const double h = 1e-3;
        if (arc.start_kind == AnalyticArc::EndKind::region_boundary) {
            bool inside = false;
            for (const auto& reg : regions) inside = inside || reg.contains(arc.eval(-h), 1e-12);
            if (!inside)
                throw GeometryFailure("admissible set: arc does not extend into a region (start)");
        }
        if (arc.end_kind == AnalyticArc::EndKind::region_boundary) {
            bool inside = false;
            for (const auto& reg : regions) inside = inside || reg.contains(arc.eval(1.0 + h), 1e-12);
            if (!inside)
                throw GeometryFailure("admissible set: arc does not extend into a region (end)");
        }
    }

    // Runge probe: annulus holes are trapped complementary components unless
    // the designated puncture sits inside them
    for (const auto& reg : regions) {
        if (reg.kind != CompactRegion::Kind::annulus) continue;
        const bool punctured =
            puncture && std::abs(*puncture - reg.center) < reg.r_inner;
        if (!punctured)
            throw GeometryFailure("admissible set: annulus hole traps a bounded component");
    }
    // arcs whose two endpoints lie on the same region boundary could trap a
    // component; probe winding numbers of the closed loop on 64 points
    for (const auto& arc : arcs) {
        if (arc.start_kind != AnalyticArc::EndKind::region_boundary ||
            arc.end_kind != AnalyticArc::EndKind::region_boundary)
            continue;
        const cplx a = arc.eval(0.0), b = arc.eval(1.0);
        for (const auto& reg : regions) {
            if (!reg.contains(a, 1e-9) || !reg.contains(b, 1e-9)) continue;
            if (std::abs(a - b) < 1e-12) continue;
            // loop = arc + straight chord back; conservative probe
            std::vector<cplx> loop;
            for (int i = 0; i <= n_arc; ++i) loop.push_back(arc_point(arc, i));
            for (int i = 1; i < 32; ++i) loop.push_back(b + (a - b) * (i / 32.0));
            const cplx mid = (a + b) / 2.0 + (arc.eval(0.5) - (a + b) / 2.0) * 0.5;
            for (int k = 0; k < 64; ++k) {
                const double ang = 2.0 * M_PI * k / 64.0;
                const cplx probe = mid + 0.05 * std::abs(a - b) * cplx(std::cos(ang), std::sin(ang));
                bool in_set = false;
                for (const auto& reg2 : regions) in_set = in_set || reg2.contains(probe, 1e-9);
                if (in_set) continue;
                double wind = 0.0;
                for (size_t i = 0; i + 1 < loop.size(); ++i)
                    wind += std::arg((loop[i + 1] - probe) / (loop[i] - probe));
                wind += std::arg((loop.front() - probe) / (loop.back() - probe));
                if (std::abs(wind) > M_PI)
                    throw GeometryFailure("admissible set: arc loop traps a bounded component");
            }
        }
    }
}

void Exhaustion::validate() const {
    for (size_t i = 1; i < regions.size(); ++i) {
        const auto& a = regions[i - 1];
        const auto& b = regions[i];
        const double slack = b.r_outer - (std::abs(a.center - b.center) + a.r_outer);
        if (slack <= 0.0) throw GeometryFailure("exhaustion: containment fails");
    }
}

double boundary_spacing(double circumference, double scale) {
    return std::min(kGridH, circumference / 256.0) / std::max(scale, 1e-6);
}

std::vector<GridPoint> circle_samples(cplx center, double radius, double h,
                                      double th_lo, double th_hi, int piece) {
    const double span = th_hi - th_lo;
    const int n = std::max(8, static_cast<int>(std::ceil(std::abs(span) * radius / h)));
    std::vector<GridPoint> out;
    out.reserve(static_cast<size_t>(n) + 1);
    const bool full = std::abs(span - 2.0 * M_PI) < 1e-12;
    const int last = full ? n - 1 : n;
    for (int i = 0; i <= last; ++i) {
        const double th = th_lo + span * i / n;
        out.push_back({center + radius * cplx(std::cos(th), std::sin(th)),
                       std::abs(span) * radius / n, piece});
    }
    return out;
}

SampleGrid boundary_grid(const CompactRegion& region, double scale) {
    SampleGrid g;
    g.grid_h = boundary_spacing(region.boundary_circumference(), scale);
    auto add = [&](std::vector<GridPoint> pts) {
        g.points.insert(g.points.end(), pts.begin(), pts.end());
    };
    switch (region.kind) {
        case CompactRegion::Kind::disk:
            add(circle_samples(region.center, region.r_outer, g.grid_h, 0, 2 * M_PI, 0));
            break;
        case CompactRegion::Kind::annulus:
            add(circle_samples(region.center, region.r_outer, g.grid_h, 0, 2 * M_PI, 0));
            add(circle_samples(region.center, region.r_inner, g.grid_h, 0, 2 * M_PI, 1));
            break;
        case CompactRegion::Kind::sector: {
            const auto& p = region.patch;
            add(circle_samples(region.center, p.r_hi, g.grid_h, p.th_lo, p.th_hi, 0));
            if (p.r_lo > 0.0)
                add(circle_samples(region.center, p.r_lo, g.grid_h, p.th_lo, p.th_hi, 1));
            for (int side = 0; side < 2; ++side) {
                const double th = side == 0 ? p.th_lo : p.th_hi;
                const int n = std::max(4, static_cast<int>((p.r_hi - p.r_lo) / g.grid_h));
                for (int i = 0; i <= n; ++i) {
                    const double r = p.r_lo + (p.r_hi - p.r_lo) * i / n;
                    g.points.push_back({region.center + r * cplx(std::cos(th), std::sin(th)),
                                        (p.r_hi - p.r_lo) / n, 2 + side});
                }
            }
            break;
        }
        case CompactRegion::Kind::disk_notch: {
            const auto& p = region.patch;
            add(circle_samples(region.center, region.r_outer, g.grid_h, p.th_hi,
                               p.th_lo + 2 * M_PI, 0));
            add(circle_samples(region.center, p.r_lo, g.grid_h, p.th_lo, p.th_hi, 1));
            for (int side = 0; side < 2; ++side) {
                const double th = side == 0 ? p.th_lo : p.th_hi;
                const int n = std::max(4, static_cast<int>((region.r_outer - p.r_lo) / g.grid_h));
                for (int i = 0; i <= n; ++i) {
                    const double r = p.r_lo + (region.r_outer - p.r_lo) * i / n;
                    g.points.push_back({region.center + r * cplx(std::cos(th), std::sin(th)),
                                        (region.r_outer - p.r_lo) / n, 2 + side});
                }
            }
            break;
        }
    }
    if (g.points.empty()) throw EmptyGrid("boundary grid has no samples");
    return g;
}

SampleGrid area_grid(const CompactRegion& region, double scale) {
    SampleGrid g;
    g.grid_h = boundary_spacing(region.boundary_circumference(), scale);
    const int n_th = std::max(8, static_cast<int>(kGridNTheta * scale));
    const int n_r = std::max(4, static_cast<int>(kGridNRadial * scale));

    double r_lo = region.r_inner, r_hi = region.r_outer;
    double th_lo = 0.0, th_hi = 2.0 * M_PI;
    if (region.kind == CompactRegion::Kind::sector) {
        r_lo = region.patch.r_lo;
        r_hi = region.patch.r_hi;
        th_lo = region.patch.th_lo;
        th_hi = region.patch.th_hi;
    }
    const bool full_circle = std::abs(th_hi - th_lo - 2.0 * M_PI) < 1e-12;
    for (int i = 0; i <= n_r; ++i) {
        const double r = r_lo + (r_hi - r_lo) * i / n_r;
        if (r <= 0.0) {
            g.points.push_back({region.center, 1.0, 0});
            continue;
        }
        const int last = full_circle ? n_th - 1 : n_th;
        for (int j = 0; j <= last; ++j) {
            const double th = th_lo + (th_hi - th_lo) * j / n_th;
            const cplx z = region.center + r * cplx(std::cos(th), std::sin(th));
            if (region.kind == CompactRegion::Kind::disk_notch &&
                region.patch.contains_polar(r, wrap_angle(th), -1e-12))
                continue;
            g.points.push_back({z, r * (th_hi - th_lo) / n_th * (r_hi - r_lo) / n_r, 0});
        }
    }
    if (g.points.empty()) throw EmptyGrid("area grid has no samples");
    return g;
}

SampleGrid region_grid(const CompactRegion& region, double scale) {
    SampleGrid g = boundary_grid(region, scale);
    SampleGrid a = area_grid(region, scale);
    g.points.insert(g.points.end(), a.points.begin(), a.points.end());
    return g;
}

SampleGrid arc_grid(const AnalyticArc& arc, double scale) {
    SampleGrid g;
    const double len = arc.length();
    g.grid_h = boundary_spacing(len, scale);
    const int n = std::max(16, static_cast<int>(len / g.grid_h));
    for (int i = 0; i <= n; ++i)
        g.points.push_back({arc.eval(static_cast<double>(i) / n), len / n, 0});
    return g;
}

double c0_norm_form(const std::function<Vec3c(cplx)>& phi, const SampleGrid& grid,
                    const ConformalMetric& sigma) {
    if (grid.empty()) throw EmptyGrid("c0_norm_form: empty grid");
    double best = 0.0;
    for (const auto& p : grid.points) best = std::max(best, norm(phi(p.z)) / sigma(p.z));
    return best;
}

double c1_norm(const std::function<Vec3c(cplx)>& f, const std::function<Vec3c(cplx)>& df,
               const SampleGrid& grid, const ConformalMetric& sigma) {
    if (grid.empty()) throw EmptyGrid("c1_norm: empty grid");
    double best = 0.0;
    for (const auto& p : grid.points)
        best = std::max(best, norm(f(p.z)) + norm(df(p.z)) / sigma(p.z));
    return best;
}

Exhaustion build_exhaustion(double base_radius, int stages) {
    if (base_radius <= 0.0 || stages < 1)
        throw GeometryFailure("build_exhaustion: need base_radius > 0 and stages >= 1");
    Exhaustion e;
    for (int n = 1; n <= stages; ++n)
        e.regions.push_back(CompactRegion::disk(0.0, base_radius * n));
    e.validate();
    return e;
}

BoundaryPartition partition_boundary(const std::function<Vec2c(cplx)>& values,
                                     const CompactRegion& M, const PhaseSet& Z,
                                     double delta, double grid_scale) {
    if (M.kind != CompactRegion::Kind::disk)
        throw GeometryFailure("partition_boundary: desk scale partitions disk boundaries");
    const size_t n_phase = Z.cardinal();
    if (n_phase == 0) throw EmptyPhaseSet("partition_boundary: empty phase set");

    SampleGrid bd = boundary_grid(M, grid_scale);
    std::vector<double> thetas;
    thetas.reserve(bd.points.size());
    for (const auto& p : bd.points) {
        if (mini_Z(values(p.z), Z) <= delta)
            throw HypothesisViolated("partition_boundary: boundary sample at or below delta");
        thetas.push_back(wrap_angle(std::arg(p.z - M.center)));
    }

    auto boundary_point = [&](double th) {
        return M.center + M.r_outer * cplx(std::cos(th), std::sin(th));
    };

    for (int m = 3; m <= 768; m *= 2) {
        BoundaryPartition part;
        part.m = m;
        part.center = M.center;
        part.radius = M.r_outer;
        bool ok = true;
        for (int j = 0; j < m && ok; ++j) {
            BoundaryArc arc;
            arc.th_lo = 2.0 * M_PI * j / m;
            arc.th_hi = 2.0 * M_PI * (j + 1) / m;
            arc.Q = boundary_point(arc.th_hi);
            const Vec2c mid = values(boundary_point((arc.th_lo + arc.th_hi) / 2.0));
            arc.anchor.reserve(n_phase);
            for (const auto& v : Z.phases) arc.anchor.push_back(phase_projection(mid, v));
            VectorialLine L = select_line(arc.anchor, delta);
            arc.line = L;
            arc.stability = stability_radius(arc.anchor, L, delta / static_cast<double>(n_phase));
            // every sampled image of the arc must stay within 90% of the
            // stability neighborhood of the anchor
            const int n_chk = 64;
            for (int s = 0; s <= n_chk && ok; ++s) {
                const double th = arc.th_lo + (arc.th_hi - arc.th_lo) * s / n_chk;
                const Vec2c val = values(boundary_point(th));
                for (size_t k = 0; k < n_phase; ++k) {
                    const Vec2 q = phase_projection(val, Z.phases[k]);
                    if ((q - arc.anchor[k]).norm() > 0.9 * arc.stability) {
                        ok = false;
                        break;
                    }
                }
            }
            part.arcs.push_back(std::move(arc));
        }
        if (ok) return part;
    }
    throw GeometryFailure("partition_boundary: no m <= 768 fits the stability neighborhoods");
}

AdmissibleSet attach_spurs(const CompactRegion& M, const CompactRegion& V,
                           const BoundaryPartition& partition) {
    if (M.kind != CompactRegion::Kind::disk || V.kind != CompactRegion::Kind::disk)
        throw GeometryFailure("attach_spurs: M and V must be disks");
    if (std::abs(M.center - V.center) + M.r_outer >= V.r_outer)
        throw GeometryFailure("attach_spurs: M not contained in the interior of V");

    AdmissibleSet S;
    S.regions.push_back(M);
    const double gap = V.r_outer - M.r_outer;

    for (size_t j = 0; j < partition.arcs.size(); ++j) {
        const cplx Q = partition.arcs[j].Q;
        const cplx dir = (Q - V.center) / std::abs(Q - V.center);
        const cplx P = V.center + V.r_outer * dir;
        AnalyticArc arc;
        arc.coeffs = {Q, P - Q};
        arc.start_kind = AnalyticArc::EndKind::region_boundary;
        arc.end_kind = AnalyticArc::EndKind::free;
        S.arcs.push_back(std::move(arc));
    }

    // if two radial spurs nearly coincide, bow alternate ones sideways with a
    // cubic bump (vanishes at both endpoints)
    auto min_pair_distance = [&]() {
        double best = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < S.arcs.size(); ++i)
            for (size_t j = i + 1; j < S.arcs.size(); ++j)
                for (int a = 0; a <= 32; ++a)
                    for (int b = 0; b <= 32; ++b)
                        best = std::min(best, std::abs(S.arcs[i].eval(a / 32.0) -
                                                       S.arcs[j].eval(b / 32.0)));
        return best;
    };
    if (min_pair_distance() < 1e-3) {
        for (size_t j = 0; j < S.arcs.size(); j += 2) {
            const cplx Q = S.arcs[j].coeffs[0];
            const cplx d = S.arcs[j].coeffs[1];
            const cplx side = cplx(0, 1) * d / std::abs(d);
            const double amp = 0.05 * gap;
            // Q + d t + side*amp*(t - t^2) keeps endpoints fixed
            S.arcs[j].coeffs = {Q, d + side * amp, -side * amp};
        }
        if (min_pair_distance() < 1e-3)
            throw GeometryFailure("attach_spurs: spurs remain too close after perturbation");
    }

    S.validate();
    return S;
}

} // namespace nullprop
