#include "nullprop/plane.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <queue>
#include <unordered_map>

#include <Eigen/Dense>

namespace nullprop {

namespace {
constexpr cplx kI{0.0, 1.0};
}

PhaseSet::PhaseSet(std::vector<UnitPhase> ps) : phases(std::move(ps)) {
    for (size_t i = 0; i < phases.size(); ++i)
        for (size_t j = i + 1; j < phases.size(); ++j)
            if (arc_distance(phases[i], phases[j]) <= 1e-9)
                throw DegenerateInput("phase set has coincident phases");
}

PhaseSet PhaseSet::from_turns(std::initializer_list<double> turns) {
    std::vector<UnitPhase> ps;
    for (double t : turns) ps.push_back(UnitPhase::from_turns(t));
    return PhaseSet(std::move(ps));
}

bool PhaseSet::contains(const UnitPhase& p, double tol) const {
    for (const auto& q : phases)
        if (arc_distance(p, q) <= tol) return true;
    return false;
}

PhaseSet PhaseSet::with(const UnitPhase& p) const {
    std::vector<UnitPhase> ps = phases;
    ps.push_back(p);
    return PhaseSet(std::move(ps));
}

VectorialLine VectorialLine::from_angle(double theta) {
    double a = std::fmod(theta, M_PI);
    if (a < 0) a += M_PI;
    return VectorialLine{a};
}

VectorialLine VectorialLine::from_direction(const Vec2& d) {
    if (d.norm() <= 0.0) throw DegenerateInput("line direction is zero");
    return from_angle(std::atan2(d.y, d.x));
}

Vec2 phase_projection(const Vec2c& u, const UnitPhase& v) {
    return {std::real(v.v * u.z1), std::real(v.v * u.z2)};
}

double mini_Z(const Vec2c& u, const PhaseSet& Z) {
    if (Z.phases.empty()) throw EmptyPhaseSet("mini over empty phase set");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& v : Z.phases) best = std::min(best, phase_projection(u, v).norm());
    return best;
}

double line_clearance(const VectorialLine& L, const Vec2& offset) {
    return std::abs(offset.cross(L.direction()));
}

namespace {

// angular distance in line-angle space (mod pi)
double line_angle_dist(double a, double b) {
    double d = std::fmod(std::abs(a - b), M_PI);
    return std::min(d, M_PI - d);
}

} // namespace

VectorialLine select_line(std::span<const Vec2> points, double unit_scale) {
    const size_t n = points.size();
    if (n == 0) throw DegenerateInput("select_line: no points");
    for (const auto& p : points)
        if (p.norm() <= unit_scale)
            throw PointInsideBall("select_line: a point lies inside the scale ball");

    const double halfw = M_PI / (2.0 * static_cast<double>(n));
    std::vector<double> centers(n);
    for (size_t j = 0; j < n; ++j) {
        double a = std::atan2(points[j].y, points[j].x);
        a = std::fmod(a, M_PI);
        if (a < 0) a += M_PI;
        centers[j] = a;
    }
    auto allowed = [&](double theta) {
        for (double c : centers)
            if (line_angle_dist(theta, c) < halfw - 1e-15) return false;
        return true;
    };

    // candidate complement-arc endpoints are forbidden-arc endpoints
    std::vector<double> events;
    for (double c : centers) {
        for (double e : {c - halfw, c + halfw}) {
            double x = std::fmod(e, M_PI);
            if (x < 0) x += M_PI;
            events.push_back(x);
        }
    }
    std::sort(events.begin(), events.end());
    events.erase(std::unique(events.begin(), events.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-14; }),
                 events.end());

    const size_t m = events.size();
    // uncovered[i]: the open segment (events[i], events[i+1]) (cyclic) is allowed
    std::vector<bool> uncovered(m, false);
    for (size_t i = 0; i < m; ++i) {
        const double a = events[i];
        const double b = (i + 1 < m) ? events[i + 1] : events[0] + M_PI;
        uncovered[i] = allowed(std::fmod((a + b) / 2.0, M_PI));
    }

    // chain uncovered segments into maximal closed arcs; isolated allowed
    // endpoints count as zero-length arcs
    struct Arc {
        double start, len;
    };
    std::vector<Arc> arcs;
    std::vector<bool> used(m, false);
    for (size_t i = 0; i < m; ++i) {
        if (!uncovered[i] || used[i]) continue;
        // walk backwards to the chain start
        size_t s = i;
        while (uncovered[(s + m - 1) % m] && (s + m - 1) % m != i) s = (s + m - 1) % m;
        double len = 0.0;
        size_t k = s;
        while (uncovered[k] && !used[k]) {
            used[k] = true;
            const double a = events[k];
            const double b = (k + 1 < m) ? events[k + 1] : events[0] + M_PI;
            len += b - a;
            k = (k + 1) % m;
        }
        arcs.push_back({events[s], len});
    }
    for (size_t i = 0; i < m; ++i) {
        const bool prev = uncovered[(i + m - 1) % m];
        if (!uncovered[i] && !prev && allowed(events[i])) arcs.push_back({events[i], 0.0});
    }
    if (arcs.empty()) {
        // cannot happen: n open arcs of total length pi never cover the circle
        throw GeometryFailure("select_line: no admissible direction found");
    }

    std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) {
        if (std::abs(a.len - b.len) > 1e-12) return a.len > b.len;
        return a.start < b.start;
    });
    return VectorialLine::from_angle(arcs.front().start + arcs.front().len / 2.0);
}

double stability_radius(std::span<const Vec2> points, const VectorialLine& L,
                        double clearance_target) {
    if (points.empty()) throw DegenerateInput("stability_radius: no points");
    double r = std::numeric_limits<double>::infinity();
    for (const auto& p : points) {
        const double c = line_clearance(L, p);
        if (c <= clearance_target)
            throw NoMargin("stability_radius: clearance at or below target");
        r = std::min(r, c - clearance_target);
    }
    return r;
}

bool sigma_contains(const Vec2c& u, const PhaseSet& Z, double delta) {
    if (delta <= 0.0) throw DegenerateInput("sigma_contains: delta must be positive");
    return mini_Z(u, Z) > delta;
}

// ---- sigma_null_path ----

namespace {

// one straight piece: displacement du in C^2, third-coordinate rate b with
// b^2 = du1^2 + du2^2, so the tangent (du1, du2, i b) is null
struct Leg {
    Vec2c du;
    cplx b;
};

cplx leg_rate(const Vec2c& du) {
    return std::sqrt(du.z1 * du.z1 + du.z2 * du.z2);
}

struct LatticeKey {
    int16_t a, b, c, d;
    bool operator==(const LatticeKey&) const = default;
};

struct LatticeKeyHash {
    size_t operator()(const LatticeKey& k) const {
        uint64_t v = (uint64_t(uint16_t(k.a)) << 48) | (uint64_t(uint16_t(k.b)) << 32) |
                     (uint64_t(uint16_t(k.c)) << 16) | uint64_t(uint16_t(k.d));
        return std::hash<uint64_t>()(v);
    }
};

Vec2c lattice_point(const Vec2c& origin, const LatticeKey& k, double step) {
    return {origin.z1 + step * cplx(k.a, k.b), origin.z2 + step * cplx(k.c, k.d)};
}

std::vector<LatticeKey> lattice_search(const Vec2c& A, const LatticeKey& goal,
                                       const PhaseSet& Z, double delta, double step,
                                       int budget) {
    auto valid = [&](const LatticeKey& k) {
        return mini_Z(lattice_point(A, k, step), Z) > 2.0 * delta;
    };
    auto h = [&](const LatticeKey& k) {
        return std::abs(k.a - goal.a) + std::abs(k.b - goal.b) + std::abs(k.c - goal.c) +
               std::abs(k.d - goal.d);
    };

    struct Entry {
        int f, g;
        LatticeKey key;
        // weighted A* ordering, ties toward deeper nodes; shortest paths are
        // not required here, reaching the goal within budget is
        bool operator>(const Entry& o) const { return f != o.f ? f > o.f : g < o.g; }
    };
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> open;
    std::unordered_map<LatticeKey, LatticeKey, LatticeKeyHash> parent;
    std::unordered_map<LatticeKey, int, LatticeKeyHash> best_g;

    const LatticeKey start{0, 0, 0, 0};
    const int hw = 3;  // heuristic weight
    open.push({hw * h(start), 0, start});
    best_g[start] = 0;
    int expanded = 0;
    while (!open.empty()) {
        const Entry e = open.top();
        open.pop();
        if (e.key == goal) {
            std::vector<LatticeKey> path{goal};
            LatticeKey k = goal;
            while (!(k == start)) {
                k = parent.at(k);
                path.push_back(k);
            }
            std::reverse(path.begin(), path.end());
            return path;
        }
        if (++expanded > budget)
            throw PathSearchFailed("sigma_null_path: lattice budget exhausted");
        auto gi = best_g.find(e.key);
        if (gi != best_g.end() && e.g > gi->second) continue;
        for (int axis = 0; axis < 4; ++axis) {
            for (int dir : {-1, 1}) {
                LatticeKey nk = e.key;
                (axis == 0 ? nk.a : axis == 1 ? nk.b : axis == 2 ? nk.c : nk.d) +=
                    static_cast<int16_t>(dir);
                if (!valid(nk)) continue;
                const int ng = e.g + 1;
                auto it = best_g.find(nk);
                if (it != best_g.end() && it->second <= ng) continue;
                best_g[nk] = ng;
                parent[nk] = e.key;
                open.push({ng + hw * h(nk), ng, nk});
            }
        }
    }
    throw PathSearchFailed("sigma_null_path: goal unreachable on the lattice");
}

// spinor chart for null tangents: d = eta * V(g), with the chart sign s
Vec3c chart_vec(cplx g, int s) {
    return {(1.0 - g * g) / 2.0, cplx(0, s) * (1.0 + g * g) / 2.0, g};
}

struct BlendResult {
    bool ok{false};
    std::vector<std::pair<Vec3c, Vec3c>> samples;  // (position offset, tangent)
};

// Smooth the corner between tangent windows wa = w*Ta and wb = w*Tb keeping
// every tangent in the null cone and the total displacement exactly wa + wb.
BlendResult blend_corner(const Vec3c& wa, const Vec3c& wb, int n_samples) {
    BlendResult out;
    const double na = norm(wa), nb = norm(wb);
    if (na <= 0.0 || nb <= 0.0) return out;

    int chart = 0;
    double qual = -1.0;
    for (int s : {1, -1}) {
        const cplx ea = wa.z1 - cplx(0, s) * wa.z2;
        const cplx eb = wb.z1 - cplx(0, s) * wb.z2;
        const double q = std::min(std::abs(ea) / na, std::abs(eb) / nb);
        if (q > qual) {
            qual = q;
            chart = s;
        }
    }
    if (qual < 1e-6) return out;

    const cplx eta0 = wa.z1 - cplx(0, chart) * wa.z2;
    const cplx eta1 = wb.z1 - cplx(0, chart) * wb.z2;
    const cplx g0 = wa.z3 / eta0;
    const cplx g1 = wb.z3 / eta1;

    auto gpath = [&](double s) { return g0 + (g1 - g0) * s; };
    auto etalin = [&](double s) { return eta0 + (eta1 - eta0) * s; };
    auto bump = [](int m, double s) { return s * (1.0 - s) * std::pow(s, m); };

    // 8-point Gauss-Legendre on [0,1]; integrands are degree <= 8 polynomials
    static const double gx[8] = {0.01985507, 0.10166676, 0.23723380, 0.40828268,
                                 0.59171732, 0.76276620, 0.89833324, 0.98014493};
    static const double gw[8] = {0.05061427, 0.11119052, 0.15685332, 0.18134189,
                                 0.18134189, 0.15685332, 0.11119052, 0.05061427};

    Eigen::Matrix<cplx, 3, 4> M;
    M.setZero();
    Eigen::Vector3cd rhs;
    Vec3c base{0, 0, 0};
    for (int q = 0; q < 8; ++q) {
        const double s = gx[q];
        const Vec3c V = chart_vec(gpath(s), chart);
        base = base + gw[q] * etalin(s) * V;
        for (int m = 0; m < 4; ++m) {
            const cplx f = gw[q] * bump(m, s);
            for (int r = 0; r < 3; ++r) M(r, m) += f * V[r];
        }
    }
    const Vec3c target = wa + wb;
    for (int r = 0; r < 3; ++r) rhs(r) = target[r] - base[r];
    Eigen::Vector4cd coef =
        M.completeOrthogonalDecomposition().solve(rhs);

    auto eta = [&](double s) {
        cplx e = etalin(s);
        for (int m = 0; m < 4; ++m) e += coef(m) * bump(m, s);
        return e;
    };
    auto tangent = [&](double s) { return eta(s) * chart_vec(gpath(s), chart); };

    // residual displacement check (quadrature is exact, solve may be rank-deficient)
    Vec3c disp{0, 0, 0};
    for (int q = 0; q < 8; ++q) disp = disp + gw[q] * tangent(gx[q]);
    if (norm(disp - target) > 1e-9 * (1.0 + norm(target))) return out;

    // sampled positions by cumulative quadrature between samples
    out.samples.reserve(static_cast<size_t>(n_samples));
    Vec3c pos{0, 0, 0};
    double prev = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        const double s = (i + 1.0) / (n_samples + 1.0);
        for (int q = 0; q < 8; ++q) {
            const double x = prev + (s - prev) * gx[q];
            pos = pos + ((s - prev) * gw[q]) * tangent(x);
        }
        prev = s;
        const Vec3c t = tangent(s);
        if (std::real(herm_form(t, t)) <= 0.0) return out;
        out.samples.emplace_back(pos, t);
    }
    out.ok = true;
    return out;
}

} // namespace

SampledPath sigma_null_path(const SigmaPoint& v, const SigmaPoint& w,
                            const PhaseSet& Z, double delta,
                            const SigmaPathOptions& opt) {
    if (delta <= 0.0) throw DegenerateInput("sigma_null_path: delta must be positive");
    if (!sigma_contains(v.u, Z, delta) || !sigma_contains(w.u, Z, delta))
        throw NotInSigma("sigma_null_path: endpoint outside Sigma");

    const double step = delta / 4.0;
    std::vector<Leg> legs;

    // radial warm-up: mini scales linearly along t*u, t >= 1
    const double tv = std::max(1.0, 4.0 * delta / mini_Z(v.u, Z));
    const double tw = std::max(1.0, 4.0 * delta / mini_Z(w.u, Z));
    const Vec2c A = v.u * tv;
    const Vec2c B = w.u * tw;
    if (tv > 1.0 + 1e-15) {
        const Vec2c du = v.u * (tv - 1.0);
        legs.push_back({du, leg_rate(du)});
    }

    // snap B onto the lattice anchored at A
    auto snap = [&](double x) {
        const long k = std::lround(x / step);
        if (std::abs(k) > 20000)
            throw PathSearchFailed("sigma_null_path: endpoints too far apart for the step size");
        return static_cast<int16_t>(k);
    };
    const LatticeKey goal{snap(std::real(B.z1 - A.z1)), snap(std::imag(B.z1 - A.z1)),
                          snap(std::real(B.z2 - A.z2)), snap(std::imag(B.z2 - A.z2))};
    std::vector<LatticeKey> nodes = lattice_search(A, goal, Z, delta, step, opt.move_budget);

    // merge collinear consecutive moves
    size_t zig_anchor_leg = legs.size();  // leg index after which the excursion goes
    double best_mini = mini_Z(A, Z);
    {
        Vec2c prev = A;
        size_t i = 1;
        while (i < nodes.size()) {
            size_t j = i;
            auto axis_of = [](const LatticeKey& p, const LatticeKey& q) {
                if (p.a != q.a) return 0;
                if (p.b != q.b) return 1;
                if (p.c != q.c) return 2;
                return 3;
            };
            const int ax = axis_of(nodes[i - 1], nodes[i]);
            while (j + 1 < nodes.size() && axis_of(nodes[j], nodes[j + 1]) == ax &&
                   ((ax == 0 && (nodes[j + 1].a - nodes[j].a) == (nodes[i].a - nodes[i - 1].a)) ||
                    (ax == 1 && (nodes[j + 1].b - nodes[j].b) == (nodes[i].b - nodes[i - 1].b)) ||
                    (ax == 2 && (nodes[j + 1].c - nodes[j].c) == (nodes[i].c - nodes[i - 1].c)) ||
                    (ax == 3 && (nodes[j + 1].d - nodes[j].d) == (nodes[i].d - nodes[i - 1].d))))
                ++j;
            const Vec2c to = lattice_point(A, nodes[j], step);
            const Vec2c du = to - prev;
            legs.push_back({du, leg_rate(du)});
            const double mz = mini_Z(to, Z);
            if (mz > best_mini) {
                best_mini = mz;
                zig_anchor_leg = legs.size();
            }
            prev = to;
            i = j + 1;
        }
        // unsnap
        const Vec2c du = B - prev;
        if (du.norm() > 1e-15) legs.push_back({du, leg_rate(du)});
    }
    if (tw > 1.0 + 1e-15) {
        const Vec2c du = w.u * (1.0 - tw);
        legs.push_back({du, leg_rate(du)});
    }

    // third-coordinate residual, then absorb it with an out-and-back
    // excursion whose branch is chosen explicitly
    cplx acc = v.extra;
    for (const auto& l : legs) acc += kI * l.b;
    const cplx rho = w.extra - acc;
    const double scale = std::abs(v.extra) + std::abs(w.extra) + delta;
    if (std::abs(rho) > 1e-15 * scale) {
        const cplx s = rho / (2.0 * kI);
        std::vector<Leg> extra;
        Vec2c anchor = A;
        {
            // recover the anchor point
            Vec2c p = v.u;
            for (size_t i = 0; i < zig_anchor_leg; ++i) p = p + legs[i].du;
            anchor = p;
        }
        const double have = mini_Z(anchor, Z);
        const double need = delta + std::abs(s) + delta / 8.0;
        double lift = 1.0;
        if (have < need) lift = need / have;
        if (lift > 1.0 + 1e-15) {
            const Vec2c du = anchor * (lift - 1.0);
            const cplx br = leg_rate(du);
            extra.push_back({du, br});
            extra.push_back({Vec2c{s, 0.0}, s});
            extra.push_back({Vec2c{-s, 0.0}, s});
            extra.push_back({anchor * (1.0 - lift), -br});  // cancels the lift's contribution
        } else {
            extra.push_back({Vec2c{s, 0.0}, s});
            extra.push_back({Vec2c{-s, 0.0}, s});
        }
        legs.insert(legs.begin() + static_cast<long>(zig_anchor_leg), extra.begin(), extra.end());
    }

    if (legs.empty()) {
        // v == w up to lattice resolution and no residual: emit a small loop
        // along a null direction of C^2 (possible since mini(v) >= 4 delta here)
        const cplx a = delta / 8.0;
        legs.push_back({Vec2c{a, kI * a}, 0.0});
        legs.push_back({Vec2c{-a, -kI * a}, 0.0});
    }

    // ---- emit samples, mollifying interior corners ----
    SampledPath path;
    const size_t L = legs.size();
    if (L == 0) {
        path.samples.push_back({0.0, {v.u.z1, v.u.z2, v.extra}, {0, 0, 0}});
        path.samples.push_back({1.0, {w.u.z1, w.u.z2, w.extra}, {0, 0, 0}});
        return path;
    }

    std::vector<Vec3c> starts(L + 1);
    starts[0] = {v.u.z1, v.u.z2, v.extra};
    std::vector<Vec3c> tangents(L);
    for (size_t i = 0; i < L; ++i) {
        tangents[i] = {legs[i].du.z1, legs[i].du.z2, kI * legs[i].b};
        starts[i + 1] = starts[i] + tangents[i];
    }

    const double wf = opt.corner_window;
    auto emit = [&](double t, const Vec3c& p, const Vec3c& tan) {
        path.samples.push_back({t, p, tan});
    };

    emit(0.0, starts[0], tangents[0]);
    for (size_t i = 0; i < L; ++i) {
        const double t0 = static_cast<double>(i) / L;
        const double lo = (i == 0) ? 0.0 : wf;
        const double hi = (i + 1 == L) ? 1.0 : 1.0 - wf;
        for (int k = 1; k <= opt.samples_per_leg; ++k) {
            const double s = lo + (hi - lo) * k / (opt.samples_per_leg + 1.0);
            emit(t0 + s / L, starts[i] + s * tangents[i], tangents[i]);
        }
        if (i + 1 < L) {
            // corner between leg i and i+1
            const Vec3c wa = wf * tangents[i];
            const Vec3c wb = wf * tangents[i + 1];
            const Vec3c corner_in = starts[i + 1] - wa;
            BlendResult blend = blend_corner(wa, wb, 6);
            if (blend.ok) {
                for (size_t k = 0; k < blend.samples.size(); ++k) {
                    const double s = (k + 1.0) / (blend.samples.size() + 1.0);
                    emit(t0 + (1.0 - wf + 2.0 * wf * s) / L, corner_in + blend.samples[k].first,
                         blend.samples[k].second);
                }
            } else {
                emit(t0 + 1.0 / L, starts[i + 1], tangents[i + 1]);
            }
        }
    }
    emit(1.0, starts[L], tangents[L - 1]);

    // verification sweep over what we are about to hand back
    for (const auto& s : path.samples) {
        if (!sigma_contains(Vec2c{s.point.z1, s.point.z2}, Z, delta))
            throw PathSearchFailed("sigma_null_path: constructed sample left Sigma");
        if (!is_null(s.tangent, 1e-9))
            throw PathSearchFailed("sigma_null_path: constructed tangent not null");
    }
    const Vec3c endpoint = path.samples.back().point;
    const Vec3c wpt{w.u.z1, w.u.z2, w.extra};
    if (norm(endpoint - wpt) > 1e-8 * (1.0 + norm(wpt)))
        throw PathSearchFailed("sigma_null_path: endpoint mismatch");
    return path;
}

} // namespace nullprop
