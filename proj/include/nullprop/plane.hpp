#pragma once

// Planar geometry behind the properness certificates: phase projections,
// mini over a phase set, line selection away from a ball, stability radii,
// and the null-tangent path constructor inside Sigma.

#include <span>
#include <vector>

#include "nullprop/geom3.hpp"

namespace nullprop {

struct Vec2 {
    double x{0.0}, y{0.0};

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {s * x, s * y}; }
    double norm() const { return std::hypot(x, y); }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
};

struct Vec2c {
    cplx z1{0.0}, z2{0.0};

    Vec2c() = default;
    Vec2c(cplx a, cplx b) : z1(a), z2(b) {}

    Vec2c operator+(const Vec2c& o) const { return {z1 + o.z1, z2 + o.z2}; }
    Vec2c operator-(const Vec2c& o) const { return {z1 - o.z1, z2 - o.z2}; }
    Vec2c operator*(cplx s) const { return {s * z1, s * z2}; }
    double norm() const { return std::sqrt(std::norm(z1) + std::norm(z2)); }
};

struct PhaseSet {
    std::vector<UnitPhase> phases;

    PhaseSet() = default;
    explicit PhaseSet(std::vector<UnitPhase> ps);
    static PhaseSet from_turns(std::initializer_list<double> turns);

    size_t cardinal() const { return phases.size(); }
    bool contains(const UnitPhase& p, double tol = 1e-9) const;
    PhaseSet with(const UnitPhase& p) const;  // validates distinctness
};

// unit direction in R^2 identified mod sign; stored by line angle in [0, pi)
struct VectorialLine {
    double angle{0.0};

    static VectorialLine from_angle(double theta);
    static VectorialLine from_direction(const Vec2& d);
    Vec2 direction() const { return {std::cos(angle), std::sin(angle)}; }
};

struct SigmaPoint {
    Vec2c u;
    cplx extra{0.0};
};

// u^v = Re[v (z1, z2)]
Vec2 phase_projection(const Vec2c& u, const UnitPhase& v);
inline Vec2 phase_projection(const Vec3c& u, const UnitPhase& v) {
    return phase_projection(Vec2c{u.z1, u.z2}, v);
}

// min over Z of |u^v|
double mini_Z(const Vec2c& u, const PhaseSet& Z);
inline double mini_Z(const Vec3c& u, const PhaseSet& Z) { return mini_Z(Vec2c{u.z1, u.z2}, Z); }

// distance from the origin to the affine line offset + L
double line_clearance(const VectorialLine& L, const Vec2& offset);

// Vectorial line L with dist(x_j + L, 0) > unit_scale / n for all j, given
// |x_j| > unit_scale.  Works in line-angle space mod pi, so a point and its
// antipode exclude the same arc; the midpoint of the largest surviving arc
// is returned (smallest angle on ties).
VectorialLine select_line(std::span<const Vec2> points, double unit_scale);

// r = min_j (clearance(x_j) - target); any per-component perturbation of the
// points below r keeps all clearances above target
double stability_radius(std::span<const Vec2> points, const VectorialLine& L,
                        double clearance_target);

bool sigma_contains(const Vec2c& u, const PhaseSet& Z, double delta);

struct PathSample {
    double t{0.0};
    Vec3c point;
    Vec3c tangent;
};

struct SampledPath {
    std::vector<PathSample> samples;
};

struct SigmaPathOptions {
    int move_budget = 10000;
    int samples_per_leg = 9;
    double corner_window = 1e-3;  // fraction of the shorter adjoining leg
};

// Piecewise path c in Sigma x C with c(0)=v, c(1)=w, every sampled tangent
// null and every sample's C^2 part in Sigma.  Axis-aligned lattice moves of
// step delta/4 carry the search; radial warm-up legs give the lattice a
// working margin and one out-and-back excursion absorbs the third-coordinate
// residual.
SampledPath sigma_null_path(const SigmaPoint& v, const SigmaPoint& w,
                            const PhaseSet& Z, double delta,
                            const SigmaPathOptions& opt = {});

} // namespace nullprop
