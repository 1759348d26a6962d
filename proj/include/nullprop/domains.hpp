#pragma once

// Desk-scale planar domains: compact regions of C, attached analytic arcs,
// admissible sets, exhaustions, sample grids and the C0/C1 norms relative
// to a conformal metric.

#include <functional>
#include <optional>
#include <vector>

#include "nullprop/plane.hpp"

namespace nullprop {

struct ConformalMetric {
    std::function<double(cplx)> density;  // sigma = density(z) |dz|

    ConformalMetric() : density([](cplx) { return 1.0; }) {}
    explicit ConformalMetric(std::function<double(cplx)> d) : density(std::move(d)) {}
    double operator()(cplx z) const { return density(z); }
};

struct PolarPatch {
    double r_lo{0.0}, r_hi{0.0};
    double th_lo{0.0}, th_hi{0.0};  // radians, th_lo < th_hi, width < 2 pi

    bool contains_polar(double r, double th, double tol = 0.0) const;
};

struct CompactRegion {
    enum class Kind { disk, annulus, sector, disk_notch };

    Kind kind{Kind::disk};
    cplx center{0.0};
    double r_inner{0.0};   // disk: 0
    double r_outer{0.0};
    PolarPatch patch;      // sector: the patch itself; disk_notch: removed patch

    static CompactRegion disk(cplx center, double radius);
    static CompactRegion annulus(cplx center, double r_inner, double r_outer);
    static CompactRegion sector(cplx center, const PolarPatch& p);
    static CompactRegion disk_notch(cplx center, double radius, const PolarPatch& removed);

    bool contains(cplx z, double tol = 0.0) const;
    double boundary_circumference() const;
};

// polynomial curve [0,1] -> C with endpoint incidence tags
struct AnalyticArc {
    enum class EndKind { free, region_boundary };

    std::vector<cplx> coeffs;  // c0 + c1 t + ...
    EndKind start_kind{EndKind::free};
    EndKind end_kind{EndKind::free};

    cplx eval(double t) const;
    cplx deriv(double t) const;
    double length(int n = 256) const;

    // sampled injectivity and nonvanishing derivative at the given resolution
    void validate(double resolution = 1e-6) const;
};

struct AdmissibleSet {
    std::vector<CompactRegion> regions;
    std::vector<AnalyticArc> arcs;
    // designated puncture of the ambient plane for annular configurations
    std::optional<cplx> puncture;

    // disjointness, endpoint incidence, analytic extension into regions,
    // and the winding-number Runge probe; throws GeometryFailure
    void validate() const;
};

struct Exhaustion {
    std::vector<CompactRegion> regions;

    void validate() const;  // strict nesting
};

struct GridPoint {
    cplx z;
    double weight{1.0};
    int piece{0};
};

struct SampleGrid {
    std::vector<GridPoint> points;
    double grid_h{0.0};

    bool empty() const { return points.empty(); }
};

inline constexpr double kGridH = 0.01;
inline constexpr int kGridNTheta = 128;
inline constexpr int kGridNRadial = 64;

// boundary spacing h = min(0.01, circumference/256) / scale
double boundary_spacing(double circumference, double scale = 1.0);

std::vector<GridPoint> circle_samples(cplx center, double radius, double h,
                                      double th_lo = 0.0, double th_hi = 2.0 * M_PI,
                                      int piece = 0);

SampleGrid boundary_grid(const CompactRegion& region, double scale = 1.0);
SampleGrid area_grid(const CompactRegion& region, double scale = 1.0);
// boundary + area, for C1-norm measurements over a region
SampleGrid region_grid(const CompactRegion& region, double scale = 1.0);
SampleGrid arc_grid(const AnalyticArc& arc, double scale = 1.0);

double c0_norm_form(const std::function<Vec3c(cplx)>& phi, const SampleGrid& grid,
                    const ConformalMetric& sigma = {});
double c1_norm(const std::function<Vec3c(cplx)>& f, const std::function<Vec3c(cplx)>& df,
               const SampleGrid& grid, const ConformalMetric& sigma = {});

Exhaustion build_exhaustion(double base_radius, int stages);

struct BoundaryArc {
    double th_lo{0.0}, th_hi{0.0};
    cplx Q;                     // common endpoint with the next arc (at th_hi)
    VectorialLine line;
    double stability{0.0};      // stability radius around the anchor points
    std::vector<Vec2> anchor;   // projected images of the arc midpoint, one per phase
};

struct BoundaryPartition {
    int m{0};
    cplx center;
    double radius{0.0};
    std::vector<BoundaryArc> arcs;
};

// Split the boundary circle of M into m >= 3 arcs such that each arc's
// projected image fits inside the stability neighborhood of one selected
// line with 10% relative margin; m starts at 3 and doubles as needed.
BoundaryPartition partition_boundary(const std::function<Vec2c(cplx)>& values,
                                     const CompactRegion& M, const PhaseSet& Z,
                                     double delta, double grid_scale = 1.0);

// Pairwise disjoint polynomial spur arcs from each partition endpoint Q out
// to the boundary of V; returns the admissible set M united with the spurs.
AdmissibleSet attach_spurs(const CompactRegion& M, const CompactRegion& V,
                           const BoundaryPartition& partition);

} // namespace nullprop
