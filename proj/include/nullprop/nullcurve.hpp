#pragma once

// Null-curve representations: spinor/direct Laurent data, exp-form data with
// an exactly preserved third component, integration, evaluation, associated
// surfaces, flux, and the two explicit deformation primitives (half-line
// spurs and h-arcs).

#include "nullprop/domains.hpp"
#include "nullprop/holo.hpp"

namespace nullprop {

inline constexpr double kTolPosRel = 1e-8;   // regularity floor relative to grid max
inline constexpr double kNullIdentityRel = 1e-12;

struct WeierstrassData {
    enum class Mode { spinor, direct, logpair };

    Mode mode{Mode::spinor};
    CompactRegion domain;

    // spinor: phi = ((1-g^2) eta / 2, i (1+g^2) eta / 2, g eta)
    Laurent g, eta;
    // direct: explicit triple with certified null identity
    LaurentTriple phi_direct;
    // logpair: P = phi1 + i phi2 in exp form (never vanishes), phi3 exact;
    // `swapped` when P stores phi1 - i phi2 instead
    HoloPtr logP;
    HoloPtr phi3;
    bool swapped{false};

    static WeierstrassData spinor_data(Laurent g, Laurent eta, CompactRegion domain);
    static WeierstrassData direct_data(LaurentTriple phi, CompactRegion domain);
    static WeierstrassData logpair_data(HoloPtr P, HoloPtr phi3, bool swapped,
                                        CompactRegion domain);

    PhiPtr node() const;                 // evaluation tree for phi
    LaurentTriple phi_laurent() const;   // spinor/direct only (exact expansion)
    Vec3c phi(cplx z) const;

    // null identity, regularity floor, residue freedom on annuli
    void validate() const;
    // max |(phi,phi)| / max <<phi,phi>> over the domain grid
    double null_residual(double grid_scale = 1.0) const;
    // min <<phi,phi>>/sigma^2 over grid, and the relative tol_pos floor
    std::pair<double, double> regularity_floor(double grid_scale = 1.0) const;
};

WeierstrassData phi_from_spinor(const Laurent& g, const Laurent& eta,
                                const CompactRegion& domain);

// evaluation-ready curve F = rot * int(phi) + basevalue
struct NullCurveRep {
    WeierstrassData data;
    Mat3c rot = Mat3c::identity();
    cplx basepoint{0.0};
    Vec3c basevalue;

    LaurentTriple F0;            // antiderivative of the unrotated phi, F0(basepoint) = 0
    double fidelity{0.0};        // measured |phi_exact - phi_reconstructed| sup (logpair)

    PhiPtr phi_node() const;     // includes the rotation
    Vec3c phi(cplx z) const;     // exact route
    Vec3c phi_deriv(cplx z) const;
    Vec3c value(cplx z) const;   // unchecked evaluation
    const CompactRegion& domain() const { return data.domain; }

    double metric_density(cplx z, const ConformalMetric& sigma = {}) const;
};

NullCurveRep integrate(const WeierstrassData& data, cplx basepoint, const Vec3c& basevalue);

// domain-checked evaluation
Vec3c evaluate(const NullCurveRep& F, cplx P);

// X_v = Re(v F), a point of R^3
std::array<double, 3> associated_surface(const NullCurveRep& F, const UnitPhase& v, cplx P);

double metric_density(const NullCurveRep& F, cplx P, const ConformalMetric& sigma = {});

struct FluxReport {
    Vec3c period;       // contour integral of phi over the cycle
    double quad_tol{1e-8};
    bool vanishes() const { return norm(period) < quad_tol; }
};

FluxReport flux_periods(const NullCurveRep& F, cplx center, double radius, int n_samples = 0);

NullCurveRep translate(const NullCurveRep& F, const Vec3c& v);
NullCurveRep rotate_curve(const Mat3c& A, const NullCurveRep& F);

// rank-deficiency score of the phi-direction Gram matrix: 0 for curves whose
// image lies in a complex line, order-1 otherwise
double flatness_score(const NullCurveRep& F, double grid_scale = 1.0);
inline constexpr double kFlatnessFloor = 1e-6;

// ---- sampled legs (generalized-curve pieces along arcs) ----

struct CurveSample {
    double u{0.0};
    Vec3c value;
    Vec3c dvalue;  // d value / du
};

struct SampledLeg {
    std::vector<CurveSample> samples;

    double nullity_residual() const;   // max |(d,d)| / <<d,d>>
    double regularity_min() const;     // min <<d,d>>
};

// d(t) = (t F1(Q), t F2(Q), F3(Q) + (t-1) i sqrt(F1^2 + F2^2)), t in [1, t_end],
// reparametrized over u in [0,1]; the tangent is null and d(t)^v = t F^v(Q)
SampledLeg build_halfline_spur(const Vec3c& FQ, double t_end, int n_samples = 65);

// Tangent path inside the null cone from T0 to T1 over a parameter window,
// via the spinor chart (linear g, linear eta); returns sampled tangents and
// integrated positions relative to the window start.  Fails (ok = false)
// when both charts degenerate or the eta path crosses zero.
struct NullBlend {
    bool ok{false};
    std::vector<CurveSample> samples;  // u in [0,1] window-local
};
NullBlend blend_null_tangents(const Vec3c& T0, const Vec3c& T1, int n_samples);

// Half-line spur that starts as the exact analytic continuation of the core
// curve along the arc (jet(u) = d/du of F over the arc), then mixes inside
// the null cone onto the ray direction with a C^3 transition over the
// leading `blend_frac`, with a C^3 exponential speed ramp along the ray.
// The high-order junction smoothness is what lets the approximation engine
// converge at spectral-like rates on the composite.
SampledLeg build_blended_spur(const Vec3c& FQ, const std::function<Vec3c(double)>& jet,
                              double t_end, double blend_frac = 1.0 / 4.0,
                              int n_samples = 161);

// zeta_j = zeta - (a^2 / (2 (zeta, zeta*))) zeta*; satisfies (zeta_j, zeta_j) = -a^2
Vec3c make_zeta_j(const Vec3c& zeta, const Vec3c& zeta_star, cplx a);

enum class SqrtBranch { principal, flipped, automatic };

// h(u) = G_Rn + i ((Y(u) - Y(0)) / (zeta_j, zeta_j)^{1/2}) zeta_j + (0, 0, Y(u) - G3_Rn);
// y_vals/y_derivs sample Y and Y' on a uniform grid over [0,1].  The branch
// `automatic` matches the root against i Y'(0) so that h tracks u*zeta.
SampledLeg build_h_arc(const Vec3c& G_Rn, cplx G3_Rn, std::span<const cplx> y_vals,
                       std::span<const cplx> y_derivs, const Vec3c& zeta_j,
                       SqrtBranch branch = SqrtBranch::automatic);

// ---- generalized null curves (region cores + arc legs) ----

struct GNCPiece {
    CompactRegion region;
    NullCurveRep rep;
    Vec3c shift;  // added to values; derivatives untouched
};

struct GNCLeg {
    AnalyticArc arc;       // domain curve in C
    SampledLeg curve;      // image samples over the same parameter
};

struct GeneralizedNullCurve {
    std::vector<GNCPiece> pieces;
    std::vector<GNCLeg> legs;

    Vec3c value_on_piece(size_t i, cplx z) const;
    // nullity/regularity of every leg plus attachment continuity
    void validate(double leg_null_tol = 1e-9, double attach_tol = 1e-10) const;
};

// convenience presets
WeierstrassData enneper_data(double radius = 1.0);
WeierstrassData enneper2_data(double radius = 1.0);

} // namespace nullprop
