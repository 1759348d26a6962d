#pragma once

// Desk-scale approximation engine: fit a genuine null curve on a larger
// planar domain W to a generalized null curve given on an admissible set S,
// in C1 norm, optionally preserving the third coordinate exactly.

#include "nullprop/nullcurve.hpp"

namespace nullprop {

struct ApproxRequest {
    GeneralizedNullCurve G;
    AdmissibleSet S;
    CompactRegion W;
    double epsilon{1e-3};
    bool fix_third{false};
    bool require_nonflat{false};
    // report the best fit without enforcing epsilon/regularity acceptance
    bool report_only{false};
    std::vector<int> degree_schedule{8, 16, 32, 64, 128};
    double grid_scale{1.0};
};

struct ApproxReport {
    double achieved_c1{std::numeric_limits<double>::infinity()};
    int degree_used{0};
    double null_residual{0.0};
    double regularity_min{0.0};
    double fidelity{0.0};          // logpair reconstruction error
    bool regular{false};           // passed the relative regularity floor on W
    bool factor_swapped{false};
    size_t fit_samples{0};
    size_t check_samples{0};
    std::vector<std::pair<int, double>> schedule_errors;  // (cap, measured C1)
};

// Every sample the fit or the error measurement sees: position, target value,
// target derivative (phi), and optionally d phi / dz.
struct FitSample {
    cplx z;
    Vec3c value;
    Vec3c phi;
    Vec3c dphi;
    bool has_dphi{false};
    double weight{1.0};
    bool fit_row{true};  // decimated area samples only participate in checks
    bool leg{false};     // sample taken along an arc leg
};

std::vector<FitSample> collect_samples(const GeneralizedNullCurve& G, double grid_scale);

// Least-squares Laurent recovery of the spinor pair from derivative samples:
// g fitted from phi3/(phi1 - i phi2), then eta from the full vector residual
// with the annulus residue constraints imposed exactly.
std::pair<Laurent, Laurent> fit_spinor(std::span<const FitSample> samples,
                                       const CompactRegion& W, int degree_cap);

std::pair<NullCurveRep, ApproxReport> approximate(const ApproxRequest& req);

// measured C1 distance between H and G over the sample set
double c1_error(const NullCurveRep& H, std::span<const FitSample> samples);

} // namespace nullprop
