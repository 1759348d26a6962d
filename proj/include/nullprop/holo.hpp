#pragma once

// Expression nodes for holomorphic functions on planar domains.  Curves
// produced by the later approximation stages are not finite Laurent series
// (their horizontal part lives in exp form), so evaluation, derivatives and
// serialization work on small shared trees instead.

#include <iosfwd>
#include <memory>
#include <utility>
#include <vector>

#include "nullprop/laurent.hpp"

namespace nullprop {

struct HoloFun;
using HoloPtr = std::shared_ptr<const HoloFun>;

struct HoloFun {
    virtual ~HoloFun() = default;
    virtual cplx eval(cplx z) const = 0;
    virtual cplx deriv(cplx z) const = 0;
    virtual void write(std::ostream& os) const = 0;
};

struct LaurentFun final : HoloFun {
    Laurent series;
    Laurent dseries;  // cached derivative

    explicit LaurentFun(Laurent s) : series(std::move(s)), dseries(series.derivative()) {}
    cplx eval(cplx z) const override { return series.eval(z); }
    cplx deriv(cplx z) const override { return dseries.eval(z); }
    void write(std::ostream& os) const override;
};

// (z - c)^w * exp(L(z)); never vanishes away from the center
struct ExpWFun final : HoloFun {
    Laurent logpart;
    int winding{0};
    Laurent dlog;

    ExpWFun(Laurent L, int w) : logpart(std::move(L)), winding(w), dlog(logpart.derivative()) {}
    cplx eval(cplx z) const override;
    cplx deriv(cplx z) const override;
    void write(std::ostream& os) const override;
};

struct ScaledSumFun final : HoloFun {
    std::vector<std::pair<cplx, HoloPtr>> terms;

    explicit ScaledSumFun(std::vector<std::pair<cplx, HoloPtr>> t) : terms(std::move(t)) {}
    cplx eval(cplx z) const override;
    cplx deriv(cplx z) const override;
    void write(std::ostream& os) const override;
};

struct ProductFun final : HoloFun {
    std::vector<HoloPtr> factors;

    explicit ProductFun(std::vector<HoloPtr> f) : factors(std::move(f)) {}
    cplx eval(cplx z) const override;
    cplx deriv(cplx z) const override;
    void write(std::ostream& os) const override;
};

HoloPtr make_laurent_fun(Laurent s);

// ---- C^3-valued nodes (derivative triples of curves) ----

struct PhiNode;
using PhiPtr = std::shared_ptr<const PhiNode>;

struct PhiNode {
    virtual ~PhiNode() = default;
    virtual Vec3c eval(cplx z) const = 0;
    virtual Vec3c deriv(cplx z) const = 0;  // d/dz of each component
    virtual void write(std::ostream& os) const = 0;
};

struct TripleRawNode final : PhiNode {
    HoloPtr f1, f2, f3;

    TripleRawNode(HoloPtr a, HoloPtr b, HoloPtr c)
        : f1(std::move(a)), f2(std::move(b)), f3(std::move(c)) {}
    Vec3c eval(cplx z) const override { return {f1->eval(z), f2->eval(z), f3->eval(z)}; }
    Vec3c deriv(cplx z) const override { return {f1->deriv(z), f2->deriv(z), f3->deriv(z)}; }
    void write(std::ostream& os) const override;
};

struct MatAppliedNode final : PhiNode {
    Mat3c mat;
    PhiPtr inner;

    MatAppliedNode(const Mat3c& m, PhiPtr in) : mat(m), inner(std::move(in)) {}
    Vec3c eval(cplx z) const override { return mat.apply(inner->eval(z)); }
    Vec3c deriv(cplx z) const override { return mat.apply(inner->deriv(z)); }
    void write(std::ostream& os) const override;
};

// Null triple assembled from one exp-form factor P and an exact third
// component t:  Q = -t^2 / P,  phi1 = (P+Q)/2,  phi2 = (P-Q)/(2i).
// `swapped` exchanges the roles of P and Q (P then stores phi1 - i phi2).
// phi1^2 + phi2^2 + phi3^2 = PQ + t^2 = 0 holds identically either way.
struct LogPairNode final : PhiNode {
    HoloPtr P;
    HoloPtr phi3;
    bool swapped{false};

    LogPairNode(HoloPtr p, HoloPtr t, bool sw) : P(std::move(p)), phi3(std::move(t)), swapped(sw) {}
    Vec3c eval(cplx z) const override;
    Vec3c deriv(cplx z) const override;
    void write(std::ostream& os) const override;
};

// component j of a vector node, as a scalar function
struct PhiComponentFun final : HoloFun {
    PhiPtr node;
    int j{0};

    PhiComponentFun(PhiPtr n, int comp) : node(std::move(n)), j(comp) {}
    cplx eval(cplx z) const override { return node->eval(z)[j]; }
    cplx deriv(cplx z) const override { return node->deriv(z)[j]; }
    void write(std::ostream& os) const override;
};

// text round trip
void write_holo(std::ostream& os, const HoloFun& f);
void write_phi(std::ostream& os, const PhiNode& n);
HoloPtr read_holo(std::istream& is);
PhiPtr read_phi(std::istream& is);

// Laurent coefficients k_lo..k_hi of f around `center`, by trapezoid (DFT)
// on the circle |z - center| = radius with n_samples points.
Laurent project_laurent(const HoloFun& f, cplx center, double radius,
                        int k_lo, int k_hi, int n_samples);
Laurent project_laurent(const PhiNode& n, int comp, cplx center, double radius,
                        int k_lo, int k_hi, int n_samples);

} // namespace nullprop
