#pragma once

// Finite Laurent series centered at a point of C.  The pipeline keeps every
// genuinely polynomial object in this form so that differentiation,
// antidifferentiation and the null identity stay coefficient-exact.

#include <complex>
#include <vector>

#include "nullprop/errors.hpp"
#include "nullprop/geom3.hpp"

namespace nullprop {

struct Laurent {
    cplx center{0.0};
    int k_min{0};                 // exponent of coeffs.front()
    std::vector<cplx> coeffs;     // k_min, k_min+1, ...

    Laurent() = default;
    Laurent(cplx c, int kmin, std::vector<cplx> cs)
        : center(c), k_min(kmin), coeffs(std::move(cs)) {}

    static Laurent constant(cplx value, cplx center = 0.0);
    static Laurent monomial(int k, cplx value = 1.0, cplx center = 0.0);

    bool empty() const { return coeffs.empty(); }
    int k_max() const { return k_min + static_cast<int>(coeffs.size()) - 1; }
    cplx coeff(int k) const;
    void set_coeff(int k, cplx value);

    cplx eval(cplx z) const;
    cplx eval_deriv(cplx z) const;

    Laurent derivative() const;
    // termwise antiderivative; throws NonExact when |coeff(-1)| exceeds
    // tol * max|coeff| (absolute floor 1e-300)
    Laurent antiderivative(double tol = 1e-12) const;
    cplx residue() const { return coeff(-1); }

    Laurent operator+(const Laurent& o) const;
    Laurent operator-(const Laurent& o) const;
    Laurent operator*(const Laurent& o) const;  // convolution
    Laurent operator*(cplx s) const;

    double max_abs_coeff() const;
    // drop leading/trailing coefficients below tol (absolute)
    Laurent trimmed(double tol = 0.0) const;
};

inline Laurent operator*(cplx s, const Laurent& p) { return p * s; }

// triple of Laurent series sharing a center (a vectorial coefficient object)
struct LaurentTriple {
    Laurent c1, c2, c3;

    Vec3c eval(cplx z) const { return {c1.eval(z), c2.eval(z), c3.eval(z)}; }
    Vec3c eval_deriv(cplx z) const {
        return {c1.eval_deriv(z), c2.eval_deriv(z), c3.eval_deriv(z)};
    }
    LaurentTriple derivative() const { return {c1.derivative(), c2.derivative(), c3.derivative()}; }
    LaurentTriple antiderivative(double tol = 1e-12) const {
        return {c1.antiderivative(tol), c2.antiderivative(tol), c3.antiderivative(tol)};
    }
};

// coefficient list of p1^2 + p2^2 + p3^2 (the null identity polynomial)
Laurent null_identity_poly(const LaurentTriple& t);

} // namespace nullprop
