#pragma once

// Algebra of C^3: the three bilinear forms, the null cone, conjugate bases
// and the complex orthogonal group O(3,C).

#include <array>
#include <complex>

#include "nullprop/errors.hpp"

namespace nullprop {

using cplx = std::complex<double>;

inline constexpr double kTolNull = 1e-10;      // relative null test
inline constexpr double kTolOrtho = 1e-12;     // A^T A = I entrywise

struct Vec3c {
    cplx z1{0.0}, z2{0.0}, z3{0.0};

    Vec3c() = default;
    Vec3c(cplx a, cplx b, cplx c) : z1(a), z2(b), z3(c) {}

    cplx operator[](int j) const { return j == 0 ? z1 : (j == 1 ? z2 : z3); }
    cplx& operator[](int j) { return j == 0 ? z1 : (j == 1 ? z2 : z3); }

    Vec3c operator+(const Vec3c& o) const { return {z1 + o.z1, z2 + o.z2, z3 + o.z3}; }
    Vec3c operator-(const Vec3c& o) const { return {z1 - o.z1, z2 - o.z2, z3 - o.z3}; }
    Vec3c operator*(cplx s) const { return {s * z1, s * z2, s * z3}; }
    Vec3c operator-() const { return {-z1, -z2, -z3}; }

    bool finite() const;
};

inline Vec3c operator*(cplx s, const Vec3c& v) { return v * s; }

// (u,v) = u^T v, complex symmetric
cplx sym_form(const Vec3c& u, const Vec3c& v);
// <<u,v>> = conj(u)^T v, Hermitian
cplx herm_form(const Vec3c& u, const Vec3c& v);
// <u,v> = Re <<u,v>>, Euclidean on C^3 = R^6
double eucl_form(const Vec3c& u, const Vec3c& v);

inline double norm(const Vec3c& u) { return std::sqrt(std::real(herm_form(u, u))); }

// u in Theta: u != 0 and |(u,u)| < tol * <<u,u>>
bool is_null(const Vec3c& u, double tol = kTolNull);

// complex cross product; satisfies the same polynomial identities as the
// real one, in particular (a x b, a x b) = (a,a)(b,b) - (a,b)^2
Vec3c cross(const Vec3c& a, const Vec3c& b);

// 3x3 complex matrix, column-major storage
struct Mat3c {
    std::array<Vec3c, 3> col{};

    static Mat3c identity();
    static Mat3c from_columns(const Vec3c& a, const Vec3c& b, const Vec3c& c);

    Vec3c apply(const Vec3c& u) const;
    Mat3c transpose() const;
    Mat3c operator*(const Mat3c& o) const;

    // max entrywise deviation of A^T A from I
    double orthogonality_defect() const;
    bool is_orthogonal(double tol = kTolOrtho) const { return orthogonality_defect() <= tol; }
    // inverse assuming orthogonality (A^-1 = A^T)
    Mat3c inverse_orthogonal() const { return transpose(); }
    // largest singular value
    double op_norm() const;
};

struct UnitPhase {
    cplx v{1.0};

    UnitPhase() = default;
    explicit UnitPhase(cplx value);
    static UnitPhase from_turns(double turns);  // e^{2 pi i turns}

    UnitPhase conj() const { return UnitPhase(std::conj(v)); }
};

// arc distance on S^1
double arc_distance(const UnitPhase& a, const UnitPhase& b);

// Given non-null w with (w,w) = 1, returns u, v with {u,v,w} conjugate:
// (x_j, x_k) = delta_jk.  Throws DegenerateInput when w is (numerically) null.
// Gram-Schmidt against the symmetric form, seeded from the standard basis
// vectors least aligned with w; ties broken by index.
std::pair<Vec3c, Vec3c> conjugate_basis(const Vec3c& w);

// Complex orthogonal A with A^-1 = (u, v, w), w parallel to conj(e); maps
// <<e>>^perp onto {(z1, z2, 0)}.  Principal branch for the normalisation
// sqrt((e~, e~)).
Mat3c make_rotation(const Vec3c& e);

inline Vec3c apply_matrix(const Mat3c& A, const Vec3c& u) { return A.apply(u); }

} // namespace nullprop
