#include "nullprop/geom3.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace nullprop {

bool Vec3c::finite() const {
    for (int j = 0; j < 3; ++j) {
        cplx c = (*this)[j];
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    }
    return true;
}

cplx sym_form(const Vec3c& u, const Vec3c& v) {
    return u.z1 * v.z1 + u.z2 * v.z2 + u.z3 * v.z3;
}

cplx herm_form(const Vec3c& u, const Vec3c& v) {
    return std::conj(u.z1) * v.z1 + std::conj(u.z2) * v.z2 + std::conj(u.z3) * v.z3;
}

double eucl_form(const Vec3c& u, const Vec3c& v) {
    return std::real(herm_form(u, v));
}

bool is_null(const Vec3c& u, double tol) {
    const double h = std::real(herm_form(u, u));
    if (h <= 0.0) return false;  // zero vector is excluded from Theta
    return std::abs(sym_form(u, u)) < tol * h;
}

Vec3c cross(const Vec3c& a, const Vec3c& b) {
    return {a.z2 * b.z3 - a.z3 * b.z2,
            a.z3 * b.z1 - a.z1 * b.z3,
            a.z1 * b.z2 - a.z2 * b.z1};
}

Mat3c Mat3c::identity() {
    Mat3c m;
    m.col[0] = {1.0, 0.0, 0.0};
    m.col[1] = {0.0, 1.0, 0.0};
    m.col[2] = {0.0, 0.0, 1.0};
    return m;
}

Mat3c Mat3c::from_columns(const Vec3c& a, const Vec3c& b, const Vec3c& c) {
    Mat3c m;
    m.col = {a, b, c};
    return m;
}

Vec3c Mat3c::apply(const Vec3c& u) const {
    return col[0] * u.z1 + col[1] * u.z2 + col[2] * u.z3;
}

Mat3c Mat3c::transpose() const {
    Mat3c t;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) t.col[j][i] = col[i][j];
    return t;
}

Mat3c Mat3c::operator*(const Mat3c& o) const {
    Mat3c r;
    for (int j = 0; j < 3; ++j) r.col[j] = apply(o.col[j]);
    return r;
}

double Mat3c::orthogonality_defect() const {
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            cplx g = sym_form(col[i], col[j]);
            if (i == j) g -= 1.0;
            worst = std::max(worst, std::abs(g));
        }
    return worst;
}

double Mat3c::op_norm() const {
    Eigen::Matrix3cd m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = col[j][i];
    Eigen::JacobiSVD<Eigen::Matrix3cd> svd(m);
    return svd.singularValues()(0);
}

UnitPhase::UnitPhase(cplx value) : v(value) {
    if (std::abs(std::abs(v) - 1.0) > 1e-12)
        throw DegenerateInput("unit phase has |v| != 1");
}

UnitPhase UnitPhase::from_turns(double turns) {
    const double a = 2.0 * M_PI * turns;
    return UnitPhase(cplx(std::cos(a), std::sin(a)));
}

double arc_distance(const UnitPhase& a, const UnitPhase& b) {
    return std::abs(std::arg(a.v * std::conj(b.v)));
}

namespace {

// principal square root
cplx psqrt(cplx z) { return std::sqrt(z); }

// project x off w for the symmetric form (w assumed (w,w)=1) and try to
// normalise; returns false when the projection is numerically null
bool sym_project_normalize(const Vec3c& x, const Vec3c& w, const Vec3c* u_prev, Vec3c& out) {
    Vec3c p = x - sym_form(x, w) * w;
    if (u_prev) p = p - sym_form(p, *u_prev) * (*u_prev);
    const cplx q = sym_form(p, p);
    const double h = std::real(herm_form(p, p));
    // reject collapsed projections (relative to the seed) and null ones
    if (h <= 1e-12 * std::real(herm_form(x, x)) || std::abs(q) < 1e-8 * h) return false;
    out = p * (1.0 / psqrt(q));
    return true;
}

} // namespace

std::pair<Vec3c, Vec3c> conjugate_basis(const Vec3c& w) {
    const cplx ww = sym_form(w, w);
    const double h = std::real(herm_form(w, w));
    if (h <= 0.0 || std::abs(ww) < kTolNull * h)
        throw DegenerateInput("conjugate_basis: w is null (or zero)");

    // candidates ordered by |(e_i, w)| ascending, index order on ties
    std::array<int, 3> order{0, 1, 2};
    std::array<double, 3> align{};
    for (int i = 0; i < 3; ++i) {
        Vec3c e;
        e[i] = 1.0;
        align[i] = std::abs(sym_form(e, w));
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return align[a] < align[b]; });

    auto basis_vec = [](int i) {
        Vec3c e;
        e[i] = 1.0;
        return e;
    };

    Vec3c u, v;
    bool have_u = false;
    for (int i = 0; i < 3 && !have_u; ++i)
        have_u = sym_project_normalize(basis_vec(order[i]), w, nullptr, u);
    if (!have_u) {
        // all basis projections null: sums of pairs cannot all be null too
        for (int i = 0; i < 3 && !have_u; ++i)
            for (int j = i + 1; j < 3 && !have_u; ++j)
                have_u = sym_project_normalize(basis_vec(i) + basis_vec(j), w, nullptr, u);
    }
    if (!have_u) throw DegenerateInput("conjugate_basis: no non-null complement vector found");

    bool have_v = false;
    for (int i = 0; i < 3 && !have_v; ++i)
        have_v = sym_project_normalize(basis_vec(order[i]), w, &u, v);
    if (!have_v) {
        // cross product of two conjugate unit vectors completes the basis
        v = cross(w, u);
        const cplx vv = sym_form(v, v);
        if (std::abs(vv - 1.0) > 1e-8) v = v * (1.0 / psqrt(vv));
        have_v = true;
    }
    return {u, v};
}

Mat3c make_rotation(const Vec3c& e) {
    const double he = std::real(herm_form(e, e));
    if (he <= 0.0 || std::abs(sym_form(e, e)) < kTolNull * he)
        throw DegenerateInput("make_rotation: e is null (or zero)");

    const Vec3c ebar{std::conj(e.z1), std::conj(e.z2), std::conj(e.z3)};
    const Vec3c w = ebar * (1.0 / psqrt(sym_form(ebar, ebar)));
    auto [u, v] = conjugate_basis(w);
    // columns of A^-1 form the conjugate basis, so A = (u v w)^T
    return Mat3c::from_columns(u, v, w).transpose();
}

} // namespace nullprop
