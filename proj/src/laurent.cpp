#include "nullprop/laurent.hpp"

#include <algorithm>
#include <cmath>

namespace nullprop {

Laurent Laurent::constant(cplx value, cplx center) {
    return Laurent(center, 0, {value});
}

Laurent Laurent::monomial(int k, cplx value, cplx center) {
    return Laurent(center, k, {value});
}

cplx Laurent::coeff(int k) const {
    if (k < k_min || k > k_max()) return 0.0;
    return coeffs[static_cast<size_t>(k - k_min)];
}

void Laurent::set_coeff(int k, cplx value) {
    if (coeffs.empty()) {
        k_min = k;
        coeffs.assign(1, value);
        return;
    }
    if (k < k_min) {
        coeffs.insert(coeffs.begin(), static_cast<size_t>(k_min - k), cplx(0.0));
        k_min = k;
    } else if (k > k_max()) {
        coeffs.resize(static_cast<size_t>(k - k_min) + 1, cplx(0.0));
    }
    coeffs[static_cast<size_t>(k - k_min)] = value;
}

cplx Laurent::eval(cplx z) const {
    const cplx w = z - center;
    // non-negative part by Horner in w, negative part by Horner in 1/w
    cplx pos = 0.0, neg = 0.0;
    if (coeffs.empty()) return 0.0;
    const int k0 = std::max(k_min, 0);
    for (int k = k_max(); k >= k0; --k) pos = pos * w + coeff(k);
    for (int i = 0; i < k0; ++i) pos *= w;
    if (k_min < 0) {
        const cplx iw = 1.0 / w;
        for (int k = k_min; k <= -1; ++k) neg = neg * iw + coeff(k);
        neg *= iw;  // closes the Horner recursion at exponent -1
    }
    return pos + neg;
}

cplx Laurent::eval_deriv(cplx z) const {
    return derivative().eval(z);
}

Laurent Laurent::derivative() const {
    if (coeffs.empty()) return Laurent(center, 0, {});
    Laurent d(center, k_min - 1, std::vector<cplx>(coeffs.size()));
    for (size_t i = 0; i < coeffs.size(); ++i) {
        const int k = k_min + static_cast<int>(i);
        d.coeffs[i] = coeffs[i] * static_cast<double>(k);
    }
    return d.trimmed(0.0);
}

Laurent Laurent::antiderivative(double tol) const {
    const double scale = std::max(max_abs_coeff(), 1e-300);
    const cplx res = coeff(-1);
    if (std::abs(res) > tol * scale)
        throw NonExact("antiderivative: z^-1 coefficient " + std::to_string(std::abs(res)) +
                       " exceeds tolerance");
    Laurent a(center, 0, {});
    for (size_t i = 0; i < coeffs.size(); ++i) {
        const int k = k_min + static_cast<int>(i);
        if (k == -1) continue;  // below tolerance, dropped
        a.set_coeff(k + 1, coeffs[i] / static_cast<double>(k + 1));
    }
    return a;
}

namespace {

Laurent add_scaled(const Laurent& a, const Laurent& b, cplx sb) {
    if (a.coeffs.empty()) return b * sb;
    if (b.coeffs.empty()) return a;
    Laurent r(a.center, std::min(a.k_min, b.k_min), {});
    const int hi = std::max(a.k_max(), b.k_max());
    r.coeffs.assign(static_cast<size_t>(hi - r.k_min) + 1, cplx(0.0));
    for (int k = r.k_min; k <= hi; ++k)
        r.coeffs[static_cast<size_t>(k - r.k_min)] = a.coeff(k) + sb * b.coeff(k);
    return r;
}

} // namespace

Laurent Laurent::operator+(const Laurent& o) const { return add_scaled(*this, o, 1.0); }
Laurent Laurent::operator-(const Laurent& o) const { return add_scaled(*this, o, -1.0); }

Laurent Laurent::operator*(const Laurent& o) const {
    if (coeffs.empty() || o.coeffs.empty()) return Laurent(center, 0, {});
    Laurent r(center, k_min + o.k_min,
              std::vector<cplx>(coeffs.size() + o.coeffs.size() - 1, cplx(0.0)));
    for (size_t i = 0; i < coeffs.size(); ++i)
        for (size_t j = 0; j < o.coeffs.size(); ++j)
            r.coeffs[i + j] += coeffs[i] * o.coeffs[j];
    return r;
}

Laurent Laurent::operator*(cplx s) const {
    Laurent r = *this;
    for (auto& c : r.coeffs) c *= s;
    return r;
}

double Laurent::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& c : coeffs) m = std::max(m, std::abs(c));
    return m;
}

Laurent Laurent::trimmed(double tol) const {
    size_t lo = 0, hi = coeffs.size();
    while (lo < hi && std::abs(coeffs[lo]) <= tol) ++lo;
    while (hi > lo && std::abs(coeffs[hi - 1]) <= tol) --hi;
    Laurent r(center, k_min + static_cast<int>(lo),
              std::vector<cplx>(coeffs.begin() + static_cast<long>(lo),
                                coeffs.begin() + static_cast<long>(hi)));
    if (r.coeffs.empty()) r.k_min = 0;
    return r;
}

Laurent null_identity_poly(const LaurentTriple& t) {
    return t.c1 * t.c1 + t.c2 * t.c2 + t.c3 * t.c3;
}

} // namespace nullprop
