#include "nullprop/holo.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace nullprop {

namespace {

constexpr cplx kI{0.0, 1.0};

void write_cplx(std::ostream& os, cplx c) {
    os << ' ' << c.real() << ' ' << c.imag();
}

cplx read_cplx(std::istream& is) {
    double re = 0.0, im = 0.0;
    is >> re >> im;
    return {re, im};
}

void write_laurent(std::ostream& os, const Laurent& s) {
    write_cplx(os, s.center);
    os << ' ' << s.k_min << ' ' << s.coeffs.size();
    for (const auto& c : s.coeffs) write_cplx(os, c);
}

Laurent read_laurent(std::istream& is) {
    Laurent s;
    s.center = read_cplx(is);
    size_t n = 0;
    is >> s.k_min >> n;
    if (!is) throw ParseError("bad laurent header");
    s.coeffs.resize(n);
    for (auto& c : s.coeffs) c = read_cplx(is);
    return s;
}

std::string next_token(std::istream& is) {
    std::string t;
    if (!(is >> t)) throw ParseError("unexpected end of node stream");
    return t;
}

} // namespace

void LaurentFun::write(std::ostream& os) const {
    os << "laurent";
    write_laurent(os, series);
    os << '\n';
}

cplx ExpWFun::eval(cplx z) const {
    cplx v = std::exp(logpart.eval(z));
    if (winding != 0) v *= std::pow(z - logpart.center, winding);
    return v;
}

cplx ExpWFun::deriv(cplx z) const {
    cplx rate = dlog.eval(z);
    if (winding != 0) rate += static_cast<double>(winding) / (z - logpart.center);
    return rate * eval(z);
}

void ExpWFun::write(std::ostream& os) const {
    os << "expw " << winding;
    write_laurent(os, logpart);
    os << '\n';
}

cplx ScaledSumFun::eval(cplx z) const {
    cplx s = 0.0;
    for (const auto& [c, f] : terms) s += c * f->eval(z);
    return s;
}

cplx ScaledSumFun::deriv(cplx z) const {
    cplx s = 0.0;
    for (const auto& [c, f] : terms) s += c * f->deriv(z);
    return s;
}

void ScaledSumFun::write(std::ostream& os) const {
    os << "sum " << terms.size() << '\n';
    for (const auto& [c, f] : terms) {
        os << "coef";
        write_cplx(os, c);
        os << '\n';
        f->write(os);
    }
}

cplx ProductFun::eval(cplx z) const {
    cplx p = 1.0;
    for (const auto& f : factors) p *= f->eval(z);
    return p;
}

cplx ProductFun::deriv(cplx z) const {
    // product rule without assuming nonvanishing factors
    cplx total = 0.0;
    for (size_t i = 0; i < factors.size(); ++i) {
        cplx term = factors[i]->deriv(z);
        for (size_t j = 0; j < factors.size(); ++j)
            if (j != i) term *= factors[j]->eval(z);
        total += term;
    }
    return total;
}

void ProductFun::write(std::ostream& os) const {
    os << "prod " << factors.size() << '\n';
    for (const auto& f : factors) f->write(os);
}

HoloPtr make_laurent_fun(Laurent s) {
    return std::make_shared<LaurentFun>(std::move(s));
}

void TripleRawNode::write(std::ostream& os) const {
    os << "triple\n";
    f1->write(os);
    f2->write(os);
    f3->write(os);
}

void MatAppliedNode::write(std::ostream& os) const {
    os << "mat";
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) write_cplx(os, mat.col[j][i]);
    os << '\n';
    inner->write(os);
}

Vec3c LogPairNode::eval(cplx z) const {
    const cplx p = P->eval(z);
    const cplx t = phi3->eval(z);
    const cplx q = -t * t / p;
    const cplx a = swapped ? q : p;  // phi1 + i phi2
    const cplx b = swapped ? p : q;  // phi1 - i phi2
    return {(a + b) / 2.0, (a - b) / (2.0 * kI), t};
}

Vec3c LogPairNode::deriv(cplx z) const {
    const cplx p = P->eval(z);
    const cplx t = phi3->eval(z);
    const cplx dp = P->deriv(z);
    const cplx dt = phi3->deriv(z);
    const cplx dq = (-2.0 * t * dt + t * t * dp / p) / p;
    const cplx da = swapped ? dq : dp;
    const cplx db = swapped ? dp : dq;
    return {(da + db) / 2.0, (da - db) / (2.0 * kI), dt};
}

void LogPairNode::write(std::ostream& os) const {
    os << "logpair " << (swapped ? 1 : 0) << '\n';
    P->write(os);
    phi3->write(os);
}

void PhiComponentFun::write(std::ostream& os) const {
    os << "phicomp " << j << '\n';
    node->write(os);
}

void write_holo(std::ostream& os, const HoloFun& f) { f.write(os); }
void write_phi(std::ostream& os, const PhiNode& n) { n.write(os); }

HoloPtr read_holo(std::istream& is) {
    const std::string kind = next_token(is);
    if (kind == "laurent") return std::make_shared<LaurentFun>(read_laurent(is));
    if (kind == "expw") {
        int w = 0;
        is >> w;
        return std::make_shared<ExpWFun>(read_laurent(is), w);
    }
    if (kind == "sum") {
        size_t n = 0;
        is >> n;
        std::vector<std::pair<cplx, HoloPtr>> terms;
        terms.reserve(n);
        for (size_t i = 0; i < n; ++i) {
            if (next_token(is) != "coef") throw ParseError("sum: expected coef");
            cplx c = read_cplx(is);
            terms.emplace_back(c, read_holo(is));
        }
        return std::make_shared<ScaledSumFun>(std::move(terms));
    }
    if (kind == "prod") {
        size_t n = 0;
        is >> n;
        std::vector<HoloPtr> fs;
        fs.reserve(n);
        for (size_t i = 0; i < n; ++i) fs.push_back(read_holo(is));
        return std::make_shared<ProductFun>(std::move(fs));
    }
    if (kind == "phicomp") {
        int j = 0;
        is >> j;
        return std::make_shared<PhiComponentFun>(read_phi(is), j);
    }
    throw ParseError("unknown scalar node kind '" + kind + "'");
}

PhiPtr read_phi(std::istream& is) {
    const std::string kind = next_token(is);
    if (kind == "triple") {
        HoloPtr a = read_holo(is);
        HoloPtr b = read_holo(is);
        HoloPtr c = read_holo(is);
        return std::make_shared<TripleRawNode>(a, b, c);
    }
    if (kind == "mat") {
        Mat3c m;
        for (int j = 0; j < 3; ++j)
            for (int i = 0; i < 3; ++i) m.col[j][i] = read_cplx(is);
        return std::make_shared<MatAppliedNode>(m, read_phi(is));
    }
    if (kind == "logpair") {
        int sw = 0;
        is >> sw;
        HoloPtr p = read_holo(is);
        HoloPtr t = read_holo(is);
        return std::make_shared<LogPairNode>(p, t, sw != 0);
    }
    throw ParseError("unknown vector node kind '" + kind + "'");
}

namespace {

template <typename EvalFn>
Laurent project_laurent_impl(EvalFn&& f, cplx center, double radius,
                             int k_lo, int k_hi, int n) {
    if (k_hi < k_lo) throw DegenerateInput("project_laurent: empty range");
    if (n < 4 * (k_hi - k_lo + 1)) n = 4 * (k_hi - k_lo + 1);
    std::vector<cplx> vals(static_cast<size_t>(n));
    for (int m = 0; m < n; ++m) {
        const double th = 2.0 * M_PI * m / n;
        vals[static_cast<size_t>(m)] = f(center + radius * cplx(std::cos(th), std::sin(th)));
    }
    Laurent out(center, k_lo, std::vector<cplx>(static_cast<size_t>(k_hi - k_lo + 1), cplx(0.0)));
    for (int k = k_lo; k <= k_hi; ++k) {
        cplx acc = 0.0;
        for (int m = 0; m < n; ++m) {
            const double th = 2.0 * M_PI * m / n;
            acc += vals[static_cast<size_t>(m)] * cplx(std::cos(k * th), -std::sin(k * th));
        }
        out.coeffs[static_cast<size_t>(k - k_lo)] = acc / (static_cast<double>(n) * std::pow(radius, k));
    }
    return out;
}

} // namespace

Laurent project_laurent(const HoloFun& f, cplx center, double radius,
                        int k_lo, int k_hi, int n_samples) {
    return project_laurent_impl([&](cplx z) { return f.eval(z); }, center, radius,
                                k_lo, k_hi, n_samples);
}

Laurent project_laurent(const PhiNode& node, int comp, cplx center, double radius,
                        int k_lo, int k_hi, int n_samples) {
    return project_laurent_impl([&](cplx z) { return node.eval(z)[comp]; }, center, radius,
                                k_lo, k_hi, n_samples);
}

} // namespace nullprop
