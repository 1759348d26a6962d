#include "nullprop/runge.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include <Eigen/Dense>

namespace nullprop {

namespace {

constexpr cplx kI{0.0, 1.0};

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

// Orthonormal polynomial / Laurent basis adapted to the weighted sample set,
// built by the Arnoldi recurrence on multiplication by (z-c) and 1/(z-c).
// Raw Vandermonde systems on this kind of geometry (a region plus thin arcs)
// go numerically rank-deficient long before the degrees the fits need.
struct ArnoldiBasis {
    cplx center;
    struct Gen {
        bool inv;            // advance by 1/(z-c) instead of (z-c)
        int prev;            // index of the function being advanced
        Eigen::VectorXcd h;  // orthogonalization coefficients against f_0..f_{k-1}
        cplx hk;             // normalization
    };
    std::vector<Gen> gens;
    MatrixXcd Q;  // weighted basis columns over the build points

    int size() const { return static_cast<int>(gens.size()); }

    static ArnoldiBasis build(const std::vector<cplx>& pts, const std::vector<double>& sqrtw,
                              cplx center, int n_pos, int n_neg) {
        const size_t m = pts.size();
        const int total = 1 + n_pos + n_neg;
        if (m < static_cast<size_t>(total))
            throw IllConditioned("arnoldi basis: fewer samples than basis functions");
        ArnoldiBasis B;
        B.center = center;
        B.Q.resize(static_cast<long>(m), total);
        B.gens.reserve(static_cast<size_t>(total));

        VectorXcd v(static_cast<long>(m));
        for (size_t r = 0; r < m; ++r) v(static_cast<long>(r)) = sqrtw[r];
        const cplx h00 = v.norm();
        if (std::abs(h00) <= 0.0) throw IllConditioned("arnoldi basis: zero weights");
        B.Q.col(0) = v / h00;
        B.gens.push_back({false, -1, Eigen::VectorXcd(), h00});

        auto advance = [&](bool inv, int prev) {
            const int k = B.size();
            VectorXcd w(static_cast<long>(m));
            for (size_t r = 0; r < m; ++r) {
                const cplx op = inv ? 1.0 / (pts[r] - center) : (pts[r] - center);
                w(static_cast<long>(r)) = op * B.Q(static_cast<long>(r), prev);
            }
            const double scale0 = w.norm();
            Eigen::VectorXcd h = Eigen::VectorXcd::Zero(k);
            for (int round = 0; round < 2; ++round) {  // CGS twice
                const VectorXcd proj = B.Q.leftCols(k).adjoint() * w;
                w -= B.Q.leftCols(k) * proj;
                h += proj;
            }
            const double hk = w.norm();
            if (!(hk > 1e-14 * scale0))
                throw IllConditioned("arnoldi basis: breakdown (cap too high for samples)");
            B.Q.col(k) = w / hk;
            B.gens.push_back({inv, prev, h, hk});
        };

        int prev = 0;
        for (int k = 0; k < n_pos; ++k) {
            advance(false, prev);
            prev = B.size() - 1;
        }
        prev = 0;
        for (int k = 0; k < n_neg; ++k) {
            advance(true, prev);
            prev = B.size() - 1;
        }
        return B;
    }

    // unweighted basis values at an arbitrary point
    void eval_row(cplx z, std::vector<cplx>& out) const {
        const int n = size();
        out.assign(static_cast<size_t>(n), cplx(0.0));
        out[0] = 1.0 / gens[0].hk;
        for (int k = 1; k < n; ++k) {
            const Gen& g = gens[static_cast<size_t>(k)];
            const cplx op = g.inv ? 1.0 / (z - center) : (z - center);
            cplx v = op * out[static_cast<size_t>(g.prev)];
            for (int j = 0; j < k; ++j) v -= g.h(j) * out[static_cast<size_t>(j)];
            out[static_cast<size_t>(k)] = v / g.hk;
        }
    }

    cplx eval_comb(const VectorXcd& coef, cplx z, std::vector<cplx>& scratch) const {
        eval_row(z, scratch);
        cplx acc = 0.0;
        for (int k = 0; k < size(); ++k) acc += coef(k) * scratch[static_cast<size_t>(k)];
        return acc;
    }

    // exact Laurent coefficients of the fitted combination by ring projection:
    // non-negative exponents from the outer ring, negative from the inner one
    Laurent to_laurent(const VectorXcd& coef, double ring_out, double ring_in, int k_hi,
                       int k_lo) const {
        const int n_ring = 4 * (k_hi - k_lo + 1) + 64;
        std::vector<cplx> scratch;
        Laurent out(center, k_lo,
                    std::vector<cplx>(static_cast<size_t>(k_hi - k_lo + 1), cplx(0.0)));
        auto project = [&](double rho, int a, int b) {
            std::vector<cplx> vals(static_cast<size_t>(n_ring));
            for (int m = 0; m < n_ring; ++m) {
                const double th = 2.0 * M_PI * m / n_ring;
                vals[static_cast<size_t>(m)] =
                    eval_comb(coef, center + rho * cplx(std::cos(th), std::sin(th)), scratch);
            }
            for (int k = a; k <= b; ++k) {
                cplx acc = 0.0;
                for (int m = 0; m < n_ring; ++m) {
                    const double th = 2.0 * M_PI * m / n_ring;
                    acc +=
                        vals[static_cast<size_t>(m)] * cplx(std::cos(k * th), -std::sin(k * th));
                }
                out.set_coeff(k, acc / (static_cast<double>(n_ring) * std::pow(rho, k)));
            }
        };
        project(ring_out, 0, k_hi);
        if (k_lo < 0) project(ring_in, k_lo, -1);
        return out.trimmed(0.0);
    }
};

double condition_estimate(const Eigen::ColPivHouseholderQR<MatrixXcd>& qr) {
    const auto& R = qr.matrixR();
    const int n = std::min<int>(R.rows(), R.cols());
    double hi = 0.0, lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double d = std::abs(R(i, i));
        hi = std::max(hi, d);
        lo = std::min(lo, d);
    }
    return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

// least squares with optional exact linear constraints C x = d
VectorXcd constrained_lsq(const MatrixXcd& A, const VectorXcd& b, const MatrixXcd& C,
                          const VectorXcd& d, double* cond_out) {
    Eigen::ColPivHouseholderQR<MatrixXcd> qr(A);
    qr.setThreshold(1e-12);
    if (cond_out) *cond_out = condition_estimate(qr);
    if (C.rows() == 0) return qr.solve(b);
    const VectorXcd x0 = C.completeOrthogonalDecomposition().solve(d);
    Eigen::FullPivLU<MatrixXcd> lu(C);
    lu.setThreshold(1e-12);
    const MatrixXcd N = lu.kernel();
    if (N.cols() == 0) return x0;
    const MatrixXcd AN = A * N;
    Eigen::ColPivHouseholderQR<MatrixXcd> qr2(AN);
    qr2.setThreshold(1e-12);
    if (cond_out) *cond_out = std::max(*cond_out, condition_estimate(qr2));
    const VectorXcd y = qr2.solve(b - A * x0);
    return x0 + N * y;
}

// Iteratively reweighted least squares pushing the weighted residual toward
// the sup norm (Lawson); only the first n_data rows are reweighted, prior
// rows keep their weights.
VectorXcd lawson_lsq(MatrixXcd A, VectorXcd b, const MatrixXcd& C, const VectorXcd& d,
                     double* cond_out, size_t n_data, int iters) {
    VectorXcd x = constrained_lsq(A, b, C, d, cond_out);
    for (int it = 0; it < iters; ++it) {
        const VectorXcd r = A * x - b;
        double rmax = 0.0;
        for (size_t i = 0; i < n_data; ++i) rmax = std::max(rmax, std::abs(r(static_cast<long>(i))));
        if (!(rmax > 0.0) || !std::isfinite(rmax)) break;
        for (size_t i = 0; i < n_data; ++i) {
            const double f = std::sqrt(std::abs(r(static_cast<long>(i))) / rmax + 0.05);
            A.row(static_cast<long>(i)) *= f;
            b(static_cast<long>(i)) *= f;
        }
        x = constrained_lsq(A, b, C, d, cond_out);
    }
    return x;
}

} // namespace

std::vector<FitSample> collect_samples(const GeneralizedNullCurve& G, double grid_scale) {
    std::vector<FitSample> out;
    for (const auto& piece : G.pieces) {
        const SampleGrid bd = boundary_grid(piece.region, grid_scale);
        const SampleGrid ar = area_grid(piece.region, grid_scale);
        size_t idx = 0;
        auto add = [&](const GridPoint& p, bool boundary) {
            FitSample s;
            s.z = p.z;
            s.value = piece.rep.value(p.z) + piece.shift;
            s.phi = piece.rep.phi(p.z);
            s.dphi = piece.rep.phi_deriv(p.z);
            s.has_dphi = true;
            s.weight = p.weight;
            // boundary rows always enter the fit; area rows are decimated
            s.fit_row = boundary || (idx % 8 == 0);
            ++idx;
            out.push_back(s);
        };
        for (const auto& p : bd.points) add(p, true);
        for (const auto& p : ar.points) add(p, false);
    }
    for (const auto& leg : G.legs) {
        const auto& samples = leg.curve.samples;
        const size_t n = samples.size();
        for (size_t i = 0; i < n; ++i) {
            FitSample s;
            const double u = samples[i].u;
            const cplx dz = leg.arc.deriv(u);
            s.z = leg.arc.eval(u);
            s.value = samples[i].value;
            s.phi = samples[i].dvalue * (1.0 / dz);
            // d phi / dz by centered differences along the leg
            const size_t a = i > 0 ? i - 1 : i;
            const size_t b = i + 1 < n ? i + 1 : i;
            const cplx za = leg.arc.eval(samples[a].u), zb = leg.arc.eval(samples[b].u);
            if (std::abs(zb - za) > 1e-12) {
                const Vec3c phia = samples[a].dvalue * (1.0 / leg.arc.deriv(samples[a].u));
                const Vec3c phib = samples[b].dvalue * (1.0 / leg.arc.deriv(samples[b].u));
                s.dphi = (phib - phia) * (1.0 / (zb - za));
                s.has_dphi = true;
            }
            const double u_lo = i > 0 ? samples[i - 1].u : samples[i].u;
            const double u_hi = i + 1 < n ? samples[i + 1].u : samples[i].u;
            s.weight = leg.arc.length() * (u_hi - u_lo) / 2.0;
            s.leg = true;
            out.push_back(s);
        }
    }
    if (out.empty()) throw EmptyGrid("collect_samples: nothing to fit");
    return out;
}

namespace {

// probe points of W away from the sample set; they keep the fit tame where
// no data constrains it
std::vector<GridPoint> offset_probes(std::span<const FitSample> samples, const CompactRegion& W) {
    const SampleGrid wg = area_grid(W, 0.5);
    std::vector<GridPoint> out;
    const double clear2 = 0.01;  // squared distance threshold
    for (const auto& p : wg.points) {
        bool near = false;
        for (const auto& s : samples) {
            const double dx = std::real(p.z - s.z), dy = std::imag(p.z - s.z);
            if (dx * dx + dy * dy < clear2) {
                near = true;
                break;
            }
        }
        if (!near) out.push_back(p);
    }
    return out;
}

// weighted Laurent least squares for a scalar target over the adapted basis;
// probes pull the fit toward zero away from the data, and the residue is
// pinned to zero on annuli
Laurent fit_scalar_points(std::vector<cplx> pts, std::vector<double> sw, std::vector<cplx> tg,
                          const CompactRegion& W, int degree_cap,
                          const std::vector<GridPoint>& probes, double damp, int lawson_iters) {
    const bool annular = W.kind == CompactRegion::Kind::annulus;
    const size_t n_data = pts.size();
    double data_scale = 0.0;
    for (const auto& t : tg) data_scale = std::max(data_scale, std::abs(t));
    for (const auto& p : probes) {
        pts.push_back(p.z);
        sw.push_back(damp * std::sqrt(p.weight));
        tg.push_back(0.0);
    }
    const ArnoldiBasis B =
        ArnoldiBasis::build(pts, sw, W.center, degree_cap, annular ? degree_cap : 0);

    MatrixXcd C(0, B.size());
    VectorXcd d(0);
    if (annular) {
        // residue row via the inner ring
        C = MatrixXcd::Zero(1, B.size());
        d = VectorXcd::Zero(1);
        const int n_ring = 4 * B.size() + 64;
        std::vector<cplx> row;
        for (int m = 0; m < n_ring; ++m) {
            const double th = 2.0 * M_PI * m / n_ring;
            const cplx z = W.center + W.r_inner * cplx(std::cos(th), std::sin(th));
            B.eval_row(z, row);
            const cplx phase =
                cplx(std::cos(th), std::sin(th)) * (W.r_inner / static_cast<double>(n_ring));
            for (int k = 0; k < B.size(); ++k) C(0, k) += row[static_cast<size_t>(k)] * phase;
        }
    }

    // two rounds: probes first pull toward zero, then toward the previous
    // fit's own (clamped) values, so probes near large data stop fighting it
    VectorXcd x;
    for (int round = 0; round < 2; ++round) {
        VectorXcd rhs(static_cast<long>(pts.size()));
        for (size_t r = 0; r < pts.size(); ++r) rhs(static_cast<long>(r)) = sw[r] * tg[r];
        double cond = 0.0;
        x = lawson_lsq(B.Q, rhs, C, d, &cond, n_data, lawson_iters);
        if (round == 0) {
            std::vector<cplx> scratch;
            for (size_t r = n_data; r < pts.size(); ++r) {
                cplx v = B.eval_comb(x, pts[r], scratch);
                const double cap_mag = 3.0 * std::max(data_scale, 1e-300);
                if (std::abs(v) > cap_mag) v *= cap_mag / std::abs(v);
                tg[r] = v;
            }
        }
    }
    return B.to_laurent(x, W.r_outer, annular ? W.r_inner : 0.0, degree_cap,
                        annular ? -degree_cap : 0);
}

Laurent fit_scalar_arnoldi(std::span<const FitSample> samples, const CompactRegion& W,
                           int degree_cap, const std::function<cplx(const FitSample&)>& target,
                           const std::vector<GridPoint>& probes, double damp, int lawson_iters) {
    std::vector<cplx> pts;
    std::vector<double> sw;
    std::vector<cplx> tg;
    for (const auto& s : samples) {
        if (!s.fit_row) continue;
        pts.push_back(s.z);
        sw.push_back(std::sqrt(s.weight));
        tg.push_back(target(s));
    }
    return fit_scalar_points(std::move(pts), std::move(sw), std::move(tg), W, degree_cap, probes,
                             damp, lawson_iters);
}

} // namespace

namespace {

std::pair<Laurent, Laurent> fit_spinor_impl(std::span<const FitSample> samples,
                                            const CompactRegion& W, int degree_cap,
                                            const std::vector<GridPoint>* probes, double damp) {
    const bool annular = W.kind == CompactRegion::Kind::annulus;

    double phi_scale = 0.0;
    for (const auto& s : samples) phi_scale = std::max(phi_scale, norm(s.phi));
    if (phi_scale <= 0.0) throw ZeroData("fit_spinor: all derivative samples vanish");

    // one basis over data rows plus probe rows
    std::vector<cplx> pts;
    std::vector<double> sw;
    std::vector<Vec3c> phis;
    std::vector<char> probe_row;
    for (const auto& s : samples) {
        if (!s.fit_row) continue;
        pts.push_back(s.z);
        sw.push_back(std::sqrt(s.weight));
        phis.push_back(s.phi);
        probe_row.push_back(0);
    }
    const size_t n_data = pts.size();
    if (probes)
        for (const auto& p : *probes) {
            pts.push_back(p.z);
            sw.push_back(damp * std::sqrt(p.weight));
            phis.push_back(Vec3c{});
            probe_row.push_back(1);
        }
    const size_t m = pts.size();
    const ArnoldiBasis B =
        ArnoldiBasis::build(pts, sw, W.center, degree_cap, annular ? degree_cap : 0);
    const int n = B.size();

    // unweighted basis values at the rows
    MatrixXcd V(static_cast<long>(m), n);
    for (size_t r = 0; r < m; ++r) V.row(static_cast<long>(r)) = B.Q.row(static_cast<long>(r)) / sw[r];

    // residue constraint rows (annulus): coefficient -1 of eta * A_m via the
    // inner ring, recomputed per round since they depend on g
    const int n_ring = annular ? 4 * n + 64 : 0;
    std::vector<std::vector<cplx>> ring_rows;
    std::vector<cplx> ring_phase(static_cast<size_t>(n_ring));
    if (annular) {
        ring_rows.assign(static_cast<size_t>(n_ring), {});
        std::vector<cplx> row;
        for (int q = 0; q < n_ring; ++q) {
            const double th = 2.0 * M_PI * q / n_ring;
            const cplx z = W.center + W.r_inner * cplx(std::cos(th), std::sin(th));
            B.eval_row(z, row);
            ring_rows[static_cast<size_t>(q)] = row;
            ring_phase[static_cast<size_t>(q)] =
                cplx(std::cos(th), std::sin(th)) * (W.r_inner / static_cast<double>(n_ring));
        }
    }

    // initial g from the ratio on rows where eta is usable
    VectorXcd gc;
    {
        MatrixXcd A(static_cast<long>(m), n);
        VectorXcd b = VectorXcd::Zero(static_cast<long>(m));
        for (size_t r = 0; r < m; ++r) {
            double wr = 0.0;
            cplx t = 0.0;
            if (probe_row[r]) {
                wr = sw[r];  // pull g toward zero off the data
            } else {
                const cplx eta_s = phis[r].z1 - kI * phis[r].z2;
                if (std::abs(eta_s) >= 1e-10 * norm(phis[r])) {
                    wr = sw[r] * std::abs(eta_s);
                    t = phis[r].z3 / eta_s;
                }
            }
            A.row(static_cast<long>(r)) = wr * V.row(static_cast<long>(r));
            b(static_cast<long>(r)) = wr * t;
        }
        double cond = 0.0;
        gc = constrained_lsq(A, b, MatrixXcd(0, n), VectorXcd(0), &cond);
        if (!probes && cond > 1e12)
            throw IllConditioned("fit_spinor: g stage condition estimate too large");
    }

    VectorXcd ec = VectorXcd::Zero(n);
    auto eta_step = [&](const VectorXcd& gcur) {
        const VectorXcd gv = V * gcur;
        MatrixXcd A(static_cast<long>(3 * m), n);
        VectorXcd b = VectorXcd::Zero(static_cast<long>(3 * m));
        for (size_t r = 0; r < m; ++r) {
            const cplx gz = gv(static_cast<long>(r));
            cplx a1, a2, a3;
            if (probe_row[r]) {
                a1 = 1.0;  // pull eta itself toward zero off the data
                a2 = 0.0;
                a3 = 0.0;
            } else {
                a1 = (1.0 - gz * gz) * 0.5;
                a2 = kI * (1.0 + gz * gz) * 0.5;
                a3 = gz;
            }
            for (int j = 0; j < n; ++j) {
                const cplx bj = sw[r] * V(static_cast<long>(r), j);
                A(static_cast<long>(3 * r), j) = a1 * bj;
                A(static_cast<long>(3 * r + 1), j) = a2 * bj;
                A(static_cast<long>(3 * r + 2), j) = a3 * bj;
            }
            if (!probe_row[r]) {
                b(static_cast<long>(3 * r)) = sw[r] * phis[r].z1;
                b(static_cast<long>(3 * r + 1)) = sw[r] * phis[r].z2;
                b(static_cast<long>(3 * r + 2)) = sw[r] * phis[r].z3;
            }
        }
        MatrixXcd C(0, n);
        VectorXcd d(0);
        if (annular) {
            C = MatrixXcd::Zero(3, n);
            d = VectorXcd::Zero(3);
            for (int q = 0; q < n_ring; ++q) {
                // g on the ring from the current coefficients
                cplx gz = 0.0;
                for (int k = 0; k < n; ++k)
                    gz += gcur(k) * ring_rows[static_cast<size_t>(q)][static_cast<size_t>(k)];
                const cplx a1 = (1.0 - gz * gz) * 0.5;
                const cplx a2 = kI * (1.0 + gz * gz) * 0.5;
                const cplx a3 = gz;
                for (int k = 0; k < n; ++k) {
                    const cplx f =
                        ring_rows[static_cast<size_t>(q)][static_cast<size_t>(k)] *
                        ring_phase[static_cast<size_t>(q)];
                    C(0, k) += a1 * f;
                    C(1, k) += a2 * f;
                    C(2, k) += a3 * f;
                }
            }
        }
        double cond = 0.0;
        const VectorXcd out = constrained_lsq(A, b, C, d, &cond);
        if (!probes && cond > 1e12)
            throw IllConditioned("fit_spinor: eta stage condition estimate too large");
        return out;
    };
    ec = eta_step(gc);

    // alternate Gauss-Newton steps on the g block with eta refreshes; the
    // two-stage initialization alone leaves a percent-level cascade error
    for (int round = 0; round < 3; ++round) {
        const VectorXcd gv = V * gc;
        const VectorXcd ev = V * ec;
        MatrixXcd A(static_cast<long>(3 * m), n);
        VectorXcd b = VectorXcd::Zero(static_cast<long>(3 * m));
        for (size_t r = 0; r < m; ++r) {
            const cplx gz = gv(static_cast<long>(r));
            const cplx ez = ev(static_cast<long>(r));
            cplx j1, j2, j3, r1, r2, r3;
            if (probe_row[r]) {
                j1 = 1.0;  // keep the g update tame off the data
                j2 = 0.0;
                j3 = 0.0;
                r1 = r2 = r3 = 0.0;
            } else {
                j1 = -gz * ez;
                j2 = kI * gz * ez;
                j3 = ez;
                r1 = (1.0 - gz * gz) * ez * 0.5 - phis[r].z1;
                r2 = kI * (1.0 + gz * gz) * ez * 0.5 - phis[r].z2;
                r3 = gz * ez - phis[r].z3;
            }
            for (int j = 0; j < n; ++j) {
                const cplx bj = sw[r] * V(static_cast<long>(r), j);
                A(static_cast<long>(3 * r), j) = j1 * bj;
                A(static_cast<long>(3 * r + 1), j) = j2 * bj;
                A(static_cast<long>(3 * r + 2), j) = j3 * bj;
            }
            b(static_cast<long>(3 * r)) = -sw[r] * r1;
            b(static_cast<long>(3 * r + 1)) = -sw[r] * r2;
            b(static_cast<long>(3 * r + 2)) = -sw[r] * r3;
        }
        double cond = 0.0;
        const VectorXcd dg = constrained_lsq(A, b, MatrixXcd(0, n), VectorXcd(0), &cond);
        gc += dg;
        ec = eta_step(gc);
    }

    const Laurent g = B.to_laurent(gc, W.r_outer, annular ? W.r_inner : 0.0, degree_cap,
                                   annular ? -degree_cap : 0);
    const Laurent eta = B.to_laurent(ec, W.r_outer, annular ? W.r_inner : 0.0, degree_cap,
                                     annular ? -degree_cap : 0);
    return {g, eta};
}

} // namespace

std::pair<Laurent, Laurent> fit_spinor(std::span<const FitSample> samples,
                                       const CompactRegion& W, int degree_cap) {
    return fit_spinor_impl(samples, W, degree_cap, nullptr, 0.0);
}

double c1_error(const NullCurveRep& H, std::span<const FitSample> samples) {
    double worst = 0.0;
    for (const auto& s : samples) {
        const double v = norm(H.value(s.z) - s.value) + norm(H.phi(s.z) - s.phi);
        if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
        worst = std::max(worst, v);
    }
    return worst;
}

namespace {

// winding number of the factor around 0 along a circle inside S
int winding_on_circle(const std::function<cplx(cplx)>& P, cplx center, double radius) {
    const int n = 2048;
    double acc = 0.0;
    cplx prev = P(center + radius);
    for (int k = 1; k <= n; ++k) {
        const double th = 2.0 * M_PI * k / n;
        const cplx cur = P(center + radius * cplx(std::cos(th), std::sin(th)));
        acc += std::arg(cur / prev);
        prev = cur;
    }
    return static_cast<int>(std::lround(acc / (2.0 * M_PI)));
}

cplx period_of(const HoloFun& f, cplx center, double radius, int n = 4096) {
    cplx acc = 0.0;
    for (int k = 0; k < n; ++k) {
        const double th = 2.0 * M_PI * k / n;
        const cplx e{std::cos(th), std::sin(th)};
        acc += f.eval(center + radius * e) * (kI * radius * e);
    }
    return acc * (2.0 * M_PI / static_cast<double>(n));
}

struct LogFitResult {
    HoloPtr P;     // exp-form factor
    HoloPtr phi3;  // exact third component
    bool swapped{false};
};

// Branch-consistent logarithms of nonvanishing values over a connected
// sample cloud: breadth-first unwrapping with principal increments between
// linked neighbours.
std::vector<cplx> unwrap_log(const std::vector<cplx>& pts, const std::vector<cplx>& vals,
                             size_t seed) {
    const size_t n = pts.size();
    std::vector<cplx> out(n);
    std::vector<char> done(n, 0);
    double link = 0.05;
    for (int attempt = 0; attempt < 6; ++attempt) {
        std::fill(done.begin(), done.end(), 0);
        out[seed] = std::log(vals[seed]);
        done[seed] = 1;
        std::vector<size_t> queue{seed};
        size_t head = 0, reached = 1;
        while (head < queue.size()) {
            const size_t i = queue[head++];
            for (size_t j = 0; j < n; ++j) {
                if (done[j] || std::abs(pts[j] - pts[i]) > link) continue;
                out[j] = out[i] + std::log(vals[j] / vals[i]);  // principal increment
                done[j] = 1;
                queue.push_back(j);
                ++reached;
            }
        }
        if (reached == n) return out;
        link *= 2.0;
    }
    throw ProvisoViolated("unwrap_log: sample cloud is not connected at linking scale");
}

LogFitResult fit_logpair(std::span<const FitSample> samples,
                         const std::vector<GridPoint>& probes, const CompactRegion& W,
                         int degree_cap, const HoloPtr& phi3_node, cplx anchor, double damp,
                         int lawson_iters) {
    const bool annular = W.kind == CompactRegion::Kind::annulus;

    double phi_scale = 0.0;
    for (const auto& s : samples) phi_scale = std::max(phi_scale, norm(s.phi));

    // choose the factor (phi1 + i phi2 vs phi1 - i phi2) with the larger
    // minimum modulus over the samples; both vanish together only where the
    // third component does
    double min_plus = std::numeric_limits<double>::infinity();
    double min_minus = min_plus;
    for (const auto& s : samples) {
        min_plus = std::min(min_plus, std::abs(s.phi.z1 + kI * s.phi.z2));
        min_minus = std::min(min_minus, std::abs(s.phi.z1 - kI * s.phi.z2));
    }
    const bool swapped = min_minus > min_plus;
    auto factor = [&](const Vec3c& phi) {
        return swapped ? phi.z1 - kI * phi.z2 : phi.z1 + kI * phi.z2;
    };
    auto dfactor = [&](const Vec3c& dphi) {
        return swapped ? dphi.z1 - kI * dphi.z2 : dphi.z1 + kI * dphi.z2;
    };
    if (std::max(min_plus, min_minus) < 1e-8 * phi_scale)
        throw ProvisoViolated("fit_logpair: both horizontal factors vanish on a sample");

    // winding of the factor along the mid circle (annulus only)
    int w = 0;
    if (annular) {
        const double mid = std::sqrt(W.r_inner * W.r_outer);
        w = winding_on_circle(
            [&](cplx z) {
                const FitSample* best = nullptr;
                double bd = std::numeric_limits<double>::infinity();
                for (const auto& s : samples) {
                    const double dd = std::abs(s.z - z);
                    if (dd < bd) {
                        bd = dd;
                        best = &s;
                    }
                }
                return factor(best->phi);
            },
            W.center, mid);
    }

    // branch-consistent log targets of P (z-c)^-w over the fit rows, then a
    // direct value fit of L; the log form keeps targets at log scale so the
    // least squares cannot amplify the magnitude swings
    std::vector<cplx> fit_pts;
    std::vector<double> fit_sw;
    std::vector<cplx> fit_vals;
    size_t seed = 0;
    {
        double bd = std::numeric_limits<double>::infinity();
        for (const auto& s : samples) {
            if (!s.fit_row) continue;
            cplx v = factor(s.phi);
            if (w != 0) v *= std::pow(s.z - W.center, -w);
            const double dd = std::abs(s.z - anchor);
            if (dd < bd) {
                bd = dd;
                seed = fit_pts.size();
            }
            fit_pts.push_back(s.z);
            fit_sw.push_back(std::sqrt(s.weight));
            fit_vals.push_back(v);
        }
    }
    const std::vector<cplx> logs = unwrap_log(fit_pts, fit_vals, seed);
    Laurent L = fit_scalar_points(fit_pts, fit_sw, logs, W, degree_cap, probes, damp,
                                  lawson_iters);

    // annulus: drive the two cycle periods of phi1, phi2 to zero with a
    // damped Newton iteration on a few low-order coefficients
    if (annular) {
        const double ring = std::sqrt(W.r_inner * W.r_outer);
        auto periods = [&](const Laurent& Lc) -> Eigen::Vector2cd {
            const auto Pf = std::make_shared<ExpWFun>(Lc, w);
            std::vector<HoloPtr> fs{phi3_node, phi3_node,
                                    std::make_shared<ExpWFun>(Lc * cplx(-1.0), -w)};
            const auto Qf = std::make_shared<ProductFun>(fs);
            Eigen::Vector2cd out;
            out(0) = period_of(*Pf, W.center, ring);
            out(1) = period_of(*Qf, W.center, ring);
            return out;
        };
        const std::array<int, 4> knobs{-1, 1, -2, 2};
        for (int it = 0; it < 24; ++it) {
            const Eigen::Vector2cd f0 = periods(L);
            const double scale = std::max(1e-300, std::abs(std::exp(L.coeff(0))));
            if (f0.norm() < 1e-12 * scale) break;
            Eigen::Matrix<cplx, 2, 4> J;
            const double h = 1e-6;
            for (int q = 0; q < 4; ++q) {
                Laurent Lp = L;
                Lp.set_coeff(knobs[static_cast<size_t>(q)],
                             Lp.coeff(knobs[static_cast<size_t>(q)]) + h);
                J.col(q) = (periods(Lp) - f0) / h;
            }
            const Eigen::Vector4cd step = J.completeOrthogonalDecomposition().solve(-f0);
            for (int q = 0; q < 4; ++q)
                L.set_coeff(knobs[static_cast<size_t>(q)],
                            L.coeff(knobs[static_cast<size_t>(q)]) + step(q));
        }
    }

    LogFitResult out;
    out.P = std::make_shared<ExpWFun>(L, w);
    out.phi3 = phi3_node;
    out.swapped = swapped;
    return out;
}

} // namespace

std::pair<NullCurveRep, ApproxReport> approximate(const ApproxRequest& req) {
    req.G.validate();
    req.S.validate();
    if (req.epsilon <= 0.0) throw DegenerateInput("approximate: epsilon must be positive");
    if (req.G.pieces.empty()) throw DegenerateInput("approximate: no region pieces");
    for (const auto& piece : req.G.pieces) {
        const SampleGrid bd = boundary_grid(piece.region, 0.125);
        for (const auto& p : bd.points)
            if (!req.W.contains(p.z, 1e-9))
                throw DegenerateInput("approximate: S piece escapes W");
    }

    const std::vector<FitSample> samples = collect_samples(req.G, req.grid_scale);
    const std::vector<GridPoint> probes = offset_probes(samples, req.W);
    const double damp = []() {
        if (const char* v = std::getenv("NULLPROP_LOG_DAMP")) return std::atof(v);
        return 1e-2;
    }();
    const int lawson_iters = []() {
        if (const char* v = std::getenv("NULLPROP_LAWSON")) return std::atoi(v);
        return 2;
    }();

    const cplx anchor = req.G.pieces[0].region.center;
    const Vec3c anchor_value = req.G.value_on_piece(0, anchor);

    HoloPtr phi3_node;
    if (req.fix_third) {
        phi3_node = std::make_shared<PhiComponentFun>(req.G.pieces[0].rep.phi_node(), 2);
        // proviso: the third differential must not vanish along the arcs
        for (const auto& leg : req.G.legs)
            for (const auto& s : leg.curve.samples) {
                const cplx dz = leg.arc.deriv(s.u);
                if (std::abs(s.dvalue.z3 / dz) < 1e-10)
                    throw ProvisoViolated("approximate: dF3 vanishes on an arc sample");
            }
    }

    ApproxReport report;
    report.fit_samples = samples.size();
    report.check_samples = samples.size();

    NullCurveRep best;
    bool have_best = false;
    bool best_swapped = false;
    bool best_regular = false;
    auto regular_on_W = [&](const NullCurveRep& H) {
        auto [lo, floor] = H.data.regularity_floor(req.grid_scale);
        return lo > floor;
    };
    for (int cap : req.degree_schedule) {
        // candidate fits at this cap: the polynomial spinor pair (when the
        // third coordinate is free) and the exp-form factorization, which
        // cannot lose regularity to a zero of the horizontal factor
        struct Candidate {
            NullCurveRep H;
            double err;
            bool swapped;
            bool regular;
        };
        std::vector<Candidate> cands;
        if (!req.fix_third) {
            try {
                auto [g, eta] = fit_spinor_impl(samples, req.W, cap, &probes, damp);
                NullCurveRep H =
                    integrate(WeierstrassData::spinor_data(g, eta, req.W), anchor, anchor_value);
                cands.push_back({H, c1_error(H, samples), false, regular_on_W(H)});
            } catch (const Error& e) {
                if (std::getenv("NULLPROP_DEBUG_FIT"))
                    std::fprintf(stderr, "[fit] cap=%d spinor: %s\n", cap, e.what());
            }
        }
        try {
            HoloPtr third = phi3_node;
            if (!req.fix_third)
                third = make_laurent_fun(fit_scalar_arnoldi(
                    samples, req.W, cap, [](const FitSample& s) { return s.phi.z3; }, probes,
                    damp, lawson_iters));
            const LogFitResult lf =
                fit_logpair(samples, probes, req.W, cap, third, anchor, damp, lawson_iters);
            NullCurveRep H =
                integrate(WeierstrassData::logpair_data(lf.P, lf.phi3, lf.swapped, req.W),
                          anchor, anchor_value);
            cands.push_back({H, c1_error(H, samples), lf.swapped, regular_on_W(H)});
        } catch (const Error& e) {
            if (std::getenv("NULLPROP_DEBUG_FIT"))
                std::fprintf(stderr, "[fit] cap=%d logpair: %s\n", cap, e.what());
        }
        if (std::getenv("NULLPROP_DEBUG_FIT"))
            for (const auto& c : cands)
                std::fprintf(stderr, "[fit] cap=%d err=%.6g regular=%d swapped=%d mode=%d\n", cap,
                             c.err, (int)c.regular, (int)c.swapped, (int)c.H.data.mode);
        if (cands.empty()) continue;
        // regular candidates win over irregular ones, then smaller error
        const Candidate& win = *std::min_element(
            cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
                if (a.regular != b.regular) return a.regular;
                return a.err < b.err;
            });
        report.schedule_errors.emplace_back(cap, win.err);
        const bool better = !have_best || (win.regular && !best_regular) ||
                            (win.regular == best_regular && win.err < report.achieved_c1);
        if (better) {
            report.achieved_c1 = win.err;
            report.degree_used = cap;
            best = win.H;
            best_swapped = win.swapped;
            best_regular = win.regular;
            have_best = true;
        }
        if (best_regular && report.achieved_c1 < req.epsilon) break;
    }
    if (!have_best) throw BudgetExceeded("approximate: no cap in the schedule produced a fit");

    report.factor_swapped = best_swapped;
    report.null_residual = best.data.null_residual(req.grid_scale);
    auto [reg_lo, reg_floor] = best.data.regularity_floor(req.grid_scale);
    report.regularity_min = reg_lo;
    report.regular = best_regular;
    report.fidelity = best.fidelity;
    if (!req.report_only) {
        if (!best_regular)
            throw DegenerateInput("approximate: fitted curve fails the regularity floor");
        if (req.require_nonflat && flatness_score(best, req.grid_scale) <= kFlatnessFloor)
            throw FlatCurve("approximate: fitted curve is flat");
        if (report.achieved_c1 >= req.epsilon)
            throw BudgetExceeded("approximate: degree schedule exhausted at error " +
                                 std::to_string(report.achieved_c1) + " (target " +
                                 std::to_string(req.epsilon) + ")");
    }
    return {best, report};
}

} // namespace nullprop
