#include "vortexlab/gauge.hpp"
#include "vortexlab/errors.hpp"
#include "vortexlab/stencils.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace vortexlab {

namespace {
const double kNaN = std::numeric_limits<double>::quiet_NaN();
const cplx kNaNc(std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN());

template <class A, class B>
void require_same_mask(const A& a, const B& b, const char* what) {
    if (a.mask == b.mask) return;
    if (a.mask && b.mask && a.mask->cls == b.mask->cls && a.mask->grid.n == b.mask->grid.n &&
        a.mask->grid.extent == b.mask->grid.extent)
        return;
    throw GeometryError(std::string(what) + ": fields carry different masks");
}

// Link phases: theta_j(x) = (h/2)(A_j(x) + A_j(x + h e_j)), the trapezoid line
// integral of A_j along the link. NaN when either endpoint is excluded.
struct LinkPhases {
    int n = 0;
    double h = 0.0;
    std::vector<double> th0, th1; // th0: (n-1) x n in i-major layout, th1: n x (n-1)

    double t0(int i, int j) const { return th0[i * n + j]; }        // link (i,j)->(i+1,j)
    double t1(int i, int j) const { return th1[i * (n - 1) + j]; }  // link (i,j)->(i,j+1)
};

LinkPhases make_links(const RealField& A0, const RealField& A1) {
    const auto& g = A0.grid();
    LinkPhases L;
    L.n = g.n;
    L.h = g.spacing();
    L.th0.assign((g.n - 1) * g.n, kNaN);
    L.th1.assign(g.n * (g.n - 1), kNaN);
    for (int i = 0; i + 1 < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            if (A0.mask->has_value(i, j) && A0.mask->has_value(i + 1, j))
                L.th0[i * g.n + j] = 0.5 * L.h * (A0.at(i, j) + A0.at(i + 1, j));
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j + 1 < g.n; ++j)
            if (A1.mask->has_value(i, j) && A1.mask->has_value(i, j + 1))
                L.th1[i * (g.n - 1) + j] = 0.5 * L.h * (A1.at(i, j) + A1.at(i, j + 1));
    return L;
}

// Covariant centered differences of grad_A = d + iA at stencil-complete nodes.
void covariant_grad(const LinkPhases& L, const ComplexField& phi, ComplexField& D0,
                    ComplexField& D1) {
    const auto& g = phi.grid();
    const cplx iu(0.0, 1.0);
    D0 = ComplexField(phi.mask);
    D1 = ComplexField(phi.mask);
    for (auto& v : D0.values) v = kNaNc;
    for (auto& v : D1.values) v = kNaNc;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            if (!phi.mask->stencil_complete(i, j)) continue;
            D0.at(i, j) = (std::exp(iu * L.t0(i, j)) * phi.at(i + 1, j) -
                           std::exp(-iu * L.t0(i - 1, j)) * phi.at(i - 1, j)) /
                          (2.0 * L.h);
            D1.at(i, j) = (std::exp(iu * L.t1(i, j)) * phi.at(i, j + 1) -
                           std::exp(-iu * L.t1(i, j - 1)) * phi.at(i, j - 1)) /
                          (2.0 * L.h);
        }
}

// Plaquette curvature (d0 A1 - d1 A0) averaged to nodes; exact telescoping of
// link phases makes it invariant under gauge_transform.
RealField plaquette_curl(const LinkPhases& L, std::shared_ptr<const DomainMask> mask) {
    const auto& g = mask->grid;
    const double invh2 = 1.0 / (L.h * L.h);
    const int n = g.n;
    std::vector<double> P((n - 1) * (n - 1), kNaN);
    for (int i = 0; i + 1 < n; ++i)
        for (int j = 0; j + 1 < n; ++j) {
            const double a = L.t0(i, j), b = L.t1(i + 1, j), c = L.t0(i, j + 1), d = L.t1(i, j);
            if (std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d))
                P[i * (n - 1) + j] = (a + b - c - d) * invh2;
        }
    RealField F(mask);
    for (auto& v : F.values) v = kNaN;
    for (int i = 1; i + 1 < n; ++i)
        for (int j = 1; j + 1 < n; ++j) {
            if (!mask->has_value(i, j)) continue;
            const double p00 = P[(i - 1) * (n - 1) + (j - 1)], p10 = P[i * (n - 1) + (j - 1)],
                         p01 = P[(i - 1) * (n - 1) + j], p11 = P[i * (n - 1) + j];
            if (std::isfinite(p00) && std::isfinite(p10) && std::isfinite(p01) && std::isfinite(p11))
                F.at(i, j) = 0.25 * (p00 + p10 + p01 + p11);
        }
    return F;
}

struct EnergyDensities {
    ComplexField D0, D1;
    RealField F;
};

EnergyDensities densities(const RealField& A0, const RealField& A1, const ComplexField& phi) {
    EnergyDensities e;
    const LinkPhases L = make_links(A0, A1);
    covariant_grad(L, phi, e.D0, e.D1);
    e.F = plaquette_curl(L, phi.mask);
    return e;
}
} // namespace

double ReconstructionParams::C() const { return std::log(std::sqrt(M1 * M2)); }
double ReconstructionParams::Mprime() const { return std::log(std::sqrt(M1 / M2)); }

void ReconstructionParams::validate() const {
    if (!(M1 > 0.0 && M1 < 1.0 && M2 > 0.0 && M2 < 1.0))
        throw ParameterError("reconstruction: M1 and M2 must lie in (0,1)");
}

SolutionFields reconstruct_fields(const RealField& u, const ReconstructionParams& params) {
    params.validate();
    const auto mask = u.mask;
    const auto& g = u.grid();
    const double C = params.C();

    SolutionFields s;
    s.psi2 = ComplexField(mask);
    s.psi1 = ComplexField(mask);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            if (!mask->has_value(i, j)) continue;
            const double uv = u.at(i, j);
            const double p2 = std::exp(0.5 * (C - uv)); // |psi2|, gauge: psi2 real >= 0
            s.psi2.at(i, j) = p2;
            s.psi1.at(i, j) = std::exp(uv) * p2;
        }

    // alpha = -i dz(log psi2) = (i/2) dz(u)  =>  A0 = d1(u)/2, A1 = -d0(u)/2.
    const double floor = params.zero_floor * sup_abs(s.psi2);
    s.A0 = RealField(mask);
    s.A1 = RealField(mask);
    for (auto& v : s.A0.values) v = kNaN;
    for (auto& v : s.A1.values) v = kNaN;
    const double inv2h = 1.0 / (2.0 * g.spacing());
    int evaluated = 0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            if (!mask->stencil_complete(i, j)) continue;
            if (std::abs(s.psi2.at(i, j)) <= floor) continue;
            bool ok = true;
            for (int t = 0; t < 4 && ok; ++t) {
                static const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
                ok = std::isfinite(u.at(i + di[t], j + dj[t]));
            }
            if (!ok) continue;
            s.A0.at(i, j) = (u.at(i, j + 1) - u.at(i, j - 1)) * inv2h * 0.5;
            s.A1.at(i, j) = -(u.at(i + 1, j) - u.at(i - 1, j)) * inv2h * 0.5;
            ++evaluated;
        }
    if (evaluated == 0)
        throw GeometryError("reconstruction: support too small for the gauge-field derivative");
    return s;
}

MainEqResiduals residual_maineq(const SolutionFields& s) {
    require_same_mask(s.psi1, s.psi2, "system residuals");
    require_same_mask(s.psi2, s.A0, "system residuals");
    const cplx iu(0.0, 1.0);
    const ComplexField d2 = wirtinger(s.psi2, Wirtinger::Dzbar);
    const ComplexField d1 = wirtinger(s.psi1, Wirtinger::Dz);
    const auto& g = s.psi2.grid();

    MainEqResiduals r;
    const double inv2h = 1.0 / (2.0 * g.spacing());
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            if (!s.psi2.mask->stencil_complete(i, j)) continue;
            const cplx a0(s.A0.at(i, j), 0.0), a1(s.A1.at(i, j), 0.0);
            if (!std::isfinite(a0.real()) || !std::isfinite(a1.real())) continue;
            const cplx v1 = 2.0 * d2.at(i, j) + iu * (a0 + iu * a1) * s.psi2.at(i, j);
            const cplx v2 = 2.0 * d1.at(i, j) + iu * (a0 - iu * a1) * s.psi1.at(i, j);
            if (std::isfinite(v1.real())) r.r1 = std::max(r.r1, std::abs(v1));
            if (std::isfinite(v2.real())) r.r2 = std::max(r.r2, std::abs(v2));
            // curvature: needs A-values on the four neighbors
            bool ok = true;
            static const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
            for (int t = 0; t < 4 && ok; ++t)
                ok = std::isfinite(s.A0.at(i + di[t], j + dj[t])) &&
                     std::isfinite(s.A1.at(i + di[t], j + dj[t]));
            if (!ok) continue;
            const double curl =
                (s.A1.at(i + 1, j) - s.A1.at(i - 1, j)) * inv2h - (s.A0.at(i, j + 1) - s.A0.at(i, j - 1)) * inv2h;
            const double rhs = 0.5 * (std::norm(s.psi1.at(i, j)) - std::norm(s.psi2.at(i, j)));
            r.r3 = std::max(r.r3, std::abs(curl - rhs));
        }
    return r;
}

HiggsResiduals residual_higgs(const SolutionFields& s) {
    if (!s.higgs) throw ParameterError("higgs residuals: solution carries no Higgs field");
    const cplx iu(0.0, 1.0);
    const auto& g = s.psi2.grid();
    const ComplexField dphi = wirtinger(*s.higgs, Wirtinger::Dzbar);
    const ComplexField d2 = wirtinger(s.psi2, Wirtinger::Dzbar);
    const ComplexField d1 = wirtinger(s.psi1, Wirtinger::Dz);

    HiggsResiduals r;
    r.reality_mismatch = s.connection && s.connection->reality_mismatch;
    const double inv2h = 1.0 / (2.0 * g.spacing());
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            if (!s.psi2.mask->stencil_complete(i, j)) continue;
            const cplx phi = s.higgs->at(i, j);
            const cplx p1 = s.psi1.at(i, j), p2 = s.psi2.at(i, j);
            // i(A0 -+ iA1) as 2*a10 / 2*a01 when a literal connection is carried
            cplx c_minus, c_plus;
            if (s.connection) {
                c_minus = 2.0 * s.connection->a10;
                c_plus = 2.0 * s.connection->a01;
            } else {
                const cplx a0(s.A0.at(i, j), 0.0), a1(s.A1.at(i, j), 0.0);
                c_minus = iu * (a0 - iu * a1);
                c_plus = iu * (a0 + iu * a1);
            }
            const cplx v1 = dphi.at(i, j) + 0.5 * p1 * std::conj(p2);
            const cplx v3 = 2.0 * d2.at(i, j) + c_plus * p2 - std::conj(phi) * p1;
            const cplx v4 = 2.0 * d1.at(i, j) + c_minus * p1 - phi * p2;
            if (std::isfinite(v1.real())) r.r1 = std::max(r.r1, std::abs(v1));
            if (std::isfinite(v3.real())) r.r3 = std::max(r.r3, std::abs(v3));
            if (std::isfinite(v4.real())) r.r4 = std::max(r.r4, std::abs(v4));
            const double curl =
                (s.A1.at(i + 1, j) - s.A1.at(i - 1, j)) * inv2h - (s.A0.at(i, j + 1) - s.A0.at(i, j - 1)) * inv2h;
            const double rhs = 0.5 * (std::norm(p1) - std::norm(p2));
            if (std::isfinite(curl)) r.r2 = std::max(r.r2, std::abs(curl - rhs));
        }
    return r;
}

double ymh_functional(const RealField& A0, const RealField& A1, const ComplexField& phi) {
    require_same_mask(A0, A1, "ymh");
    require_same_mask(A0, phi, "ymh");
    const EnergyDensities e = densities(A0, A1, phi);
    const auto& g = phi.grid();
    const double cell = g.spacing() * g.spacing();
    double acc = 0.0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            if (!phi.mask->stencil_complete(i, j)) continue;
            const cplx D0 = e.D0.at(i, j), D1 = e.D1.at(i, j);
            const double F = e.F.at(i, j);
            if (!std::isfinite(F) || !std::isfinite(D0.real()) || !std::isfinite(D1.real())) continue;
            const double m2 = std::norm(phi.at(i, j));
            acc += 0.25 * F * F + std::norm(D0) + std::norm(D1) + (m2 - 1.0) * (m2 - 1.0);
        }
    return 0.5 * acc * cell;
}

EnergyReport bogomolny_split(const RealField& A0, const RealField& A1, const ComplexField& phi) {
    require_same_mask(A0, A1, "energy split");
    require_same_mask(A0, phi, "energy split");
    const EnergyDensities e = densities(A0, A1, phi);
    const auto& g = phi.grid();
    const double cell = g.spacing() * g.spacing();

    EnergyReport rep;
    double direct = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0, fl = 0.0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            if (!phi.mask->stencil_complete(i, j)) continue;
            const cplx D0 = e.D0.at(i, j), D1 = e.D1.at(i, j);
            const double F = e.F.at(i, j);
            if (!std::isfinite(F) || !std::isfinite(D0.real()) || !std::isfinite(D1.real())) continue;
            const double a = D0.real(), b = D0.imag(), c = D1.real(), d = D1.imag();
            const double m2 = std::norm(phi.at(i, j));
            direct += 0.25 * F * F + a * a + b * b + c * c + d * d + (m2 - 1.0) * (m2 - 1.0);
            s1 += (a + d) * (a + d);
            s2 += (b - c) * (b - c);
            s3 += (0.5 * F + m2 - 1.0) * (0.5 * F + m2 - 1.0);
            s4 += -F * m2 - 2.0 * a * d + 2.0 * b * c;
            fl += F;
        }
    rep.ymh_direct = 0.5 * direct * cell;
    rep.part_grad_plus = 0.5 * s1 * cell;
    rep.part_grad_minus = 0.5 * s2 * cell;
    rep.part_potential = 0.5 * s3 * cell;
    rep.part_exact_form = 0.5 * s4 * cell;
    rep.flux = fl * cell;
    rep.flux_over_2pi = rep.flux / (2.0 * std::numbers::pi);
    rep.ymh_bogomolny = rep.part_grad_plus + rep.part_grad_minus + rep.part_potential +
                        rep.part_exact_form + 0.5 * rep.flux;
    rep.defect = std::abs(rep.ymh_direct - rep.ymh_bogomolny);
    return rep;
}

FluxResult flux(const RealField& A0, const RealField& A1) {
    require_same_mask(A0, A1, "flux");
    const LinkPhases L = make_links(A0, A1);
    const RealField F = plaquette_curl(L, A0.mask);
    FluxResult out;
    out.flux = area_integral([&] {
        RealField masked(A0.mask);
        for (size_t k = 0; k < F.values.size(); ++k)
            masked.values[k] = std::isfinite(F.values[k]) ? F.values[k] : 0.0;
        return masked;
    }());
    out.over_2pi = out.flux / (2.0 * std::numbers::pi);
    out.nearest_int_dist = std::abs(out.over_2pi - std::round(out.over_2pi));
    return out;
}

PropertyEFit property_E_fit(const ComplexField& psi1, const ComplexField& psi2,
                            const PropertyEFitOptions& opts) {
    const auto& g = psi1.grid();
    const double R = psi1.mask->R;
    if (R < 4.0) throw GeometryError("envelope fit: needs a disk of radius >= 4");
    const double fit_lo = opts.fit_inner_frac * R;
    const double fit_hi = R - opts.fit_outer_margin;
    if (fit_hi <= fit_lo) throw GeometryError("envelope fit: fit annulus is empty");

    PropertyEFit out;
    auto fit_one = [&](const ComplexField& psi, double& M, double& N, double& rate) {
        M = 0.0;
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j) {
                if (!psi.mask->has_value(i, j)) continue;
                const double a = std::abs(g.node(i, j));
                if (a >= opts.outer_frac * R) M = std::max(M, std::norm(psi.at(i, j)));
            }
        // least squares of log(M - |psi|^2 + floor) against -|z|
        const double floor = 1e-15 * std::max(1.0, M);
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        long cnt = 0;
        bool envelope_violated = false;
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j) {
                if (!psi.mask->has_value(i, j)) continue;
                const double a = std::abs(g.node(i, j));
                const double gap = M - std::norm(psi.at(i, j));
                if (gap < -1e-9 * std::max(1.0, M)) envelope_violated = true;
                if (a < fit_lo || a > fit_hi) continue;
                const double x = -a, y = std::log(std::max(gap, 0.0) + floor);
                sx += x; sy += y; sxx += x * x; sxy += x * y;
                ++cnt;
            }
        if (cnt < 8) {
            rate = 0.0;
            N = 0.0;
            return EnvelopeVerdict::Degenerate;
        }
        const double det = cnt * sxx - sx * sx;
        if (std::abs(det) < 1e-12) {
            rate = 0.0;
            N = 0.0;
            return EnvelopeVerdict::Degenerate;
        }
        rate = (cnt * sxy - sx * sy) / det;
        const double intercept = (sy - rate * sx) / cnt;
        N = std::exp(intercept);
        // zero-variance targets (constant field): degenerate
        double mean_y = sy / cnt, ss = 0.0;
        {
            // second pass for variance of y
            for (int i = 0; i < g.n; ++i)
                for (int j = 0; j < g.n; ++j) {
                    if (!psi.mask->has_value(i, j)) continue;
                    const double a = std::abs(g.node(i, j));
                    if (a < fit_lo || a > fit_hi) continue;
                    const double y = std::log(std::max(M - std::norm(psi.at(i, j)), 0.0) + floor);
                    ss += (y - mean_y) * (y - mean_y);
                }
        }
        if (ss / cnt < 1e-20) return EnvelopeVerdict::Degenerate;
        if (envelope_violated || !(M > 0.0 && M < 1.0) || rate < opts.rate_low ||
            rate > opts.rate_high)
            return EnvelopeVerdict::Inconsistent;
        return EnvelopeVerdict::Consistent;
    };

    const EnvelopeVerdict v1 = fit_one(psi1, out.M1, out.N1, out.rate1);
    const EnvelopeVerdict v2 = fit_one(psi2, out.M2, out.N2, out.rate2);
    if (v1 == EnvelopeVerdict::Degenerate || v2 == EnvelopeVerdict::Degenerate)
        out.verdict = EnvelopeVerdict::Degenerate;
    else if (v1 == EnvelopeVerdict::Inconsistent || v2 == EnvelopeVerdict::Inconsistent)
        out.verdict = EnvelopeVerdict::Inconsistent;
    else
        out.verdict = EnvelopeVerdict::Consistent;

    // psi1 = lambda psi2 with lambda >= 0: the product psi1 conj(psi2) must be
    // real nonnegative nodewise
    double dev = 0.0;
    for (size_t k = 0; k < psi1.values.size(); ++k) {
        const cplx p = psi1.values[k] * std::conj(psi2.values[k]);
        if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) continue;
        if (std::abs(p) == 0.0) continue;
        dev = std::max(dev, std::abs(std::arg(p)));
    }
    out.lambda_phase_dev = dev;
    out.lambda_nonnegative = dev <= opts.phase_tol;
    return out;
}

RealField link_exact_gradient(const RealField& chi, int axis) {
    const auto& g = chi.grid();
    const double h = g.spacing();
    RealField sigma(chi.mask);
    for (auto& v : sigma.values) v = kNaN;

    const int n = g.n;
    auto value = [&](int s, int t) -> double {
        return axis == 0 ? chi.at(s, t) : chi.at(t, s);
    };
    auto set = [&](int s, int t, double v) {
        if (axis == 0)
            sigma.at(s, t) = v;
        else
            sigma.at(t, s) = v;
    };
    auto defined = [&](int s, int t) {
        return axis == 0 ? chi.mask->has_value(s, t) : chi.mask->has_value(t, s);
    };

    for (int t = 0; t < n; ++t) {
        int s = 0;
        while (s < n) {
            if (!defined(s, t)) {
                ++s;
                continue;
            }
            int e = s;
            while (e + 1 < n && defined(e + 1, t)) ++e;
            // run [s, e]
            if (e == s) {
                set(s, t, 0.0); // isolated node: no link information
            } else {
                double first;
                if (e - s >= 2)
                    first = (-3.0 * value(s, t) + 4.0 * value(s + 1, t) - value(s + 2, t)) / (2.0 * h);
                else
                    first = (value(s + 1, t) - value(s, t)) / h;
                set(s, t, first);
                double prev = first;
                for (int k = s; k < e; ++k) {
                    const double next = 2.0 * (value(k + 1, t) - value(k, t)) / h - prev;
                    set(k + 1, t, next);
                    prev = next;
                }
            }
            s = e + 1;
        }
    }
    return sigma;
}

SolutionFields gauge_transform(const SolutionFields& s, const RealField& chi) {
    const cplx iu(0.0, 1.0);
    const RealField s0 = link_exact_gradient(chi, 0);
    const RealField s1 = link_exact_gradient(chi, 1);

    // The Higgs field is untouched: psi1 conj(psi2) is invariant under the
    // common phase, so the Higgs couplings stay covariant with phi fixed.
    SolutionFields out = s;
    for (size_t k = 0; k < out.A0.values.size(); ++k) {
        out.A0.values[k] = s.A0.values[k] - s0.values[k];
        out.A1.values[k] = s.A1.values[k] - s1.values[k];
        const cplx ph = std::exp(iu * chi.values[k]);
        out.psi1.values[k] = s.psi1.values[k] * ph;
        out.psi2.values[k] = s.psi2.values[k] * ph;
    }
    return out;
}

TaubesResiduals residual_taubes(const RealField& A0, const RealField& A1, const ComplexField& phi) {
    const cplx iu(0.0, 1.0);
    const auto& g = phi.grid();
    const ComplexField dphi = wirtinger(phi, Wirtinger::Dzbar);

    TaubesResiduals r;
    const double inv2h = 1.0 / (2.0 * g.spacing());
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            if (!phi.mask->stencil_complete(i, j)) continue;
            const cplx v1 = dphi.at(i, j) -
                            0.5 * iu * (cplx(A0.at(i, j), 0.0) + iu * A1.at(i, j)) * phi.at(i, j);
            if (std::isfinite(v1.real())) r.r1 = std::max(r.r1, std::abs(v1));
            const double curl =
                (A1.at(i + 1, j) - A1.at(i - 1, j)) * inv2h - (A0.at(i, j + 1) - A0.at(i, j - 1)) * inv2h;
            if (!std::isfinite(curl)) continue;
            // (i/2) F(A) = (1-|phi|^2) dz^dzbar with dz^dzbar = -2i dx0^dx1:
            // coefficients against dx0^dx1 are -curl/2 (left) and -2i(1-|phi|^2) (right)
            const cplx lhs(-0.5 * curl, 0.0);
            const cplx rhs(0.0, -2.0 * (1.0 - std::norm(phi.at(i, j))));
            r.r2 = std::max(r.r2, std::abs(lhs - rhs));
        }
    return r;
}

} // namespace vortexlab
