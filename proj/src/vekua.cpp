#include "vortexlab/vekua.hpp"
#include "vortexlab/errors.hpp"
#include "vortexlab/stencils.hpp"

#include <cmath>
#include <numbers>

namespace vortexlab {

namespace {
struct PackedNodes {
    std::vector<cplx> z;
    std::vector<cplx> f;
};

PackedNodes pack(const ComplexField& f) {
    PackedNodes p;
    const auto& g = f.grid();
    p.z.reserve(g.size());
    p.f.reserve(g.size());
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            if (f.mask->has_value(i, j)) {
                p.z.push_back(g.node(i, j));
                p.f.push_back(f.at(i, j));
            }
    return p;
}

cplx t_single(const PackedNodes& p, double h, cplx z0) {
    const double half = 0.5 * h;
    cplx acc(0.0, 0.0);
    for (size_t k = 0; k < p.z.size(); ++k) {
        const cplx d = p.z[k] - z0;
        if (std::abs(d.real()) <= half && std::abs(d.imag()) <= half) continue; // singular cell
        acc += p.f[k] / d;
    }
    return acc * (-h * h / std::numbers::pi);
}
} // namespace

std::vector<cplx> t_operator(const ComplexField& f, std::span<const cplx> eval_points) {
    const auto& g = f.grid();
    const PackedNodes p = pack(f);
    std::vector<cplx> out;
    out.reserve(eval_points.size());
    for (cplx z0 : eval_points) {
        const bool in_grid = std::abs(z0.real()) <= g.extent && std::abs(z0.imag()) <= g.extent;
        const auto [i, j] = g.nearest(z0);
        if (!in_grid || !f.mask->is_interior(i, j))
            throw GeometryError("t_operator: evaluation point outside the field support");
        out.push_back(t_single(p, g.spacing(), z0));
    }
    return out;
}

ComplexField t_operator_field(const ComplexField& f) {
    const auto& g = f.grid();
    const PackedNodes p = pack(f);
    ComplexField out(f.mask);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            if (f.mask->has_value(i, j)) out.at(i, j) = t_single(p, g.spacing(), g.node(i, j));
    return out;
}

Factorization similarity_factor(const ComplexField& w, const VekuaCoeffs& coeffs,
                                double floor_rel) {
    const auto& g = w.grid();
    const double wsup = sup_abs(w);
    const double floor = floor_rel * wsup;

    Factorization fac;
    fac.degenerate = wsup == 0.0;

    ComplexField integrand(w.mask);
    double f_over_w_sq = 0.0;
    const double cell = g.spacing() * g.spacing();
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            if (!w.mask->has_value(i, j)) continue;
            const cplx wv = w.at(i, j);
            cplx v;
            if (std::abs(wv) > floor && !fac.degenerate) {
                v = coeffs.A.at(i, j) + coeffs.B.at(i, j) * std::conj(wv) / wv;
                if (coeffs.f) {
                    const cplx q = coeffs.f->at(i, j) / wv;
                    v += q;
                    f_over_w_sq += std::norm(q) * cell;
                }
            } else {
                v = coeffs.A.at(i, j) + coeffs.B.at(i, j);
                ++fac.branch_nodes;
            }
            integrand.at(i, j) = v;
        }
    fac.f_over_w_norm = std::sqrt(f_over_w_sq);

    fac.phi = t_operator_field(integrand);
    fac.holo = ComplexField(w.mask);
    for (size_t k = 0; k < w.values.size(); ++k)
        fac.holo.values[k] = w.values[k] * std::exp(-fac.phi.values[k]);
    fac.cr_residual = sup_abs(wirtinger(fac.holo, Wirtinger::Dzbar));
    return fac;
}

std::pair<Factorization, Factorization> system_factor(const ComplexField& w1,
                                                      const ComplexField& w2,
                                                      const ComplexField& A) {
    const cplx iu(0.0, 1.0);
    ComplexField iAbar(A.mask), miAbar(A.mask);
    for (size_t k = 0; k < A.values.size(); ++k) {
        iAbar.values[k] = iu * std::conj(A.values[k]);
        miAbar.values[k] = -iu * std::conj(A.values[k]);
    }
    // conj(w1) solves dW/dzbar = i conj(A) W, w2 solves dW/dzbar = -i conj(A) W
    ComplexField w1c(w1.mask);
    for (size_t k = 0; k < w1.values.size(); ++k) w1c.values[k] = std::conj(w1.values[k]);

    VekuaCoeffs c1{iAbar, ComplexField(A.mask), std::nullopt};
    VekuaCoeffs c2{miAbar, ComplexField(A.mask), std::nullopt};
    return {similarity_factor(w1c, c1), similarity_factor(w2, c2)};
}

LpnuResult lpnu_norms(const std::function<cplx(cplx)>& f, double p, double nu,
                      const LpnuOptions& opts) {
    const GridSpec g(1.0, opts.n);
    const double h = g.spacing();
    const double cell = h * h;

    auto lp_norm = [&](const std::function<double(cplx)>& absval, double rmin) {
        double acc = 0.0;
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j) {
                const cplx z = g.node(i, j);
                const double r = std::abs(z);
                if (r >= 1.0 || r <= rmin) continue;
                acc += std::pow(absval(z), p) * cell;
            }
        return std::pow(acc, 1.0 / p);
    };

    auto abs_f = [&](cplx z) { return std::abs(f(z)); };
    auto abs_fnu = [&](cplx z) { return std::pow(std::abs(z), -nu) * std::abs(f(1.0 / z)); };

    LpnuResult out;
    out.norm_inner = lp_norm(abs_f, 0.0);
    out.norm_inverted = lp_norm(abs_fnu, opts.excision);
    const double tight = lp_norm(abs_fnu, 0.5 * opts.excision);
    out.growth_ratio = out.norm_inverted > 0.0 ? tight / out.norm_inverted
                                               : (tight > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
    out.member = std::isfinite(out.norm_inner) && std::isfinite(out.norm_inverted) &&
                 out.growth_ratio <= opts.divergence_ratio;
    return out;
}

DecayZeroRadius decay_zero_radius(double M, double N) {
    if (!(M > 0.0) || !(N > 0.0))
        throw ParameterError("decay radius: M and N must be positive");
    DecayZeroRadius out;
    if (M > N) {
        out.radius = 0.0;
        out.zeros_possible = false;
    } else {
        out.radius = std::max(0.0, std::log(N / M));
        out.zeros_possible = true;
    }
    return out;
}

} // namespace vortexlab
