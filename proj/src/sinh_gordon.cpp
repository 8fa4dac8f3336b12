#include "vortexlab/sinh_gordon.hpp"
#include "vortexlab/errors.hpp"
#include "vortexlab/stencils.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace vortexlab {

namespace {
const double kNaN = std::numeric_limits<double>::quiet_NaN();

// Interior-node numbering plus the discrete Dirichlet Laplacian: Lap_h v at
// interior node k reads L.row(k) * v_int + bc_coeff applied to band values.
struct DiscreteLaplacian {
    std::shared_ptr<const DomainMask> mask;
    std::vector<int> node_of;           // n*n -> interior index or -1
    std::vector<std::pair<int, int>> ij; // interior index -> (i,j)
    Eigen::SparseMatrix<double> L;
    // band contribution: bc(k) = sum of g(band neighbor)/h^2
    Eigen::VectorXd band_contribution(const RealField& g) const {
        const auto& grid = mask->grid;
        const double invh2 = 1.0 / (grid.spacing() * grid.spacing());
        Eigen::VectorXd bc = Eigen::VectorXd::Zero(ij.size());
        static const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
        for (size_t k = 0; k < ij.size(); ++k) {
            const auto [i, j] = ij[k];
            for (int t = 0; t < 4; ++t) {
                const int i2 = i + di[t], j2 = j + dj[t];
                if (!mask->is_interior(i2, j2)) bc[k] += g.at(i2, j2) * invh2;
            }
        }
        return bc;
    }
};

DiscreteLaplacian assemble_laplacian(std::shared_ptr<const DomainMask> mask) {
    DiscreteLaplacian d;
    d.mask = mask;
    const auto& grid = mask->grid;
    d.node_of.assign(grid.size(), -1);
    for (int i = 0; i < grid.n; ++i)
        for (int j = 0; j < grid.n; ++j)
            if (mask->is_interior(i, j)) {
                d.node_of[grid.index(i, j)] = static_cast<int>(d.ij.size());
                d.ij.emplace_back(i, j);
            }
    const double invh2 = 1.0 / (grid.spacing() * grid.spacing());
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(5 * d.ij.size());
    static const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
    for (size_t k = 0; k < d.ij.size(); ++k) {
        const auto [i, j] = d.ij[k];
        trips.emplace_back(static_cast<int>(k), static_cast<int>(k), -4.0 * invh2);
        for (int t = 0; t < 4; ++t) {
            const int q = d.node_of[grid.index(i + di[t], j + dj[t])];
            if (q >= 0) trips.emplace_back(static_cast<int>(k), q, invh2);
        }
    }
    d.L.resize(static_cast<int>(d.ij.size()), static_cast<int>(d.ij.size()));
    d.L.setFromTriplets(trips.begin(), trips.end());
    return d;
}

RealField to_field(const DiscreteLaplacian& d, const Eigen::VectorXd& v, const RealField& band_values) {
    RealField out(d.mask);
    const auto& grid = d.mask->grid;
    for (int i = 0; i < grid.n; ++i)
        for (int j = 0; j < grid.n; ++j) {
            if (d.mask->is_interior(i, j))
                out.at(i, j) = v[d.node_of[grid.index(i, j)]];
            else if (d.mask->has_value(i, j))
                out.at(i, j) = band_values.at(i, j);
        }
    return out;
}

Eigen::VectorXd interior_vector(const DiscreteLaplacian& d, const RealField& f) {
    Eigen::VectorXd v(d.ij.size());
    for (size_t k = 0; k < d.ij.size(); ++k) {
        const auto [i, j] = d.ij[k];
        v[k] = f.at(i, j);
    }
    return v;
}
} // namespace

void SinhGordonProblem::validate() const {
    if (!(M > 0.0 && M < 1.0)) throw ConfigError("sinh-gordon: M must lie in (0,1)");
    if (!(Mprime >= 0.0)) throw ConfigError("sinh-gordon: M' must be nonnegative");
    if (continuation_steps < 1) throw ConfigError("sinh-gordon: continuation_steps must be >= 1");
    divisor.validate(2);
    const double h = grid.spacing();
    if (eps < h) throw ConfigError("sinh-gordon: puncture radius eps is below the grid spacing");
    for (const auto& e : divisor.entries)
        if (std::abs(e.point) + eps > R - 2.0 * h)
            throw ConfigError("sinh-gordon: divisor point outside D(0, R - 2h)");
}

std::shared_ptr<const DomainMask> SinhGordonProblem::make_mask() const {
    validate();
    std::vector<Puncture> ps;
    ps.reserve(divisor.entries.size());
    for (const auto& e : divisor.entries) ps.push_back({e.point, eps});
    return build_mask(grid, R, ps);
}

RealField build_G(const VortexDivisor& divisor, std::shared_ptr<const DomainMask> mask) {
    return sample_real(mask, [&](cplx z) {
        double acc = 0.0;
        for (const auto& e : divisor.entries) {
            const double d = std::abs(z - e.point);
            if (d == 0.0) return kNaN; // coincident node: dropped from support
            acc += -std::log1p(std::pow(d, -double(e.multiplicity)));
        }
        return acc;
    });
}

RealField build_r(const VortexDivisor& divisor, std::shared_ptr<const DomainMask> mask) {
    divisor.validate(2);
    return sample_real(mask, [&](cplx z) {
        double acc = 0.0;
        for (const auto& e : divisor.entries) {
            const double d = std::abs(z - e.point);
            const double a = e.multiplicity;
            const double da = std::pow(d, a);
            acc += -a * a * std::pow(d, a - 2.0) / ((1.0 + da) * (1.0 + da));
        }
        return acc;
    });
}

RealField boundary_data(std::shared_ptr<const DomainMask> mask, const RealField& G) {
    RealField g(mask);
    const auto& grid = mask->grid;
    for (int i = 0; i < grid.n; ++i)
        for (int j = 0; j < grid.n; ++j) {
            switch (mask->at(i, j)) {
            case NodeClass::OuterBand: g.at(i, j) = 0.0; break;
            case NodeClass::PunctureBand: g.at(i, j) = -G.at(i, j); break;
            default: g.at(i, j) = kNaN; break;
            }
        }
    return g;
}

RealField harmonic_extension(const RealField& g, double tol_linear) {
    const DiscreteLaplacian d = assemble_laplacian(g.mask);
    const Eigen::VectorXd bc = d.band_contribution(g);
    // solve -L h = bc (SPD)
    Eigen::SparseMatrix<double> A = -d.L;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    solver.compute(A);
    if (solver.info() != Eigen::Success)
        throw SolverError("harmonic extension: factorization failed");
    const Eigen::VectorXd h = solver.solve(bc);
    const double rel = bc.norm() > 0 ? (A * h - bc).norm() / bc.norm() : (A * h - bc).norm();
    if (rel > tol_linear)
        throw SolverError("harmonic extension: linear residual " + std::to_string(rel) +
                          " above tolerance");
    return to_field(d, h, g);
}

namespace {
double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }
} // namespace

BarrierReport barrier_search(const SinhGordonProblem& problem, const RealField& h,
                             const RealField& G, const RealField& r) {
    const auto& mask = *h.mask;
    const auto& grid = mask.grid;
    const double M = problem.M, Mp = problem.Mprime;

    BarrierReport rep;
    rep.b = -std::numeric_limits<double>::infinity();
    rep.l = std::numeric_limits<double>::infinity();
    rep.bprime = -std::numeric_limits<double>::infinity();
    rep.lprime = std::numeric_limits<double>::infinity();
    std::vector<std::pair<int, int>> nodes;
    for (int i = 0; i < grid.n; ++i)
        for (int j = 0; j < grid.n; ++j) {
            if (!mask.is_interior(i, j)) continue;
            const double rv = r.at(i, j), hG = h.at(i, j) + G.at(i, j);
            if (!std::isfinite(rv) || !std::isfinite(hG)) continue;
            nodes.emplace_back(i, j);
            rep.b = std::max(rep.b, rv);
            rep.l = std::min(rep.l, rv);
            rep.bprime = std::max(rep.bprime, hG);
            rep.lprime = std::min(rep.lprime, hG);
        }
    if (nodes.empty()) throw GeometryError("barrier search: empty interior");

    rep.sigma = std::exp(rep.bprime + Mp);
    rep.eta = std::exp(rep.lprime + Mp);
    rep.t2_plain = (-rep.b + std::sqrt(rep.b * rep.b + 4.0 * M)) / (2.0 * M);
    rep.t2_sigma = (-rep.b + std::sqrt(rep.b * rep.b + 4.0 * M * M)) / (2.0 * M * rep.sigma);

    // f(z, h+C) = -2M sinh(h+G+M'+C) - r, strictly decreasing in C.
    auto min_f = [&](double C) {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& [i, j] : nodes)
            m = std::min(m, -2.0 * M * std::sinh(h.at(i, j) + G.at(i, j) + Mp + C) - r.at(i, j));
        return m;
    };
    auto max_f = [&](double C) {
        double m = -std::numeric_limits<double>::infinity();
        for (const auto& [i, j] : nodes)
            m = std::max(m, -2.0 * M * std::sinh(h.at(i, j) + G.at(i, j) + Mp + C) - r.at(i, j));
        return m;
    };
    const double B = 5.0 + Mp + std::max(std::abs(rep.bprime), std::abs(rep.lprime)) +
                     std::asinh(std::max(1e-300, -rep.l) / (2.0 * M));
    auto bisect = [&](const std::function<double(double)>& fn) {
        // fn is decreasing in C; find the zero crossing
        double lo = -B, hi = B;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (fn(mid) >= 0.0)
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    };
    rep.threshold_sup = bisect(min_f); // below this, min_z f >= 0
    rep.threshold_sub = bisect(max_f); // above this, max_z f <= 0

    // sign test with a rounding margin so exactly-critical thresholds (the
    // trivial problem's C = 0) are not lost to the bisection's last bit
    const double margin = 1e-9 * std::max(1.0, B);
    if (rep.threshold_sup >= -margin) rep.C_plus = std::max(rep.threshold_sup, 0.0);
    if (rep.threshold_sub <= margin) rep.C_minus = std::min(rep.threshold_sub, 0.0);
    rep.ordered_pair = rep.C_plus.has_value() && rep.C_minus.has_value();

    rep.cert_plus_at = rep.C_plus.value_or(rep.threshold_sup);
    rep.cert_minus_at = rep.C_minus.value_or(rep.threshold_sub);
    rep.cert_plus = RealField(h.mask);
    rep.cert_minus = RealField(h.mask);
    for (double& x : rep.cert_plus.values) x = kNaN;
    for (double& x : rep.cert_minus.values) x = kNaN;
    for (const auto& [i, j] : nodes) {
        const double hG = h.at(i, j) + G.at(i, j), rv = r.at(i, j);
        rep.cert_plus.at(i, j) = sign_of(-2.0 * M * std::sinh(hG + Mp + rep.cert_plus_at) - rv);
        rep.cert_minus.at(i, j) = sign_of(-2.0 * M * std::sinh(hG + Mp + rep.cert_minus_at) - rv);
    }
    return rep;
}

SolveResult solve_bvp(const SinhGordonProblem& problem) {
    auto mask = problem.make_mask();
    const DiscreteLaplacian d = assemble_laplacian(mask);
    const int N = static_cast<int>(d.ij.size());
    if (N == 0) throw GeometryError("solve: empty interior");

    SolveResult out;
    out.G = build_G(problem.divisor, mask);
    out.r = build_r(problem.divisor, mask);
    out.g = boundary_data(mask, out.G);
    out.h = harmonic_extension(out.g, problem.tol_linear);
    out.barrier = barrier_search(problem, out.h, out.G, out.r);

    const Eigen::VectorXd bc = d.band_contribution(out.g);
    const Eigen::VectorXd Gv = interior_vector(d, out.G);
    const Eigen::VectorXd rv = interior_vector(d, out.r);
    const double Mp = problem.Mprime;

    auto residual = [&](const Eigen::VectorXd& v, double M) -> Eigen::VectorXd {
        Eigen::VectorXd F = d.L * v + bc + rv;
        for (int k = 0; k < N; ++k) F[k] += 2.0 * M * std::sinh(v[k] + Gv[k] + Mp);
        return F;
    };

    Eigen::VectorXd v(N);
    int total_iters = 0;

    if (problem.mode == SolveMode::Newton) {
        // M = 0 linear solution as the continuation start
        {
            Eigen::SparseMatrix<double> A = -d.L;
            Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol;
            chol.compute(A);
            if (chol.info() != Eigen::Success) throw SolverError("solve: M=0 factorization failed");
            v = chol.solve(bc + rv);
        }
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        bool analyzed = false;
        for (int step = 1; step <= problem.continuation_steps; ++step) {
            const double M = problem.M * step / problem.continuation_steps;
            int stagnant = 0;
            for (int it = 0; it < 80; ++it) {
                const Eigen::VectorXd F = residual(v, M);
                const double ns = F.lpNorm<Eigen::Infinity>();
                if (ns <= problem.tol_newton) break;
                Eigen::SparseMatrix<double> J = d.L;
                std::vector<Eigen::Triplet<double>> diag;
                diag.reserve(N);
                for (int k = 0; k < N; ++k)
                    diag.emplace_back(k, k, 2.0 * M * std::cosh(v[k] + Gv[k] + Mp));
                Eigen::SparseMatrix<double> D(N, N);
                D.setFromTriplets(diag.begin(), diag.end());
                J += D;
                if (!analyzed) {
                    lu.analyzePattern(J);
                    analyzed = true;
                }
                lu.factorize(J);
                if (lu.info() != Eigen::Success) throw SolverError("solve: Jacobian factorization failed");
                const Eigen::VectorXd dv = lu.solve(-F);
                double t = 1.0;
                bool improved = false;
                while (t >= std::ldexp(1.0, -20)) {
                    const double ns2 = residual(v + t * dv, M).lpNorm<Eigen::Infinity>();
                    if (ns2 < ns) {
                        v += t * dv;
                        improved = true;
                        break;
                    }
                    t *= 0.5;
                }
                ++total_iters;
                if (!improved) {
                    if (++stagnant >= 10) {
                        std::ostringstream msg;
                        msg << "solve: newton stagnation at continuation step " << step << "/"
                            << problem.continuation_steps << ", sup-residual " << ns << " after "
                            << total_iters << " iterations; iterate range ["
                            << v.minCoeff() << ", " << v.maxCoeff() << "], |dv|_inf "
                            << dv.lpNorm<Eigen::Infinity>();
                        throw SolverError(msg.str());
                    }
                    v += std::ldexp(1.0, -20) * dv;
                } else {
                    stagnant = 0;
                }
            }
        }
    } else {
        // monotone sweep from the super-solution constant
        if (!out.barrier.ordered_pair)
            throw SolverError("solve: monotone mode needs an ordered super-/sub-solution constant "
                              "pair (f >= 0 at h+C with C >= 0 above f <= 0 at h+C' with C' <= 0); "
                              "the barrier search found none");
        const double Cp = *out.barrier.C_plus, Cm = *out.barrier.C_minus;
        const Eigen::VectorXd hv = interior_vector(d, out.h);
        const double vlo = hv.minCoeff() + Cm, vhi = hv.maxCoeff() + Cp;
        double K = 0.0;
        for (int k = 0; k < N; ++k)
            K = std::max(K, 2.0 * problem.M *
                                std::max(std::cosh(vlo + Gv[k] + Mp), std::cosh(vhi + Gv[k] + Mp)));
        Eigen::SparseMatrix<double> A = -d.L;
        for (int k = 0; k < N; ++k) A.coeffRef(k, k) += K;
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol;
        chol.compute(A);
        if (chol.info() != Eigen::Success) throw SolverError("solve: monotone factorization failed");
        v = hv.array() + Cp;
        for (int it = 0; it < 2000; ++it) {
            Eigen::VectorXd rhs = bc + rv + K * v;
            for (int k = 0; k < N; ++k) rhs[k] += 2.0 * problem.M * std::sinh(v[k] + Gv[k] + Mp);
            const Eigen::VectorXd vn = chol.solve(rhs);
            const double inc = (vn - v).maxCoeff();
            if (inc > 1e-12 * std::max(1.0, v.lpNorm<Eigen::Infinity>())) out.monotone_ok = false;
            const double delta = (vn - v).lpNorm<Eigen::Infinity>();
            v = vn;
            ++total_iters;
            if (delta <= problem.tol_newton) break;
        }
    }

    const Eigen::VectorXd F = residual(v, problem.M);
    out.residual_sup = F.lpNorm<Eigen::Infinity>();
    out.newton_iters = total_iters;
    double far = 0.0;
    for (int k = 0; k < N; ++k) {
        const auto [i, j] = d.ij[k];
        if (std::abs(mask->grid.node(i, j)) >= 0.9 * problem.R) far = std::max(far, std::abs(F[k]));
    }
    out.farfield_residual = far;

    out.v = to_field(d, v, out.g);
    out.u = RealField(mask);
    for (size_t k = 0; k < out.u.values.size(); ++k)
        out.u.values[k] = out.v.values[k] + out.G.values[k] + Mp;
    if (problem.mode == SolveMode::Newton && out.residual_sup > problem.tol_newton) {
        std::ostringstream msg;
        msg << "solve: final sup-residual " << out.residual_sup << " above tolerance "
            << problem.tol_newton;
        throw SolverError(msg.str());
    }
    return out;
}

ConvergenceReport nested_refinement(const SinhGordonProblem& base,
                                    const std::vector<double>& eps_schedule,
                                    const std::vector<double>& R_schedule,
                                    double K_inner, double K_outer) {
    if (eps_schedule.size() != R_schedule.size() || eps_schedule.empty())
        throw ConfigError("refinement: schedules must be nonempty and of equal length");
    for (size_t s = 1; s < eps_schedule.size(); ++s) {
        if (eps_schedule[s] > eps_schedule[s - 1])
            throw ConfigError("refinement: eps schedule must be non-increasing");
        if (R_schedule[s] < R_schedule[s - 1])
            throw ConfigError("refinement: R schedule must be non-decreasing");
    }

    ConvergenceReport rep;
    std::vector<SolveResult> sols;
    std::vector<SinhGordonProblem> probs;
    for (size_t s = 0; s < eps_schedule.size(); ++s) {
        SinhGordonProblem p = base;
        p.eps = eps_schedule[s];
        p.R = R_schedule[s];
        // grid per step: smallest 64m+1 with h <= eps/2
        const int min_n = static_cast<int>(std::ceil(4.0 * p.R / p.eps)) + 1;
        const int m = (min_n - 2) / 64 + 1;
        p.grid = GridSpec(p.R, 64 * m + 1);
        RefinementStep step{p.eps, p.R, p.grid.n, 0.0};
        try {
            sols.push_back(solve_bvp(p));
        } catch (const std::exception& e) {
            rep.completed = false;
            rep.abort_reason = e.what();
            rep.steps.push_back(step);
            return rep;
        }
        step.residual_sup = sols.back().residual_sup;
        rep.steps.push_back(step);
        probs.push_back(p);
    }

    // restriction of K to the coarsest grid, away from punctures on every grid
    const auto& coarse = sols.front().v;
    const auto& cgrid = coarse.grid();
    const double margin = eps_schedule.front() + 2.0 * cgrid.spacing();
    std::vector<cplx> pts;
    for (int i = 0; i < cgrid.n; ++i)
        for (int j = 0; j < cgrid.n; ++j) {
            const cplx z = cgrid.node(i, j);
            const double a = std::abs(z);
            if (a < K_inner || a > K_outer) continue;
            bool ok = coarse.mask->is_interior(i, j);
            for (const auto& e : base.divisor.entries)
                ok = ok && std::abs(z - e.point) > margin;
            if (ok) pts.push_back(z);
        }
    if (pts.empty()) throw GeometryError("refinement: window K contains no usable nodes");

    std::vector<std::vector<double>> vals(sols.size());
    for (size_t s = 0; s < sols.size(); ++s) {
        vals[s].reserve(pts.size());
        for (cplx z : pts) vals[s].push_back(bilinear(sols[s].v, z));
    }
    for (size_t s = 1; s < sols.size(); ++s) {
        double diff = 0.0;
        for (size_t q = 0; q < pts.size(); ++q)
            diff = std::max(diff, std::abs(vals[s][q] - vals[s - 1][q]));
        rep.sup_diffs.push_back(diff);
    }
    for (size_t s = 1; s < rep.sup_diffs.size(); ++s)
        if (rep.sup_diffs[s] > rep.sup_diffs[s - 1]) rep.non_increasing = false;
    return rep;
}

std::vector<double> distributional_charge(const RealField& u, const VortexDivisor& divisor,
                                          double eps) {
    const double h = u.grid().spacing();
    const double rho = std::max(4.0 * h, 2.0 * eps);
    std::vector<double> charges;
    charges.reserve(divisor.entries.size());
    for (const auto& e : divisor.entries)
        charges.push_back(contour_normal_flux(u, e.point, rho) / (2.0 * std::numbers::pi));
    return charges;
}

} // namespace vortexlab
