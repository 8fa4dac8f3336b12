#pragma once

#include "vortexlab/grid.hpp"

#include <optional>
#include <string>

namespace vortexlab {

enum class SolveMode { Newton, Monotone };

struct SinhGordonProblem {
    VortexDivisor divisor;       // all multiplicities >= 2
    double M = 0.25;             // in (0,1)
    double Mprime = 0.0;         // >= 0
    double R = 6.0;
    double eps = 0.1;
    GridSpec grid{6.0, 129};
    double tol_newton = 1e-10;
    double tol_linear = 1e-10;
    int continuation_steps = 8;
    SolveMode mode = SolveMode::Newton;

    void validate() const;
    std::shared_ptr<const DomainMask> make_mask() const;
};

// G(z) = sum_k -log(1 + |z - z_k|^{-alpha_k}); nodes coincident with a z_k are
// dropped from the support (NaN), not an error.
RealField build_G(const VortexDivisor& divisor, std::shared_ptr<const DomainMask> mask);

// r(z) = sum_k -alpha_k^2 |z - z_k|^{alpha_k - 2} / (1 + |z - z_k|^{alpha_k})^2;
// requires all multiplicities >= 2, strictly negative.
RealField build_r(const VortexDivisor& divisor, std::shared_ptr<const DomainMask> mask);

// Dirichlet data: 0 on the outer band, -G on each puncture band; NaN elsewhere.
RealField boundary_data(std::shared_ptr<const DomainMask> mask, const RealField& G);

// Solve the 5-point Laplace equation with Dirichlet band data g; symmetric
// positive-definite sparse solve, relative residual <= tol_linear.
RealField harmonic_extension(const RealField& g, double tol_linear = 1e-10);

struct BarrierReport {
    double b = 0.0, l = 0.0;           // bounds of r over the domain
    double bprime = 0.0, lprime = 0.0; // bounds of h + G
    double sigma = 0.0, eta = 0.0;     // exp(bprime + M'), exp(lprime + M')
    double t2_plain = 0.0;             // (-b + sqrt(b^2 + 4M)) / (2M), sigma dropped
    double t2_sigma = 0.0;             // larger root of -M sigma t^2 - b t + M/sigma
    double threshold_sup = 0.0;        // largest C with min_z f(z, h+C) >= 0
    double threshold_sub = 0.0;        // smallest C with max_z f(z, h+C) <= 0
    std::optional<double> C_plus;      // threshold_sup when it is >= 0 (super-solution constant)
    std::optional<double> C_minus;     // threshold_sub when it is <= 0 (sub-solution constant)
    bool ordered_pair = false;
    RealField cert_plus;  // sign of f(z, h + C) at the evaluated super constant
    RealField cert_minus; // sign of f(z, h + C') at the evaluated sub constant
    double cert_plus_at = 0.0;
    double cert_minus_at = 0.0;
};

// Scalar search for the pointwise sign conditions of f(z,v) = -2M sinh(v+G+M')-r.
// f is strictly decreasing in v, so each condition has a sharp threshold in C;
// existence additionally requires the sign compatible with the boundary data
// (C >= 0 for the super constant, C' <= 0 for the sub constant). Outcomes are
// measured, not assumed.
BarrierReport barrier_search(const SinhGordonProblem& problem, const RealField& h,
                             const RealField& G, const RealField& r);

struct SolveResult {
    RealField v, u, G, r, h;
    RealField g; // boundary data record
    double residual_sup = 0.0;
    double farfield_residual = 0.0;
    int newton_iters = 0;
    BarrierReport barrier;
    bool monotone_ok = true; // monotone mode: sweep stayed nodewise monotone
};

// Discrete F(v) = Lap_h v + 2M sinh(v+G+M') + r = 0 with Dirichlet data g.
// Newton mode: damped Newton with continuation ramping M from 0 in equal steps,
// initial iterate the M=0 linear solution. Monotone mode: shifted Picard sweep
// from the super-solution constant; refused when no ordered constant pair exists.
SolveResult solve_bvp(const SinhGordonProblem& problem);

struct RefinementStep {
    double eps = 0.0, R = 0.0;
    int n = 0;
    double residual_sup = 0.0;
};

struct ConvergenceReport {
    std::vector<RefinementStep> steps;
    std::vector<double> sup_diffs; // consecutive solution differences on K
    bool non_increasing = true;
    bool completed = true;
    std::string abort_reason;
};

// Solve along the schedules, restrict to the annulus K = {r_in <= |z| <= r_out}
// (minus puncture neighborhoods) on the coarsest grid, and report consecutive
// sup-differences. Grids are chosen per step so h <= eps/2.
ConvergenceReport nested_refinement(const SinhGordonProblem& base,
                                    const std::vector<double>& eps_schedule,
                                    const std::vector<double>& R_schedule,
                                    double K_inner, double K_outer);

// Per-vortex contour charge estimates: flux(u, z_k, rho)/(2 pi), rho = max(4h, 2 eps).
std::vector<double> distributional_charge(const RealField& u, const VortexDivisor& divisor,
                                          double eps);

} // namespace vortexlab
