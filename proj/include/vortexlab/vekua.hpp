#pragma once

#include "vortexlab/grid.hpp"

#include <optional>
#include <span>

namespace vortexlab {

// Coefficients of dw/dzbar = A w + B wbar (+ f).
struct VekuaCoeffs {
    ComplexField A, B;
    std::optional<ComplexField> f;
};

// Area Cauchy transform T(f)(z) = -(1/pi) iint f(zeta)/(zeta - z), node-cell
// midpoint rule; the cell containing the evaluation point contributes zero
// (the kernel is odd about the cell center). First-order accurate.
std::vector<cplx> t_operator(const ComplexField& f, std::span<const cplx> eval_points);

// T(f) evaluated at every non-excluded node. Direct summation, O(N^2) in the
// node count.
ComplexField t_operator_field(const ComplexField& f);

struct Factorization {
    ComplexField phi;   // exponent
    ComplexField holo;  // w * exp(-phi)
    double cr_residual = 0.0; // sup of discrete d(holo)/dzbar over interior nodes
    int branch_nodes = 0;     // nodes evaluated on the T(A+B) branch
    bool degenerate = false;  // w identically below the floor
    double f_over_w_norm = 0.0; // measured quadrature L2 norm of f/w (nonhomogeneous case)
};

// Similarity exponent phi = T(A + B wbar/w) with the T(A+B) branch at nodes
// where |w| < floor_rel * sup|w|.
Factorization similarity_factor(const ComplexField& w, const VekuaCoeffs& coeffs,
                                double floor_rel = 1e-8);

// Factorizations for the conjugate-pair system dw1/dz + iA w1 = 0,
// dw2/dzbar + i conj(A) w2 = 0: returns (factorization of conj(w1) with
// phi1 = T(i conj(A)), factorization of w2 with phi2 = T(-i conj(A))).
std::pair<Factorization, Factorization> system_factor(const ComplexField& w1,
                                                      const ComplexField& w2,
                                                      const ComplexField& A);

struct LpnuResult {
    double norm_inner = 0.0;     // ||f||_Lp on the unit disk
    double norm_inverted = 0.0;  // ||f_nu||_Lp on the punctured unit disk, f_nu = |z|^-nu f(1/z)
    bool member = false;
    double growth_ratio = 0.0;   // inverted-norm ratio between the two excision radii
};

struct LpnuOptions {
    int n = 257;                  // quadrature grid per axis on [-1,1]^2
    double excision = 0.05;       // outer excision radius around 0 (inner is half)
    double divergence_ratio = 1.5;
};

// Membership diagnostic for the weighted space: both L^p quadrature norms plus
// an excision-shrink divergence test. A heuristic, not a proof.
LpnuResult lpnu_norms(const std::function<cplx(cplx)>& f, double p, double nu,
                      const LpnuOptions& opts = {});

struct DecayZeroRadius {
    double radius = 0.0;
    bool zeros_possible = true; // false when the envelope forbids zeros outright
};

// Any zero of a field obeying 0 <= M - |f|^2 <= N exp(-|z|) lies in the closed
// disk of radius log(N/M); for M > N no zero can exist at all.
DecayZeroRadius decay_zero_radius(double M, double N);

} // namespace vortexlab
