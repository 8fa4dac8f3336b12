#pragma once

#include "vortexlab/explicit_solutions.hpp"
#include "vortexlab/grid.hpp"

namespace vortexlab {

struct ReconstructionParams {
    double M1 = 0.25, M2 = 0.25; // both in (0,1)
    double zero_floor = 1e-8;    // relative modulus floor for the log-derivative

    double C() const;      // log sqrt(M1*M2)
    double Mprime() const; // log sqrt(M1/M2)
    void validate() const;
};

// Gauge-fixed reconstruction from u = log(|psi1|/|psi2|): |psi2|^2 = e^C e^{-u},
// psi2 real nonnegative, psi1 = e^u psi2, and A recovered from the log-derivative
// of psi2. Nodes with |psi2| <= zero_floor * sup are left out of the A support.
SolutionFields reconstruct_fields(const RealField& u, const ReconstructionParams& params);

struct MainEqResiduals {
    double r1 = 0.0; // 2 dpsi2/dzbar + i(A0+iA1) psi2
    double r2 = 0.0; // 2 dpsi1/dz   + i(A0-iA1) psi1
    double r3 = 0.0; // (d0 A1 - d1 A0) - (|psi1|^2 - |psi2|^2)/2
};
MainEqResiduals residual_maineq(const SolutionFields& s);

struct HiggsResiduals {
    double r1 = 0.0; // dphi/dzbar + psi1 conj(psi2)/2
    double r2 = 0.0; // curvature equation
    double r3 = 0.0; // psi2 equation with -conj(phi) psi1 coupling
    double r4 = 0.0; // psi1 equation with -phi psi2 coupling
    bool reality_mismatch = false; // residuals evaluated with literal complex coefficients
};
HiggsResiduals residual_higgs(const SolutionFields& s);

// Yang-Mills-Higgs action (1/2) iint (|F|^2/4 + |grad_A phi|^2 + (|phi|^2-1)^2).
// Discretized with trapezoid link phases and plaquette curvature so the value is
// gauge-invariant to rounding under gauge_transform.
double ymh_functional(const RealField& A0, const RealField& A1, const ComplexField& phi);

struct EnergyReport {
    double ymh_direct = 0.0;
    double ymh_bogomolny = 0.0;
    double part_grad_plus = 0.0;  // (1/2) iint [(Re D0 + Im D1)]^2
    double part_grad_minus = 0.0; // (1/2) iint [(Im D0 - Re D1)]^2
    double part_potential = 0.0;  // (1/2) iint (F/2 + |phi|^2 - 1)^2
    double part_exact_form = 0.0; // (1/2) iint (-F|phi|^2 - 2 Re D0 Im D1 + 2 Im D0 Re D1)
    double flux = 0.0;
    double flux_over_2pi = 0.0;
    double defect = 0.0; // |ymh_direct - ymh_bogomolny|
};

// Completion-of-squares split; the exact-form summand integrates a divergence and
// is ~0 for compactly supported deviations from vacuum. The five summands and the
// direct value are built from the same link quantities, so the identity holds to
// rounding.
EnergyReport bogomolny_split(const RealField& A0, const RealField& A1, const ComplexField& phi);

struct FluxResult {
    double flux = 0.0;
    double over_2pi = 0.0;
    double nearest_int_dist = 0.0;
};
FluxResult flux(const RealField& A0, const RealField& A1);

enum class EnvelopeVerdict { Consistent, Inconsistent, Degenerate };

struct PropertyEFit {
    double M1 = 0.0, M2 = 0.0;
    double N1 = 0.0, N2 = 0.0;
    double rate1 = 0.0, rate2 = 0.0;
    EnvelopeVerdict verdict = EnvelopeVerdict::Degenerate;
    double lambda_phase_dev = 0.0; // sup deviation of arg(psi1 conj(psi2)) from 0
    bool lambda_nonnegative = false;
};

struct PropertyEFitOptions {
    double outer_frac = 0.9;     // M-hat annulus [outer_frac*R, R]
    double fit_inner_frac = 0.35;
    double fit_outer_margin = 3.0; // fit annulus [fit_inner_frac*R, R - margin]
    double rate_low = 0.5, rate_high = 2.0;
    double phase_tol = 1e-6;
};

// Exponential-envelope diagnostics: M_j as the outer-annulus max of |psi_j|^2,
// decay rates by least squares of log(M_j - |psi_j|^2 + floor) against -|z|.
// Requires a disk of radius >= 4.
PropertyEFit property_E_fit(const ComplexField& psi1, const ComplexField& psi2,
                            const PropertyEFitOptions& opts = {});

// (A, psi) -> (A - dchi, e^{i chi} psi); phi (if any) gets the same phase factor.
// The discrete gradient of chi is link-exact: its trapezoid line integrals
// telescope, so |psi| fields, plaquette flux, and the YMH value are preserved to
// rounding.
SolutionFields gauge_transform(const SolutionFields& s, const RealField& chi);

// Link-exact discrete gradient used by gauge_transform (exposed for tests):
// (h/2)(sigma(x) + sigma(x + h e_axis)) = chi(x + h e_axis) - chi(x) along every
// contiguous run of nodes; second-order consistent with d(chi)/dx_axis.
RealField link_exact_gradient(const RealField& chi, int axis);

struct TaubesResiduals {
    double r1 = 0.0; // dphi/dzbar - (i/2)(A0+iA1) phi
    double r2 = 0.0; // |(i/2)F(A) - (1-|phi|^2) dz^dzbar| under dz^dzbar = -2i dx0^dx1
};
TaubesResiduals residual_taubes(const RealField& A0, const RealField& A1, const ComplexField& phi);

} // namespace vortexlab
