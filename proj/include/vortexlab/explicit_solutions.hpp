#pragma once

#include "vortexlab/grid.hpp"

#include <optional>

namespace vortexlab {

// Literal complex connection coefficients under A = a10 dz + a01 dzbar, carried
// when the stored real (A0, A1) pair cannot represent the generating 1-form
// exactly (see generate_higgs_solution).
struct ComplexConnection {
    cplx a10{0.0, 0.0};
    cplx a01{0.0, 0.0};
    bool reality_mismatch = false;
};

// Candidate solution tuple. A0/A1 store the real functions (the connection is
// i*A0 dx0 + i*A1 dx1; consumers apply the factor i).
struct SolutionFields {
    RealField A0, A1;
    ComplexField psi1, psi2;
    std::optional<ComplexField> higgs;
    std::optional<ComplexConnection> connection;
};

struct FamilyParams {
    cplx c1{1.0, 0.0};
    cplx c2{0.0, 0.0};
    double theta = 0.0;
    VortexDivisor divisor;
};

// (A0, A1, psi1, psi2) = (-2 c2, 0, +-c1 e^{i c2 (z+zb)}, c1 e^{i c2 (z+zb)}).
// A0 stores Re(-2 c2); the family solves the system exactly for real c2.
SolutionFields generate_plane_wave(std::shared_ptr<const DomainMask> mask, cplx c1, cplx c2,
                                   int sign = +1);

// psi2 = c1 prod (z - z_j)^{n_j} e^{i c2 (z+zb)},
// psi1 = c1 e^{i theta} prod (zb - zb_j)^{n_j} e^{i c2 (z+zb)}, A = (-2 c2, 0).
SolutionFields generate_divisor_solution(std::shared_ptr<const DomainMask> mask,
                                         const FamilyParams& params);

// Residuals of the rescaling compatibility system: h2 antiholomorphic defect,
// h1 holomorphic defect, modulus mismatch sup| |h1| - |h2| |.
struct PairCompatReport {
    double h2_dzbar = 0.0;
    double h1_dz = 0.0;
    double modulus_mismatch = 0.0;
    bool pass = false;
};
PairCompatReport check_pair_compat(const ComplexField& h1, const ComplexField& h2,
                                   double tol_cr, double tol_modulus);

// Zero set of psi2 as a divisor via winding counts; plaquette centers within
// cluster_radius (default 3h) merge into one entry.
VortexDivisor divisor_of(const SolutionFields& s, double tau = 1e-8);

// With-Higgs family: (A, psi1, psi2, phi) = ((-i c2/2) dz, c1, c1 e^{i c2 (z+zb)},
// -i c2 e^{-i c2 (z+zb)}). Requires c2 real positive and |c1| = sqrt(2) c2 to
// 1e-12 relative. The dz-only 1-form has no real (A0, A1) reading: A0 stores the
// real part -c2/2, and the literal coefficients are carried in `connection` with
// reality_mismatch set.
SolutionFields generate_higgs_solution(std::shared_ptr<const DomainMask> mask, cplx c1, double c2);

} // namespace vortexlab
