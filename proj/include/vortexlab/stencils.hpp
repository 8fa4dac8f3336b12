#pragma once

#include "vortexlab/grid.hpp"

namespace vortexlab {

enum class Wirtinger { Dz, Dzbar };

// Centered second-order Wirtinger derivative (d0 -+ i d1)/2. Values are produced
// at interior nodes with a complete stencil; everywhere else the output is NaN.
ComplexField wirtinger(const ComplexField& f, Wirtinger which);

// 5-point Laplacian, same support rule as wirtinger.
RealField laplacian(const RealField& f);
ComplexField laplacian(const ComplexField& f);

// Bilinear interpolation of f at z; GeometryError if any corner of the cell is
// excluded or outside the grid.
double bilinear(const RealField& f, cplx z);

// Trapezoid quadrature of df/dr over the circle |z - center| = radius, with
// max(16, ceil(2*pi*radius/h)) angle samples; radial derivative by centered
// difference of step h on bilinear-interpolated values. The probe circles of
// radii radius -+ h must stay inside the field's support.
double contour_normal_flux(const RealField& f, cplx center, double radius);

// Node-cell midpoint rule: h^2 per interior node (band cells dropped).
double area_integral(const RealField& f);

struct ZeroCount {
    int total = 0;                                // sum of plaquette windings
    std::vector<std::pair<cplx, int>> locations;  // plaquette centers with winding != 0
    int ambiguous = 0;                            // plaquettes skipped by the modulus floor
};

// Argument-principle surrogate: per-edge phase increments wrapped to (-pi, pi],
// summed over plaquettes whose four corners carry values. Plaquettes with
// min |w| < tau * sup|w| are flagged ambiguous and skipped. Raises GeometryError
// when |w| <= tau * sup|w| somewhere on the outer boundary band (zero too close
// to the boundary).
ZeroCount count_zeros_winding(const ComplexField& w, double tau = 1e-8);

} // namespace vortexlab
