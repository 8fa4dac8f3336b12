#include "vortexlab/explicit_solutions.hpp"
#include "vortexlab/errors.hpp"
#include "vortexlab/stencils.hpp"

#include <cmath>

namespace vortexlab {

namespace {
cplx divisor_poly(const VortexDivisor& d, cplx z) {
    cplx p(1.0, 0.0);
    for (const auto& e : d.entries)
        for (int k = 0; k < e.multiplicity; ++k) p *= z - e.point;
    return p;
}

cplx divisor_poly_conj(const VortexDivisor& d, cplx z) {
    cplx p(1.0, 0.0);
    for (const auto& e : d.entries)
        for (int k = 0; k < e.multiplicity; ++k) p *= std::conj(z) - std::conj(e.point);
    return p;
}
} // namespace

SolutionFields generate_plane_wave(std::shared_ptr<const DomainMask> mask, cplx c1, cplx c2,
                                   int sign) {
    if (c1 == cplx(0.0, 0.0)) throw ParameterError("plane wave: c1 must be nonzero");
    const cplx iu(0.0, 1.0);
    SolutionFields s;
    s.A0 = sample_real(mask, [&](cplx) { return -2.0 * c2.real(); });
    s.A1 = sample_real(mask, [&](cplx) { return 0.0; });
    s.psi2 = sample_complex(mask, [&](cplx z) { return c1 * std::exp(iu * c2 * (z + std::conj(z))); });
    s.psi1 = sample_complex(mask, [&](cplx z) {
        return double(sign) * c1 * std::exp(iu * c2 * (z + std::conj(z)));
    });
    return s;
}

SolutionFields generate_divisor_solution(std::shared_ptr<const DomainMask> mask,
                                         const FamilyParams& params) {
    if (params.c1 == cplx(0.0, 0.0)) throw ParameterError("divisor solution: c1 must be nonzero");
    params.divisor.validate(1);
    const cplx iu(0.0, 1.0);
    SolutionFields s;
    s.A0 = sample_real(mask, [&](cplx) { return -2.0 * params.c2.real(); });
    s.A1 = sample_real(mask, [&](cplx) { return 0.0; });
    s.psi2 = sample_complex(mask, [&](cplx z) {
        return params.c1 * divisor_poly(params.divisor, z) * std::exp(iu * params.c2 * (z + std::conj(z)));
    });
    s.psi1 = sample_complex(mask, [&](cplx z) {
        return params.c1 * std::exp(iu * params.theta) * divisor_poly_conj(params.divisor, z) *
               std::exp(iu * params.c2 * (z + std::conj(z)));
    });
    return s;
}

PairCompatReport check_pair_compat(const ComplexField& h1, const ComplexField& h2,
                                   double tol_cr, double tol_modulus) {
    PairCompatReport rep;
    rep.h2_dzbar = sup_abs(wirtinger(h2, Wirtinger::Dzbar));
    rep.h1_dz = sup_abs(wirtinger(h1, Wirtinger::Dz));
    double mm = 0.0;
    for (size_t k = 0; k < h1.values.size(); ++k) {
        const double a = std::abs(h1.values[k]), b = std::abs(h2.values[k]);
        if (std::isfinite(a) && std::isfinite(b)) mm = std::max(mm, std::abs(a - b));
    }
    rep.modulus_mismatch = mm;
    rep.pass = rep.h2_dzbar <= tol_cr && rep.h1_dz <= tol_cr && rep.modulus_mismatch <= tol_modulus;
    return rep;
}

VortexDivisor divisor_of(const SolutionFields& s, double tau) {
    const ZeroCount zc = count_zeros_winding(s.psi2, tau);
    const double merge = 3.0 * s.psi2.grid().spacing();

    VortexDivisor d;
    struct Cluster {
        cplx weighted_sum{0.0, 0.0};
        int weight = 0;
        int winding = 0;
    };
    std::vector<Cluster> clusters;
    for (const auto& [z, w] : zc.locations) {
        bool placed = false;
        for (auto& c : clusters) {
            const cplx centroid = c.weighted_sum / double(c.weight);
            if (std::abs(centroid - z) <= merge) {
                c.weighted_sum += double(std::abs(w)) * z;
                c.weight += std::abs(w);
                c.winding += w;
                placed = true;
                break;
            }
        }
        if (!placed) clusters.push_back({double(std::abs(w)) * z, std::abs(w), w});
    }
    for (const auto& c : clusters) {
        if (c.winding == 0) continue;
        d.entries.push_back({c.weighted_sum / double(c.weight), c.winding});
    }
    return d;
}

SolutionFields generate_higgs_solution(std::shared_ptr<const DomainMask> mask, cplx c1, double c2) {
    if (!(c2 > 0.0)) throw ParameterError("higgs family: c2 must be real positive");
    const double rel = std::abs(std::abs(c1) - std::sqrt(2.0) * c2) / (std::sqrt(2.0) * c2);
    if (rel > 1e-12)
        throw ParameterError("higgs family: parameters must satisfy |c_1| = sqrt(2) c_2");
    const cplx iu(0.0, 1.0);
    SolutionFields s;
    // A = (-i c2/2) dz: under A = i(A0-iA1)/2 dz + i(A0+iA1)/2 dzb the nominal
    // reading is A0 = -c2/2, A1 = -i c2/2 -- A1 is not real. Store the real
    // parts and carry the literal coefficients for residual evaluation.
    s.A0 = sample_real(mask, [&](cplx) { return -0.5 * c2; });
    s.A1 = sample_real(mask, [&](cplx) { return 0.0; });
    s.psi1 = sample_complex(mask, [&](cplx) { return c1; });
    s.psi2 = sample_complex(mask, [&](cplx z) { return c1 * std::exp(iu * c2 * (z + std::conj(z))); });
    s.higgs = sample_complex(mask, [&](cplx z) {
        return -iu * c2 * std::exp(-iu * c2 * (z + std::conj(z)));
    });
    s.connection = ComplexConnection{cplx(0.0, -0.5 * c2), cplx(0.0, 0.0), true};
    return s;
}

} // namespace vortexlab
