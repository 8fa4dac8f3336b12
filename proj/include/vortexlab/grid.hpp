#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

namespace vortexlab {

using cplx = std::complex<double>;

// Uniform n x n node grid on the square [-extent, extent]^2.
// Node (i,j) sits at z = (-extent + i*h) + i*(-extent + j*h), h = 2*extent/(n-1).
struct GridSpec {
    double extent = 1.0;
    int n = 3;

    GridSpec() = default;
    GridSpec(double extent_, int n_);

    double spacing() const { return 2.0 * extent / (n - 1); }
    double coord(int k) const { return -extent + k * spacing(); }
    cplx node(int i, int j) const { return {coord(i), coord(j)}; }
    int index(int i, int j) const { return i * n + j; }
    int size() const { return n * n; }

    // Nearest node to z; exact inverse of node() for on-grid points.
    std::pair<int, int> nearest(cplx z) const;
    bool contains_index(int i, int j) const { return i >= 0 && i < n && j >= 0 && j < n; }
};

struct Puncture {
    cplx center;
    double radius = 0.0;
};

enum class NodeClass : unsigned char { Excluded = 0, Interior = 1, OuterBand = 2, PunctureBand = 3 };

// Disk D(0,R) minus closed puncture disks, realized as node classes.
// Interior nodes satisfy |z| < R and |z - z_k| > eps_k strictly; band nodes are
// the non-interior nodes in the 8-neighborhood of an interior node (they carry
// Dirichlet/stencil values); everything else is excluded.
struct DomainMask {
    GridSpec grid;
    double R = 1.0;
    std::vector<Puncture> punctures;
    std::vector<NodeClass> cls; // n*n entries

    NodeClass at(int i, int j) const { return cls[grid.index(i, j)]; }
    bool is_interior(int i, int j) const { return at(i, j) == NodeClass::Interior; }
    bool has_value(int i, int j) const { return at(i, j) != NodeClass::Excluded; }
    // interior node with all four axis neighbors carrying values (true by
    // construction, kept as a guard for derivative stencils)
    bool stencil_complete(int i, int j) const;
    int count(NodeClass c) const;
};

// Classify nodes of `grid` against D(0,R) \ union of puncture disks.
// Preconditions: R <= extent, eps >= h for every puncture, puncture disks
// pairwise disjoint and inside D(0, R - 2h). Violations raise ConfigError
// naming the offending puncture. Pure: equal inputs give equal classifications.
std::shared_ptr<const DomainMask> build_mask(const GridSpec& grid, double R,
                                             const std::vector<Puncture>& punctures);

// Scalar fields carried on a mask; excluded nodes hold quiet NaN.
template <class T>
struct FieldT {
    std::shared_ptr<const DomainMask> mask;
    std::vector<T> values; // n*n, row-major in i

    FieldT() = default;
    explicit FieldT(std::shared_ptr<const DomainMask> m);

    const GridSpec& grid() const { return mask->grid; }
    T& at(int i, int j) { return values[grid().index(i, j)]; }
    const T& at(int i, int j) const { return values[grid().index(i, j)]; }
};

using RealField = FieldT<double>;
using ComplexField = FieldT<cplx>;

// Fill a field by sampling f(z) at every non-excluded node.
RealField sample_real(std::shared_ptr<const DomainMask> mask, const std::function<double(cplx)>& f);
ComplexField sample_complex(std::shared_ptr<const DomainMask> mask, const std::function<cplx(cplx)>& f);

// sup of |values| over nodes where the field is finite; 0 for empty support
double sup_abs(const RealField& f);
double sup_abs(const ComplexField& f);

// Finite multiset of points with integer multiplicities.
struct VortexDivisor {
    struct Entry {
        cplx point;
        int multiplicity = 1;
    };
    std::vector<Entry> entries;

    int degree() const;
    // points pairwise distinct, multiplicities >= min_multiplicity
    void validate(int min_multiplicity = 1) const;
};

} // namespace vortexlab
