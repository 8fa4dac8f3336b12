#include "vortexlab/grid.hpp"
#include "vortexlab/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace vortexlab {

GridSpec::GridSpec(double extent_, int n_) : extent(extent_), n(n_) {
    if (n < 3) throw ConfigError("grid: n must be at least 3");
    if (!(extent > 0.0)) throw ConfigError("grid: extent must be positive");
}

std::pair<int, int> GridSpec::nearest(cplx z) const {
    const double h = spacing();
    int i = static_cast<int>(std::lround((z.real() + extent) / h));
    int j = static_cast<int>(std::lround((z.imag() + extent) / h));
    i = std::min(std::max(i, 0), n - 1);
    j = std::min(std::max(j, 0), n - 1);
    return {i, j};
}

bool DomainMask::stencil_complete(int i, int j) const {
    if (!is_interior(i, j)) return false;
    return has_value(i + 1, j) && has_value(i - 1, j) && has_value(i, j + 1) && has_value(i, j - 1);
}

int DomainMask::count(NodeClass c) const {
    int k = 0;
    for (NodeClass v : cls)
        if (v == c) ++k;
    return k;
}

std::shared_ptr<const DomainMask> build_mask(const GridSpec& grid, double R,
                                             const std::vector<Puncture>& punctures) {
    const double h = grid.spacing();
    if (R > grid.extent + 1e-12 * grid.extent)
        throw ConfigError("mask: outer radius R exceeds grid extent");
    for (size_t k = 0; k < punctures.size(); ++k) {
        const auto& p = punctures[k];
        std::ostringstream who;
        who << "puncture " << k << " at (" << p.center.real() << "," << p.center.imag() << ")";
        if (p.radius < h)
            throw ConfigError("mask: " + who.str() + " has radius below the grid spacing h");
        if (std::abs(p.center) + p.radius > R - 2.0 * h)
            throw ConfigError("mask: " + who.str() + " is not inside D(0, R - 2h)");
        for (size_t m = 0; m < k; ++m) {
            if (std::abs(p.center - punctures[m].center) <= p.radius + punctures[m].radius)
                throw ConfigError("mask: " + who.str() + " overlaps puncture " + std::to_string(m));
        }
    }

    auto mask = std::make_shared<DomainMask>();
    mask->grid = grid;
    mask->R = R;
    mask->punctures = punctures;
    mask->cls.assign(grid.size(), NodeClass::Excluded);

    const int n = grid.n;
    std::vector<char> inside(grid.size(), 0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const cplx z = grid.node(i, j);
            bool in = std::abs(z) < R;
            for (const auto& p : punctures)
                in = in && std::abs(z - p.center) > p.radius;
            inside[grid.index(i, j)] = in ? 1 : 0;
            if (in) mask->cls[grid.index(i, j)] = NodeClass::Interior;
        }
    }

    // bands: non-interior nodes in the 8-neighborhood of an interior node
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (inside[grid.index(i, j)]) continue;
            bool adj = false;
            for (int di = -1; di <= 1 && !adj; ++di)
                for (int dj = -1; dj <= 1 && !adj; ++dj) {
                    if (di == 0 && dj == 0) continue;
                    if (grid.contains_index(i + di, j + dj) && inside[grid.index(i + di, j + dj)])
                        adj = true;
                }
            if (!adj) continue;
            const cplx z = grid.node(i, j);
            NodeClass c = NodeClass::OuterBand;
            for (const auto& p : punctures)
                if (std::abs(z - p.center) <= p.radius) c = NodeClass::PunctureBand;
            mask->cls[grid.index(i, j)] = c;
        }
    }
    return mask;
}

template <class T>
FieldT<T>::FieldT(std::shared_ptr<const DomainMask> m) : mask(std::move(m)) {
    values.assign(mask->grid.size(), std::numeric_limits<double>::quiet_NaN() * T(1));
    const int n = mask->grid.n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (mask->has_value(i, j)) values[mask->grid.index(i, j)] = T(0);
}

template struct FieldT<double>;
template struct FieldT<cplx>;

RealField sample_real(std::shared_ptr<const DomainMask> mask, const std::function<double(cplx)>& f) {
    RealField out(mask);
    const int n = mask->grid.n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (mask->has_value(i, j)) out.at(i, j) = f(mask->grid.node(i, j));
    return out;
}

ComplexField sample_complex(std::shared_ptr<const DomainMask> mask, const std::function<cplx(cplx)>& f) {
    ComplexField out(mask);
    const int n = mask->grid.n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (mask->has_value(i, j)) out.at(i, j) = f(mask->grid.node(i, j));
    return out;
}

double sup_abs(const RealField& f) {
    double s = 0.0;
    for (double v : f.values)
        if (std::isfinite(v)) s = std::max(s, std::abs(v));
    return s;
}

double sup_abs(const ComplexField& f) {
    double s = 0.0;
    for (const cplx& v : f.values)
        if (std::isfinite(v.real()) && std::isfinite(v.imag())) s = std::max(s, std::abs(v));
    return s;
}

int VortexDivisor::degree() const {
    int d = 0;
    for (const auto& e : entries) d += e.multiplicity;
    return d;
}

void VortexDivisor::validate(int min_multiplicity) const {
    for (size_t k = 0; k < entries.size(); ++k) {
        if (entries[k].multiplicity < min_multiplicity)
            throw ConfigError("divisor: multiplicity " + std::to_string(entries[k].multiplicity) +
                              " at entry " + std::to_string(k) + " is below the required minimum " +
                              std::to_string(min_multiplicity));
        for (size_t m = 0; m < k; ++m)
            if (entries[k].point == entries[m].point)
                throw ConfigError("divisor: repeated point at entries " + std::to_string(m) + " and " +
                                  std::to_string(k));
    }
}

} // namespace vortexlab
