#include "vortexlab/stencils.hpp"
#include "vortexlab/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

namespace vortexlab {

namespace {
const double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class T>
FieldT<T> centered_derivative(const FieldT<T>& f, int axis, double scale) {
    FieldT<T> out(f.mask);
    const auto& g = f.grid();
    const double inv2h = scale / (2.0 * g.spacing());
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            if (f.mask->stencil_complete(i, j)) {
                const T hi = axis == 0 ? f.at(i + 1, j) : f.at(i, j + 1);
                const T lo = axis == 0 ? f.at(i - 1, j) : f.at(i, j - 1);
                out.at(i, j) = (hi - lo) * inv2h;
            } else {
                out.at(i, j) = T(1) * kNaN;
            }
        }
    return out;
}

template <class T>
FieldT<T> laplacian_impl(const FieldT<T>& f) {
    FieldT<T> out(f.mask);
    const auto& g = f.grid();
    const double invh2 = 1.0 / (g.spacing() * g.spacing());
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            if (f.mask->stencil_complete(i, j)) {
                out.at(i, j) = (f.at(i + 1, j) + f.at(i - 1, j) + f.at(i, j + 1) + f.at(i, j - 1) -
                                4.0 * f.at(i, j)) *
                               invh2;
            } else {
                out.at(i, j) = T(1) * kNaN;
            }
        }
    return out;
}
} // namespace

ComplexField wirtinger(const ComplexField& f, Wirtinger which) {
    ComplexField d0 = centered_derivative(f, 0, 1.0);
    ComplexField d1 = centered_derivative(f, 1, 1.0);
    ComplexField out(f.mask);
    const cplx iu(0.0, 1.0);
    const cplx s = which == Wirtinger::Dz ? -iu : iu;
    for (size_t k = 0; k < out.values.size(); ++k)
        out.values[k] = 0.5 * (d0.values[k] + s * d1.values[k]);
    return out;
}

RealField laplacian(const RealField& f) { return laplacian_impl(f); }
ComplexField laplacian(const ComplexField& f) { return laplacian_impl(f); }

double bilinear(const RealField& f, cplx z) {
    const auto& g = f.grid();
    const double h = g.spacing();
    const double fi = (z.real() + g.extent) / h;
    const double fj = (z.imag() + g.extent) / h;
    const int i0 = static_cast<int>(std::floor(fi));
    const int j0 = static_cast<int>(std::floor(fj));
    if (i0 < 0 || j0 < 0 || i0 + 1 >= g.n || j0 + 1 >= g.n)
        throw GeometryError("bilinear: point outside the grid");
    for (int di = 0; di <= 1; ++di)
        for (int dj = 0; dj <= 1; ++dj)
            if (!f.mask->has_value(i0 + di, j0 + dj))
                throw GeometryError("bilinear: interpolation cell touches an excluded node");
    const double ti = fi - i0, tj = fj - j0;
    return (1 - ti) * (1 - tj) * f.at(i0, j0) + ti * (1 - tj) * f.at(i0 + 1, j0) +
           (1 - ti) * tj * f.at(i0, j0 + 1) + ti * tj * f.at(i0 + 1, j0 + 1);
}

double contour_normal_flux(const RealField& f, cplx center, double radius) {
    const double h = f.grid().spacing();
    if (radius <= h) throw GeometryError("contour flux: radius must exceed the grid spacing");
    const int m = std::max(16, static_cast<int>(std::ceil(2.0 * std::numbers::pi * radius / h)));
    const double dtheta = 2.0 * std::numbers::pi / m;
    double acc = 0.0;
    for (int k = 0; k < m; ++k) {
        const double th = k * dtheta;
        const cplx dir(std::cos(th), std::sin(th));
        const double fp = bilinear(f, center + (radius + h) * dir);
        const double fm = bilinear(f, center + (radius - h) * dir);
        acc += (fp - fm) / (2.0 * h);
    }
    return acc * radius * dtheta;
}

double area_integral(const RealField& f) {
    const auto& g = f.grid();
    const double cell = g.spacing() * g.spacing();
    double acc = 0.0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            if (f.mask->is_interior(i, j)) acc += f.at(i, j);
    return acc * cell;
}

namespace {
// winding of w around the rectangle of nodes [i0,i1] x [j0,j1], or nullopt when
// a loop node is missing or its modulus is at the ambiguity floor
std::optional<int> rect_loop_winding(const ComplexField& w, double floor, int i0, int j0, int i1,
                                     int j1) {
    const auto& g = w.grid();
    if (i0 < 0 || j0 < 0 || i1 >= g.n || j1 >= g.n) return std::nullopt;
    std::vector<cplx> loop;
    for (int i = i0; i < i1; ++i) loop.push_back(w.at(i, j0));
    for (int j = j0; j < j1; ++j) loop.push_back(w.at(i1, j));
    for (int i = i1; i > i0; --i) loop.push_back(w.at(i, j1));
    for (int j = j1; j > j0; --j) loop.push_back(w.at(i0, j));
    for (const cplx& v : loop)
        if (!(std::isfinite(v.real()) && std::isfinite(v.imag())) || std::abs(v) <= floor)
            return std::nullopt;
    double s = 0.0;
    for (size_t k = 0; k < loop.size(); ++k) s += std::arg(loop[(k + 1) % loop.size()] / loop[k]);
    return static_cast<int>(std::lround(s / (2.0 * std::numbers::pi)));
}
} // namespace

ZeroCount count_zeros_winding(const ComplexField& w, double tau) {
    const auto& g = w.grid();
    const double wsup = sup_abs(w);
    const double floor = tau * wsup;
    const double two_pi = 2.0 * std::numbers::pi;

    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            if (w.mask->at(i, j) == NodeClass::OuterBand && std::abs(w.at(i, j)) <= floor)
                throw GeometryError("winding count: zero too close to the outer boundary");

    ZeroCount out;
    const int np = g.n - 1; // plaquettes per axis
    std::vector<int> winding(np * np, 0);
    std::vector<char> ambiguous(np * np, 0);
    for (int i = 0; i < np; ++i)
        for (int j = 0; j < np; ++j) {
            const bool ok = w.mask->has_value(i, j) && w.mask->has_value(i + 1, j) &&
                            w.mask->has_value(i + 1, j + 1) && w.mask->has_value(i, j + 1);
            if (!ok) continue;
            const cplx c00 = w.at(i, j), c10 = w.at(i + 1, j), c11 = w.at(i + 1, j + 1),
                       c01 = w.at(i, j + 1);
            const double m = std::min(std::min(std::abs(c00), std::abs(c10)),
                                      std::min(std::abs(c11), std::abs(c01)));
            if (m <= floor) {
                ambiguous[i * np + j] = 1;
                continue;
            }
            // counter-clockwise loop; std::arg of successive quotients wraps each
            // increment to (-pi, pi]
            const double s = std::arg(c10 / c00) + std::arg(c11 / c10) + std::arg(c01 / c11) +
                             std::arg(c00 / c01);
            winding[i * np + j] = static_cast<int>(std::lround(s / two_pi));
        }

    for (int i = 0; i < np; ++i)
        for (int j = 0; j < np; ++j)
            if (winding[i * np + j] != 0) {
                const cplx zc = g.node(i, j) + 0.5 * g.spacing() * cplx(1.0, 1.0);
                out.locations.emplace_back(zc, winding[i * np + j]);
                out.total += winding[i * np + j];
            }

    // ambiguous plaquettes (a zero at or near a node): resolve each 8-connected
    // cluster by the winding of an enclosing rectangle, minus the regular
    // plaquettes inside it that are already counted
    std::vector<char> seen(np * np, 0);
    for (int i = 0; i < np; ++i)
        for (int j = 0; j < np; ++j) {
            if (!ambiguous[i * np + j] || seen[i * np + j]) continue;
            std::vector<std::pair<int, int>> comp;
            std::vector<std::pair<int, int>> stack{{i, j}};
            seen[i * np + j] = 1;
            while (!stack.empty()) {
                const auto [ci, cj] = stack.back();
                stack.pop_back();
                comp.emplace_back(ci, cj);
                for (int di = -1; di <= 1; ++di)
                    for (int dj = -1; dj <= 1; ++dj) {
                        const int ni = ci + di, nj = cj + dj;
                        if (ni < 0 || nj < 0 || ni >= np || nj >= np) continue;
                        if (ambiguous[ni * np + nj] && !seen[ni * np + nj]) {
                            seen[ni * np + nj] = 1;
                            stack.emplace_back(ni, nj);
                        }
                    }
            }
            int i0 = comp[0].first, i1 = comp[0].first, j0 = comp[0].second, j1 = comp[0].second;
            for (const auto& [ci, cj] : comp) {
                i0 = std::min(i0, ci);
                i1 = std::max(i1, ci);
                j0 = std::min(j0, cj);
                j1 = std::max(j1, cj);
            }
            std::optional<int> loop;
            int grow = 0;
            for (; grow <= 3 && !loop; ++grow)
                loop = rect_loop_winding(w, floor, i0 - grow, j0 - grow, i1 + 1 + grow, j1 + 1 + grow);
            if (!loop) {
                out.ambiguous += static_cast<int>(comp.size());
                continue;
            }
            --grow; // the growth that succeeded
            int inside_regular = 0;
            for (int ci = std::max(0, i0 - grow); ci <= std::min(np - 1, i1 + grow); ++ci)
                for (int cj = std::max(0, j0 - grow); cj <= std::min(np - 1, j1 + grow); ++cj)
                    inside_regular += winding[ci * np + cj];
            const int cluster = *loop - inside_regular;
            if (cluster != 0) {
                cplx centroid(0.0, 0.0);
                for (const auto& [ci, cj] : comp)
                    centroid += g.node(ci, cj) + 0.5 * g.spacing() * cplx(1.0, 1.0);
                centroid /= double(comp.size());
                out.locations.emplace_back(centroid, cluster);
                out.total += cluster;
            }
        }
    return out;
}

} // namespace vortexlab
