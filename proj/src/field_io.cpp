#include "vortexlab/field_io.hpp"
#include "vortexlab/errors.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace vortexlab {

namespace {
constexpr char kMagic[7] = {'V', 'O', 'R', 'T', 'X', '1', '\n'};
constexpr std::uint32_t kVersion = 1;

static_assert(sizeof(double) == 8);

template <class T>
void put(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw IoError("field file: truncated header");
    return v;
}

void write_header(std::ofstream& os, const DomainMask& mask, std::uint8_t kind) {
    os.write(kMagic, sizeof(kMagic));
    put(os, kVersion);
    put(os, kind);
    put(os, static_cast<std::uint32_t>(mask.grid.n));
    put(os, mask.grid.extent);
    put(os, mask.R);
    put(os, static_cast<std::uint32_t>(mask.punctures.size()));
    for (const auto& p : mask.punctures) {
        put(os, p.center.real());
        put(os, p.center.imag());
        put(os, p.radius);
    }
}

struct Header {
    std::uint8_t kind;
    GridSpec grid;
    double R;
    std::vector<Puncture> punctures;
};

Header read_header(std::ifstream& is) {
    char magic[7];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw IoError("field file: not a VORTX1 file");
    const auto version = get<std::uint32_t>(is);
    if (version != kVersion)
        throw IoError("field file: unsupported version " + std::to_string(version));
    Header h;
    h.kind = get<std::uint8_t>(is);
    if (h.kind > 1) throw IoError("field file: unknown kind byte");
    const auto n = get<std::uint32_t>(is);
    if (n < 3 || n > 32768) throw IoError("field file: implausible grid size");
    const double extent = get<double>(is);
    if (!(extent > 0.0) || !std::isfinite(extent))
        throw IoError("field file: implausible extent");
    h.grid = GridSpec(extent, static_cast<int>(n));
    h.R = get<double>(is);
    const auto np = get<std::uint32_t>(is);
    for (std::uint32_t k = 0; k < np; ++k) {
        const double re = get<double>(is), im = get<double>(is), rad = get<double>(is);
        h.punctures.push_back({cplx(re, im), rad});
    }
    return h;
}
} // namespace

void write_field(const RealField& f, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("field file: cannot open " + path + " for writing");
    write_header(os, *f.mask, 0);
    os.write(reinterpret_cast<const char*>(f.values.data()),
             static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    if (!os) throw IoError("field file: write failed for " + path);
}

void write_field(const ComplexField& f, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("field file: cannot open " + path + " for writing");
    write_header(os, *f.mask, 1);
    os.write(reinterpret_cast<const char*>(f.values.data()),
             static_cast<std::streamsize>(f.values.size() * 2 * sizeof(double)));
    if (!os) throw IoError("field file: write failed for " + path);
}

namespace {
template <class T, class Row>
void csv_impl(const FieldT<T>& f, const std::string& path, Row row) {
    std::ofstream os(path);
    if (!os) throw IoError("csv: cannot open " + path + " for writing");
    os.precision(17);
    const auto& g = f.mask->grid;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            if (!f.mask->has_value(i, j)) continue;
            const cplx z = g.node(i, j);
            os << z.real() << "," << z.imag() << ",";
            row(os, f.at(i, j));
            os << "\n";
        }
}
} // namespace

void write_field_csv(const RealField& f, const std::string& path) {
    csv_impl(f, path, [](std::ofstream& os, double v) { os << v; });
}

void write_field_csv(const ComplexField& f, const std::string& path) {
    csv_impl(f, path, [](std::ofstream& os, cplx v) { os << v.real() << "," << v.imag(); });
}

AnyField read_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("field file: cannot open " + path);
    const Header h = read_header(is);
    auto mask = build_mask(h.grid, h.R, h.punctures);
    const size_t count = static_cast<size_t>(h.grid.size()) * (h.kind == 1 ? 2 : 1);
    std::vector<double> payload(count);
    is.read(reinterpret_cast<char*>(payload.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (static_cast<size_t>(is.gcount()) != count * sizeof(double))
        throw IoError("field file: payload length mismatch in " + path);
    char extra;
    if (is.read(&extra, 1)) throw IoError("field file: payload length mismatch in " + path);

    if (h.kind == 0) {
        RealField f(mask);
        f.values = payload;
        return f;
    }
    ComplexField f(mask);
    for (size_t k = 0; k < f.values.size(); ++k) f.values[k] = cplx(payload[2 * k], payload[2 * k + 1]);
    return f;
}

} // namespace vortexlab
