#pragma once

#include "vortexlab/grid.hpp"

#include <string>
#include <variant>

namespace vortexlab {

// Binary field container: magic "VORTX1\n", version 1, then kind (0 real /
// 1 complex), n, extent, R, puncture list, and the row-major float64 payload
// (complex interleaved re/im), little-endian. Excluded nodes are quiet-NaN, so
// the file is self-describing without a separate mask. Round-trips bitwise.
void write_field(const RealField& f, const std::string& path);
void write_field(const ComplexField& f, const std::string& path);

using AnyField = std::variant<RealField, ComplexField>;
AnyField read_field(const std::string& path);

// Plain-text heatmap export for external tools: one "x,y,re[,im]" row per
// non-excluded node.
void write_field_csv(const RealField& f, const std::string& path);
void write_field_csv(const ComplexField& f, const std::string& path);

} // namespace vortexlab
