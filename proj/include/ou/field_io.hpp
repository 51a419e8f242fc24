#pragma once

#include <iosfwd>
#include <string>

#include "ou/grid.hpp"

namespace ou {

/// Flat binary field file: 32-byte header (magic "OUFLD1", dim, n, L as
/// little-endian int32/int32/float64) followed by interleaved re/im 64-bit
/// floats in grid order.
void write_field(const std::string& path, const Field& f);
Field read_field(const std::string& path);

/// CSV export: coordinate columns, then re, im (17 significant digits).
void write_field_csv(std::ostream& os, const Field& f);
void write_field_csv(const std::string& path, const Field& f);

}  // namespace ou
