#pragma once

#include <string>

#include "nlsh/field.hpp"

namespace nlsh {

// Field binary format "NLSH1": 5-byte magic, uint32 little-endian length of a
// UTF-8 JSON header {"d":int,"L":[per-axis],"n":[per-axis],"dtype":"c128"},
// then n^d interleaved (re,im) little-endian doubles, row-major.
void write_field(const std::string& path, const Field& f);
Field read_field(const std::string& path);

}  // namespace nlsh
