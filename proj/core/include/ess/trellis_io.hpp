#pragma once

#include <filesystem>
#include <iosfwd>

#include "ess/trellis.hpp"

namespace ess {

// Line-oriented text format:
//
//   ESSTRELLIS v1
//   N=<int> ALPHABET=<a1,a2,...> EMAX=<int> BAND=<h,w|none>
//   <n> <e> <T> <F>          one line per active node, column-major
//   END <T(0,0)>
//
// Counts are decimal. The END value doubles as a checksum; deserialization
// also re-checks the count recursions so a corrupted table is rejected.
void serialize(const Trellis& trellis, std::ostream& out);
Trellis deserialize(std::istream& in);

void save_trellis(const Trellis& trellis, const std::filesystem::path& path);
Trellis load_trellis(const std::filesystem::path& path);

}  // namespace ess
