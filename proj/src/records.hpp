#pragma once

#include <vector>

#include "fft.hpp"
#include "ksmix/diagnostics.hpp"

namespace ksmix::detail {

/// Record from a raw half spectrum and the matching physical values.
DiagnosticsRecord record_from_half(const Grid& grid, const std::vector<cplx>& half,
                                   const std::vector<double>& phys, int N);

}  // namespace ksmix::detail
