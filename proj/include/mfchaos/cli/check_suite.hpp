#pragma once

#include <cstddef>
#include <cstdint>

#include "mfchaos/cli/csv.hpp"

namespace mfchaos::cli {

/// Built-in invariant suite: conservation in elastic collisions,
/// dissipation in inelastic ones, the symmetrization bound, metric axioms
/// and exhaustive matching, spectral invariants, and the moment oracle
/// cross-check. Writes one row per check and returns true when all pass.
/// `scale` multiplies instance counts.
bool run_check_suite(std::uint64_t seed, std::size_t scale, std::size_t workers, CsvWriter &csv);

} // namespace mfchaos::cli
