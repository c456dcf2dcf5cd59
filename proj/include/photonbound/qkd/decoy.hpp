#pragma once

#include <span>

#include "photonbound/qkd/keyrate.hpp"

namespace photonbound {

// Weak-decoy upper bound on the single-photon error rate from gain and QBER
// per intensity (intensities strictly increasing).  The largest intensity is
// the signal, the next one the decoy, and the weakest (with three or more)
// bounds the vacuum yield.  Returns 1 when the bound is vacuous.
double decoy_baseline_error(std::span<const double> intensities, std::span<const GainQber> observed);

}  // namespace photonbound
