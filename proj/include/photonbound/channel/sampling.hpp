#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "photonbound/analytical/measurement_table.hpp"

namespace photonbound {

// Multinomial counts for `shots` draws from probs (any missing mass is an
// extra unobserved outcome), returned as frequencies.
std::vector<double> sample_frequencies(std::span<const double> probs, std::uint64_t shots, std::mt19937_64& rng);

// Finite-statistics version of an exact table.  Threshold cells are
// independent binomials; homodyne rows are multinomial over the bins.
MeasurementTable sample_table(const MeasurementTable& exact, std::uint64_t shots, std::uint64_t seed);

}  // namespace photonbound
