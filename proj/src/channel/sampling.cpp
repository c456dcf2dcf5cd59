#include "photonbound/channel/sampling.hpp"

#include <algorithm>
#include <stdexcept>

namespace photonbound {

std::vector<double> sample_frequencies(std::span<const double> probs, std::uint64_t shots, std::mt19937_64& rng) {
  if (shots == 0) throw std::invalid_argument("sampling: shots must be >= 1");
  std::vector<double> out(probs.size(), 0.0);
  std::uint64_t left = shots;
  double mass_left = 1.0;
  for (std::size_t i = 0; i < probs.size() && left > 0; ++i) {
    const double p = std::clamp(probs[i] / std::max(mass_left, 1e-300), 0.0, 1.0);
    std::binomial_distribution<std::uint64_t> draw(left, p);
    const std::uint64_t k = p >= 1.0 ? left : draw(rng);
    out[i] = static_cast<double>(k) / static_cast<double>(shots);
    left -= k;
    mass_left -= probs[i];
  }
  return out;
}

MeasurementTable sample_table(const MeasurementTable& exact, std::uint64_t shots, std::uint64_t seed) {
  exact.validate();
  std::mt19937_64 rng(seed);
  MeasurementTable out = exact;
  for (Eigen::Index i = 0; i < exact.values.rows(); ++i) {
    if (exact.kind == TableKind::Threshold) {
      for (Eigen::Index j = 0; j < exact.values.cols(); ++j) {
        const double p = exact.values(i, j);
        out.values(i, j) = sample_frequencies(std::span<const double>(&p, 1), shots, rng)[0];
      }
    } else {
      std::vector<double> row(static_cast<std::size_t>(exact.values.cols()));
      for (Eigen::Index j = 0; j < exact.values.cols(); ++j) row[static_cast<std::size_t>(j)] = exact.values(i, j);
      const std::vector<double> freq = sample_frequencies(row, shots, rng);
      for (Eigen::Index j = 0; j < exact.values.cols(); ++j) out.values(i, j) = freq[static_cast<std::size_t>(j)];
    }
  }
  return out;
}

}  // namespace photonbound
