#pragma once

#include <Eigen/Dense>
#include <cstddef>

#include "photonbound/core/homodyne.hpp"
#include "photonbound/core/threshold.hpp"

namespace photonbound {

// A detector seen through its list of settings y_j: r_m(y_j) plus a
// majorant E_m(j) >= r_{m'}(y_j) for all m' >= m that is non-increasing in m.
class DetectorResponse {
 public:
  virtual ~DetectorResponse() = default;

  virtual std::size_t setting_count() const = 0;
  virtual double response(int m, std::size_t j) const = 0;
  virtual double tail_majorant(int m, std::size_t j) const = 0;
  // Largest m accepted by response() and tail_majorant().
  virtual int max_order() const = 0;
  // Upper bound on the part of f(x, y_j) not represented by photon numbers
  // n <= n_c, m <= m_c, given the source tail beyond n_c.
  virtual double truncation_slack(double source_tail, int m_c, std::size_t j) const = 0;
};

class ThresholdResponse final : public DetectorResponse {
 public:
  explicit ThresholdResponse(ThresholdDetector det);

  const ThresholdDetector& detector() const { return det_; }
  std::size_t setting_count() const override { return det_.attenuation_levels.size(); }
  double response(int m, std::size_t j) const override;
  double tail_majorant(int m, std::size_t j) const override { return response(m, j); }
  int max_order() const override { return 1 << 20; }
  double truncation_slack(double source_tail, int m_c, std::size_t j) const override;

 private:
  ThresholdDetector det_;
};

// Bin probabilities of a homodyne detector, tabulated once for m <= max_order.
class HomodyneResponse final : public DetectorResponse {
 public:
  HomodyneResponse(HomodyneDetector det, int max_order);

  const HomodyneDetector& detector() const { return det_; }
  std::size_t setting_count() const override { return det_.bin_count(); }
  double response(int m, std::size_t j) const override;
  double tail_majorant(int m, std::size_t j) const override;
  int max_order() const override { return max_order_; }
  double truncation_slack(double source_tail, int m_c, std::size_t j) const override;

  // Order from which the majorant integrand is the plain Szegő bound.
  int szego_order() const { return szego_order_; }

 private:
  void check(int m, std::size_t j) const;

  HomodyneDetector det_;
  int max_order_;
  int szego_order_;
  Eigen::MatrixXd response_;  // (max_order+1) x bins
  Eigen::MatrixXd majorant_;  // (max_order+1) x bins
};

}  // namespace photonbound
