#pragma once

#include <Eigen/Dense>
#include <vector>

#include "photonbound/analytical/coefficients.hpp"
#include "photonbound/analytical/measurement_table.hpp"
#include "photonbound/core/poisson.hpp"
#include "photonbound/core/response.hpp"
#include "photonbound/interval.hpp"

namespace photonbound {

struct EstimatorOptions {
  int max_iterations = 10;
  double tolerance = 1e-6;  // stop once q-tilde moves less than this
  int scan_orders = 200;    // exact detector orders checked beyond m0
  // Also bound the source residual through the output distribution at the
  // largest intensity (certified from that table row alone).
  bool reference_bound = true;
};

struct ResidualBudget {
  Interval source_tail{0.0, 0.0};
  Interval detector_tail{0.0, 0.0};
  double cross = 0.0;
  double qtilde_upper = 1.0;
};

struct IntervalEstimate {
  int n_star = 0;
  std::vector<int> m_star;  // one entry per detector mode
  double lambda = 0.0;
  double lower = 0.0;
  double upper = 1.0;
  double raw_lower = 0.0;  // before clamping to [0, 1]
  double raw_upper = 1.0;
  ResidualBudget budget;
  std::vector<double> qtilde_history;

  Interval interval() const { return {lower, upper}; }
  double width() const { return upper - lower; }
};

// One or more detectors read out jointly; the setting index is row-major over
// the modes and so is the output index over {0..m0}^modes.
class ProductReceiver {
 public:
  ProductReceiver(std::vector<const DetectorResponse*> modes, int m0, int scan_orders = 200);

  int m0() const { return m0_; }
  std::size_t mode_count() const { return modes_.size(); }
  std::size_t setting_count() const { return settings_; }
  std::size_t output_count() const { return outputs_; }
  std::vector<int> decode(std::size_t output) const;
  std::size_t encode(const std::vector<int>& output) const;

  // Weights over settings whose sequence is the Kronecker delta at `output`
  // for every photon-number pattern inside the box.
  const Eigen::VectorXd& weights(std::size_t output) const { return weights_[output]; }
  // Range of the weighted response over patterns with some mode above m0.
  const Interval& outside_range(std::size_t output) const { return outside_[output]; }
  const DetectorDesign& design(std::size_t mode, int m) const { return designs_[mode][m]; }
  const ExtremeValues& extremes(std::size_t mode, int m) const { return extremes_[mode][m]; }

 private:
  std::vector<const DetectorResponse*> modes_;
  int m0_;
  std::size_t settings_ = 1;
  std::size_t outputs_ = 1;
  std::vector<std::vector<DetectorDesign>> designs_;
  std::vector<std::vector<ExtremeValues>> extremes_;
  std::vector<Eigen::VectorXd> weights_;
  std::vector<Interval> outside_;
};

// Bounds on q(o|n*) for every output pattern o in the box.  `data` holds one
// row per source intensity (in source order) and one column per receiver
// setting.
std::vector<IntervalEstimate> estimate_channel_block(const Eigen::MatrixXd& data, const PoissonSource& source,
                                                     int n_star, int n0, const ProductReceiver& receiver,
                                                     const EstimatorOptions& options = {});

// Bounds on the photon-number distribution arriving at the receiver from a
// single row of data; no source side.
std::vector<IntervalEstimate> estimate_output_block(const Eigen::VectorXd& f, const ProductReceiver& receiver,
                                                    const EstimatorOptions& options = {});

IntervalEstimate estimate_interval(const MeasurementTable& table, const PoissonSource& source,
                                   const DetectorResponse& detector, int n_star, int m_star, int n0, int m0,
                                   const EstimatorOptions& options = {});

IntervalEstimate estimate_output_only(const Eigen::VectorXd& f, const DetectorResponse& detector, int n_star,
                                      int n0, const EstimatorOptions& options = {});

}  // namespace photonbound
