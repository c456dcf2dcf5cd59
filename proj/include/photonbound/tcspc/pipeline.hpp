#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "photonbound/analytical/estimator.hpp"
#include "photonbound/channel/forward.hpp"
#include "photonbound/core/homodyne.hpp"
#include "photonbound/core/response.hpp"
#include "photonbound/interval.hpp"

namespace photonbound {

struct TcspcOptions {
  int n0 = 5;
  EstimatorOptions estimator;
};

struct TcspcRow {
  double t_ns = 0.0;
  Interval q0, q1, q2;
  Interval qc;  // conclusive probability 1 - q0
  Interval pt;  // Pr(t | C)
  double q1_exact = 0.0;
  double q2_exact = 0.0;
  double qc_exact = 0.0;
  double pt_exact = 0.0;
};

struct TcspcReport {
  std::vector<TcspcRow> rows;
  double mean_width_q1() const;
  double mean_width_q2() const;
};

IntervalEstimate estimate_time_bin(const Eigen::VectorXd& f, const DetectorResponse& detector, int n_star, int n0,
                                   const EstimatorOptions& options = {});

Interval conclusive_probability(const Interval& q0);

// Bayes-normalised arrival-time distribution from per-bin conclusive
// probabilities.
std::vector<Interval> arrival_distribution(std::span<const Interval> qc);

TcspcReport run_tcspc(const TcspcScene& scene, const HomodyneDetector& detector, const TcspcOptions& options = {});

}  // namespace photonbound
