#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "photonbound/core/poisson.hpp"
#include "photonbound/core/response.hpp"
#include "photonbound/interval.hpp"

namespace photonbound {

struct SourceDesign {
  std::vector<double> points;  // X
  int target = 0;              // n*
  int order = 0;               // n0
  Eigen::VectorXd alpha;
  double residual = 0.0;  // max_n<=n0 |u_n - delta|
};

struct DetectorDesign {
  int target = 0;  // m*
  int order = 0;   // m0
  Eigen::VectorXd beta;
  double residual = 0.0;
};

// Solves sum_i alpha_i p_n(x_i) = delta_{n,n*}, n <= n0, over the source grid.
SourceDesign solve_source_coefficients(const PoissonSource& source, int n_star, int n0);

// Solves sum_j beta_j r_m(y_j) = delta_{m,m*}, m <= m0, over every detector
// setting.  With more settings than m0+1 the minimum-norm solution is used.
DetectorDesign solve_detector_coefficients(const DetectorResponse& detector, int m_star, int m0);

double source_sequence(const SourceDesign& design, int n);  // u_n
double detector_sequence(const DetectorDesign& design, const DetectorResponse& detector, int m);  // v_m

// sum_i sum_j alpha_i beta_j f(x_i, y_j); rows of f follow the design points.
double lambda_from_rows(const Eigen::MatrixXd& rows, const SourceDesign& source, const DetectorDesign& detector);

struct SourceTail {
  Interval bound{0.0, 0.0};  // R_{n0} for any q in [0,1]
  double absolute = 0.0;     // >= sum_{n>n0} |u_n|
  // Hull of {0} and u_n / p_n(x_max) over all n > n0.
  Interval ratio{0.0, 0.0};
  bool sign_constant = true;
  int horizon = 0;  // N*
};

SourceTail source_residual_bounds(const SourceDesign& design);

struct ExtremeValues {
  double v_plus = 0.0;   // >= max(0, sup_{m>m0} v_m)
  double v_minus = 0.0;  // <= min(0, inf_{m>m0} v_m)
  int scanned_to = 0;
};

ExtremeValues detector_extreme_values(const DetectorDesign& design, const DetectorResponse& detector,
                                      int scan_orders = 200);

double cross_residual(const SourceTail& source, const ExtremeValues& detector);

// 1 - sum of the lower bounds, clamped to [0, 1].
double refine_conditional_tail(std::span<const double> lower_bounds);

}  // namespace photonbound
