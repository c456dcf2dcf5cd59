#include "photonbound/tcspc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "photonbound/errors.hpp"

namespace photonbound {

double TcspcReport::mean_width_q1() const {
  double s = 0.0;
  for (const TcspcRow& r : rows) s += r.q1.width();
  return rows.empty() ? 0.0 : s / static_cast<double>(rows.size());
}

double TcspcReport::mean_width_q2() const {
  double s = 0.0;
  for (const TcspcRow& r : rows) s += r.q2.width();
  return rows.empty() ? 0.0 : s / static_cast<double>(rows.size());
}

IntervalEstimate estimate_time_bin(const Eigen::VectorXd& f, const DetectorResponse& detector, int n_star, int n0,
                                   const EstimatorOptions& options) {
  return estimate_output_only(f, detector, n_star, n0, options);
}

Interval conclusive_probability(const Interval& q0) {
  return Interval{1.0 - q0.upper, 1.0 - q0.lower}.clamped(0.0, 1.0);
}

std::vector<Interval> arrival_distribution(std::span<const Interval> qc) {
  double sum_lo = 0.0, sum_hi = 0.0;
  for (const Interval& q : qc) {
    sum_lo += q.lower;
    sum_hi += q.upper;
  }
  if (!(sum_hi > 0.0)) throw UndefinedDistribution("arrival distribution undefined: no conclusive events");
  std::vector<Interval> out;
  out.reserve(qc.size());
  for (const Interval& q : qc) {
    const double others_lo = sum_lo - q.lower;
    const double others_hi = sum_hi - q.upper;
    const double den_hi = q.upper + std::max(0.0, others_lo);
    const double den_lo = q.lower + std::max(0.0, others_hi);
    const double upper = den_hi > 0.0 ? q.upper / den_hi : (q.upper > 0.0 ? 1.0 : 0.0);
    const double lower = den_lo > 0.0 ? q.lower / den_lo : 0.0;
    out.push_back(Interval{lower, upper}.clamped(0.0, 1.0));
  }
  return out;
}

TcspcReport run_tcspc(const TcspcScene& scene, const HomodyneDetector& detector, const TcspcOptions& options) {
  scene.validate();
  detector.validate();
  if (options.n0 < 2) throw std::invalid_argument("tcspc: n0 must be at least 2");
  if (detector.bin_count() < static_cast<std::size_t>(options.n0) + 1) {
    throw std::invalid_argument("tcspc: need at least n0+1 homodyne bins");
  }
  const HomodyneResponse response(detector, options.n0 + options.estimator.scan_orders + 1);
  const ProductReceiver receiver({&response}, options.n0, options.estimator.scan_orders);

  TcspcReport report;
  std::vector<Interval> qc;
  double qc_exact_sum = 0.0;
  for (double t : scene.time_bins()) {
    const std::vector<double> pdf = tcspc_pdf(scene, t, response);
    const Eigen::VectorXd f = Eigen::Map<const Eigen::VectorXd>(pdf.data(), static_cast<Eigen::Index>(pdf.size()));
    const std::vector<IntervalEstimate> est = estimate_output_block(f, receiver, options.estimator);
    TcspcRow row;
    row.t_ns = t;
    row.q0 = est[0].interval();
    row.q1 = est[1].interval();
    row.q2 = est[2].interval();
    row.qc = conclusive_probability(row.q0);
    row.q1_exact = tcspc_q(scene, t, 1);
    row.q2_exact = tcspc_q(scene, t, 2);
    row.qc_exact = -std::expm1(-tcspc_energy(scene, t));
    qc_exact_sum += row.qc_exact;
    qc.push_back(row.qc);
    report.rows.push_back(row);
  }

  std::vector<Interval> pt;
  try {
    pt = arrival_distribution(qc);
  } catch (const UndefinedDistribution&) {
    pt.assign(qc.size(), Interval{0.0, 1.0});
  }
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    TcspcRow& row = report.rows[i];
    row.pt = pt[i];
    row.pt_exact = qc_exact_sum > 0.0 ? row.qc_exact / qc_exact_sum : std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

}  // namespace photonbound
