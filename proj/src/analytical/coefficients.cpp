#include "photonbound/analytical/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "photonbound/errors.hpp"

namespace photonbound {
namespace {

constexpr double kMaxCondition = 1e12;
constexpr double kMaxResidual = 1e-9;

double condition_number(const Eigen::MatrixXd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(s.size() - 1) == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / s(s.size() - 1);
}

// a is (order+1) x settings with rows indexed by photon number.
Eigen::VectorXd solve_design(const Eigen::MatrixXd& a, int target, const char* what, double& residual) {
  const double cond = condition_number(a);
  if (!(cond <= kMaxCondition)) {
    throw DesignRejected(std::string(what) + ": design matrix is singular or ill-conditioned (condition " +
                         std::to_string(cond) + "); choose a different grid");
  }
  Eigen::VectorXd e = Eigen::VectorXd::Zero(a.rows());
  e(target) = 1.0;
  Eigen::VectorXd x;
  if (a.rows() == a.cols()) {
    x = a.partialPivLu().solve(e);
  } else {
    // minimum-norm solution x = A^T z with (A A^T) z = e, via QR of A^T
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a.transpose());
    const Eigen::MatrixXd r = qr.matrixQR().topRows(a.rows()).triangularView<Eigen::Upper>();
    const Eigen::VectorXd y = r.transpose().triangularView<Eigen::Lower>().solve(e);
    Eigen::VectorXd padded = Eigen::VectorXd::Zero(a.cols());
    padded.head(a.rows()) = y;
    x = qr.householderQ() * padded;
  }
  residual = (a * x - e).cwiseAbs().maxCoeff();
  if (!(residual < kMaxResidual)) {
    throw DesignRejected(std::string(what) + ": back-substitution residual " + std::to_string(residual) +
                         " exceeds 1e-9");
  }
  return x;
}

}  // namespace

SourceDesign solve_source_coefficients(const PoissonSource& source, int n_star, int n0) {
  source.validate();
  if (n0 < 0 || n_star < 0 || n_star > n0) {
    throw std::invalid_argument("source design: need 0 <= n* <= n0");
  }
  if (source.size() != static_cast<std::size_t>(n0) + 1) {
    throw std::invalid_argument("source design: need exactly n0+1 intensities");
  }
  Eigen::MatrixXd a(n0 + 1, n0 + 1);
  for (int n = 0; n <= n0; ++n) {
    for (int i = 0; i <= n0; ++i) a(n, i) = poisson_pmf(source.intensities[i], n);
  }
  SourceDesign d;
  d.points = source.intensities;
  d.target = n_star;
  d.order = n0;
  d.alpha = solve_design(a, n_star, "source design", d.residual);
  return d;
}

DetectorDesign solve_detector_coefficients(const DetectorResponse& detector, int m_star, int m0) {
  if (m0 < 0 || m_star < 0 || m_star > m0) {
    throw std::invalid_argument("detector design: need 0 <= m* <= m0");
  }
  const auto settings = static_cast<Eigen::Index>(detector.setting_count());
  if (settings < m0 + 1) {
    throw std::invalid_argument("detector design: need at least m0+1 detector settings");
  }
  Eigen::MatrixXd a(m0 + 1, settings);
  for (int m = 0; m <= m0; ++m) {
    for (Eigen::Index j = 0; j < settings; ++j) a(m, j) = detector.response(m, static_cast<std::size_t>(j));
  }
  DetectorDesign d;
  d.target = m_star;
  d.order = m0;
  d.beta = solve_design(a, m_star, "detector design", d.residual);
  return d;
}

double source_sequence(const SourceDesign& design, int n) {
  double s = 0.0;
  for (std::size_t i = 0; i < design.points.size(); ++i) {
    s += design.alpha(static_cast<Eigen::Index>(i)) * poisson_pmf(design.points[i], n);
  }
  return s;
}

double detector_sequence(const DetectorDesign& design, const DetectorResponse& detector, int m) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < design.beta.size(); ++j) {
    s += design.beta(j) * detector.response(m, static_cast<std::size_t>(j));
  }
  return s;
}

double lambda_from_rows(const Eigen::MatrixXd& rows, const SourceDesign& source, const DetectorDesign& detector) {
  if (rows.rows() != source.alpha.size() || rows.cols() != detector.beta.size()) {
    throw IncompleteData("measurement rows do not cover the estimation design");
  }
  return source.alpha.dot(rows * detector.beta);
}

SourceTail source_residual_bounds(const SourceDesign& design) {
  SourceTail out;
  const int n0 = design.order;
  const int horizon = std::max(10 * (n0 + 1), 200);
  out.horizon = horizon;
  const std::size_t count = design.points.size();
  const double x_max = count ? design.points.back() : 0.0;
  if (count == 0 || x_max == 0.0 || design.alpha.cwiseAbs().maxCoeff() == 0.0) return out;

  const Eigen::Index top = static_cast<Eigen::Index>(count) - 1;
  double s = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double a = design.alpha(static_cast<Eigen::Index>(i));
    const double tail = poisson_tail(design.points[i], n0);
    s += a * tail;
    out.absolute += std::abs(a) * tail;
  }

  // u_n / p_n(x_max) = sum_i alpha_i e^{x_max - x_i} (x_i / x_max)^n
  auto ratio_terms = [&](int n, double& dominant, double& rest_abs) {
    dominant = design.alpha(top);
    rest_abs = 0.0;
    double rest = 0.0;
    for (Eigen::Index i = 0; i < top; ++i) {
      const double x = design.points[static_cast<std::size_t>(i)];
      if (x == 0.0) continue;
      const double term = std::exp(x_max - x + n * std::log(x / x_max));
      rest += design.alpha(i) * term;
      rest_abs += std::abs(design.alpha(i)) * term;
    }
    return dominant + rest;
  };

  double lo = 0.0, hi = 0.0;
  bool pos = false, neg = false;
  double dominant = 0.0, rest_abs = 0.0;
  for (int n = n0 + 1; n <= horizon; ++n) {
    const double r = ratio_terms(n, dominant, rest_abs);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    pos = pos || r > 0.0;
    neg = neg || r < 0.0;
  }
  const bool dominated = rest_abs < std::abs(dominant);
  ratio_terms(horizon + 1, dominant, rest_abs);
  // beyond the horizon every ratio lies within alpha_top +- the decaying rest
  lo = std::min(lo, dominant - rest_abs);
  hi = std::max(hi, dominant + rest_abs);
  out.ratio = {lo, hi};

  out.sign_constant = !(pos && neg) && dominated && (pos ? dominant > 0.0 : dominant < 0.0);
  if (out.sign_constant) {
    out.bound = {std::min(0.0, s), std::max(0.0, s)};
    return out;
  }
  double plus = 0.0, minus = 0.0;
  for (int n = n0 + 1; n <= horizon; ++n) {
    const double u = source_sequence(design, n);
    if (u > 0.0) plus += u; else minus += u;
  }
  double deep = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    deep += std::abs(design.alpha(static_cast<Eigen::Index>(i))) * poisson_tail(design.points[i], horizon);
  }
  out.bound = {minus - deep, plus + deep};
  return out;
}

ExtremeValues detector_extreme_values(const DetectorDesign& design, const DetectorResponse& detector,
                                      int scan_orders) {
  ExtremeValues out;
  const int first = design.order + 1;
  const int last = design.order + scan_orders;
  if (design.beta.cwiseAbs().maxCoeff() == 0.0) {
    out.scanned_to = last;
    return out;
  }
  if (last + 1 > detector.max_order()) {
    throw std::invalid_argument("detector extremes: response tabulated only up to order " +
                                std::to_string(detector.max_order()));
  }
  for (int m = first; m <= last; ++m) {
    const double v = detector_sequence(design, detector, m);
    out.v_plus = std::max(out.v_plus, v);
    out.v_minus = std::min(out.v_minus, v);
  }
  double tail_plus = 0.0, tail_minus = 0.0;
  for (Eigen::Index j = 0; j < design.beta.size(); ++j) {
    const double e = detector.tail_majorant(last + 1, static_cast<std::size_t>(j));
    const double b = design.beta(j);
    if (b > 0.0) tail_plus += b * e; else tail_minus += b * e;
  }
  out.v_plus = std::max(out.v_plus, tail_plus);
  out.v_minus = std::min(out.v_minus, tail_minus);
  out.scanned_to = last;
  return out;
}

double cross_residual(const SourceTail& source, const ExtremeValues& detector) {
  return source.absolute * std::max(detector.v_plus, -detector.v_minus);
}

double refine_conditional_tail(std::span<const double> lower_bounds) {
  double s = 0.0;
  for (double v : lower_bounds) s += v;
  return std::clamp(1.0 - s, 0.0, 1.0);
}

}  // namespace photonbound
