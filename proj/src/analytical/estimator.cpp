#include "photonbound/analytical/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "photonbound/errors.hpp"

namespace photonbound {
namespace {

Interval multiply(const Interval& a, const Interval& b) {
  const double p[4] = {a.lower * b.lower, a.lower * b.upper, a.upper * b.lower, a.upper * b.upper};
  return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
}

Interval hull(const Interval& a, const Interval& b) {
  return {std::min(a.lower, b.lower), std::max(a.upper, b.upper)};
}

// Everything the q-tilde iteration needs for one output pattern.
struct OutputTerms {
  double lambda = 0.0;
  Interval outside{0.0, 0.0};
};

// Shared fixed-point loop.  `source_part(o, lower_prev)` returns the source
// residual interval and cross term for output o.
template <class SourcePart>
std::vector<IntervalEstimate> iterate_block(const std::vector<OutputTerms>& terms, const ProductReceiver& receiver,
                                            int n_star, const EstimatorOptions& options,
                                            SourcePart&& source_part) {
  const std::size_t count = terms.size();
  std::vector<IntervalEstimate> est(count);
  std::vector<double> lower(count, 0.0);
  std::vector<double> history;
  double qtilde = 1.0;
  history.push_back(qtilde);

  for (int iter = 0; iter < std::max(1, options.max_iterations); ++iter) {
    for (std::size_t o = 0; o < count; ++o) {
      const auto [src, cross] = source_part(o, lower[o]);
      const Interval det{terms[o].outside.lower * qtilde, terms[o].outside.upper * qtilde};
      IntervalEstimate& e = est[o];
      e.n_star = n_star;
      e.m_star = receiver.decode(o);
      e.lambda = terms[o].lambda;
      e.raw_lower = terms[o].lambda - (src.upper + det.upper + cross);
      e.raw_upper = terms[o].lambda - (src.lower + det.lower - cross);
      e.lower = std::clamp(e.raw_lower, 0.0, 1.0);
      e.upper = std::clamp(e.raw_upper, 0.0, 1.0);
      e.budget = {src, det, cross, qtilde};
    }
    for (std::size_t o = 0; o < count; ++o) lower[o] = std::max(lower[o], est[o].lower);
    const double next = std::min(qtilde, refine_conditional_tail(lower));
    history.push_back(next);
    const double change = qtilde - next;
    qtilde = next;
    if (change < options.tolerance) break;
  }
  for (auto& e : est) e.qtilde_history = history;
  return est;
}

}  // namespace

ProductReceiver::ProductReceiver(std::vector<const DetectorResponse*> modes, int m0, int scan_orders)
    : modes_(std::move(modes)), m0_(m0) {
  if (modes_.empty()) throw std::invalid_argument("receiver: no detector modes");
  if (m0_ < 0) throw std::invalid_argument("receiver: m0 must be >= 0");
  for (const DetectorResponse* d : modes_) {
    if (d == nullptr) throw std::invalid_argument("receiver: null detector");
    settings_ *= d->setting_count();
    outputs_ *= static_cast<std::size_t>(m0_ + 1);
  }
  designs_.resize(modes_.size());
  extremes_.resize(modes_.size());
  for (std::size_t d = 0; d < modes_.size(); ++d) {
    for (int m = 0; m <= m0_; ++m) {
      designs_[d].push_back(solve_detector_coefficients(*modes_[d], m, m0_));
      extremes_[d].push_back(detector_extreme_values(designs_[d].back(), *modes_[d], scan_orders));
    }
  }

  const Interval in_box = m0_ >= 1 ? Interval{0.0, 1.0} : Interval{1.0, 1.0};
  for (std::size_t o = 0; o < outputs_; ++o) {
    const std::vector<int> idx = decode(o);
    Eigen::VectorXd w = Eigen::VectorXd::Ones(1);
    for (std::size_t d = 0; d < modes_.size(); ++d) {
      const Eigen::VectorXd& b = designs_[d][idx[d]].beta;
      Eigen::VectorXd next(w.size() * b.size());
      for (Eigen::Index i = 0; i < w.size(); ++i) next.segment(i * b.size(), b.size()) = w(i) * b;
      w = std::move(next);
    }
    weights_.push_back(std::move(w));

    bool have = false;
    Interval range{0.0, 0.0};
    const std::size_t patterns = std::size_t{1} << modes_.size();
    for (std::size_t mask = 1; mask < patterns; ++mask) {
      Interval p{1.0, 1.0};
      for (std::size_t d = 0; d < modes_.size(); ++d) {
        const ExtremeValues& ev = extremes_[d][idx[d]];
        p = multiply(p, (mask >> d) & 1 ? Interval{ev.v_minus, ev.v_plus} : in_box);
      }
      range = have ? hull(range, p) : p;
      have = true;
    }
    outside_.push_back(range);
  }
}

std::vector<int> ProductReceiver::decode(std::size_t output) const {
  std::vector<int> idx(modes_.size());
  for (std::size_t d = modes_.size(); d-- > 0;) {
    idx[d] = static_cast<int>(output % static_cast<std::size_t>(m0_ + 1));
    output /= static_cast<std::size_t>(m0_ + 1);
  }
  return idx;
}

std::size_t ProductReceiver::encode(const std::vector<int>& output) const {
  if (output.size() != modes_.size()) throw std::invalid_argument("receiver: output arity mismatch");
  std::size_t flat = 0;
  for (int m : output) {
    if (m < 0 || m > m0_) throw std::invalid_argument("receiver: output outside the estimation box");
    flat = flat * static_cast<std::size_t>(m0_ + 1) + static_cast<std::size_t>(m);
  }
  return flat;
}

std::vector<IntervalEstimate> estimate_output_block(const Eigen::VectorXd& f, const ProductReceiver& receiver,
                                                    const EstimatorOptions& options) {
  if (static_cast<std::size_t>(f.size()) != receiver.setting_count()) {
    throw IncompleteData("measurement vector does not cover every detector setting");
  }
  std::vector<OutputTerms> terms(receiver.output_count());
  for (std::size_t o = 0; o < terms.size(); ++o) {
    terms[o].lambda = receiver.weights(o).dot(f);
    terms[o].outside = receiver.outside_range(o);
  }
  auto no_source = [](std::size_t, double) { return std::pair<Interval, double>{Interval{0.0, 0.0}, 0.0}; };
  std::vector<IntervalEstimate> est = iterate_block(terms, receiver, -1, options, no_source);
  // In output-only mode the photon number at the receiver is the target.
  for (auto& e : est) e.n_star = e.m_star.size() == 1 ? e.m_star[0] : -1;
  return est;
}

std::vector<IntervalEstimate> estimate_channel_block(const Eigen::MatrixXd& data, const PoissonSource& source,
                                                     int n_star, int n0, const ProductReceiver& receiver,
                                                     const EstimatorOptions& options) {
  const SourceDesign sd = solve_source_coefficients(source, n_star, n0);
  if (data.rows() != static_cast<Eigen::Index>(source.size()) ||
      static_cast<std::size_t>(data.cols()) != receiver.setting_count()) {
    throw IncompleteData("measurement rows do not cover the estimation design");
  }
  const SourceTail tail = source_residual_bounds(sd);
  const Eigen::VectorXd projected = data.transpose() * sd.alpha;  // sum_i alpha_i f(x_i, .)

  std::vector<OutputTerms> terms(receiver.output_count());
  for (std::size_t o = 0; o < terms.size(); ++o) {
    terms[o].lambda = receiver.weights(o).dot(projected);
    terms[o].outside = receiver.outside_range(o);
  }

  const double x_max = source.x_max();
  const bool use_reference = options.reference_bound && x_max > 0.0;
  std::vector<IntervalEstimate> reference;
  double reference_outside = 1.0;
  if (use_reference) {
    reference = estimate_output_block(data.row(data.rows() - 1).transpose(), receiver, options);
    reference_outside = reference.front().budget.qtilde_upper;
  }
  const double p_target = poisson_pmf(x_max, n_star);
  const double ratio_abs = std::max(tail.ratio.upper, -tail.ratio.lower);

  auto source_part = [&](std::size_t o, double lower_prev) {
    Interval src = tail.bound;
    const Interval& outside = terms[o].outside;
    const double d_abs = std::max(outside.upper, -outside.lower);
    double cross = tail.absolute * d_abs;
    if (use_reference) {
      const double mass = std::max(0.0, reference[o].upper - p_target * lower_prev);
      src.lower = std::max(src.lower, tail.ratio.lower * mass);
      src.upper = std::min(src.upper, tail.ratio.upper * mass);
      cross = std::min(cross, ratio_abs * d_abs * reference_outside);
    }
    return std::pair<Interval, double>{src, cross};
  };
  return iterate_block(terms, receiver, n_star, options, source_part);
}

IntervalEstimate estimate_interval(const MeasurementTable& table, const PoissonSource& source,
                                   const DetectorResponse& detector, int n_star, int m_star, int n0, int m0,
                                   const EstimatorOptions& options) {
  if (table.setting_count() != detector.setting_count()) {
    throw IncompleteData("measurement table columns do not match the detector settings");
  }
  const ProductReceiver receiver({&detector}, m0, options.scan_orders);
  const Eigen::MatrixXd rows = table.rows_for(source.intensities);
  std::vector<IntervalEstimate> all = estimate_channel_block(rows, source, n_star, n0, receiver, options);
  return all.at(receiver.encode({m_star}));
}

IntervalEstimate estimate_output_only(const Eigen::VectorXd& f, const DetectorResponse& detector, int n_star,
                                      int n0, const EstimatorOptions& options) {
  const ProductReceiver receiver({&detector}, n0, options.scan_orders);
  std::vector<IntervalEstimate> all = estimate_output_block(f, receiver, options);
  return all.at(receiver.encode({n_star}));
}

}  // namespace photonbound
