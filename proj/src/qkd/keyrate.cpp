#include "photonbound/qkd/keyrate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "photonbound/core/poisson.hpp"
#include "photonbound/errors.hpp"

namespace photonbound {
namespace {

const ModeIntervals& label(const SinglePhotonStats& stats, Basis basis, int a) {
  const auto& entry = stats.single[static_cast<int>(basis)][a];
  if (!entry) throw IncompleteData("single-photon statistics missing for the requested basis");
  return *entry;
}

struct Factors {
  double c10;  // click probability with one photon at detector 0
  double c01;
};

Factors click_factors(const ReceiverSetting& rx) {
  const double r00 = threshold_no_click(rx.detectors, rx.eta0, 0);
  const double r01 = threshold_no_click(rx.detectors, rx.eta0, 1);
  const double r10 = threshold_no_click(rx.detectors, rx.eta1, 0);
  const double r11 = threshold_no_click(rx.detectors, rx.eta1, 1);
  return {1.0 - r01 * r10, 1.0 - r00 * r11};
}

double plogp(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

// max of -p log2 p over [lo, hi]
double plogp_max(double lo, double hi) {
  const double peak = 1.0 / std::numbers::e;
  return plogp(std::clamp(peak, lo, hi));
}

}  // namespace

const char* to_string(Protocol p) { return p == Protocol::BB84 ? "bb84" : "six-state"; }

Interval qubit_detection_prob(const SinglePhotonStats& stats, const ReceiverSetting& rx, Basis basis) {
  const Factors c = click_factors(rx);
  Interval p{0.0, 0.0};
  for (int a = 0; a < 2; ++a) {
    const ModeIntervals& q = label(stats, basis, a);
    p.lower += 0.5 * (q.q10.lower * c.c10 + q.q01.lower * c.c01);
    p.upper += 0.5 * (q.q10.upper * c.c10 + q.q01.upper * c.c01);
  }
  p.upper = std::min(p.upper, 1.0);
  return p;
}

Interval single_photon_error_rate(const SinglePhotonStats& stats, const ReceiverSetting& rx, Basis basis) {
  const Interval pdet = qubit_detection_prob(stats, rx, basis);
  if (!(pdet.lower > 0.0)) {
    throw UndefinedRate("single-photon error rate undefined: detection probability may vanish");
  }
  const Factors c = click_factors(rx);
  const ModeIntervals& q0 = label(stats, basis, 0);
  const ModeIntervals& q1 = label(stats, basis, 1);
  // bit 0 is prepared in mode 0, bit 1 in mode 1
  const Interval wrong{0.5 * (q0.q01.lower * c.c01 + q1.q10.lower * c.c10),
                       0.5 * (q0.q01.upper * c.c01 + q1.q10.upper * c.c10)};
  const Interval right{0.5 * (q0.q10.lower * c.c10 + q1.q01.lower * c.c01),
                       0.5 * (q0.q10.upper * c.c10 + q1.q01.upper * c.c01)};
  auto ratio = [](double w, double r) { return w + r > 0.0 ? w / (w + r) : 0.0; };
  return {ratio(wrong.lower, right.upper), ratio(wrong.upper, right.lower)};
}

std::array<double, 4> solve_lambda(double e_x, double e_y, double e_z) {
  for (double e : {e_x, e_y, e_z}) {
    if (!(e >= 0.0 && e <= 1.0)) throw std::invalid_argument("solve_lambda: error rates must lie in [0,1]");
  }
  // inverse of e_X = l1 + l3, e_Y = l1 + l2, e_Z = l2 + l3, sum l = 1
  const std::array<double, 4> l = {1.0 - 0.5 * (e_x + e_y + e_z), 0.5 * (e_x + e_y - e_z),
                                   0.5 * (e_z + e_y - e_x), 0.5 * (e_x + e_z - e_y)};
  for (double v : l) {
    if (v < -1e-12) throw InadmissibleErrorRates("error rates do not correspond to a physical state");
  }
  return l;
}

double binary_entropy(double p) { return plogp(p) + plogp(1.0 - p); }

double shannon_entropy(const std::array<double, 4>& p) {
  double s = 0.0;
  for (double v : p) s += plogp(std::max(0.0, v));
  return s;
}

double conditional_entropy(Protocol protocol, double e_x, double e_y, double e_z) {
  if (protocol == Protocol::BB84) return std::clamp(1.0 - binary_entropy(e_x), 0.0, 1.0);
  const std::array<double, 4> l = solve_lambda(e_x, e_y, e_z);
  return std::clamp(1.0 + binary_entropy(e_z) - shannon_entropy(l), 0.0, 1.0);
}

double conditional_entropy_lower(Protocol protocol, const Interval& e_x, const Interval& e_y, const Interval& e_z) {
  const Interval x = e_x.clamped(0.0, 1.0);
  const Interval y = e_y.clamped(0.0, 1.0);
  const Interval z = e_z.clamped(0.0, 1.0);
  if (protocol == Protocol::BB84) {
    return std::clamp(1.0 - binary_entropy(std::clamp(0.5, x.lower, x.upper)), 0.0, 1.0);
  }
  // exact range of each Bell weight over the box, then the entropy term
  // maximised per component (-p log p is concave)
  const std::array<Interval, 4> l = {
      Interval{1.0 - 0.5 * (x.upper + y.upper + z.upper), 1.0 - 0.5 * (x.lower + y.lower + z.lower)},
      Interval{0.5 * (x.lower + y.lower - z.upper), 0.5 * (x.upper + y.upper - z.lower)},
      Interval{0.5 * (z.lower + y.lower - x.upper), 0.5 * (z.upper + y.upper - x.lower)},
      Interval{0.5 * (x.lower + z.lower - y.upper), 0.5 * (x.upper + z.upper - y.lower)}};
  double h_max = 0.0;
  for (const Interval& r : l) {
    if (r.upper < -1e-12) throw InadmissibleErrorRates("error-rate box contains no physical state");
    h_max += plogp_max(std::max(0.0, r.lower), std::clamp(r.upper, 0.0, 1.0));
  }
  const double h2_min = std::min(binary_entropy(z.lower), binary_entropy(z.upper));
  return std::clamp(1.0 + h2_min - h_max, 0.0, 1.0);
}

GainQber gain_qber(const std::array<std::array<double, 4>, 2>& f) {
  GainQber g;
  g.gain = 1.0 - 0.5 * (f[0][0] + f[1][0]);
  if (!(g.gain > 0.0)) throw UndefinedRate("QBER undefined: no detections at the key setting");
  // bit 0 is correct when only detector 0 clicks (pattern 10), bit 1 when only detector 1 does (01)
  const double correct = 0.5 * (f[0][2] + f[1][1]);
  g.qber = 1.0 - correct / g.gain;
  return g;
}

KeyRateReport key_rate(const KeyRateInputs& in) {
  KeyRateReport rep;
  rep.protocol = in.protocol;
  rep.gain = in.observed.gain;
  rep.qber = in.observed.qber;
  const ReceiverSetting& rx = in.receiver;
  const bool have_y = in.stats.single[static_cast<int>(Basis::Y)][0].has_value() &&
                      in.stats.single[static_cast<int>(Basis::Y)][1].has_value();

  rep.p_det = qubit_detection_prob(in.stats, rx, Basis::Z);
  rep.e_z = single_photon_error_rate(in.stats, rx, Basis::Z);
  rep.e_x = single_photon_error_rate(in.stats, rx, Basis::X);
  if (have_y) rep.e_y = single_photon_error_rate(in.stats, rx, Basis::Y);
  if (in.protocol == Protocol::SixState && !have_y) {
    throw IncompleteData("six-state key rate needs Y-basis statistics");
  }

  try {
    rep.lambda = solve_lambda(std::clamp(rep.e_x.upper, 0.0, 1.0), std::clamp(rep.e_y.upper, 0.0, 1.0),
                              std::clamp(rep.e_z.upper, 0.0, 1.0));
  } catch (const InadmissibleErrorRates&) {
    rep.lambda = {std::nan(""), std::nan(""), std::nan(""), std::nan("")};
  }
  rep.entropy_lower = conditional_entropy_lower(in.protocol, rep.e_x, rep.e_y, rep.e_z);

  const double r00 = threshold_no_click(rx.detectors, rx.eta0, 0) * threshold_no_click(rx.detectors, rx.eta1, 0);
  rep.vacuum_term = poisson_pmf(in.mu, 0) * in.stats.vacuum.lower *
                    (1.0 - r00);
  rep.single_photon_term = poisson_pmf(in.mu, 1) * rep.p_det.lower * rep.entropy_lower;
  rep.leakage = in.observed.gain * binary_entropy(std::clamp(in.observed.qber, 0.0, 1.0));
  rep.key_rate = rep.vacuum_term + rep.single_photon_term - rep.leakage;
  return rep;
}

}  // namespace photonbound
