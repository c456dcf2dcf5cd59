#include "photonbound/channel/forward.hpp"

#include <cmath>
#include <stdexcept>

namespace photonbound {
namespace {

double log_choose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// p^k with 0^0 = 1
double power(double p, int k) { return k == 0 ? 1.0 : std::pow(p, k); }

double output_response(const DetectorResponse& det, double x, double t, std::size_t j) {
  const int top = series_cutoff(x);
  if (top > det.max_order()) throw std::out_of_range("loss table: detector response not tabulated far enough");
  double f = 0.0;
  for (int n = 0; n <= top; ++n) {
    const double p = poisson_pmf(x, n);
    if (p == 0.0) continue;
    double inner = 0.0;
    for (int m = 0; m <= n; ++m) inner += loss_q(t, m, n) * det.response(m, j);
    f += p * inner;
  }
  return f;
}

template <class R>
MeasurementTable fill(double t, const PoissonSource& source, const R& det, MeasurementTable table) {
  source.validate();
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("loss table: transmittance must be in [0,1]");
  table.intensities = source.intensities;
  table.values.resize(static_cast<Eigen::Index>(source.size()), static_cast<Eigen::Index>(det.setting_count()));
  for (std::size_t i = 0; i < source.size(); ++i) {
    for (std::size_t j = 0; j < det.setting_count(); ++j) {
      table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          output_response(det, source.intensities[i], t, j);
    }
  }
  return table;
}

}  // namespace

int series_cutoff(double x, double tail) {
  int n = 0;
  while (poisson_tail(x, n) >= tail && n < 10000) ++n;
  return n;
}

double loss_q(double t, int m, int n) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("loss_q: transmittance must be in [0,1]");
  if (m < 0 || n < 0 || m > n) return 0.0;
  if (t == 0.0) return m == 0 ? 1.0 : 0.0;
  if (t == 1.0) return m == n ? 1.0 : 0.0;
  return std::exp(log_choose(n, m) + m * std::log(t) + (n - m) * std::log1p(-t));
}

QkdChannelModel QkdChannelModel::from_loss_db(double loss_db, double flip_probability) {
  QkdChannelModel c{std::pow(10.0, -loss_db / 10.0), flip_probability};
  c.validate();
  return c;
}

void QkdChannelModel::validate() const {
  if (!(transmittance >= 0.0 && transmittance <= 1.0)) {
    throw std::invalid_argument("qkd channel: transmittance must be in [0,1]");
  }
  if (!(flip_probability >= 0.0 && flip_probability <= 0.5)) {
    throw std::invalid_argument("qkd channel: flip probability must be in [0,0.5]");
  }
}

double qkd_q(const QkdChannelModel& channel, int k, int l, int n) {
  if (k < 0 || l < 0 || n < 0 || k + l > n) return 0.0;
  const double t = channel.transmittance;
  const double e = channel.flip_probability;
  const int lost = n - k - l;
  const double coef = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(l + 1.0) -
                               std::lgamma(lost + 1.0));
  return std::round(coef) * power(t * (1.0 - e), k) * power(t * e, l) * power(1.0 - t, lost);
}

double qkd_forward_f(const QkdChannelModel& channel, const ThresholdDetector& detectors, int b0, int b1, int a,
                     double mu, double eta0, double eta1) {
  if ((b0 != 0 && b0 != 1) || (b1 != 0 && b1 != 1) || (a != 0 && a != 1)) {
    throw std::invalid_argument("qkd_forward_f: click pattern and bit must be 0/1");
  }
  auto r = [&](int b, double eta, int count) {
    const double no = threshold_no_click(detectors, eta, count);
    return b == 0 ? no : 1.0 - no;
  };
  const int top = series_cutoff(mu);
  double f = 0.0;
  for (int n = 0; n <= top; ++n) {
    const double p = poisson_pmf(mu, n);
    if (p == 0.0) continue;
    double inner = 0.0;
    for (int k = 0; k <= n; ++k) {
      for (int l = 0; k + l <= n; ++l) {
        const int mode0 = a == 0 ? k : l;
        const int mode1 = a == 0 ? l : k;
        inner += qkd_q(channel, k, l, n) * r(b0, eta0, mode0) * r(b1, eta1, mode1);
      }
    }
    f += p * inner;
  }
  return f;
}

std::vector<double> TcspcScene::time_bins() const {
  std::vector<double> out;
  for (long i = 0;; ++i) {
    const double t = time_start + i * bin_duration;
    if (t >= time_stop - 1e-9 * bin_duration) break;
    out.push_back(t);
  }
  return out;
}

void TcspcScene::validate() const {
  if (!(decay_time > 0.0)) throw std::invalid_argument("tcspc scene: decay time must be > 0");
  if (!(bin_duration > 0.0)) throw std::invalid_argument("tcspc scene: bin duration must be > 0");
  if (!(excitation_coefficient >= 0.0)) {
    throw std::invalid_argument("tcspc scene: excitation coefficient must be >= 0");
  }
  if (!(time_stop > time_start)) throw std::invalid_argument("tcspc scene: empty time range");
}

double tcspc_energy(const TcspcScene& scene, double t) {
  if (t < scene.excitation_time) return 0.0;
  return scene.excitation_coefficient * std::exp(-(t - scene.excitation_time) / scene.decay_time) *
         -std::expm1(-scene.bin_duration / scene.decay_time);
}

double tcspc_q(const TcspcScene& scene, double t, int n) { return poisson_pmf(tcspc_energy(scene, t), n); }

std::vector<double> tcspc_pdf(const TcspcScene& scene, double t, const HomodyneResponse& detector) {
  const double e = tcspc_energy(scene, t);
  const int top = series_cutoff(e);
  if (top > detector.max_order()) throw std::out_of_range("tcspc_pdf: response not tabulated far enough");
  std::vector<double> f(detector.setting_count(), 0.0);
  for (int n = 0; n <= top; ++n) {
    const double q = poisson_pmf(e, n);
    for (std::size_t j = 0; j < f.size(); ++j) f[j] += q * detector.response(n, j);
  }
  return f;
}

MeasurementTable loss_table(double t, const PoissonSource& source, const ThresholdResponse& detector) {
  MeasurementTable table;
  table.kind = TableKind::Threshold;
  table.attenuations = detector.detector().attenuation_levels;
  table.parameters["p_dc"] = detector.detector().dark_count_prob;
  table.parameters["eta_det"] = detector.detector().single_photon_efficiency;
  return fill(t, source, detector, std::move(table));
}

MeasurementTable loss_table(double t, const PoissonSource& source, const HomodyneResponse& detector) {
  MeasurementTable table;
  table.kind = TableKind::Homodyne;
  table.bin_edges = detector.detector().bin_edges;
  table.parameters["eta"] = detector.detector().efficiency;
  return fill(t, source, detector, std::move(table));
}

}  // namespace photonbound
