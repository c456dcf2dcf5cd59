#include "photonbound/qkd/pipeline.hpp"

#include <cmath>
#include <stdexcept>

#include "photonbound/channel/sampling.hpp"
#include "photonbound/errors.hpp"
#include "photonbound/qkd/decoy.hpp"

namespace photonbound {

std::vector<double> QkdSetup::loss_grid() const {
  if (!losses_db.empty()) return losses_db;
  std::vector<double> grid;
  for (int db = 0; db <= 45; ++db) grid.push_back(db);
  return grid;
}

void QkdSetup::validate() const {
  source.validate();
  detectors.validate();
  if (!(flip_probability >= 0.0 && flip_probability <= 0.5)) {
    throw std::invalid_argument("qkd: channel error must be in [0,0.5]");
  }
  if (source.size() != static_cast<std::size_t>(n0) + 1) {
    throw std::invalid_argument("qkd: number of intensities must equal n0+1");
  }
  if (detectors.attenuation_levels.size() < static_cast<std::size_t>(m0) + 1) {
    throw std::invalid_argument("qkd: need at least m0+1 attenuation levels");
  }
  if (protocols.empty()) throw std::invalid_argument("qkd: no protocol selected");
  for (double db : loss_grid()) {
    if (!(db >= 0.0) || !std::isfinite(db)) throw std::invalid_argument("qkd: losses must be finite and >= 0");
  }
}

QkdReceiver::QkdReceiver(const ThresholdDetector& det, int m0, int scan_orders)
    : mode0(det), mode1(det), product({&mode0, &mode1}, m0, scan_orders) {}

QkdObservations simulate_qkd(const QkdChannelModel& channel, const QkdSetup& setup) {
  const auto& nus = setup.detectors.attenuation_levels;
  const auto rows = static_cast<Eigen::Index>(setup.source.size());
  const auto cols = static_cast<Eigen::Index>(nus.size() * nus.size());
  std::array<Eigen::MatrixXd, 2> exact;
  for (int a = 0; a < 2; ++a) {
    exact[a].resize(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (std::size_t j0 = 0; j0 < nus.size(); ++j0) {
        for (std::size_t j1 = 0; j1 < nus.size(); ++j1) {
          exact[a](i, static_cast<Eigen::Index>(j0 * nus.size() + j1)) = qkd_forward_f(
              channel, setup.detectors, 0, 0, a, setup.source.intensities[static_cast<std::size_t>(i)], nus[j0],
              nus[j1]);
        }
      }
    }
  }
  QkdObservations obs;
  const double top = nus.back();
  for (double mu : setup.source.intensities) {
    PatternTable p{};
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 4; ++b) p[a][b] = qkd_forward_f(channel, setup.detectors, b >> 1, b & 1, a, mu, top, top);
    }
    obs.key_patterns.push_back(p);
  }

  // the channel acts identically on every basis label
  for (int basis = 0; basis < 3; ++basis) obs.no_click[basis] = exact;
  if (setup.shots == 0) return obs;

  std::mt19937_64 rng(setup.seed);
  for (int basis = 0; basis < 3; ++basis) {
    for (int a = 0; a < 2; ++a) {
      Eigen::MatrixXd& m = obs.no_click[basis][a];
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
          const double p = m(i, j);
          m(i, j) = sample_frequencies(std::span<const double>(&p, 1), setup.shots, rng)[0];
        }
      }
    }
  }
  for (PatternTable& p : obs.key_patterns) {
    for (int a = 0; a < 2; ++a) {
      const std::vector<double> f = sample_frequencies(p[a], setup.shots, rng);
      for (int b = 0; b < 4; ++b) p[a][b] = f[b];
    }
  }
  return obs;
}

SinglePhotonStats estimate_single_photon_stats(const QkdObservations& obs, const QkdSetup& setup,
                                               const QkdReceiver& receiver) {
  const ProductReceiver& rx = receiver.product;
  SinglePhotonStats stats;
  for (int basis = 0; basis < 3; ++basis) {
    for (int a = 0; a < 2; ++a) {
      const std::vector<IntervalEstimate> est =
          estimate_channel_block(obs.no_click[basis][a], setup.source, 1, setup.n0, rx, setup.estimator);
      ModeIntervals q;
      q.q10 = est[rx.encode({1, 0})].interval();
      q.q01 = est[rx.encode({0, 1})].interval();
      stats.single[basis][a] = q;
    }
  }
  const std::vector<IntervalEstimate> vac =
      estimate_channel_block(obs.no_click[0][0], setup.source, 0, setup.n0, rx, setup.estimator);
  stats.vacuum = vac[rx.encode({0, 0})].interval();
  return stats;
}

std::vector<KeyRateReport> run_qkd_sweep(const QkdSetup& setup) {
  setup.validate();
  const QkdReceiver receiver(setup.detectors, setup.m0, setup.estimator.scan_orders);
  const double top = setup.detectors.attenuation_levels.back();
  std::vector<KeyRateReport> reports;
  for (double db : setup.loss_grid()) {
    const QkdChannelModel channel = QkdChannelModel::from_loss_db(db, setup.flip_probability);
    const QkdObservations obs = simulate_qkd(channel, setup);
    const SinglePhotonStats stats = estimate_single_photon_stats(obs, setup, receiver);

    std::vector<GainQber> per_intensity;
    for (const PatternTable& p : obs.key_patterns) per_intensity.push_back(gain_qber(p));
    const double baseline = decoy_baseline_error(setup.source.intensities, per_intensity);

    for (Protocol protocol : setup.protocols) {
      KeyRateInputs in;
      in.stats = stats;
      in.observed = per_intensity.back();
      in.mu = setup.source.x_max();
      in.receiver = {setup.detectors, top, top};
      in.protocol = protocol;
      KeyRateReport rep = key_rate(in);
      rep.loss_db = db;
      rep.baseline_e1 = baseline;
      reports.push_back(rep);
    }
  }
  return reports;
}

}  // namespace photonbound
