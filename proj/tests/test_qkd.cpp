#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "photonbound/errors.hpp"
#include "photonbound/qkd/decoy.hpp"
#include "photonbound/qkd/keyrate.hpp"
#include "photonbound/qkd/pipeline.hpp"

using namespace photonbound;
using doctest::Approx;

namespace {

SinglePhotonStats uniform_stats(Interval q10, Interval q01) {
  SinglePhotonStats s;
  for (auto& basis : s.single) {
    basis[0] = ModeIntervals{q10, q01};
    basis[1] = ModeIntervals{q01, q10};  // bit 1 lives in mode 1
  }
  s.vacuum = {1.0, 1.0};
  return s;
}

ReceiverSetting perfect_receiver() { return {ThresholdDetector{0.0, 1.0, {1.0}}, 1.0, 1.0}; }

double h2(double p) { return p <= 0.0 || p >= 1.0 ? 0.0 : -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p); }

}  // namespace

TEST_CASE("lambda system") {
  const auto zero = solve_lambda(0.0, 0.0, 0.0);
  CHECK(zero[0] == 1.0);
  CHECK(zero[1] == 0.0);
  CHECK(zero[2] == 0.0);
  CHECK(zero[3] == 0.0);
  const auto l = solve_lambda(0.05, 0.05, 0.05);
  CHECK(std::abs(l[0] - 0.925) < 1e-12);
  for (int i = 1; i < 4; ++i) CHECK(std::abs(l[i] - 0.025) < 1e-12);

  // the same system by Gaussian elimination
  Eigen::Matrix4d a;
  a << 0, 1, 0, 1,  //
      0, 1, 1, 0,   //
      0, 0, 1, 1,   //
      1, 1, 1, 1;
  const auto lu = a.fullPivLu();
  for (int i = 0; i <= 10; ++i) {
    for (int j = 0; j <= 10; ++j) {
      for (int k = 0; k <= 10; ++k) {
        const double ex = 0.1 * i, ey = 0.1 * j, ez = 0.1 * k;
        const Eigen::Vector4d ref = lu.solve(Eigen::Vector4d(ex, ey, ez, 1.0));
        const bool physical = ref.minCoeff() >= -1e-12;
        if (physical) {
          const auto got = solve_lambda(ex, ey, ez);
          double sum = 0.0;
          for (int c = 0; c < 4; ++c) {
            CHECK(got[c] == Approx(ref(c)).epsilon(1e-12));
            CHECK(got[c] >= -1e-12);
            sum += got[c];
          }
          CHECK(std::abs(sum - 1.0) < 1e-10);
        } else {
          CHECK_THROWS_AS(solve_lambda(ex, ey, ez), InadmissibleErrorRates);
        }
      }
    }
  }
  CHECK_THROWS_AS(solve_lambda(-0.1, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("conditional entropy") {
  CHECK(conditional_entropy(Protocol::BB84, 0.0, 0.0, 0.0) == 1.0);
  CHECK(conditional_entropy(Protocol::SixState, 0.0, 0.0, 0.0) == 1.0);
  CHECK(conditional_entropy(Protocol::BB84, 0.5, 0.0, 0.0) == 0.0);
  const double l0 = 0.925, l1 = 0.025;
  const double h_lambda = -l0 * std::log2(l0) - 3.0 * l1 * std::log2(l1);
  CHECK(conditional_entropy(Protocol::SixState, 0.05, 0.05, 0.05) == Approx(1.0 + h2(0.05) - h_lambda).epsilon(1e-13));
  CHECK(binary_entropy(0.5) == 1.0);
  CHECK(binary_entropy(0.0) == 0.0);

  for (int i = 0; i <= 120; ++i) {
    const double e = 0.001 * i;
    const double bb84 = conditional_entropy(Protocol::BB84, e, e, e);
    const double six = conditional_entropy(Protocol::SixState, e, e, e);
    CHECK(bb84 >= 0.0);
    CHECK(bb84 <= 1.0);
    CHECK(six >= 0.0);
    CHECK(six <= 1.0);
    CHECK(six >= bb84 - 1e-15);
  }
}

TEST_CASE("entropy lower bound over a box") {
  for (Protocol p : {Protocol::BB84, Protocol::SixState}) {
    const Interval ex{0.04, 0.06}, ey{0.03, 0.07}, ez{0.045, 0.055};
    const double lo = conditional_entropy_lower(p, ex, ey, ez);
    for (int i = 0; i <= 4; ++i) {
      for (int j = 0; j <= 4; ++j) {
        for (int k = 0; k <= 4; ++k) {
          const double x = ex.lower + 0.25 * i * ex.width();
          const double y = ey.lower + 0.25 * j * ey.width();
          const double z = ez.lower + 0.25 * k * ez.width();
          CHECK(lo <= conditional_entropy(p, x, y, z) + 1e-12);
        }
      }
    }
    const Interval wide{0.02, 0.08};
    CHECK(conditional_entropy_lower(p, wide, wide, wide) <= lo);
  }
  CHECK(conditional_entropy_lower(Protocol::BB84, {0.05, 0.05}, {0.0, 1.0}, {0.0, 1.0}) ==
        Approx(1.0 - h2(0.05)).epsilon(1e-14));
}

TEST_CASE("detection probability and error rate") {
  const ReceiverSetting rx = perfect_receiver();
  const SinglePhotonStats none = uniform_stats({0.0, 0.0}, {0.0, 0.0});
  const Interval p0 = qubit_detection_prob(none, rx, Basis::Z);
  CHECK(p0.lower == 0.0);
  CHECK(p0.upper == 0.0);
  CHECK_THROWS_AS(single_photon_error_rate(none, rx, Basis::Z), UndefinedRate);

  const SinglePhotonStats certain = uniform_stats({1.0, 1.0}, {0.0, 0.0});
  CHECK(qubit_detection_prob(certain, rx, Basis::X).lower == Approx(1.0));
  CHECK(single_photon_error_rate(certain, rx, Basis::X).upper == 0.0);

  const SinglePhotonStats even = uniform_stats({0.3, 0.3}, {0.3, 0.3});
  CHECK(single_photon_error_rate(even, rx, Basis::Y).lower == Approx(0.5));
  CHECK(single_photon_error_rate(even, rx, Basis::Y).upper == Approx(0.5));

  const double t = 0.5, e = 0.05;
  const SinglePhotonStats exact = uniform_stats(Interval::point(t * (1.0 - e)), Interval::point(t * e));
  const Interval ez = single_photon_error_rate(exact, rx, Basis::Z);
  CHECK(ez.lower == Approx(0.05).epsilon(1e-14));
  CHECK(ez.upper == Approx(0.05).epsilon(1e-14));

  // widening an input never narrows an output
  const SinglePhotonStats wider = uniform_stats({0.45, 0.5}, {0.02, 0.03});
  const ReceiverSetting noisy{ThresholdDetector{1e-6, 1.0, {0.94, 1.0}}, 0.94, 1.0};
  const Interval base_p = qubit_detection_prob(exact, noisy, Basis::Z);
  const Interval wide_p = qubit_detection_prob(wider, noisy, Basis::Z);
  CHECK(wide_p.lower <= base_p.lower);
  CHECK(wide_p.upper >= base_p.upper);
  const Interval base_e = single_photon_error_rate(exact, noisy, Basis::Z);
  const Interval wide_e = single_photon_error_rate(wider, noisy, Basis::Z);
  CHECK(wide_e.lower <= base_e.lower);
  CHECK(wide_e.upper >= base_e.upper);
}

TEST_CASE("gain and qber") {
  // perfect detectors: bit 0 always clicks detector 0 only
  PatternTable f{};
  f[0] = {0.6, 0.0, 0.4, 0.0};
  f[1] = {0.6, 0.4, 0.0, 0.0};
  const GainQber g = gain_qber(f);
  CHECK(g.gain == Approx(0.4));
  CHECK(g.qber == Approx(0.0));
  PatternTable dark{};
  dark[0] = {1.0, 0.0, 0.0, 0.0};
  dark[1] = {1.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(gain_qber(dark), UndefinedRate);
}

TEST_CASE("key rate terms") {
  KeyRateInputs in;
  in.stats = uniform_stats({0.2, 0.2}, {0.2, 0.2});  // e = 1/2 in every basis
  in.receiver = perfect_receiver();
  in.mu = 0.5;
  in.observed = {0.1, 0.02};
  in.protocol = Protocol::BB84;
  KeyRateReport r = key_rate(in);
  CHECK(r.single_photon_term == 0.0);
  CHECK(r.key_rate == Approx(r.vacuum_term - r.leakage));

  // vacuum-only source: p_0 = 1, p_1 = 0
  const double p_dc = 1e-6;
  in.receiver = {ThresholdDetector{p_dc, 1.0, {1.0}}, 1.0, 1.0};
  in.stats = uniform_stats({0.4, 0.5}, {0.01, 0.02});
  in.stats.vacuum = {0.97, 1.0};
  in.mu = 0.0;
  const double q = 1.0 - (1.0 - p_dc) * (1.0 - p_dc);
  in.observed = {q, 0.5};
  r = key_rate(in);
  CHECK(r.key_rate == Approx(0.97 * q - q * 1.0).epsilon(1e-12));
  CHECK(r.single_photon_term == 0.0);
  CHECK(std::isfinite(r.key_rate));
  CHECK(r.key_rate >= -r.leakage);

  in.protocol = Protocol::SixState;
  in.stats.single[2][0].reset();
  CHECK_THROWS_AS(key_rate(in), IncompleteData);
}

TEST_CASE("decoy baseline") {
  const std::vector<double> mus{1e-3, 1e-2, 0.5};
  // lossless, errorless, no dark counts: Q = 1 - e^{-mu}, E = 0
  std::vector<GainQber> ideal;
  for (double m : mus) ideal.push_back({1.0 - std::exp(-m), 0.0});
  CHECK(std::abs(decoy_baseline_error(mus, ideal)) < 1e-10);

  const std::vector<GainQber> empty(3, GainQber{0.0, 0.0});
  CHECK(decoy_baseline_error(mus, empty) == 1.0);
  CHECK_THROWS_AS(decoy_baseline_error(std::vector<double>{0.5}, std::vector<GainQber>{{0.1, 0.0}}),
                  std::invalid_argument);
}

TEST_CASE("pipeline on exact tables") {
  QkdSetup setup;
  setup.losses_db = {0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0, 45.0};
  const std::vector<KeyRateReport> reports = run_qkd_sweep(setup);
  REQUIRE(reports.size() == 20);
  double prev_bb84 = INFINITY, prev_six = INFINITY;
  for (std::size_t i = 0; i < reports.size(); i += 2) {
    const KeyRateReport& bb84 = reports[i];
    const KeyRateReport& six = reports[i + 1];
    CHECK(bb84.protocol == Protocol::BB84);
    CHECK(six.protocol == Protocol::SixState);
    CAPTURE(bb84.loss_db);
    CHECK(bb84.key_rate <= prev_bb84);
    CHECK(six.key_rate <= prev_six);
    CHECK(six.key_rate >= bb84.key_rate);
    prev_bb84 = bb84.key_rate;
    prev_six = six.key_rate;
    for (const KeyRateReport* r : {&bb84, &six}) {
      for (const Interval& e : {r->e_x, r->e_y, r->e_z, r->p_det}) {
        CHECK(0.0 <= e.lower);
        CHECK(e.lower <= e.upper);
        CHECK(e.upper <= 1.0);
      }
      double sum = 0.0;
      for (double l : r->lambda) {
        CHECK(l >= -1e-12);
        sum += l;
      }
      CHECK(std::abs(sum - 1.0) < 1e-10);
      CHECK(r->e_z.contains(0.05));
    }
    if (bb84.loss_db == 10.0) {
      CHECK(bb84.key_rate > 0.0);
      CHECK(six.key_rate > 0.0);
    }
  }
}

TEST_CASE("single-photon statistics are consistent") {
  QkdSetup setup;
  const QkdChannelModel ch = QkdChannelModel::from_loss_db(20.0, setup.flip_probability);
  const QkdObservations obs = simulate_qkd(ch, setup);
  const QkdReceiver rx(setup.detectors, setup.m0, setup.estimator.scan_orders);
  const SinglePhotonStats stats = estimate_single_photon_stats(obs, setup, rx);
  for (const auto& basis : stats.single) {
    for (const auto& label : basis) {
      REQUIRE(label.has_value());
      for (const Interval& q : {label->q10, label->q01}) {
        CHECK(0.0 <= q.lower);
        CHECK(q.upper <= 1.0);
      }
      CHECK(label->q10.lower + label->q01.lower <= 1.0);
    }
  }
  const double t = ch.transmittance;
  CHECK(stats.single[0][0]->q10.contains(t * 0.95));
  CHECK(stats.single[0][0]->q01.contains(t * 0.05));
  CHECK(stats.vacuum.contains(1.0));
}

TEST_CASE("flip probability one half kills the single-photon term") {
  QkdSetup setup;
  setup.flip_probability = 0.5;
  setup.losses_db = {0.0, 10.0, 20.0};
  for (const KeyRateReport& r : run_qkd_sweep(setup)) CHECK(r.single_photon_term == 0.0);
}
