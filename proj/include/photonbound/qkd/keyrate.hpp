#pragma once

#include <array>
#include <optional>
#include <string>

#include "photonbound/core/threshold.hpp"
#include "photonbound/interval.hpp"

namespace photonbound {

enum class Protocol { BB84, SixState };
enum class Basis { Z = 0, X = 1, Y = 2 };

const char* to_string(Protocol p);

// q(10|1) and q(01|1) in detector-mode coordinates: one photon reaching the
// mode-0 detector, or the mode-1 detector.
struct ModeIntervals {
  Interval q10{0.0, 1.0};
  Interval q01{0.0, 1.0};
};

struct SinglePhotonStats {
  std::array<std::array<std::optional<ModeIntervals>, 2>, 3> single;  // [basis][bit]
  Interval vacuum{0.0, 1.0};                                          // q(00|0)
};

// Receiver settings for the rounds being evaluated.
struct ReceiverSetting {
  ThresholdDetector detectors;
  double eta0 = 1.0;
  double eta1 = 1.0;
};

Interval qubit_detection_prob(const SinglePhotonStats& stats, const ReceiverSetting& rx, Basis basis);
Interval single_photon_error_rate(const SinglePhotonStats& stats, const ReceiverSetting& rx, Basis basis);

// Bell-diagonal weights from the three basis error rates.
std::array<double, 4> solve_lambda(double e_x, double e_y, double e_z);

double binary_entropy(double p);
double shannon_entropy(const std::array<double, 4>& p);

double conditional_entropy(Protocol protocol, double e_x, double e_y, double e_z);
// Lower bound over every error triple in the box.
double conditional_entropy_lower(Protocol protocol, const Interval& e_x, const Interval& e_y, const Interval& e_z);

struct GainQber {
  double gain = 0.0;  // Q
  double qber = 0.0;  // E
};

// f[a][2*b0 + b1]: probability of click pattern (b0, b1) when bit a is sent.
GainQber gain_qber(const std::array<std::array<double, 4>, 2>& f);

struct KeyRateReport {
  double loss_db = 0.0;
  Protocol protocol = Protocol::BB84;
  double key_rate = 0.0;
  double gain = 0.0;
  double qber = 0.0;
  Interval e_x{0.0, 1.0}, e_y{0.0, 1.0}, e_z{0.0, 1.0};
  Interval p_det{0.0, 1.0};
  std::array<double, 4> lambda{};  // at the upper error endpoints
  double entropy_lower = 0.0;
  double vacuum_term = 0.0;
  double single_photon_term = 0.0;
  double leakage = 0.0;
  double baseline_e1 = 1.0;
};

struct KeyRateInputs {
  SinglePhotonStats stats;
  GainQber observed;
  double mu = 0.0;  // key intensity
  ReceiverSetting receiver;  // key setting
  Protocol protocol = Protocol::BB84;
};

KeyRateReport key_rate(const KeyRateInputs& in);

}  // namespace photonbound
