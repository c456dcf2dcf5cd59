#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

namespace photonbound {

enum class TableKind { Threshold, Homodyne };

// Observed f(x_i, y_j).  Threshold tables hold no-click probabilities per
// (intensity, attenuation); homodyne tables hold the folded mass per
// (intensity, bin).
struct MeasurementTable {
  TableKind kind = TableKind::Threshold;
  std::vector<double> intensities;
  std::vector<double> attenuations;  // threshold columns
  std::vector<double> bin_edges;     // homodyne columns are [e_j, e_{j+1}]
  Eigen::MatrixXd values;            // intensities x settings
  // Detector parameters carried along with the data (p_dc, eta_det, eta ...).
  std::map<std::string, double> parameters;

  std::size_t setting_count() const;
  // Row whose intensity equals x exactly; throws IncompleteData otherwise.
  Eigen::Index row_of(double x) const;
  // Rows for every intensity of the design, in design order.
  Eigen::MatrixXd rows_for(const std::vector<double>& xs) const;
  void validate() const;
};

}  // namespace photonbound
