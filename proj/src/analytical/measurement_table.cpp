#include "photonbound/analytical/measurement_table.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "photonbound/errors.hpp"

namespace photonbound {

std::size_t MeasurementTable::setting_count() const {
  if (kind == TableKind::Threshold) return attenuations.size();
  return bin_edges.empty() ? 0 : bin_edges.size() - 1;
}

Eigen::Index MeasurementTable::row_of(double x) const {
  for (std::size_t i = 0; i < intensities.size(); ++i) {
    if (intensities[i] == x) return static_cast<Eigen::Index>(i);
  }
  std::ostringstream msg;
  msg.precision(17);
  msg << "measurement table has no row for intensity " << x;
  throw IncompleteData(msg.str());
}

Eigen::MatrixXd MeasurementTable::rows_for(const std::vector<double>& xs) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(xs.size()), values.cols());
  for (std::size_t i = 0; i < xs.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = values.row(row_of(xs[i]));
  return out;
}

void MeasurementTable::validate() const {
  const auto rows = static_cast<Eigen::Index>(intensities.size());
  const auto cols = static_cast<Eigen::Index>(setting_count());
  if (values.rows() != rows || values.cols() != cols) {
    throw IncompleteData("measurement table: value matrix does not match its grids");
  }
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double v = values(i, j);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument("measurement table: entries must lie in [0,1]");
      }
    }
    if (kind == TableKind::Homodyne && values.row(i).sum() > 1.0 + 1e-12) {
      throw std::invalid_argument("measurement table: homodyne row mass exceeds 1");
    }
  }
}

}  // namespace photonbound
