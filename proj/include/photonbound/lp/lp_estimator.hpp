#pragma once

#include <iosfwd>

#include "photonbound/analytical/estimator.hpp"
#include "photonbound/analytical/measurement_table.hpp"
#include "photonbound/core/poisson.hpp"
#include "photonbound/core/response.hpp"
#include "photonbound/lp/simplex.hpp"

namespace photonbound {

// LP over the truncated table q(m|n), n <= n_c, m <= m_c.
struct LpStandardForm {
  int n_c = 0;
  int m_c = 0;
  int target_n = 0;
  int target_m = 0;
  Direction direction = Direction::Maximize;
  std::size_t measurement_pairs = 0;
  LinearProgram program;

  std::size_t column(int n, int m) const {
    return static_cast<std::size_t>(n) * static_cast<std::size_t>(m_c + 1) + static_cast<std::size_t>(m);
  }
};

// Upper bound on f(x, y_j) minus its truncated photon-number expansion.
double slack_h(const DetectorResponse& detector, double x, std::size_t setting, int n_c, int m_c);

LpStandardForm build_lp(const MeasurementTable& table, const PoissonSource& source,
                        const DetectorResponse& detector, int n_c, int m_c, int n_star, int m_star,
                        Direction direction);

LpSolution solve_lp(const LpStandardForm& problem);

// lower = minimum, upper = maximum of q(m*|n*) over the feasible set.
IntervalEstimate lp_interval(const MeasurementTable& table, const PoissonSource& source,
                             const DetectorResponse& detector, int n_c, int m_c, int n_star, int m_star);

// Plain-text dump: variable map, then one line per constraint.
void write_lp(std::ostream& os, const LpStandardForm& problem);

}  // namespace photonbound
