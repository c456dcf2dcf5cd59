#include "photonbound/lp/lp_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "photonbound/errors.hpp"

namespace photonbound {

double slack_h(const DetectorResponse& detector, double x, std::size_t setting, int n_c, int m_c) {
  return detector.truncation_slack(poisson_tail(x, n_c), m_c, setting);
}

LpStandardForm build_lp(const MeasurementTable& table, const PoissonSource& source,
                        const DetectorResponse& detector, int n_c, int m_c, int n_star, int m_star,
                        Direction direction) {
  source.validate();
  if (n_c < 0 || m_c < 0 || n_star < 0 || m_star < 0 || n_star > n_c || m_star > m_c) {
    throw std::invalid_argument("build_lp: target must lie inside the truncation");
  }
  const std::size_t settings = detector.setting_count();
  if (settings == 0 || source.size() == 0) throw std::invalid_argument("build_lp: empty measurement grid");
  if (table.setting_count() != settings) {
    throw IncompleteData("build_lp: table columns do not match the detector settings");
  }

  LpStandardForm form;
  form.n_c = n_c;
  form.m_c = m_c;
  form.target_n = n_star;
  form.target_m = m_star;
  form.direction = direction;
  LinearProgram& lp = form.program;
  lp.variables = static_cast<std::size_t>(n_c + 1) * static_cast<std::size_t>(m_c + 1);
  lp.objective.assign(lp.variables, 0.0);
  lp.objective[form.column(n_star, m_star)] = 1.0;
  lp.upper_bounds.assign(lp.variables, 1.0);

  for (int n = 0; n <= n_c; ++n) {
    LpRow row;
    row.coefficients.assign(lp.variables, 0.0);
    for (int m = 0; m <= m_c; ++m) row.coefficients[form.column(n, m)] = 1.0;
    row.sense = RowSense::LessEqual;
    row.rhs = 1.0;
    row.label = "norm n=" + std::to_string(n);
    lp.rows.push_back(std::move(row));
  }

  std::vector<std::vector<double>> resp(static_cast<std::size_t>(m_c + 1), std::vector<double>(settings));
  for (int m = 0; m <= m_c; ++m) {
    for (std::size_t j = 0; j < settings; ++j) resp[m][j] = detector.response(m, j);
  }
  for (double x : source.intensities) {
    const Eigen::Index i = table.row_of(x);
    for (std::size_t j = 0; j < settings; ++j) {
      LpRow upper;
      upper.coefficients.assign(lp.variables, 0.0);
      for (int n = 0; n <= n_c; ++n) {
        const double p = poisson_pmf(x, n);
        for (int m = 0; m <= m_c; ++m) upper.coefficients[form.column(n, m)] = p * resp[m][j];
      }
      const double f = table.values(i, static_cast<Eigen::Index>(j));
      LpRow lower = upper;
      upper.sense = RowSense::LessEqual;
      upper.rhs = f;
      upper.label = "meas x=" + std::to_string(x) + " j=" + std::to_string(j) + " upper";
      lower.sense = RowSense::GreaterEqual;
      lower.rhs = f - slack_h(detector, x, j, n_c, m_c);
      lower.label = "meas x=" + std::to_string(x) + " j=" + std::to_string(j) + " lower";
      lp.rows.push_back(std::move(upper));
      lp.rows.push_back(std::move(lower));
      ++form.measurement_pairs;
    }
  }
  return form;
}

LpSolution solve_lp(const LpStandardForm& problem) { return solve_lp(problem.program, problem.direction); }

IntervalEstimate lp_interval(const MeasurementTable& table, const PoissonSource& source,
                             const DetectorResponse& detector, int n_c, int m_c, int n_star, int m_star) {
  IntervalEstimate est;
  est.n_star = n_star;
  est.m_star = {m_star};
  est.lambda = std::numeric_limits<double>::quiet_NaN();
  double bounds[2] = {0.0, 1.0};
  const Direction dirs[2] = {Direction::Minimize, Direction::Maximize};
  for (int k = 0; k < 2; ++k) {
    const LpStandardForm form = build_lp(table, source, detector, n_c, m_c, n_star, m_star, dirs[k]);
    const LpSolution sol = solve_lp(form);
    if (sol.status == LpStatus::Infeasible) {
      throw LpInfeasible("LP infeasible: measurement table is inconsistent with the device models");
    }
    if (sol.status != LpStatus::Optimal) {
      throw NumericalError(std::string("LP solve failed: ") + to_string(sol.status));
    }
    bounds[k] = sol.value;
  }
  est.raw_lower = bounds[0];
  est.raw_upper = bounds[1];
  est.lower = std::clamp(bounds[0], 0.0, 1.0);
  est.upper = std::clamp(bounds[1], 0.0, 1.0);
  return est;
}

void write_lp(std::ostream& os, const LpStandardForm& problem) {
  const LinearProgram& lp = problem.program;
  char buf[64];
  os << "# lp " << (problem.direction == Direction::Maximize ? "maximize" : "minimize") << " q(" << problem.target_m
     << "|" << problem.target_n << ")\n";
  os << "# variables " << lp.variables << "\n";
  for (int n = 0; n <= problem.n_c; ++n) {
    for (int m = 0; m <= problem.m_c; ++m) os << "var " << problem.column(n, m) << " n=" << n << " m=" << m << "\n";
  }
  os << "# rows " << lp.rows.size() << " (variables boxed to [0,1])\n";
  for (const LpRow& row : lp.rows) {
    os << "row " << (row.sense == RowSense::LessEqual ? "<=" : ">=");
    std::snprintf(buf, sizeof buf, " %.17g", row.rhs);
    os << buf << " :";
    for (std::size_t c = 0; c < row.coefficients.size(); ++c) {
      if (row.coefficients[c] == 0.0) continue;
      std::snprintf(buf, sizeof buf, " %zu:%.17g", c, row.coefficients[c]);
      os << buf;
    }
    os << "  # " << row.label << "\n";
  }
}

}  // namespace photonbound
