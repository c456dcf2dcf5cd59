#pragma once

#include <string>
#include <vector>

namespace photonbound {

enum class RowSense { LessEqual, GreaterEqual };
enum class Direction { Minimize, Maximize };
enum class LpStatus { Optimal, Infeasible, Unbounded, ToleranceFailure };

struct LpRow {
  std::vector<double> coefficients;  // one per variable
  RowSense sense = RowSense::LessEqual;
  double rhs = 0.0;
  std::string label;
};

// Variables are boxed to [0, upper_bounds[i]]; an infinite upper bound means
// plain non-negativity.
struct LinearProgram {
  std::size_t variables = 0;
  std::vector<double> objective;
  std::vector<LpRow> rows;
  std::vector<double> upper_bounds;
};

struct LpSolution {
  LpStatus status = LpStatus::ToleranceFailure;
  double value = 0.0;
  std::vector<double> x;
  int pivots = 0;
  double max_violation = 0.0;
};

const char* to_string(LpStatus status);

// Dense two-phase primal simplex, Bland's rule, rows equilibrated by their
// largest coefficient.  Deterministic for identical input.
LpSolution solve_lp(const LinearProgram& problem, Direction direction);

}  // namespace photonbound
