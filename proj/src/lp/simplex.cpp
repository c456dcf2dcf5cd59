#include "photonbound/lp/simplex.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace photonbound {
namespace {

// The measurement rows make many bases ill-conditioned (condition numbers
// near 1e13), so the basis is kept in extended precision and refactored on
// every iteration.
using Real = long double;
using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

constexpr double kDropTol = 1e-13;    // after row scaling
constexpr double kRankTol = 1e-17;    // equality block orthonormalisation
constexpr double kCostTol = 1e-11;    // reduced cost needed to enter
constexpr double kHarrisTol = 1e-11;  // ratio test slack
constexpr double kPivotTol = 1e-9;    // artificial drive-out
constexpr double kFeasTol = 1e-9;
constexpr double kCheckTol = 1e-8;
constexpr double kRelPivot = 1e-6;   // pivot against the column max
constexpr int kStallLimit = 2000;    // pivots without progress before strict Bland
constexpr int kMaxPivots = 50000;

// Revised simplex on A z = b, z >= 0.
struct Revised {
  Mat a;
  Vec b;
  std::vector<Eigen::Index> basis;  // basic column per row
  Eigen::PartialPivLU<Mat> lu;
  Vec xb;
  int pivots = 0;
  std::vector<bool> pinned;  // columns held at zero while basic
  bool harris = true;

  bool is_pinned(Eigen::Index i) const { return pinned[static_cast<std::size_t>(basis[static_cast<std::size_t>(i)])]; }
  // Entry that limits the step in row i: pinned columns block in both
  // directions.
  Real blocking(const Vec& u, Eigen::Index i) const {
    if (is_pinned(i)) return std::abs(u(i)) > kPivotTol ? std::abs(u(i)) : Real(0);
    return u(i);
  }
  Real level(Eigen::Index i) const { return is_pinned(i) ? Real(0) : std::max<Real>(0, xb(i)); }

  void factor() {
    const Eigen::Index m = a.rows();
    Mat bm(m, m);
    for (Eigen::Index i = 0; i < m; ++i) bm.col(i) = a.col(basis[static_cast<std::size_t>(i)]);
    lu.compute(bm);
    xb = lu.solve(b);
    xb += lu.solve(b - bm * xb);
  }

  // Two-pass ratio test: bound the step over every positive entry with
  // kHarrisTol slack, then take the largest pivot within that bound.
  Eigen::Index harris_row(const Vec& u) const {
    Real bound = std::numeric_limits<Real>::infinity();
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      const Real a = blocking(u, i);
      if (a > 0) bound = std::min(bound, (level(i) + kHarrisTol) / a);
    }
    Eigen::Index leave = -1;
    Real best = 0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      const Real a = blocking(u, i);
      if (a <= 0 || level(i) / a > bound) continue;
      if (leave < 0 || a > best ||
          (a == best && basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
        leave = i;
        best = a;
      }
    }
    return leave;
  }

  // Textbook minimum ratio with ties to the lowest basic index; together
  // with the Bland entering rule this cannot cycle.
  Eigen::Index min_ratio_row(const Vec& u) const {
    Eigen::Index leave = -1;
    Real best = std::numeric_limits<Real>::infinity();
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      const Real a = blocking(u, i);
      if (a <= kPivotTol) continue;
      const Real ratio = level(i) / a;
      if (ratio < best ||
          (ratio == best && basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
        best = ratio;
        leave = i;
      }
    }
    return leave;
  }

  // Minimises cost^T z over the columns with allowed[c] set (basic columns
  // are always kept).
  LpStatus run(const Vec& cost, const std::vector<bool>& allowed) {
    const Eigen::Index m = a.rows();
    const Eigen::Index cols = a.cols();
    std::vector<bool> is_basic(static_cast<std::size_t>(cols), false);
    for (Eigen::Index c : basis) is_basic[static_cast<std::size_t>(c)] = true;
    Real best_objective = std::numeric_limits<Real>::infinity();
    int stalled = 0;
    while (true) {
      factor();
      if (pivots > kMaxPivots) return LpStatus::ToleranceFailure;
      Vec cb(m);
      for (Eigen::Index i = 0; i < m; ++i) cb(i) = cost(basis[static_cast<std::size_t>(i)]);
      const Vec y = lu.transpose().solve(cb);

      const Real objective = cb.dot(xb);
      if (objective < best_objective - kCostTol) {
        best_objective = objective;
        stalled = 0;
      } else {
        ++stalled;
      }
      const bool strict = stalled > kStallLimit;

      // Bland order over improving columns. A pivot that is tiny next to its
      // column's largest entry, or that leaves basics further from feasible
      // than before, is undone and the next candidate tried.
      const Real before = infeasibility();
      std::vector<std::pair<Real, std::pair<Eigen::Index, Eigen::Index>>> weak;
      bool improving = false;
      bool moved = false;
      for (Eigen::Index c = 0; c < cols && !moved; ++c) {
        if (!allowed[static_cast<std::size_t>(c)] || is_basic[static_cast<std::size_t>(c)]) continue;
        if (cost(c) - y.dot(a.col(c)) >= -kCostTol) continue;
        improving = true;
        const Vec u = lu.solve(a.col(c));
        const Eigen::Index r = strict || !harris ? min_ratio_row(u) : harris_row(u);
        if (r < 0) return LpStatus::Unbounded;
        const Real quality = std::abs(u(r)) / u.cwiseAbs().maxCoeff();
        if (strict) {
          swap(is_basic, r, c);
          moved = true;
        } else if (quality < kRelPivot) {
          weak.push_back({quality, {c, r}});
        } else {
          moved = try_swap(is_basic, r, c, before);
        }
      }
      if (!improving) return LpStatus::Optimal;
      if (!moved) {
        std::stable_sort(weak.begin(), weak.end(), [](const auto& l, const auto& r) { return l.first > r.first; });
        for (const auto& [quality, cr] : weak) {
          if ((moved = try_swap(is_basic, cr.second, cr.first, before))) break;
        }
      }
      // every candidate hurt feasibility: let the stall counter take over
      if (!moved) stalled = kStallLimit + 1;
    }
  }

  // Largest amount by which a basic sits outside its bounds.
  Real infeasibility() const {
    Real worst = 0;
    for (Eigen::Index i = 0; i < xb.size(); ++i) worst = std::max(worst, is_pinned(i) ? std::abs(xb(i)) : -xb(i));
    return worst;
  }

  void swap(std::vector<bool>& is_basic, Eigen::Index leave, Eigen::Index enter) {
    is_basic[static_cast<std::size_t>(basis[static_cast<std::size_t>(leave)])] = false;
    is_basic[static_cast<std::size_t>(enter)] = true;
    basis[static_cast<std::size_t>(leave)] = enter;
    ++pivots;
  }

  bool try_swap(std::vector<bool>& is_basic, Eigen::Index leave, Eigen::Index enter, Real before) {
    const Eigen::Index old = basis[static_cast<std::size_t>(leave)];
    swap(is_basic, leave, enter);
    factor();
    if (infeasibility() <= std::max<Real>(before, kFeasTol)) return true;
    swap(is_basic, leave, old);
    pivots -= 2;
    factor();
    return false;
  }
};

}  // namespace

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::ToleranceFailure: return "tolerance-failure";
  }
  return "unknown";
}

namespace {

struct Options {
  bool harris;
  bool equilibrate;
  bool precondition;
};

LpSolution solve_with(const LinearProgram& problem, Direction direction, const Options& opt) {
  const std::size_t n = problem.variables;
  if (problem.objective.size() != n || problem.upper_bounds.size() != n) {
    throw std::invalid_argument("solve_lp: objective/bounds size mismatch");
  }
  for (const LpRow& row : problem.rows) {
    if (row.coefficients.size() != n) throw std::invalid_argument("solve_lp: row size mismatch");
  }

  // A <= row followed by a >= row with the same coefficients is a ranged
  // row; it becomes a.x + s = upper with 0 <= s <= upper - lower.
  struct Source {
    std::size_t row;
    bool ranged;
  };
  std::vector<Source> sources;
  for (std::size_t r = 0; r < problem.rows.size(); ++r) {
    const LpRow& row = problem.rows[r];
    if (r + 1 < problem.rows.size() && row.sense == RowSense::LessEqual &&
        problem.rows[r + 1].sense == RowSense::GreaterEqual && problem.rows[r + 1].rhs <= row.rhs &&
        problem.rows[r + 1].coefficients == row.coefficients) {
      sources.push_back({r, true});
      ++r;
    } else {
      sources.push_back({r, false});
    }
  }
  std::size_t ranged = 0;
  for (const Source& src : sources) ranged += src.ranged ? 1 : 0;
  const std::size_t total = n + ranged;

  // column equilibration of the structural variables
  Eigen::VectorXd col_scale = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(total));
  for (std::size_t j = 0; j < n && opt.equilibrate; ++j) {
    double big = 0.0;
    for (const LpRow& row : problem.rows) big = std::max(big, std::abs(row.coefficients[j]));
    if (big > 0.0) col_scale(static_cast<Eigen::Index>(j)) = big;
  }
  std::vector<double> upper(total);
  for (std::size_t j = 0; j < n; ++j) upper[j] = problem.upper_bounds[j] * col_scale(static_cast<Eigen::Index>(j));

  // A box bound is implied by a <= row with non-negative coefficients.
  std::vector<bool> implied(total, false);
  for (const LpRow& row : problem.rows) {
    if (row.sense != RowSense::LessEqual || row.rhs < 0.0) continue;
    if (std::any_of(row.coefficients.begin(), row.coefficients.end(), [](double c) { return c < 0.0; })) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const double c = row.coefficients[j];
      if (c > 0.0 && row.rhs / c <= problem.upper_bounds[j]) implied[j] = true;
    }
  }

  // Normalised rows with b >= 0, scaled to unit max coefficient.
  enum class Kind { Le, Ge, Eq };
  struct Row {
    Vec a;
    Kind kind;
    Real b;
  };
  std::vector<Row> rows;
  LpSolution out;
  auto add_row = [&](Eigen::VectorXd a, Kind kind, double b) {
    const double scale = a.cwiseAbs().maxCoeff();
    if (scale == 0.0) {
      const bool bad = (kind != Kind::Le && b > kFeasTol) || (kind != Kind::Ge && b < -kFeasTol);
      if (bad) out.status = LpStatus::Infeasible;
      return;
    }
    a /= scale;
    b /= scale;
    for (Eigen::Index j = 0; j < a.size(); ++j) {
      if (std::abs(a(j)) < kDropTol) a(j) = 0.0;
    }
    if (b < 0.0 || (b == 0.0 && kind == Kind::Ge)) {
      a = -a;
      b = -b;
      if (kind == Kind::Le) kind = Kind::Ge; else if (kind == Kind::Ge) kind = Kind::Le;
    }
    rows.push_back({a.cast<Real>(), kind, b});
  };
  std::size_t slack_col = n;
  for (const Source& src : sources) {
    const LpRow& row = problem.rows[src.row];
    Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(total));
    for (std::size_t j = 0; j < n; ++j) a(static_cast<Eigen::Index>(j)) = row.coefficients[j] / col_scale(static_cast<Eigen::Index>(j));
    if (src.ranged) {
      a(static_cast<Eigen::Index>(slack_col)) = 1.0;
      upper[slack_col] = row.rhs - problem.rows[src.row + 1].rhs;
      ++slack_col;
      add_row(std::move(a), Kind::Eq, row.rhs);
    } else {
      add_row(std::move(a), row.sense == RowSense::GreaterEqual ? Kind::Ge : Kind::Le, row.rhs);
    }
  }
  for (std::size_t i = 0; i < total; ++i) {
    if (std::isfinite(upper[i]) && !implied[i]) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(total));
      a(static_cast<Eigen::Index>(i)) = 1.0;
      add_row(std::move(a), Kind::Le, upper[i]);
    }
  }
  if (out.status == LpStatus::Infeasible) return out;

  // The equality rows are nearly parallel.  E z = b is the same set as
  // Q^T z = R^-T b for E^T = Q R, and those rows are orthonormal.
  std::vector<std::size_t> eq;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].kind == Kind::Eq) eq.push_back(i);
  }
  if (opt.precondition && eq.size() > 1) {
    const auto k = static_cast<Eigen::Index>(eq.size());
    Mat et(static_cast<Eigen::Index>(total), k);
    Vec b(k);
    for (Eigen::Index c = 0; c < k; ++c) {
      et.col(c) = rows[eq[static_cast<std::size_t>(c)]].a;
      b(c) = rows[eq[static_cast<std::size_t>(c)]].b;
    }
    const Eigen::HouseholderQR<Mat> qr(et);
    const Mat r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    const Vec diag = r.diagonal().cwiseAbs();
    if (diag.minCoeff() > kRankTol * diag.maxCoeff()) {
      const Mat q = qr.householderQ() * Mat::Identity(static_cast<Eigen::Index>(total), k);
      const Vec y = r.transpose().triangularView<Eigen::Lower>().solve(b);
      for (Eigen::Index c = 0; c < k; ++c) {
        Row& row = rows[eq[static_cast<std::size_t>(c)]];
        const Real sign = y(c) < 0 ? -1 : 1;
        row.a = sign * q.col(c);
        row.b = sign * y(c);
      }
    }
  }

  // Standard form: structural | slacks of <= and >= rows | artificials of
  // >= and = rows.
  const auto m = static_cast<Eigen::Index>(rows.size());
  const auto nv = static_cast<Eigen::Index>(total);
  Eigen::Index slack_count = 0;
  Eigen::Index artificial_count = 0;
  for (const Row& r : rows) {
    slack_count += r.kind == Kind::Eq ? 0 : 1;
    artificial_count += r.kind == Kind::Le ? 0 : 1;
  }
  const Eigen::Index first_artificial = nv + slack_count;
  const Eigen::Index cols = first_artificial + artificial_count;
  Revised lp;
  lp.harris = opt.harris;
  lp.a = Mat::Zero(m, cols);
  lp.b.resize(m);
  lp.basis.resize(static_cast<std::size_t>(m));
  lp.pinned.assign(static_cast<std::size_t>(cols), false);
  Eigen::Index next_slack = nv;
  Eigen::Index next_art = first_artificial;
  for (Eigen::Index i = 0; i < m; ++i) {
    const Row& r = rows[static_cast<std::size_t>(i)];
    lp.a.row(i).head(nv) = r.a.transpose();
    lp.b(i) = r.b;
    if (r.kind != Kind::Eq) {
      lp.a(i, next_slack) = r.kind == Kind::Le ? 1.0 : -1.0;
      if (r.kind == Kind::Le) lp.basis[static_cast<std::size_t>(i)] = next_slack;
      ++next_slack;
    }
    if (r.kind != Kind::Le) {
      lp.a(i, next_art) = 1.0;
      lp.basis[static_cast<std::size_t>(i)] = next_art++;
    }
  }

  std::vector<bool> allowed(static_cast<std::size_t>(cols), true);
  if (artificial_count > 0) {
    Vec cost = Vec::Zero(cols);
    cost.tail(artificial_count).setOnes();
    const LpStatus s = lp.run(cost, allowed);
    out.pivots = lp.pivots;
    if (s != LpStatus::Optimal) {
      out.status = LpStatus::ToleranceFailure;
      return out;
    }
    Real infeas = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (lp.basis[static_cast<std::size_t>(i)] >= first_artificial) infeas += std::max<Real>(0, lp.xb(i));
    }
    if (infeas > kFeasTol) {
      out.status = LpStatus::Infeasible;
      return out;
    }
    // artificials left in the basis stay at zero from here on
    for (Eigen::Index c = first_artificial; c < cols; ++c) lp.pinned[static_cast<std::size_t>(c)] = true;
    for (Eigen::Index c = first_artificial; c < cols; ++c) allowed[static_cast<std::size_t>(c)] = false;
  }

  Vec cost = Vec::Zero(cols);
  const double sign = direction == Direction::Maximize ? -1.0 : 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    cost(static_cast<Eigen::Index>(i)) = sign * problem.objective[i] / col_scale(static_cast<Eigen::Index>(i));
  }
  const LpStatus s = lp.run(cost, allowed);
  out.pivots = lp.pivots;
  if (s != LpStatus::Optimal) {
    out.status = s;
    return out;
  }

  out.x.assign(n, 0.0);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index c = lp.basis[static_cast<std::size_t>(i)];
    if (c < static_cast<Eigen::Index>(n)) {
      out.x[static_cast<std::size_t>(c)] = static_cast<double>(std::max<Real>(0, lp.xb(i))) / col_scale(c);
    }
  }
  for (std::size_t i = 0; i < n; ++i) out.x[i] = std::min(out.x[i], problem.upper_bounds[i]);
  out.value = 0.0;
  for (std::size_t i = 0; i < n; ++i) out.value += problem.objective[i] * out.x[i];

  // verify against the rows as given
  double worst = 0.0;
  for (const LpRow& row : problem.rows) {
    double lhs = 0.0;
    for (std::size_t i = 0; i < n; ++i) lhs += row.coefficients[i] * out.x[i];
    const double v = row.sense == RowSense::LessEqual ? lhs - row.rhs : row.rhs - lhs;
    worst = std::max(worst, v);
  }
  out.max_violation = worst;
  out.status = worst <= kCheckTol ? LpStatus::Optimal : LpStatus::ToleranceFailure;
  return out;
}

}  // namespace

// Numerical trouble shows up as a failed final check; the same problem is
// then tried under other pivoting and scaling choices, in a fixed order.
LpSolution solve_lp(const LinearProgram& problem, Direction direction) {
  static constexpr Options kLadder[] = {
      {true, true, true}, {false, true, true}, {true, true, false}, {true, false, true}, {false, false, false},
  };
  LpSolution best;
  for (const Options& opt : kLadder) {
    LpSolution s = solve_with(problem, direction, opt);
    if (s.status != LpStatus::ToleranceFailure) return s;
    if (best.x.empty() || (!s.x.empty() && s.max_violation < best.max_violation)) best = std::move(s);
  }
  return best;
}

}  // namespace photonbound
