#include "oactl/linprog.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <stdexcept>
#include <vector>

namespace oactl {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-10;
constexpr double kFeasTol = 1e-9;

// How an original variable is expressed through nonnegative columns.
struct VariableMap {
  enum Kind { kShiftLower, kFlipUpper, kFree } kind = kShiftLower;
  double offset = 0.0;
  Eigen::Index col = 0;  // first standard-form column
};

class Tableau {
 public:
  Tableau(Eigen::Index rows, Eigen::Index cols) : t_(Eigen::MatrixXd::Zero(rows + 1, cols + 1)), basis_(rows) {}

  Eigen::Index rows() const { return t_.rows() - 1; }
  Eigen::Index cols() const { return t_.cols() - 1; }
  double& a(Eigen::Index r, Eigen::Index c) { return t_(r, c); }
  double& rhs(Eigen::Index r) { return t_(r, cols()); }
  double& cost(Eigen::Index c) { return t_(rows(), c); }
  double& objective() { return t_(rows(), cols()); }
  std::vector<Eigen::Index>& basis() { return basis_; }

  void pivot(Eigen::Index r, Eigen::Index c) {
    const double p = t_(r, c);
    t_.row(r) /= p;
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = c;
  }

  // Runs simplex iterations on the current cost row. Columns >= `allowed`
  // never enter. Dantzig pricing; Bland's rule after a run of degenerate
  // pivots, until progress resumes.
  LpStatus iterate(Eigen::Index allowed, int max_iterations, int& iterations) {
    int degenerate_run = 0;
    while (true) {
      if (iterations >= max_iterations) return LpStatus::kIterationLimit;
      const bool bland = degenerate_run > 20;
      Eigen::Index enter = -1;
      double most_negative = -kCostTol;
      for (Eigen::Index c = 0; c < allowed; ++c) {
        if (cost(c) < most_negative) {
          enter = c;
          if (bland) break;
          most_negative = cost(c);
        }
      }
      if (enter < 0) return LpStatus::kOptimal;
      Eigen::Index leave = -1;
      double best = 0.0;
      for (Eigen::Index r = 0; r < rows(); ++r) {
        const double p = a(r, enter);
        if (p <= kPivotTol) continue;
        const double ratio = std::max(rhs(r), 0.0) / p;
        if (leave < 0 || ratio < best - 1e-12 ||
            (std::abs(ratio - best) <= 1e-12 && basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(leave)])) {
          leave = r;
          best = ratio;
        }
      }
      if (leave < 0) return LpStatus::kUnbounded;
      degenerate_run = best <= 1e-12 ? degenerate_run + 1 : 0;
      pivot(leave, enter);
      ++iterations;
    }
  }

 private:
  Eigen::MatrixXd t_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace

LinearProgram LinearProgram::with_variables(Eigen::Index n) {
  LinearProgram lp;
  lp.c = Eigen::VectorXd::Zero(n);
  lp.a_ub.resize(0, n);
  lp.b_ub.resize(0);
  lp.a_eq.resize(0, n);
  lp.b_eq.resize(0);
  lp.lower = Eigen::VectorXd::Zero(n);
  lp.upper = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  return lp;
}

LpResult solve_lp(const LinearProgram& lp, int max_iterations) {
  const Eigen::Index n = lp.c.size();
  if (lp.a_ub.cols() != n || lp.a_eq.cols() != n || lp.lower.size() != n || lp.upper.size() != n ||
      lp.b_ub.size() != lp.a_ub.rows() || lp.b_eq.size() != lp.a_eq.rows()) {
    throw std::invalid_argument("solve_lp: inconsistent dimensions");
  }

  LpResult result;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (lp.lower[j] > lp.upper[j]) return result;
  }

  // Variable substitution into nonnegative columns.
  std::vector<VariableMap> vars(static_cast<std::size_t>(n));
  Eigen::Index std_cols = 0;
  std::vector<std::pair<Eigen::Index, double>> extra_upper;  // (column, bound)
  for (Eigen::Index j = 0; j < n; ++j) {
    auto& v = vars[static_cast<std::size_t>(j)];
    v.col = std_cols;
    if (std::isfinite(lp.lower[j])) {
      v.kind = VariableMap::kShiftLower;
      v.offset = lp.lower[j];
      if (std::isfinite(lp.upper[j])) extra_upper.emplace_back(std_cols, lp.upper[j] - lp.lower[j]);
      std_cols += 1;
    } else if (std::isfinite(lp.upper[j])) {
      v.kind = VariableMap::kFlipUpper;
      v.offset = lp.upper[j];
      std_cols += 1;
    } else {
      v.kind = VariableMap::kFree;
      std_cols += 2;
    }
  }

  const Eigen::Index n_ub = lp.a_ub.rows() + static_cast<Eigen::Index>(extra_upper.size());
  const Eigen::Index n_eq = lp.a_eq.rows();
  const Eigen::Index m = n_ub + n_eq;

  // Row data in standard columns (before slacks).
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(m, std_cols);
  Eigen::VectorXd rhs(m);
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(std_cols);

  auto scatter = [&](const Eigen::RowVectorXd& coeffs, Eigen::Index r, double b) {
    double shift = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double a = coeffs[j];
      if (a == 0.0) continue;
      const auto& v = vars[static_cast<std::size_t>(j)];
      switch (v.kind) {
        case VariableMap::kShiftLower:
          rows(r, v.col) += a;
          shift += a * v.offset;
          break;
        case VariableMap::kFlipUpper:
          rows(r, v.col) -= a;
          shift += a * v.offset;
          break;
        case VariableMap::kFree:
          rows(r, v.col) += a;
          rows(r, v.col + 1) -= a;
          break;
      }
    }
    rhs[r] = b - shift;
  };

  for (Eigen::Index r = 0; r < lp.a_ub.rows(); ++r) scatter(lp.a_ub.row(r), r, lp.b_ub[r]);
  for (std::size_t k = 0; k < extra_upper.size(); ++k) {
    const auto r = lp.a_ub.rows() + static_cast<Eigen::Index>(k);
    rows(r, extra_upper[k].first) = 1.0;
    rhs[r] = extra_upper[k].second;
  }
  for (Eigen::Index r = 0; r < n_eq; ++r) scatter(lp.a_eq.row(r), n_ub + r, lp.b_eq[r]);

  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& v = vars[static_cast<std::size_t>(j)];
    const double c = lp.c[j];
    switch (v.kind) {
      case VariableMap::kShiftLower:
        cost[v.col] += c;
        break;
      case VariableMap::kFlipUpper:
        cost[v.col] -= c;
        break;
      case VariableMap::kFree:
        cost[v.col] += c;
        cost[v.col + 1] -= c;
        break;
    }
  }

  // Columns: [structural | slacks (n_ub) | artificials (m)].
  const Eigen::Index slack0 = std_cols;
  const Eigen::Index art0 = slack0 + n_ub;
  const Eigen::Index total = art0 + m;
  Tableau tab(m, total);
  for (Eigen::Index r = 0; r < m; ++r) {
    const double sign = rhs[r] < 0.0 ? -1.0 : 1.0;
    for (Eigen::Index c = 0; c < std_cols; ++c) tab.a(r, c) = sign * rows(r, c);
    if (r < n_ub) tab.a(r, slack0 + r) = sign;
    tab.a(r, art0 + r) = 1.0;
    tab.rhs(r) = sign * rhs[r];
    tab.basis()[static_cast<std::size_t>(r)] = art0 + r;
  }

  // Phase 1: minimize the sum of artificials. Reduced costs = -sum of rows.
  for (Eigen::Index c = 0; c < art0; ++c) {
    double s = 0.0;
    for (Eigen::Index r = 0; r < m; ++r) s += tab.a(r, c);
    tab.cost(c) = -s;
  }
  {
    double s = 0.0;
    for (Eigen::Index r = 0; r < m; ++r) s += tab.rhs(r);
    tab.objective() = -s;
  }

  int iterations = 0;
  LpStatus st = tab.iterate(art0, max_iterations, iterations);
  if (st == LpStatus::kIterationLimit) {
    result.status = st;
    result.iterations = iterations;
    return result;
  }
  const double scale = m > 0 ? rhs.cwiseAbs().maxCoeff() : 0.0;
  if (-tab.objective() > kFeasTol * (1.0 + scale)) {
    result.status = LpStatus::kInfeasible;
    result.iterations = iterations;
    return result;
  }

  // Drive remaining artificials out of the basis where possible.
  for (Eigen::Index r = 0; r < m; ++r) {
    if (tab.basis()[static_cast<std::size_t>(r)] < art0) continue;
    for (Eigen::Index c = 0; c < art0; ++c) {
      if (std::abs(tab.a(r, c)) > 1e-9) {
        tab.pivot(r, c);
        break;
      }
    }
  }

  // Phase 2 cost row.
  for (Eigen::Index c = 0; c <= total; ++c) tab.cost(c) = 0.0;
  for (Eigen::Index c = 0; c < std_cols; ++c) tab.cost(c) = cost[c];
  for (Eigen::Index r = 0; r < m; ++r) {
    const Eigen::Index b = tab.basis()[static_cast<std::size_t>(r)];
    const double cb = b < std_cols ? cost[b] : 0.0;
    if (cb == 0.0) continue;
    for (Eigen::Index c = 0; c <= total; ++c) tab.cost(c) -= cb * tab.a(r, c);
  }

  st = tab.iterate(art0, max_iterations, iterations);
  result.iterations = iterations;
  if (st != LpStatus::kOptimal) {
    result.status = st;
    return result;
  }

  Eigen::VectorXd y = Eigen::VectorXd::Zero(total);
  for (Eigen::Index r = 0; r < m; ++r) y[tab.basis()[static_cast<std::size_t>(r)]] = tab.rhs(r);

  result.x.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& v = vars[static_cast<std::size_t>(j)];
    switch (v.kind) {
      case VariableMap::kShiftLower:
        result.x[j] = v.offset + y[v.col];
        break;
      case VariableMap::kFlipUpper:
        result.x[j] = v.offset - y[v.col];
        break;
      case VariableMap::kFree:
        result.x[j] = y[v.col] - y[v.col + 1];
        break;
    }
  }
  result.objective = lp.c.dot(result.x);
  result.status = LpStatus::kOptimal;
  return result;
}

}  // namespace oactl
