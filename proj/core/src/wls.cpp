#include "oactl/wls.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "oactl/linprog.hpp"

namespace oactl {

namespace {

constexpr double kActiveTol = 1e-10;
constexpr double kStepTol = 1e-12;

double inf() { return std::numeric_limits<double>::infinity(); }

// Rank of the rows of `g` selected by `set`, tested for independence of `extra`.
bool independent(const std::vector<Eigen::RowVectorXd>& rows, const Eigen::RowVectorXd& extra) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size() + 1), extra.size());
  for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i];
  m.row(m.rows() - 1) = extra;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
  qr.setThreshold(1e-10);
  return qr.rank() == m.rows();
}

}  // namespace

const char* to_string(WlsStatus status) {
  switch (status) {
    case WlsStatus::kOptimal:
      return "optimal";
    case WlsStatus::kMaxIterations:
      return "max_iter_reached";
    case WlsStatus::kInfeasible:
      return "infeasible";
  }
  return "unknown";
}

WlsProblem WlsProblem::least_squares(Eigen::MatrixXd a, Eigen::VectorXd b) {
  WlsProblem p;
  const Eigen::Index n = a.cols();
  p.a = std::move(a);
  p.b = std::move(b);
  p.lower = Eigen::VectorXd::Constant(n, -inf());
  p.upper = Eigen::VectorXd::Constant(n, inf());
  p.c.resize(0, n);
  p.d.resize(0);
  return p;
}

double max_violation(const WlsProblem& problem, const Eigen::VectorXd& x) {
  double v = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (std::isfinite(problem.lower[j])) v = std::max(v, problem.lower[j] - x[j]);
    if (std::isfinite(problem.upper[j])) v = std::max(v, x[j] - problem.upper[j]);
  }
  if (problem.c.rows() > 0) v = std::max(v, (problem.c * x - problem.d).maxCoeff());
  return v;
}

void WlsSolver::build_rows(const WlsProblem& problem) {
  const Eigen::Index n = problem.variables();
  rows_.clear();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!std::isfinite(problem.lower[j])) continue;
    Eigen::RowVectorXd g = Eigen::RowVectorXd::Zero(n);
    g[j] = -1.0;
    rows_.push_back({std::move(g), -problem.lower[j], ActiveConstraint::Kind::kLower, j});
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!std::isfinite(problem.upper[j])) continue;
    Eigen::RowVectorXd g = Eigen::RowVectorXd::Zero(n);
    g[j] = 1.0;
    rows_.push_back({std::move(g), problem.upper[j], ActiveConstraint::Kind::kUpper, j});
  }
  for (Eigen::Index r = 0; r < problem.c.rows(); ++r) {
    rows_.push_back({problem.c.row(r), problem.d[r], ActiveConstraint::Kind::kGeneral, r});
  }
}

std::optional<Eigen::VectorXd> WlsSolver::feasible_start(const WlsProblem& problem) const {
  const Eigen::Index n = problem.variables();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (problem.lower[j] > problem.upper[j]) return std::nullopt;
  }
  Eigen::VectorXd x = problem.warm_start.value_or(Eigen::VectorXd::Zero(n));
  for (Eigen::Index j = 0; j < n; ++j) x[j] = std::clamp(x[j], problem.lower[j], problem.upper[j]);
  if (max_violation(problem, x) <= kActiveTol) return x;

  LinearProgram lp = LinearProgram::with_variables(n);
  lp.a_ub = problem.c;
  lp.b_ub = problem.d;
  lp.lower = problem.lower;
  lp.upper = problem.upper;
  const LpResult r = solve_lp(lp);
  if (r.status != LpStatus::kOptimal) return std::nullopt;
  x = r.x;
  for (Eigen::Index j = 0; j < n; ++j) x[j] = std::clamp(x[j], problem.lower[j], problem.upper[j]);
  return x;
}

WlsSolution WlsSolver::solve(const WlsProblem& problem) {
  const Eigen::Index n = problem.variables();
  if (problem.a.rows() != problem.b.size() || problem.lower.size() != n || problem.upper.size() != n ||
      problem.c.cols() != n || problem.c.rows() != problem.d.size()) {
    throw std::invalid_argument("WlsProblem: inconsistent dimensions");
  }

  WlsSolution sol;
  trace_.clear();
  auto start = feasible_start(problem);
  if (!start) return sol;
  Eigen::VectorXd x = std::move(*start);
  build_rows(problem);

  // Working set, kept sorted by row index.
  std::vector<std::size_t> working;
  std::vector<Eigen::RowVectorXd> working_rows;
  for (std::size_t k = 0; k < rows_.size() && static_cast<Eigen::Index>(working.size()) < n; ++k) {
    const double slack = rows_[k].h - rows_[k].g.dot(x);
    if (slack <= kActiveTol * (1.0 + std::abs(rows_[k].h)) && independent(working_rows, rows_[k].g)) {
      working.push_back(k);
      working_rows.push_back(rows_[k].g);
    }
  }

  if (record_trace_) trace_.push_back(problem.objective(x));

  Eigen::VectorXd multipliers;
  auto compute_multipliers = [&](const Eigen::VectorXd& grad, const Eigen::MatrixXd& gt) {
    // G_W^T lambda = -grad
    return Eigen::VectorXd(gt.colPivHouseholderQr().solve(-grad));
  };

  int iter = 0;
  bool optimal = false;
  while (iter < problem.max_iterations) {
    ++iter;
    const auto k = static_cast<Eigen::Index>(working.size());
    Eigen::MatrixXd gt(n, k);
    for (Eigen::Index i = 0; i < k; ++i) gt.col(i) = rows_[working[static_cast<std::size_t>(i)]].g.transpose();

    Eigen::MatrixXd z;
    if (k == 0) {
      z = Eigen::MatrixXd::Identity(n, n);
    } else {
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(gt);
      const Eigen::MatrixXd q = qr.householderQ();
      z = q.rightCols(n - k);
    }

    const Eigen::VectorXd residual = problem.b - problem.a * x;
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
    if (z.cols() > 0) {
      const Eigen::MatrixXd az = problem.a * z;
      const Eigen::VectorXd y = az.colPivHouseholderQr().solve(residual);
      p = z * y;
    }

    if (p.lpNorm<Eigen::Infinity>() <= kStepTol * (1.0 + x.lpNorm<Eigen::Infinity>())) {
      const Eigen::VectorXd grad = -2.0 * problem.a.transpose() * residual;
      if (k == 0) {
        optimal = true;
        multipliers.resize(0);
        break;
      }
      multipliers = compute_multipliers(grad, gt);
      const double tol = 1e-10 * (1.0 + grad.lpNorm<Eigen::Infinity>());
      Eigen::Index drop = -1;
      double most_negative = -tol;
      for (Eigen::Index i = 0; i < k; ++i) {
        if (multipliers[i] < most_negative) {
          most_negative = multipliers[i];
          drop = i;
        }
      }
      if (drop < 0) {
        optimal = true;
        break;
      }
      working.erase(working.begin() + drop);
      working_rows.erase(working_rows.begin() + drop);
      continue;
    }

    double alpha = 1.0;
    std::size_t blocking = rows_.size();
    std::size_t w = 0;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (w < working.size() && working[w] == r) {
        ++w;
        continue;
      }
      const double gp = rows_[r].g.dot(p);
      if (gp <= 1e-14 * p.lpNorm<Eigen::Infinity>()) continue;
      const double step = std::max(0.0, (rows_[r].h - rows_[r].g.dot(x)) / gp);
      if (step < alpha) {
        alpha = step;
        blocking = r;
      }
    }
    x += alpha * p;
    if (blocking < rows_.size()) {
      // Land exactly on simple bounds.
      const auto& row = rows_[blocking];
      if (row.kind == ActiveConstraint::Kind::kLower) x[row.index] = problem.lower[row.index];
      if (row.kind == ActiveConstraint::Kind::kUpper) x[row.index] = problem.upper[row.index];
      const auto pos = std::lower_bound(working.begin(), working.end(), blocking);
      working_rows.insert(working_rows.begin() + (pos - working.begin()), row.g);
      working.insert(pos, blocking);
    }
    if (record_trace_) trace_.push_back(problem.objective(x));
  }

  sol.status = optimal ? WlsStatus::kOptimal : WlsStatus::kMaxIterations;
  sol.iterations = iter;
  sol.residual_norm = (problem.a * x - problem.b).norm();
  for (std::size_t i = 0; i < working.size(); ++i) {
    const auto& row = rows_[working[i]];
    const double mu = (optimal && multipliers.size() == static_cast<Eigen::Index>(working.size()))
                          ? multipliers[static_cast<Eigen::Index>(i)]
                          : 0.0;
    sol.active.push_back({row.kind, row.index, mu});
  }
  sol.x = std::move(x);
  return sol;
}

WlsSolution brute_force_oracle(const WlsProblem& problem) {
  const Eigen::Index n = problem.variables();
  if (n > 8 || problem.c.rows() + 2 * n > 20) {
    throw std::length_error("brute_force_oracle: problem too large to enumerate");
  }

  struct Row {
    Eigen::RowVectorXd g;
    double h;
    ActiveConstraint::Kind kind;
    Eigen::Index index;
  };
  std::vector<Row> rows;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (std::isfinite(problem.lower[j])) {
      Eigen::RowVectorXd g = Eigen::RowVectorXd::Zero(n);
      g[j] = -1.0;
      rows.push_back({g, -problem.lower[j], ActiveConstraint::Kind::kLower, j});
    }
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (std::isfinite(problem.upper[j])) {
      Eigen::RowVectorXd g = Eigen::RowVectorXd::Zero(n);
      g[j] = 1.0;
      rows.push_back({g, problem.upper[j], ActiveConstraint::Kind::kUpper, j});
    }
  }
  for (Eigen::Index r = 0; r < problem.c.rows(); ++r) {
    rows.push_back({problem.c.row(r), problem.d[r], ActiveConstraint::Kind::kGeneral, r});
  }

  const Eigen::MatrixXd hess = 2.0 * problem.a.transpose() * problem.a;
  const Eigen::VectorXd lin = 2.0 * problem.a.transpose() * problem.b;
  const double scale = 1.0 + lin.lpNorm<Eigen::Infinity>();

  WlsSolution best;
  double best_obj = inf();
  const std::uint32_t subsets = 1u << rows.size();
  for (std::uint32_t mask = 0; mask < subsets; ++mask) {
    const int k = std::popcount(mask);
    if (k > n) continue;
    std::vector<std::size_t> idx;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (mask & (1u << r)) idx.push_back(r);
    }
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + k, n + k);
    Eigen::VectorXd rhs(n + k);
    kkt.topLeftCorner(n, n) = hess;
    rhs.head(n) = lin;
    for (int i = 0; i < k; ++i) {
      kkt.block(n + i, 0, 1, n) = rows[idx[static_cast<std::size_t>(i)]].g;
      kkt.block(0, n + i, n, 1) = rows[idx[static_cast<std::size_t>(i)]].g.transpose();
      rhs[n + i] = rows[idx[static_cast<std::size_t>(i)]].h;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (!lu.isInvertible()) continue;
    const Eigen::VectorXd sol = lu.solve(rhs);
    const Eigen::VectorXd x = sol.head(n);
    const Eigen::VectorXd lambda = sol.tail(k);
    if (max_violation(problem, x) > 1e-9 * (1.0 + x.lpNorm<Eigen::Infinity>())) continue;
    if (k > 0 && lambda.minCoeff() < -1e-9 * scale) continue;
    const double obj = problem.objective(x);
    if (obj < best_obj) {
      best_obj = obj;
      best.status = WlsStatus::kOptimal;
      best.x = x;
      best.active.clear();
      for (int i = 0; i < k; ++i) {
        const auto& row = rows[idx[static_cast<std::size_t>(i)]];
        best.active.push_back({row.kind, row.index, lambda[i]});
      }
      best.iterations = 1;
      best.residual_norm = std::sqrt(obj);
    }
  }
  return best;
}

}  // namespace oactl
