#include "oactl/control_blocks.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace oactl {

namespace {

// Polynomials are stored highest power first.
Eigen::VectorXd poly_mul(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(p.size() + q.size() - 1);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    for (Eigen::Index j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
  }
  return r;
}

Eigen::VectorXd poly_add(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  const Eigen::Index n = std::max(p.size(), q.size());
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
  r.tail(p.size()) += p;
  r.tail(q.size()) += q;
  return r;
}

std::complex<double> poly_eval(const Eigen::VectorXd& p, std::complex<double> s) {
  std::complex<double> v = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) v = v * s + p[i];
  return v;
}

Eigen::VectorXd numerator(const FirstOrderParams& k) { return Eigen::Vector2d(k.gain, k.gain * k.zero); }
Eigen::VectorXd denominator(const FirstOrderParams& k) { return Eigen::Vector2d(1.0, k.pole); }

}  // namespace

double FirstOrderParams::dc_gain() const {
  if (pole == 0.0) return std::numeric_limits<double>::infinity();
  return gain * zero / pole;
}

void FirstOrderParams::validate() const {
  if (!std::isfinite(gain) || !std::isfinite(zero) || !std::isfinite(pole)) {
    throw std::invalid_argument("first-order block: non-finite parameter");
  }
  if (gain <= 0.0) throw std::invalid_argument("first-order block: gain must be positive");
  if (pole < 0.0 || zero <= 0.0) throw std::invalid_argument("first-order block: zero must be positive and pole non-negative");
}

FirstOrderBlock::FirstOrderBlock(const FirstOrderParams& params, double dt, Eigen::Index channels) : params_(params) {
  params.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("first-order block: dt must be positive");
  const double k = 2.0 / dt;
  const double den = k + params.pole;
  b0_ = params.gain * (k + params.zero) / den;
  b1_ = params.gain * (params.zero - k) / den;
  a1_ = (params.pole - k) / den;
  x_prev_ = Eigen::VectorXd::Zero(channels);
  y_prev_ = Eigen::VectorXd::Zero(channels);
}

void FirstOrderBlock::reset() {
  x_prev_.setZero();
  y_prev_.setZero();
}

Eigen::VectorXd FirstOrderBlock::step(const Eigen::VectorXd& input) {
  if (input.size() != x_prev_.size()) throw std::invalid_argument("first-order block: channel count mismatch");
  Eigen::VectorXd y = b0_ * input + b1_ * x_prev_ - a1_ * y_prev_;
  x_prev_ = input;
  y_prev_ = y;
  return y;
}

Eigen::VectorXd cascade_characteristic(const FirstOrderParams& outer, const FirstOrderParams& inner) {
  const Eigen::VectorXd s2 = Eigen::Vector3d(1.0, 0.0, 0.0);
  const Eigen::VectorXd s1 = Eigen::Vector2d(1.0, 0.0);
  const Eigen::VectorXd dd = poly_mul(denominator(inner), denominator(outer));
  Eigen::VectorXd p = poly_mul(s2, dd);
  p = poly_add(p, poly_mul(s1, poly_mul(numerator(inner), denominator(outer))));
  p = poly_add(p, poly_mul(numerator(inner), numerator(outer)));
  return p;
}

Eigen::VectorXcd polynomial_roots(const Eigen::VectorXd& coefficients) {
  Eigen::Index lead = 0;
  while (lead < coefficients.size() && coefficients[lead] == 0.0) ++lead;
  const Eigen::VectorXd p = coefficients.tail(coefficients.size() - lead);
  const Eigen::Index n = p.size() - 1;
  if (n < 1) return Eigen::VectorXcd(0);
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) companion(0, j) = -p[j + 1] / p[0];
  for (Eigen::Index i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  return Eigen::EigenSolver<Eigen::MatrixXd>(companion, false).eigenvalues();
}

bool cascade_is_stable(const FirstOrderParams& outer, const FirstOrderParams& inner) {
  const Eigen::VectorXcd roots = polynomial_roots(cascade_characteristic(outer, inner));
  for (Eigen::Index i = 0; i < roots.size(); ++i) {
    if (!(roots[i].real() < 0.0)) return false;
  }
  return true;
}

double cascade_bandwidth(const FirstOrderParams& outer, const FirstOrderParams& inner) {
  const Eigen::VectorXd num = poly_mul(numerator(inner), numerator(outer));
  const Eigen::VectorXd den = cascade_characteristic(outer, inner);
  auto mag = [&](double w) {
    const std::complex<double> s(0.0, w);
    return std::abs(poly_eval(num, s) / poly_eval(den, s));
  };
  const double target = mag(0.0) / std::sqrt(2.0);
  // Log-spaced scan for the first crossing, then bisection.
  double lo = 1e-4;
  double hi = lo;
  while (hi < 1e6 && mag(hi) >= target) {
    lo = hi;
    hi *= 1.05;
  }
  if (hi >= 1e6) return std::numeric_limits<double>::infinity();
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mag(mid) >= target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace oactl
