#pragma once

#include <Eigen/Core>

namespace oactl {

/// K(s) = gain * (s + zero) / (s + pole). zero == pole gives a static gain,
/// pole == 0 a PI block.
struct FirstOrderParams {
  double gain = 1.0;
  double zero = 1.0;
  double pole = 1.0;

  static FirstOrderParams static_gain(double k) { return {k, 1.0, 1.0}; }
  static FirstOrderParams proportional_integral(double k, double zero) { return {k, zero, 0.0}; }

  bool is_static() const { return zero == pole; }
  /// Infinite for a PI block.
  double dc_gain() const;
  void validate() const;
};

/// Per-channel Tustin discretization of a FirstOrderParams block.
class FirstOrderBlock {
 public:
  FirstOrderBlock() = default;
  FirstOrderBlock(const FirstOrderParams& params, double dt, Eigen::Index channels);

  /// Zero input and zero output history.
  void reset();
  Eigen::VectorXd step(const Eigen::VectorXd& input);

  const FirstOrderParams& params() const { return params_; }

 private:
  FirstOrderParams params_;
  double b0_ = 0.0, b1_ = 0.0, a1_ = 0.0;
  Eigen::VectorXd x_prev_, y_prev_;
};

/// Loop y'' = K_inner(K_outer(r - y) - y'): coefficients (highest power
/// first) of s^2 D_i D_o + N_i D_o s + N_i N_o.
Eigen::VectorXd cascade_characteristic(const FirstOrderParams& outer, const FirstOrderParams& inner);

/// Roots of a polynomial given highest power first.
Eigen::VectorXcd polynomial_roots(const Eigen::VectorXd& coefficients);

bool cascade_is_stable(const FirstOrderParams& outer, const FirstOrderParams& inner);

/// Smallest frequency (rad/s) where |T(jw)| falls below 1/sqrt(2) of its DC
/// value, T being the reference-to-output transfer of the cascade.
double cascade_bandwidth(const FirstOrderParams& outer, const FirstOrderParams& inner);

}  // namespace oactl
