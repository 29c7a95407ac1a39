#pragma once

#include <array>

namespace lmsm {

/// Weights of the five-term form Theta(x,v) = (1+p)^{-1} sum_l d_l (x - l/2)_+^{1+p}.
/// They annihilate the moments l^0, l^1, l^2.
inline constexpr std::array<int, 5> kThetaDifferenceWeights{1, -2, 0, 2, -1};

struct KernelParams {
  double alpha = 1.5;
  /// Beyond this x the kernels are evaluated by their large-x binomial series,
  /// which carries out the cancellation of the leading terms analytically.
  double switch_x = 4.0;

  void validate() const;
};

/// (s)_+^kappa: s^kappa for s > 0, and 0 for s <= 0.
double truncated_power(double s, double kappa);

/// Kernel theta and its first difference Theta at a fixed (alpha, v).
/// Construct once per v and evaluate many x; this is the form used in the
/// series inner loops.
class HaarKernel {
 public:
  HaarKernel(double v, const KernelParams& params);

  double v() const { return v_; }
  /// p = v - 1/alpha, the exponent of the moving-average kernel.
  double exponent() const { return p_; }

  double theta(double x) const;
  double big_theta(double x) const;
  double dtheta_dx(double x) const;
  double dbig_theta_dx(double x) const;

  /// theta(x + h) - theta(x) and Theta(x + h) - Theta(x) for h >= 0, computed
  /// without the cancellation of the plain difference when h << x.
  double theta_increment(double x, double h) const;
  double big_theta_increment(double x, double h) const;

 private:
  template <std::size_t N>
  double increment(const std::array<double, N>& weights, double x, double h) const;

  double theta_direct(double x) const;
  double dtheta_direct(double x) const;

  double v_;
  double p_;
  double q_;  // 1 + p
  double switch_x_;
};

/// theta(x,v) = (1+p)^{-1} { (x-1)_+^{1+p} - 2 (x-1/2)_+^{1+p} + (x)_+^{1+p} }.
/// Throws ParameterError unless 1/alpha < v < 1.
double theta(double x, double v, const KernelParams& params);
/// Theta(x,v) = theta(x,v) - theta(x-1,v).
double big_theta(double x, double v, const KernelParams& params);
/// x-derivatives; at kink points the right-limit convention of (s)_+ applies.
double dtheta_dx(double x, double v, const KernelParams& params);
double dbig_theta_dx(double x, double v, const KernelParams& params);

/// Adaptive quadrature of the defining integral  int (x-s)_+^{v-1/alpha} h(s) ds
/// with the Haar mother wavelet h. Independent of the closed form; meant for
/// cross-checking it. Absolute error target 1e-12.
double theta_quadrature_oracle(double x, double v, double alpha);

}  // namespace lmsm
