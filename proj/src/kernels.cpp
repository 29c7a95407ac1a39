#include "lmsm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "lmsm/errors.hpp"
#include "lmsm/quadrature.hpp"

namespace lmsm {

namespace {

constexpr int kMaxSeriesTerms = 400;
constexpr double kSeriesTolerance = 1e-18;

// x^e * sum_{n >= 2} binom(e, n) (1 - 2^{1-n}) (-1/x)^n
// which equals (x-1)^e - 2 (x-1/2)^e + x^e for x > 1.
double second_difference_series(double x, double e) {
  const double z = -1.0 / x;
  double coeff = e * (e - 1.0) / 2.0;  // binom(e, 2)
  double zn = z * z;
  double factor = 0.5;                 // 1 - 2^{1-n} at n = 2
  double sum = 0.0;
  for (int n = 2; n < kMaxSeriesTerms; ++n) {
    const double term = coeff * factor * zn;
    sum += term;
    if (std::fabs(term) <= kSeriesTolerance * std::fabs(sum)) break;
    coeff *= (e - n) / (n + 1.0);
    zn *= z;
    factor = 1.0 - 0.5 * (1.0 - factor);
  }
  return std::pow(x, e) * sum;
}

// x^e * sum_{n >= 3} binom(e, n) (-1/(2x))^n sum_l d_l l^n,
// which equals sum_l d_l (x - l/2)^e for x > 2.
double five_term_series(double x, double e) {
  const double z = -0.5 / x;
  double coeff = e * (e - 1.0) * (e - 2.0) / 6.0;  // binom(e, 3)
  double zn = z * z * z;
  double pow3 = 27.0;
  double pow4 = 64.0;
  double sum = 0.0;
  for (int n = 3; n < kMaxSeriesTerms; ++n) {
    // d = (1, -2, 0, 2, -1): moment sum is -2 + 2*3^n - 4^n.
    const double moment = -2.0 + 2.0 * pow3 - pow4;
    const double term = coeff * moment * zn;
    sum += term;
    if (std::fabs(term) <= kSeriesTolerance * std::fabs(sum)) break;
    coeff *= (e - n) / (n + 1.0);
    zn *= z;
    pow3 *= 3.0;
    pow4 *= 4.0;
  }
  return std::pow(x, e) * sum;
}

// (s + h)_+^e - (s)_+^e
double power_increment(double s, double h, double e) {
  if (s > 0.0) return std::pow(s, e) * std::expm1(e * std::log1p(h / s));
  return truncated_power(s + h, e);
}

constexpr std::array<double, 4> kGaussNodes{0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                            0.9602898564975363};
constexpr std::array<double, 4> kGaussWeights{0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                              0.1012285362903763};

void validate_v(double v, double alpha) {
  if (!(v > 1.0 / alpha && v < 1.0)) {
    throw ParameterError("v must lie in (1/alpha, 1) = (" + std::to_string(1.0 / alpha) + ", 1), got " +
                         std::to_string(v));
  }
}

}  // namespace

void KernelParams::validate() const {
  if (!(alpha > 1.0 && alpha < 2.0)) throw ParameterError("alpha must lie in (1,2), got " + std::to_string(alpha));
  if (!(switch_x >= 4.0)) throw ParameterError("switch_x must be >= 4");
}

double truncated_power(double s, double kappa) { return s > 0.0 ? std::pow(s, kappa) : 0.0; }

HaarKernel::HaarKernel(double v, const KernelParams& params)
    : v_(v), p_(v - 1.0 / params.alpha), q_(1.0 + p_), switch_x_(params.switch_x) {
  params.validate();
  validate_v(v, params.alpha);
}

double HaarKernel::theta_direct(double x) const {
  return (truncated_power(x - 1.0, q_) - 2.0 * truncated_power(x - 0.5, q_) + truncated_power(x, q_)) / q_;
}

double HaarKernel::dtheta_direct(double x) const {
  return truncated_power(x - 1.0, p_) - 2.0 * truncated_power(x - 0.5, p_) + truncated_power(x, p_);
}

double HaarKernel::theta(double x) const {
  if (x <= 0.0) return 0.0;
  if (x > switch_x_) return second_difference_series(x, q_) / q_;
  return theta_direct(x);
}

double HaarKernel::big_theta(double x) const {
  if (x <= 0.0) return 0.0;
  if (x > switch_x_) return five_term_series(x, q_) / q_;
  return theta_direct(x) - theta_direct(x - 1.0);
}

double HaarKernel::dtheta_dx(double x) const {
  if (x <= 0.0) return 0.0;
  if (x > switch_x_) return second_difference_series(x, p_);
  return dtheta_direct(x);
}

double HaarKernel::dbig_theta_dx(double x) const {
  if (x <= 0.0) return 0.0;
  if (x > switch_x_) return five_term_series(x, p_);
  return dtheta_direct(x) - dtheta_direct(x - 1.0);
}

template <std::size_t N>
double HaarKernel::increment(const std::array<double, N>& weights, double x, double h) const {
  const bool five = N == 5;
  const auto value = [&](double s) { return five ? big_theta(s) : theta(s); };
  const auto slope = [&](double s) { return five ? dbig_theta_dx(s) : dtheta_dx(s); };
  if (h == 0.0) return 0.0;
  if (h >= 0.25 * std::fabs(x)) return value(x + h) - value(x);
  if (x > switch_x_) {
    // Smooth region: 8-point Gauss-Legendre on the derivative.
    const double mid = x + 0.5 * h, half = 0.5 * h;
    double sum = 0.0;
    for (std::size_t i = 0; i < kGaussNodes.size(); ++i) {
      sum += kGaussWeights[i] * (slope(mid - half * kGaussNodes[i]) + slope(mid + half * kGaussNodes[i]));
    }
    return half * sum;
  }
  double sum = 0.0;
  for (std::size_t l = 0; l < N; ++l) {
    if (weights[l] != 0.0) sum += weights[l] * power_increment(x - 0.5 * static_cast<double>(l), h, q_);
  }
  return sum / q_;
}

double HaarKernel::theta_increment(double x, double h) const {
  static constexpr std::array<double, 3> w{1.0, -2.0, 1.0};
  return increment(w, x, h);
}

double HaarKernel::big_theta_increment(double x, double h) const {
  static constexpr std::array<double, 5> w{1.0, -2.0, 0.0, 2.0, -1.0};
  return increment(w, x, h);
}

double theta(double x, double v, const KernelParams& params) { return HaarKernel(v, params).theta(x); }

double big_theta(double x, double v, const KernelParams& params) { return HaarKernel(v, params).big_theta(x); }

double dtheta_dx(double x, double v, const KernelParams& params) { return HaarKernel(v, params).dtheta_dx(x); }

double dbig_theta_dx(double x, double v, const KernelParams& params) {
  return HaarKernel(v, params).dbig_theta_dx(x);
}

double theta_quadrature_oracle(double x, double v, double alpha) {
  KernelParams{alpha}.validate();
  validate_v(v, alpha);
  if (x <= 0.0) return 0.0;
  const double p = v - 1.0 / alpha;
  const auto haar = [](double s) { return s < 0.5 ? 1.0 : -1.0; };
  const auto integrand = [&](double s) { return truncated_power(x - s, p) * haar(s); };

  // Breaks at the Haar jump and at the derivative singularity s = x.
  std::vector<double> breaks{0.0};
  const double upper = std::min(x, 1.0);
  if (0.5 < upper) breaks.push_back(0.5);
  if (x > 0.0 && x < 1.0 && x != 0.5) {
    breaks.push_back(x);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.push_back(upper);
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  QuadratureOptions options;
  options.abs_tol = 1e-12;
  options.rel_tol = 0.0;
  return integrate(integrand, breaks, options).value;
}

}  // namespace lmsm
