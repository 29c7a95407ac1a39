#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lmsm/series.hpp"
#include "lmsm/stable_rng.hpp"

namespace lmsm {

enum class HurstKind { constant, linear, sine, logistic, table };

/// Functional Hurst parameter H(t) on [0,1].
///   constant(h)                          H = h
///   linear(intercept, slope)             H = intercept + slope t
///   sine(amplitude, frequency, offset)   H = amplitude sin(2 pi frequency t) + offset
///   logistic(base, height, rate, center) H = base + height / (1 + exp(rate (t - center)))
///   table(t0, h0, t1, h1, ...)           piecewise linear through the knots
class HurstFunction {
 public:
  static HurstFunction constant(double h);
  static HurstFunction linear(double intercept, double slope);
  static HurstFunction sine(double amplitude, double frequency, double offset);
  static HurstFunction logistic(double base, double height, double rate, double center);
  static HurstFunction table(std::vector<std::pair<double, double>> knots);

  double operator()(double t) const;
  HurstKind kind() const { return kind_; }
  std::span<const double> parameters() const { return params_; }
  /// e.g. "linear(0.9,-0.2)"
  std::string describe() const;

  /// Min and max over t = i / 2^12, i = 0..2^12.
  std::pair<double, double> sampled_range() const;

 private:
  HurstKind kind_ = HurstKind::constant;
  std::vector<double> params_;
};

inline constexpr std::size_t kHurstSamplingPoints = (std::size_t{1} << 12) + 1;
inline constexpr double kHurstMargin = 1e-6;

/// Named preset: "constant", "linear", "sine", "logistic", "table" (t,h pairs).
HurstFunction hurst_preset(std::string_view name, std::span<const double> parameters);
/// "name:p1,p2,..." form used on the command line.
HurstFunction parse_hurst(std::string_view spec);

/// The paper-figure configurations.
struct FigurePreset {
  std::string name;
  double alpha;
  HurstFunction hurst;
  bool allow_boundary;
};
FigurePreset figure_preset(std::string_view name);  // "fig1-row1" .. "fig1-row3"

struct ValidatedConfig {
  double alpha = 1.5;
  HurstFunction hurst;
  double h_min = 0.0;  // sampled range of the raw H
  double h_max = 0.0;
  bool allow_boundary = false;
  bool clamped = false;  // true when some sampled H fell outside the admissible band
  double clamp_low = 0.0;
  double clamp_high = 0.0;

  /// H(t), clamped into [clamp_low, clamp_high] when the boundary override is active.
  double hurst_at(double t) const;
};

/// Accepts iff 1 < alpha < 2 and the sampled range of H lies in
/// (1/alpha + margin, 1 - margin). With allow_boundary, H-range violations are
/// clamped instead of rejected. Every violated constraint is listed in the
/// ParameterError message.
ValidatedConfig validate_params(double alpha, const HurstFunction& hurst, bool allow_boundary = false);

struct PathConfig {
  double alpha = 1.5;
  HurstFunction hurst = HurstFunction::constant(0.75);
  int J_hf = 12;
  int J_lf = 6;
  std::uint64_t seed = 0;
  CoefficientMode mode = CoefficientMode::consistent;
  Summation method = Summation::abel;
  bool allow_boundary = false;
};

struct PathSample {
  std::vector<double> t;
  std::vector<double> y1;
  std::vector<double> y2;
  std::vector<double> y;
  PathConfig config;
  ValidatedConfig validated;
};

/// 2^J_hf + 1 uniform points on [0,1].
std::vector<double> default_time_grid(int J_hf);

/// Y1(t) = X1^{J_hf}(t, H(t)), Y2(t) = X2^{J_lf}(t, H(t)), Y = Y1 + Y2.
PathSample synthesize_path(const PathConfig& config, std::span<const double> t_grid);
/// Same, reusing an already generated pyramid (must match config.alpha and be deep enough).
PathSample synthesize_path(const PathConfig& config, std::span<const double> t_grid,
                           const CoefficientPyramid& pyramid, const PrefixSums& prefix);

/// One-line JSON object with the full effective configuration.
std::string config_json(const PathSample& path);
/// "# config: {...}" then "t,y1,y2,y" rows.
void write_path_csv(std::ostream& out, const PathSample& path);

}  // namespace lmsm
