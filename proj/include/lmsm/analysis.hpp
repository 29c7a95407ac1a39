#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lmsm/series.hpp"
#include "lmsm/stable_rng.hpp"

namespace lmsm {

/// max |A - B| over the common grid. Throws DomainMismatchError.
double sup_norm_diff(const FieldSample& a, const FieldSample& b);

struct ConvergenceStudyConfig {
  FieldPart which = FieldPart::hf;  // hf or lf
  double alpha = 1.5;
  double a = 0.75;  // v range [a,b]
  double b = 0.75;
  std::vector<int> J_list;
  int replicates = 16;
  std::uint64_t seed = 1;
  /// The pair (J, J+1) is compared on u = i / 2^{J + extra_levels}, i = 0..2^{J + extra_levels}.
  int extra_levels = 1;
  std::size_t nv = 1;
  Summation method = Summation::abel;
};

inline constexpr int kMinReplicates = 8;

struct ConvergenceReport {
  FieldPart which = FieldPart::hf;
  double alpha = 1.5;
  double a = 0.0;
  double b = 0.0;
  std::vector<int> J_list;
  std::vector<std::uint64_t> seeds;
  std::vector<std::vector<double>> norms;  // norms[iJ][replicate] = sup |X^{J+1} - X^J|
  std::vector<double> medians;
  std::optional<double> fitted_slope;  // log2(median) vs J; absent for a single J
  double theoretical_slope = 0.0;
  std::string grid_spec;

  bool within(double tolerance) const;
};

/// Consecutive-depth sup-grid differences on consistent-mode pyramids, one per seed.
/// The hf difference is row J alone and is evaluated with hf_row_on_dyadic_grid.
/// Theoretical slope: -(a - 1/alpha) for hf, -(1 - b) for lf.
ConvergenceReport convergence_study(const ConvergenceStudyConfig& config);

void write_convergence_csv(std::ostream& out, const ConvergenceReport& report);
std::string convergence_summary(const ConvergenceReport& report, double tolerance = 0.15);

/// Ordinary least-squares slope of y on x.
double least_squares_slope(std::span<const double> x, std::span<const double> y);
double median(std::vector<double> values);

/// SaS scale of the hf field: (int_0^u (u-s)^{alpha v - 1} ds)^{1/alpha} = u^v (alpha v)^{-1/alpha}.
double x1_theoretical_scale(double u, double v, double alpha);
/// Same quantity by quadrature of the kernel's L^alpha norm.
double x1_theoretical_scale_quadrature(double u, double v, double alpha);
/// SaS scale of the lf field: (int_0^inf ((u+s)^p - s^p)^alpha ds)^{1/alpha}, p = v - 1/alpha.
double x2_theoretical_scale(double u, double v, double alpha);

/// E|S| for a standard symmetric alpha-stable S: 2 Gamma(1 - 1/alpha) / pi.
double stable_abs_moment(double alpha);

inline constexpr std::size_t kMinScaleSamples = 1000;

/// mean(|x|) / E|S|; needs at least kMinScaleSamples samples.
double estimate_scale(std::span<const double> samples, double alpha);

/// sup_{j,k} |lambda_{j,k}| / [(1+j)^{1/a} log^{1/a+eta}(3+j) (1+k)^{1/a} log^{1/a+eta}(3+k)]
/// over hf rows, and the lf analogue with k^{1/a} log^{1/a+eta}(2+k).
struct GrowthDiagnostic {
  double hf_sup = 0.0;
  double lf_sup = 0.0;
};
GrowthDiagnostic coefficient_growth_diagnostic(const PrefixSums& prefix, double alpha, double eta);

/// The diagnostic over many seeds. Soft alarm (stabilized == false) when the
/// median over the second half of the seeds differs from the first half by
/// more than a factor 2.
struct GrowthStability {
  std::vector<double> hf_sups;
  double first_half_median = 0.0;
  double second_half_median = 0.0;
  bool stabilized = true;
};
GrowthStability growth_stability(double alpha, int J_hf, int J_lf, CoefficientMode mode, std::uint64_t seed,
                                 int seeds, double eta);

struct ScalePoint {
  double u = 0.0;
  double v = 0.0;
};

struct MarginalScaleConfig {
  FieldPart which = FieldPart::hf;  // hf or lf
  double alpha = 1.5;
  int J = 14;
  int replicates = 20000;
  std::uint64_t seed = 1;
  CoefficientMode mode = CoefficientMode::consistent;
  std::vector<ScalePoint> points;
};

struct MarginalScaleResult {
  ScalePoint point;
  double estimated = 0.0;
  double theoretical = 0.0;
  double relative_error = 0.0;  // estimated / theoretical - 1
};

/// Monte Carlo of X1^J or X2^J at fixed points, one pyramid per replicate
/// (seed + r), compared against the theoretical scale.
std::vector<MarginalScaleResult> marginal_scale_study(const MarginalScaleConfig& config);

void write_scale_csv(std::ostream& out, const MarginalScaleConfig& config,
                     std::span<const MarginalScaleResult> results);

}  // namespace lmsm
