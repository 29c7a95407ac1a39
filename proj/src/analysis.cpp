#include "lmsm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "lmsm/csv.hpp"
#include "lmsm/errors.hpp"
#include "lmsm/quadrature.hpp"

namespace lmsm {

namespace {

void check_scale_args(double u, double v, double alpha) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw ParameterError("alpha must lie in (1,2)");
  if (!(v > 1.0 / alpha && v < 1.0)) throw ParameterError("v must lie in (1/alpha,1)");
  if (!(u >= 0.0 && u <= 1.0)) throw ParameterError("u must lie in [0,1]");
}

void check_part(FieldPart which) {
  if (which != FieldPart::hf && which != FieldPart::lf) throw ParameterError("study part must be hf or lf");
}

}  // namespace

double sup_norm_diff(const FieldSample& a, const FieldSample& b) {
  if (a.domain.u_grid != b.domain.u_grid || a.domain.v_grid != b.domain.v_grid ||
      a.values.size() != b.values.size()) {
    throw DomainMismatchError("fields are defined on different grids");
  }
  double sup = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) sup = std::max(sup, std::fabs(a.values[i] - b.values[i]));
  return sup;
}

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw StatisticsError("slope fit needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw StatisticsError("slope fit needs distinct abscissae");
  return sxy / sxx;
}

double median(std::vector<double> values) {
  if (values.empty()) throw StatisticsError("median of an empty sample");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

bool ConvergenceReport::within(double tolerance) const {
  return fitted_slope.has_value() && std::fabs(*fitted_slope - theoretical_slope) <= tolerance;
}

ConvergenceReport convergence_study(const ConvergenceStudyConfig& config) {
  check_part(config.which);
  if (config.replicates < kMinReplicates) {
    throw StatisticsError("convergence study needs at least " + std::to_string(kMinReplicates) + " replicates");
  }
  if (config.J_list.empty()) throw ParameterError("J_list is empty");
  for (std::size_t i = 1; i < config.J_list.size(); ++i) {
    if (config.J_list[i] <= config.J_list[i - 1]) throw ParameterError("J_list must be strictly increasing");
  }
  if (config.J_list.front() < 0) throw ParameterError("J_list entries must be non-negative");

  if (config.extra_levels < 0 || config.J_list.back() + 1 + config.extra_levels > 24) {
    throw ParameterError("dyadic comparison grid out of range");
  }

  const bool hf = config.which == FieldPart::hf;
  const int depth = config.J_list.back() + 1;
  EvalDomain::uniform(2, config.a, config.b, config.nv).validate(config.alpha);

  ConvergenceReport report;
  report.which = config.which;
  report.alpha = config.alpha;
  report.a = config.a;
  report.b = config.b;
  report.J_list = config.J_list;
  report.theoretical_slope = hf ? -(config.a - 1.0 / config.alpha) : -(1.0 - config.b);
  report.norms.assign(config.J_list.size(), std::vector<double>(static_cast<std::size_t>(config.replicates)));
  {
    std::ostringstream spec;
    spec << "u: i/2^(J+" << config.extra_levels << "), i=0..2^(J+" << config.extra_levels << ") per depth pair; v: "
         << config.nv << " points on [" << format_double(config.a) << "," << format_double(config.b) << "]";
    report.grid_spec = spec.str();
  }

  const EvalDomain v_only = EvalDomain::uniform(2, config.a, config.b, config.nv);
  std::vector<HaarKernel> kernels;
  for (double v : v_only.v_grid) kernels.emplace_back(v, KernelParams{config.alpha});

  for (int r = 0; r < config.replicates; ++r) {
    const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(r);
    report.seeds.push_back(seed);
    const CoefficientPyramid pyr = generate_coefficients(config.alpha, hf ? depth : 1, hf ? 2 : std::max(depth, 2),
                                                         CoefficientMode::consistent, seed);
    const PrefixSums prefix = prefix_sums(pyr);
    for (std::size_t i = 0; i < config.J_list.size(); ++i) {
      const int J = config.J_list[i];
      double sup = 0.0;
      if (hf) {
        for (const auto& kernel : kernels) {
          for (double x : hf_row_on_dyadic_grid(kernel, J, pyr.hf_row(J), config.extra_levels)) {
            sup = std::max(sup, std::fabs(x));
          }
        }
      } else {
        const std::size_t nu = (std::size_t{1} << (J + config.extra_levels)) + 1;
        const EvalDomain domain = EvalDomain::uniform(nu, config.a, config.b, config.nv);
        sup = sup_norm_diff(evaluate_field(domain, pyr, prefix, config.which, Depth{J + 1, J + 1}, config.method),
                            evaluate_field(domain, pyr, prefix, config.which, Depth{J, J}, config.method));
      }
      report.norms[i][static_cast<std::size_t>(r)] = sup;
    }
  }

  for (const auto& row : report.norms) report.medians.push_back(median(row));
  if (config.J_list.size() >= 2 &&
      std::all_of(report.medians.begin(), report.medians.end(), [](double m) { return m > 0.0; })) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < config.J_list.size(); ++i) {
      xs.push_back(config.J_list[i]);
      ys.push_back(std::log2(report.medians[i]));
    }
    report.fitted_slope = least_squares_slope(xs, ys);
  }
  return report;
}

void write_convergence_csv(std::ostream& out, const ConvergenceReport& report) {
  out << "# which=" << to_string(report.which) << " alpha=" << format_double(report.alpha)
      << " a=" << format_double(report.a) << " b=" << format_double(report.b) << '\n';
  out << "# grid: " << report.grid_spec << '\n';
  out << "# seeds: " << (report.seeds.empty() ? 0 : report.seeds.front()) << ".."
      << (report.seeds.empty() ? 0 : report.seeds.back()) << '\n';
  out << "J,median";
  for (std::size_t r = 0; r < report.seeds.size(); ++r) out << ",rep" << r;
  out << '\n';
  for (std::size_t i = 0; i < report.J_list.size(); ++i) {
    out << report.J_list[i] << ',' << format_double(report.medians[i]);
    for (double n : report.norms[i]) out << ',' << format_double(n);
    out << '\n';
  }
}

std::string convergence_summary(const ConvergenceReport& report, double tolerance) {
  std::ostringstream s;
  s << "convergence study (" << to_string(report.which) << ", alpha=" << format_double(report.alpha) << ", v in ["
    << format_double(report.a) << "," << format_double(report.b) << "], J=" << report.J_list.front() << ".."
    << report.J_list.back() << ", replicates=" << report.seeds.size() << ")\n";
  s << "grid: " << report.grid_spec << '\n';
  s << "theoretical slope: " << format_fixed(report.theoretical_slope, 4) << '\n';
  if (report.fitted_slope) {
    s << "fitted slope:      " << format_fixed(*report.fitted_slope, 4) << '\n';
    s << "tolerance:         " << format_fixed(tolerance, 2) << '\n';
    s << "result:            " << (report.within(tolerance) ? "PASS" : "FAIL") << '\n';
  } else {
    s << "fitted slope:      n/a (need at least two depths with positive medians)\n";
    s << "result:            NO-SLOPE\n";
  }
  return s.str();
}

double x1_theoretical_scale(double u, double v, double alpha) {
  check_scale_args(u, v, alpha);
  return std::pow(u, v) * std::pow(alpha * v, -1.0 / alpha);
}

double x1_theoretical_scale_quadrature(double u, double v, double alpha) {
  check_scale_args(u, v, alpha);
  if (u == 0.0) return 0.0;
  const double e = alpha * v - 1.0;
  QuadratureOptions options;
  options.abs_tol = 1e-14;
  options.rel_tol = 1e-13;
  const double integral = integrate([&](double s) { return std::pow(u - s, e); }, 0.0, u, options).value;
  return std::pow(integral, 1.0 / alpha);
}

double x2_theoretical_scale(double u, double v, double alpha) {
  check_scale_args(u, v, alpha);
  if (u == 0.0) return 0.0;
  const double p = v - 1.0 / alpha;
  const auto integrand = [&](double s) {
    if (s <= 0.0) return std::pow(std::pow(u, p), alpha);
    const double diff = std::pow(s, p) * std::expm1(p * std::log1p(u / s));
    return std::pow(diff, alpha);
  };
  // Segments [0, u 2^-10], [u 2^-10, u], then doubling out to u 2^60, plus the
  // leading-order tail (p u)^alpha S^{alpha(p-1)+1} / (alpha(1-p) - 1).
  std::vector<double> breaks{0.0, std::ldexp(u, -10)};
  for (int e = 0; e <= 60; ++e) breaks.push_back(std::ldexp(u, e));
  QuadratureOptions options;
  options.abs_tol = 1e-13;
  options.rel_tol = 1e-12;
  const double body = integrate(integrand, breaks, options).value;
  const double cutoff = breaks.back();
  const double decay = alpha * (1.0 - p) - 1.0;
  const double tail = std::pow(p * u, alpha) * std::pow(cutoff, -decay) / decay;
  return std::pow(body + tail, 1.0 / alpha);
}

double stable_abs_moment(double alpha) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw ParameterError("alpha must lie in (1,2)");
  return 2.0 * std::tgamma(1.0 - 1.0 / alpha) / std::numbers::pi;
}

double estimate_scale(std::span<const double> samples, double alpha) {
  if (samples.size() < kMinScaleSamples) {
    throw StatisticsError("scale estimate needs at least " + std::to_string(kMinScaleSamples) + " samples, got " +
                          std::to_string(samples.size()));
  }
  double sum = 0.0;
  for (double x : samples) sum += std::fabs(x);
  return sum / static_cast<double>(samples.size()) / stable_abs_moment(alpha);
}

GrowthDiagnostic coefficient_growth_diagnostic(const PrefixSums& prefix, double alpha, double eta) {
  const double ia = 1.0 / alpha;
  const auto level_weight = [&](double j) { return std::pow(1.0 + j, ia) * std::pow(std::log(3.0 + j), ia + eta); };
  GrowthDiagnostic d;
  for (int j = 0; j < prefix.J_hf; ++j) {
    const auto row = prefix.hf_row(j);
    const double wj = level_weight(j);
    for (std::size_t k = 0; k < row.size(); ++k) {
      const double kd = static_cast<double>(k);
      const double wk = std::pow(1.0 + kd, ia) * std::pow(std::log(3.0 + kd), ia + eta);
      d.hf_sup = std::max(d.hf_sup, std::fabs(row[k]) / (wj * wk));
    }
  }
  for (int j = 1 - prefix.J_lf; j <= prefix.J_lf - 1; ++j) {
    const auto row = prefix.lf_row(j);
    const double wj = level_weight(std::abs(j));
    for (std::size_t k = 1; k <= row.size(); ++k) {
      const double kd = static_cast<double>(k);
      const double wk = std::pow(kd, ia) * std::pow(std::log(2.0 + kd), ia + eta);
      d.lf_sup = std::max(d.lf_sup, std::fabs(row[k - 1]) / (wj * wk));
    }
  }
  return d;
}

GrowthStability growth_stability(double alpha, int J_hf, int J_lf, CoefficientMode mode, std::uint64_t seed,
                                 int seeds, double eta) {
  if (seeds < 2) throw StatisticsError("growth stability needs at least two seeds");
  GrowthStability out;
  for (int s = 0; s < seeds; ++s) {
    const auto pyr = generate_coefficients(alpha, J_hf, J_lf, mode, seed + static_cast<std::uint64_t>(s));
    out.hf_sups.push_back(coefficient_growth_diagnostic(prefix_sums(pyr), alpha, eta).hf_sup);
  }
  const auto half = out.hf_sups.begin() + seeds / 2;
  out.first_half_median = median({out.hf_sups.begin(), half});
  out.second_half_median = median({half, out.hf_sups.end()});
  const double ratio = out.second_half_median / out.first_half_median;
  out.stabilized = ratio >= 0.5 && ratio <= 2.0;
  return out;
}

std::vector<MarginalScaleResult> marginal_scale_study(const MarginalScaleConfig& config) {
  check_part(config.which);
  const bool hf = config.which == FieldPart::hf;
  if (config.replicates < static_cast<int>(kMinScaleSamples)) {
    throw StatisticsError("marginal scale study needs at least " + std::to_string(kMinScaleSamples) + " replicates");
  }
  if (!hf && config.J < 2) throw ParameterError("lf marginal study needs J >= 2");
  if (hf && config.J < 1) throw ParameterError("hf marginal study needs J >= 1");

  std::vector<SeriesWeights> weights;
  for (const auto& p : config.points) {
    weights.push_back(hf ? x1_weights(p.u, p.v, config.alpha, config.J) : x2_weights(p.u, p.v, config.alpha, config.J));
  }
  std::vector<std::vector<double>> samples(config.points.size(),
                                           std::vector<double>(static_cast<std::size_t>(config.replicates)));
  for (int r = 0; r < config.replicates; ++r) {
    const auto pyr = generate_coefficients(config.alpha, hf ? config.J : 1, hf ? 2 : config.J, config.mode,
                                           config.seed + static_cast<std::uint64_t>(r));
    for (std::size_t i = 0; i < weights.size(); ++i) samples[i][static_cast<std::size_t>(r)] = weights[i].apply(pyr);
  }

  std::vector<MarginalScaleResult> results;
  for (std::size_t i = 0; i < config.points.size(); ++i) {
    const auto& p = config.points[i];
    MarginalScaleResult res;
    res.point = p;
    res.estimated = estimate_scale(samples[i], config.alpha);
    res.theoretical = hf ? x1_theoretical_scale(p.u, p.v, config.alpha) : x2_theoretical_scale(p.u, p.v, config.alpha);
    res.relative_error = res.estimated / res.theoretical - 1.0;
    results.push_back(res);
  }
  return results;
}

void write_scale_csv(std::ostream& out, const MarginalScaleConfig& config,
                     std::span<const MarginalScaleResult> results) {
  out << "# which=" << to_string(config.which) << " alpha=" << format_double(config.alpha) << " J=" << config.J
      << " replicates=" << config.replicates << " seed=" << config.seed << " mode=" << to_string(config.mode);
  if (config.mode == CoefficientMode::independent) out << " (approximation: i.i.d. coefficients)";
  out << '\n';
  out << "u,v,estimated,theoretical,relative_error\n";
  for (const auto& r : results) {
    out << format_double(r.point.u) << ',' << format_double(r.point.v) << ',' << format_double(r.estimated) << ','
        << format_double(r.theoretical) << ',' << format_double(r.relative_error) << '\n';
  }
}

}  // namespace lmsm
