#include "lmsm/series.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <thread>

#include "lmsm/csv.hpp"
#include "lmsm/errors.hpp"

namespace lmsm {

namespace {

// Sum of term(k) for k in [first, last), increasing k.
template <class Term>
double accumulate_row(std::size_t first, std::size_t last, Term term) {
  if (last <= first) return 0.0;
  if (last - first > kPairwiseThreshold) {
    PairwiseSum sum;
    for (std::size_t k = first; k < last; ++k) sum.add(term(k));
    return sum.result();
  }
  double sum = 0.0;
  for (std::size_t k = first; k < last; ++k) sum += term(k);
  return sum;
}

// Number of k >= 0 with x - k > 0, capped at n.
std::size_t positive_count(double x, std::size_t n) {
  if (x <= 0.0) return 0;
  const double c = std::ceil(x);
  return c >= static_cast<double>(n) ? n : static_cast<std::size_t>(c);
}

void check_u(double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw ParameterError("u must lie in [0,1], got " + std::to_string(u));
}

void check_hf_depth(int J, const CoefficientPyramid& pyr, const PrefixSums& prefix) {
  if (J < 0) throw DepthError("truncation depth must be non-negative");
  if (J > pyr.J_hf || J > prefix.J_hf) {
    throw DepthError("hf depth " + std::to_string(J) + " exceeds pyramid depth " + std::to_string(pyr.J_hf));
  }
}

void check_lf_depth(int J, const CoefficientPyramid& pyr, const PrefixSums& prefix) {
  if (J < 0) throw DepthError("truncation depth must be non-negative");
  if (J > pyr.J_lf || J > prefix.J_lf) {
    throw DepthError("lf depth " + std::to_string(J) + " exceeds pyramid depth " + std::to_string(pyr.J_lf));
  }
}

double x1_with_kernel(const HaarKernel& kernel, double u, const CoefficientPyramid& pyr, const PrefixSums& prefix,
                      int J, Summation method) {
  const double v = kernel.v();
  const double q = 1.0 + kernel.exponent();
  double total = truncated_power(u, q) / q * pyr.z1;
  for (int j = 0; j < J; ++j) {
    total += std::exp2(-j * v) * hf_row_sum(kernel, u, j, pyr.hf_row(j), prefix.hf_row(j), method);
  }
  return total;
}

double x2_plus_with_kernel(const HaarKernel& kernel, double u, const CoefficientPyramid& pyr,
                           const PrefixSums& prefix, int J, Summation method) {
  const double v = kernel.v();
  double total = 0.0;
  for (int j = 0; j < J; ++j) {
    const std::size_t n = std::size_t{1} << (J - j);
    total += std::exp2(-j * v) *
             lf_row_sum(kernel, std::ldexp(u, j), n, pyr.lf_row(j), prefix.lf_row(j), method);
  }
  return total;
}

double x2_minus_with_kernel(const HaarKernel& kernel, double u, const CoefficientPyramid& pyr,
                            const PrefixSums& prefix, int J, Summation method) {
  const double v = kernel.v();
  double total = 0.0;
  for (int j = 1; j < J; ++j) {
    const std::size_t n = std::size_t{1} << (J - j);
    total += std::exp2(j * v) *
             lf_row_sum(kernel, std::ldexp(u, -j), n, pyr.lf_row(-j), prefix.lf_row(-j), method);
  }
  return total;
}

}  // namespace

std::string_view to_string(Summation method) { return method == Summation::naive ? "naive" : "abel"; }

Summation parse_summation(std::string_view name) {
  if (name == "naive") return Summation::naive;
  if (name == "abel") return Summation::abel;
  throw ParameterError("unknown summation method '" + std::string(name) + "'");
}

std::string_view to_string(FieldPart part) {
  switch (part) {
    case FieldPart::hf: return "hf";
    case FieldPart::lf_plus: return "lf_plus";
    case FieldPart::lf_minus: return "lf_minus";
    case FieldPart::lf: return "lf";
    case FieldPart::total: return "total";
  }
  return "total";
}

FieldPart parse_field_part(std::string_view name) {
  for (FieldPart part : {FieldPart::hf, FieldPart::lf_plus, FieldPart::lf_minus, FieldPart::lf, FieldPart::total}) {
    if (to_string(part) == name) return part;
  }
  throw ParameterError("unknown field part '" + std::string(name) + "'");
}

double hf_row_sum(const HaarKernel& kernel, double u, int j, std::span<const double> zeta,
                  std::span<const double> lambda, Summation method) {
  const std::size_t n = hf_row_length(j);
  const double x0 = std::ldexp(u, j);
  if (method == Summation::naive) {
    return accumulate_row(0, positive_count(x0, n),
                          [&](std::size_t k) { return zeta[k] * kernel.theta(x0 - static_cast<double>(k)); });
  }
  const double boundary = lambda[n - 1] * kernel.theta(x0 - static_cast<double>(n) + 1.0);
  return boundary + accumulate_row(0, positive_count(x0, n - 1), [&](std::size_t k) {
           return lambda[k] * kernel.big_theta(x0 - static_cast<double>(k));
         });
}

double lf_row_sum(const HaarKernel& kernel, double y, std::size_t n, std::span<const double> zeta,
                  std::span<const double> lambda, Summation method) {
  if (n == 0) return 0.0;
  if (method == Summation::naive) {
    return accumulate_row(1, n + 1, [&](std::size_t k) {
      const double kd = static_cast<double>(k);
      return zeta[k - 1] * kernel.theta_increment(kd, y);
    });
  }
  const double nd = static_cast<double>(n);
  const double boundary = lambda[n - 1] * kernel.theta_increment(nd, y);
  return boundary - accumulate_row(2, n + 1, [&](std::size_t k) {
           const double kd = static_cast<double>(k);
           return lambda[k - 2] * kernel.big_theta_increment(kd, y);
         });
}

std::vector<double> hf_row_on_dyadic_grid(const HaarKernel& kernel, int j, std::span<const double> zeta, int r) {
  if (j < 0 || r < 0 || j + r > 30) throw ParameterError("dyadic grid level out of range");
  const std::size_t n = hf_row_length(j);
  if (zeta.size() < n) throw DepthError("hf row shorter than 2^j");
  const std::size_t phases = std::size_t{1} << r;
  // table[c][m] = theta(m + c / 2^r)
  std::vector<std::vector<double>> table(phases, std::vector<double>(n + 1));
  for (std::size_t c = 0; c < phases; ++c)
    for (std::size_t m = 0; m <= n; ++m)
      table[c][m] = kernel.theta(static_cast<double>(m) + std::ldexp(static_cast<double>(c), -r));
  const double scale = std::exp2(-j * kernel.v());
  std::vector<double> out(n * phases + 1, 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::size_t a = i >> r;
    const auto& t = table[i & (phases - 1)];
    const std::size_t last = std::min(a, n - 1);
    double s = 0.0;
    for (std::size_t k = 0; k <= last; ++k) s += zeta[k] * t[a - k];
    out[i] = scale * s;
  }
  return out;
}

double x1_partial(double u, double v, const CoefficientPyramid& pyr, const PrefixSums& prefix, int J,
                  Summation method) {
  check_u(u);
  check_hf_depth(J, pyr, prefix);
  return x1_with_kernel(HaarKernel(v, KernelParams{pyr.alpha}), u, pyr, prefix, J, method);
}

double x2_plus_partial(double u, double v, const CoefficientPyramid& pyr, const PrefixSums& prefix, int J,
                       Summation method) {
  check_u(u);
  check_lf_depth(J, pyr, prefix);
  return x2_plus_with_kernel(HaarKernel(v, KernelParams{pyr.alpha}), u, pyr, prefix, J, method);
}

double x2_minus_partial(double u, double v, const CoefficientPyramid& pyr, const PrefixSums& prefix, int J,
                        Summation method) {
  check_u(u);
  check_lf_depth(J, pyr, prefix);
  return x2_minus_with_kernel(HaarKernel(v, KernelParams{pyr.alpha}), u, pyr, prefix, J, method);
}

double x2_partial(double u, double v, const CoefficientPyramid& pyr, const PrefixSums& prefix, int J,
                  Summation method) {
  check_u(u);
  check_lf_depth(J, pyr, prefix);
  const HaarKernel kernel(v, KernelParams{pyr.alpha});
  return x2_plus_with_kernel(kernel, u, pyr, prefix, J, method) +
         x2_minus_with_kernel(kernel, u, pyr, prefix, J, method);
}

double SeriesWeights::apply(const CoefficientPyramid& pyr) const {
  if (static_cast<int>(hf.size()) > pyr.J_hf) throw DepthError("weights deeper than pyramid (hf)");
  if (J_lf > pyr.J_lf) throw DepthError("weights deeper than pyramid (lf)");
  double total = z1 * pyr.z1;
  for (std::size_t j = 0; j < hf.size(); ++j) {
    const auto row = pyr.hf_row(static_cast<int>(j));
    const auto& w = hf[j];
    double s = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * row[k];
    total += s;
  }
  for (int j = 1 - J_lf; j <= J_lf - 1; ++j) {
    const auto row = pyr.lf_row(j);
    const auto& w = lf[static_cast<std::size_t>(j + J_lf - 1)];
    double s = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * row[k];
    total += s;
  }
  return total;
}

SeriesWeights x1_weights(double u, double v, double alpha, int J) {
  check_u(u);
  if (J < 0) throw DepthError("truncation depth must be non-negative");
  const HaarKernel kernel(v, KernelParams{alpha});
  const double q = 1.0 + kernel.exponent();
  SeriesWeights w;
  w.z1 = truncated_power(u, q) / q;
  w.hf.resize(static_cast<std::size_t>(J));
  for (int j = 0; j < J; ++j) {
    const double x0 = std::ldexp(u, j);
    const double scale = std::exp2(-j * v);
    auto& row = w.hf[static_cast<std::size_t>(j)];
    row.resize(positive_count(x0, hf_row_length(j)));
    for (std::size_t k = 0; k < row.size(); ++k) row[k] = scale * kernel.theta(x0 - static_cast<double>(k));
  }
  return w;
}

SeriesWeights x2_weights(double u, double v, double alpha, int J) {
  check_u(u);
  if (J < 0) throw DepthError("truncation depth must be non-negative");
  const HaarKernel kernel(v, KernelParams{alpha});
  SeriesWeights w;
  w.J_lf = J;
  if (J == 0) return w;
  w.lf.resize(static_cast<std::size_t>(2 * J - 1));
  for (int j = 1 - J; j <= J - 1; ++j) {
    const double y = std::ldexp(u, j);
    const double scale = std::exp2(-j * v);
    auto& row = w.lf[static_cast<std::size_t>(j + J - 1)];
    row.resize(lf_row_length(J, j));
    for (std::size_t k = 1; k <= row.size(); ++k) {
      const double kd = static_cast<double>(k);
      row[k - 1] = scale * kernel.theta_increment(kd, y);
    }
  }
  return w;
}

EvalDomain EvalDomain::uniform(std::size_t nu, double a, double b, std::size_t nv) {
  EvalDomain d;
  d.a = a;
  d.b = b;
  for (std::size_t i = 0; i < nu; ++i) d.u_grid.push_back(nu == 1 ? 0.0 : static_cast<double>(i) / (nu - 1.0));
  for (std::size_t i = 0; i < nv; ++i) {
    d.v_grid.push_back(nv == 1 ? a : a + (b - a) * static_cast<double>(i) / (nv - 1.0));
  }
  if (nv > 1) d.v_grid.back() = b;
  return d;
}

void EvalDomain::validate(double alpha) const {
  if (!(1.0 / alpha < a && a <= b && b < 1.0)) {
    throw ParameterError("domain requires 1/alpha < a <= b < 1");
  }
  if (u_grid.empty() || v_grid.empty()) throw ParameterError("evaluation grid is empty");
  for (double u : u_grid) check_u(u);
  for (double v : v_grid) {
    if (!(v >= a && v <= b)) throw ParameterError("v grid value outside [a,b]");
  }
}

double evaluate_point(double u, double v, const CoefficientPyramid& pyr, const PrefixSums& prefix, FieldPart which,
                      Depth depth, Summation method) {
  switch (which) {
    case FieldPart::hf: return x1_partial(u, v, pyr, prefix, depth.hf, method);
    case FieldPart::lf_plus: return x2_plus_partial(u, v, pyr, prefix, depth.lf, method);
    case FieldPart::lf_minus: return x2_minus_partial(u, v, pyr, prefix, depth.lf, method);
    case FieldPart::lf: return x2_partial(u, v, pyr, prefix, depth.lf, method);
    case FieldPart::total:
      return x1_partial(u, v, pyr, prefix, depth.hf, method) + x2_partial(u, v, pyr, prefix, depth.lf, method);
  }
  return 0.0;
}

FieldSample evaluate_field(const EvalDomain& domain, const CoefficientPyramid& pyr, const PrefixSums& prefix,
                           FieldPart which, Depth depth, Summation method, unsigned threads) {
  domain.validate(pyr.alpha);
  FieldSample field;
  field.domain = domain;
  field.which = which;
  field.depth = depth;
  const std::size_t nu = domain.u_grid.size();
  const std::size_t nv = domain.v_grid.size();
  field.values.assign(nu * nv, 0.0);

  auto sweep = [&](std::size_t begin, std::size_t end) {
    for (std::size_t iu = begin; iu < end; ++iu)
      for (std::size_t iv = 0; iv < nv; ++iv)
        field.values[iu * nv + iv] =
            evaluate_point(domain.u_grid[iu], domain.v_grid[iv], pyr, prefix, which, depth, method);
  };

  const std::size_t workers = std::clamp<std::size_t>(threads, 1, nu);
  if (workers == 1) {
    sweep(0, nu);
    return field;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        sweep(w * nu / workers, (w + 1) * nu / workers);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return field;
}

void write_field_csv(std::ostream& out, const FieldSample& field) {
  out << "u\\v";
  for (double v : field.domain.v_grid) out << ',' << format_double(v);
  out << '\n';
  for (std::size_t iu = 0; iu < field.nu(); ++iu) {
    out << format_double(field.domain.u_grid[iu]);
    for (std::size_t iv = 0; iv < field.nv(); ++iv) out << ',' << format_double(field.at(iu, iv));
    out << '\n';
  }
}

}  // namespace lmsm
