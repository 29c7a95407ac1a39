#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "lmsm/kernels.hpp"
#include "lmsm/stable_rng.hpp"

namespace lmsm {

enum class Summation { naive, abel };
enum class FieldPart { hf, lf_plus, lf_minus, lf, total };

std::string_view to_string(Summation method);
Summation parse_summation(std::string_view name);
std::string_view to_string(FieldPart part);
FieldPart parse_field_part(std::string_view name);

/// Tree summation driven by a binary counter: O(log n) partial sums, no buffer.
class PairwiseSum {
 public:
  void add(double x) {
    int level = 0;
    for (std::uint64_t c = count_; c & 1u; c >>= 1) x += partial_[static_cast<std::size_t>(level++)];
    partial_[static_cast<std::size_t>(level)] = x;
    ++count_;
  }
  double result() const {
    double sum = 0.0;
    int level = 0;
    for (std::uint64_t c = count_; c != 0; c >>= 1, ++level) {
      if (c & 1u) sum += partial_[static_cast<std::size_t>(level)];
    }
    return sum;
  }

 private:
  std::array<double, 64> partial_{};
  std::uint64_t count_ = 0;
};

/// Rows longer than this are accumulated with PairwiseSum.
inline constexpr std::size_t kPairwiseThreshold = 1024;

/// Inner sum of hf row j (without the 2^{-jv} factor):
///   naive: sum_{k=0}^{2^j-1} zeta_{j,k} theta(2^j u - k)
///   abel:  lambda_{j,2^j-1} theta(2^j u - 2^j + 1) + sum_{k=0}^{2^j-2} lambda_{j,k} Theta(2^j u - k)
double hf_row_sum(const HaarKernel& kernel, double u, int j, std::span<const double> zeta,
                  std::span<const double> lambda, Summation method);

/// Inner sum of an lf row at dilated abscissa y (y = 2^j u), n terms:
///   naive: sum_{k=1}^{n} zeta_{-k} (theta(y+k) - theta(k))
///   abel:  lambda_{-n} (theta(y+n) - theta(n)) - sum_{k=2}^{n} lambda_{-(k-1)} (Theta(y+k) - Theta(k))
double lf_row_sum(const HaarKernel& kernel, double y, std::size_t n, std::span<const double> zeta,
                  std::span<const double> lambda, Summation method);

/// Row j of the hf series, 2^{-jv} sum_k zeta_{j,k} theta(2^j u - k), on the
/// dyadic grid u = i / 2^{j+r}, i = 0..2^{j+r}. Equals X1^{j+1} - X1^j there.
std::vector<double> hf_row_on_dyadic_grid(const HaarKernel& kernel, int j, std::span<const double> zeta, int r = 1);

/// High-frequency partial sum X1^J(u,v).
double x1_partial(double u, double v, const CoefficientPyramid& pyr, const PrefixSums& prefix, int J,
                  Summation method = Summation::abel);
/// Rows j = 0..J-1 of the low-frequency series.
double x2_plus_partial(double u, double v, const CoefficientPyramid& pyr, const PrefixSums& prefix, int J,
                       Summation method = Summation::abel);
/// Rows j = 1-J..-1 of the low-frequency series (empty for J < 2).
double x2_minus_partial(double u, double v, const CoefficientPyramid& pyr, const PrefixSums& prefix, int J,
                        Summation method = Summation::abel);
/// Low-frequency partial sum X2^J(u,v) = plus + minus parts.
double x2_partial(double u, double v, const CoefficientPyramid& pyr, const PrefixSums& prefix, int J,
                  Summation method = Summation::abel);

/// X1^J(u,v) and X2^J(u,v) are linear in the coefficients. These are the
/// weights, for applying one evaluation point to many pyramids.
struct SeriesWeights {
  double z1 = 0.0;
  std::vector<std::vector<double>> hf;  // hf[j][k], trailing zeros dropped
  std::vector<std::vector<double>> lf;  // lf[j + J - 1][k - 1]
  int J_lf = 0;

  double apply(const CoefficientPyramid& pyr) const;
};

SeriesWeights x1_weights(double u, double v, double alpha, int J);
SeriesWeights x2_weights(double u, double v, double alpha, int J);

struct EvalDomain {
  std::vector<double> u_grid;
  std::vector<double> v_grid;
  double a = 0.0;
  double b = 0.0;

  /// nu points uniformly on [0,1] and nv points uniformly on [a,b].
  static EvalDomain uniform(std::size_t nu, double a, double b, std::size_t nv);
  void validate(double alpha) const;
};

struct Depth {
  int hf = 0;
  int lf = 0;
};

struct FieldSample {
  EvalDomain domain;
  FieldPart which = FieldPart::total;
  Depth depth;
  std::vector<double> values;  // row-major: values[iu * nv + iv]

  std::size_t nu() const { return domain.u_grid.size(); }
  std::size_t nv() const { return domain.v_grid.size(); }
  double at(std::size_t iu, std::size_t iv) const { return values[iu * nv() + iv]; }
};

/// Point evaluator selected by `which`; the hf part uses depth.hf, the lf parts depth.lf.
double evaluate_point(double u, double v, const CoefficientPyramid& pyr, const PrefixSums& prefix, FieldPart which,
                      Depth depth, Summation method);

/// Sweeps the grid; `threads` > 1 partitions the u rows across workers.
/// The result does not depend on `threads`.
FieldSample evaluate_field(const EvalDomain& domain, const CoefficientPyramid& pyr, const PrefixSums& prefix,
                           FieldPart which, Depth depth, Summation method = Summation::abel, unsigned threads = 1);

/// CSV: header "u\v" followed by the v values; one row per u.
void write_field_csv(std::ostream& out, const FieldSample& field);

}  // namespace lmsm
