#pragma once

#include <functional>
#include <span>

namespace lmsm {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

struct QuadratureOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  int max_intervals = 200000;
};

/// Globally adaptive Gauss-Kronrod (7/15) quadrature on [a,b]: the interval
/// with the largest error estimate is bisected until the summed estimate meets
/// max(abs_tol, rel_tol*|I|). Throws QuadratureError if the interval budget runs out.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& options = {});

/// Same, over consecutive segments [breaks[i], breaks[i+1]]; tolerances are split evenly.
QuadratureResult integrate(const std::function<double(double)>& f, std::span<const double> breaks,
                           const QuadratureOptions& options = {});

}  // namespace lmsm
