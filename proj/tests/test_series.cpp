#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "lmsm/errors.hpp"
#include "lmsm/series.hpp"

using namespace lmsm;

namespace {

struct Fixture {
  CoefficientPyramid pyr;
  PrefixSums prefix;
  Fixture(double alpha, int J_hf, int J_lf, CoefficientMode mode, std::uint64_t seed)
      : pyr(generate_coefficients(alpha, J_hf, J_lf, mode, seed)), prefix(prefix_sums(pyr)) {}
};

// Low-frequency series written as one double loop over j in (-J, J).
double x2_double_loop(double u, double v, const CoefficientPyramid& pyr, int J) {
  const KernelParams params{pyr.alpha};
  double total = 0.0;
  for (int j = 1 - J; j <= J - 1; ++j) {
    const double y = std::ldexp(u, j);
    const auto n = std::size_t{1} << (J - std::abs(j));
    double row = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      const double kd = static_cast<double>(k);
      row += pyr.lf_row(j)[k - 1] * (theta(y + kd, v, params) - theta(kd, v, params));
    }
    total += std::exp2(-j * v) * row;
  }
  return total;
}

// Sum of |terms|, the natural scale for rounding error of a row sum.
double x1_magnitude(double u, double v, const CoefficientPyramid& pyr, int J) {
  const KernelParams params{pyr.alpha};
  const double q = 1.0 + v - 1.0 / pyr.alpha;
  double total = std::abs(std::pow(u, q) / q * pyr.z1);
  for (int j = 0; j < J; ++j) {
    for (std::size_t k = 0; k < pyr.hf_row(j).size(); ++k) {
      total += std::exp2(-j * v) * std::abs(pyr.hf_row(j)[k] * theta(std::ldexp(u, j) - static_cast<double>(k), v, params));
    }
  }
  return total;
}

}  // namespace

TEST_CASE("all evaluators vanish at u = 0") {
  const Fixture f(1.5, 6, 5, CoefficientMode::consistent, 3);
  for (Summation m : {Summation::naive, Summation::abel}) {
    for (int J = 0; J <= 6; ++J) CHECK(x1_partial(0.0, 0.8, f.pyr, f.prefix, J, m) == 0.0);
    for (int J = 0; J <= 5; ++J) {
      CHECK(x2_plus_partial(0.0, 0.8, f.pyr, f.prefix, J, m) == 0.0);
      CHECK(x2_minus_partial(0.0, 0.8, f.pyr, f.prefix, J, m) == 0.0);
      CHECK(x2_partial(0.0, 0.8, f.pyr, f.prefix, J, m) == 0.0);
    }
  }
}

TEST_CASE("X1 at depth 0 is the leading term") {
  const Fixture f(1.5, 3, 2, CoefficientMode::independent, 9);
  for (double u : {0.1, 0.5, 1.0}) {
    const double v = 0.8;
    const double q = 1.0 + v - 1.0 / 1.5;
    CHECK(x1_partial(u, v, f.pyr, f.prefix, 0) == doctest::Approx(std::pow(u, q) / q * f.pyr.z1).epsilon(1e-15));
  }
}

TEST_CASE("naive and Abel summation agree") {
  std::mt19937_64 gen(101);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (CoefficientMode mode : {CoefficientMode::independent, CoefficientMode::consistent}) {
    const Fixture f(1.5, 10, 8, mode, 5);
    for (int i = 0; i < 50; ++i) {
      const double u = unit(gen);
      const double v = 0.67 + 0.32 * unit(gen);
      const double n1 = x1_partial(u, v, f.pyr, f.prefix, 10, Summation::naive);
      const double a1 = x1_partial(u, v, f.pyr, f.prefix, 10, Summation::abel);
      CHECK(std::abs(n1 - a1) <= 1e-10 * x1_magnitude(u, v, f.pyr, 10));

      const double np = x2_plus_partial(u, v, f.pyr, f.prefix, 8, Summation::naive);
      const double ap = x2_plus_partial(u, v, f.pyr, f.prefix, 8, Summation::abel);
      CHECK(std::abs(np - ap) <= 1e-10 * std::max(std::abs(np), 1e-3));
      const double nm = x2_minus_partial(u, v, f.pyr, f.prefix, 8, Summation::naive);
      const double am = x2_minus_partial(u, v, f.pyr, f.prefix, 8, Summation::abel);
      CHECK(std::abs(nm - am) <= 1e-10 * std::max(std::abs(nm), 1e-3));
    }
  }
}

TEST_CASE("row sums: Abel transform is exact for arbitrary coefficients") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const double alpha = 1.1 + 0.8 * unit(gen);
    const double v = 1.0 / alpha + (1.0 - 1.0 / alpha) * (0.05 + 0.9 * unit(gen));
    const HaarKernel kernel(v, KernelParams{alpha});
    const int j = static_cast<int>(trial % 9);
    const std::size_t n = std::size_t{1} << j;
    std::vector<double> zeta(n);
    std::vector<double> lambda(n);
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      zeta[k] = coef(gen);
      lambda[k] = (acc += zeta[k]);
    }
    const double u = unit(gen);
    double magnitude = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      magnitude += std::abs(zeta[k] * kernel.theta(std::ldexp(u, j) - static_cast<double>(k)));
    }
    const double naive = hf_row_sum(kernel, u, j, zeta, lambda, Summation::naive);
    const double abel = hf_row_sum(kernel, u, j, zeta, lambda, Summation::abel);
    CHECK(std::abs(naive - abel) <= 1e-12 * magnitude + 1e-300);

    const double y = std::ldexp(u, j - 4);
    const double ln = lf_row_sum(kernel, y, n, zeta, lambda, Summation::naive);
    const double la = lf_row_sum(kernel, y, n, zeta, lambda, Summation::abel);
    double lmag = 0.0;
    for (std::size_t k = 1; k <= n; ++k) lmag += std::abs(zeta[k - 1] * kernel.theta_increment(static_cast<double>(k), y));
    CHECK(std::abs(ln - la) <= 1e-12 * lmag + 1e-300);
  }
}

TEST_CASE("low-frequency rows instantiate the series") {
  const KernelParams params{1.6};
  const double v = 0.8;
  const double u = 0.37;
  auto inc = [&](double y, double k) { return theta(y + k, v, params) - theta(k, v, params); };

  Fixture one(1.6, 2, 2, CoefficientMode::independent, 12);
  const double plus1 = one.pyr.lf_row(0)[0] * inc(u, 1.0) + one.pyr.lf_row(0)[1] * inc(u, 2.0);
  CHECK(x2_plus_partial(u, v, one.pyr, one.prefix, 1, Summation::naive) == doctest::Approx(plus1).epsilon(1e-12));

  const double minus2 = std::exp2(v) * (one.pyr.lf_row(-1)[0] * inc(u / 2, 1.0) + one.pyr.lf_row(-1)[1] * inc(u / 2, 2.0));
  CHECK(x2_minus_partial(u, v, one.pyr, one.prefix, 2, Summation::naive) == doctest::Approx(minus2).epsilon(1e-12));
  CHECK(x2_minus_partial(u, v, one.pyr, one.prefix, 1) == 0.0);
  CHECK(x2_minus_partial(u, v, one.pyr, one.prefix, 0) == 0.0);
}

TEST_CASE("X2 is the sum of its two halves and matches the double loop") {
  const Fixture f(1.5, 2, 5, CoefficientMode::independent, 21);
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 30; ++i) {
    const double u = unit(gen);
    const double v = 0.7 + 0.25 * unit(gen);
    const double plus = x2_plus_partial(u, v, f.pyr, f.prefix, 5, Summation::naive);
    const double minus = x2_minus_partial(u, v, f.pyr, f.prefix, 5, Summation::naive);
    CHECK(x2_partial(u, v, f.pyr, f.prefix, 5, Summation::naive) == plus + minus);

    const double direct = x2_double_loop(u, v, f.pyr, 5);
    for (Summation m : {Summation::naive, Summation::abel}) {
      CHECK(std::abs(x2_partial(u, v, f.pyr, f.prefix, 5, m) - direct) <= 1e-10 * std::max(std::abs(direct), 1e-3));
    }
  }
}

TEST_CASE("X1^{J+1} - X1^J is row J") {
  const Fixture f(1.5, 9, 2, CoefficientMode::consistent, 77);
  const double v = 0.8;
  const HaarKernel kernel(v, KernelParams{1.5});
  for (int J : {0, 3, 8}) {
    for (int r : {0, 1, 2}) {
      const std::vector<double> row = hf_row_on_dyadic_grid(kernel, J, f.pyr.hf_row(J), r);
      REQUIRE(row.size() == (std::size_t{1} << (J + r)) + 1);
      double worst = 0.0;
      double scale = 0.0;
      for (std::size_t i = 0; i < row.size(); ++i) {
        const double u = std::ldexp(static_cast<double>(i), -(J + r));
        const double diff = x1_partial(u, v, f.pyr, f.prefix, J + 1, Summation::naive) -
                            x1_partial(u, v, f.pyr, f.prefix, J, Summation::naive);
        worst = std::max(worst, std::abs(diff - row[i]));
        scale = std::max(scale, std::abs(row[i]));
      }
      CHECK(worst <= 1e-10 * std::max(scale, 1.0));
    }
  }
  CHECK_THROWS_AS(hf_row_on_dyadic_grid(kernel, 3, f.pyr.hf_row(2), 1), DepthError);
  CHECK_THROWS_AS(hf_row_on_dyadic_grid(kernel, 25, f.pyr.hf_row(2), 6), ParameterError);
}

TEST_CASE("pairwise summation") {
  PairwiseSum s;
  CHECK(s.result() == 0.0);
  for (int i = 1; i <= 1000; ++i) s.add(static_cast<double>(i));
  CHECK(s.result() == 500500.0);

  PairwiseSum tenths;
  double naive = 0.0;
  const int n = 1 << 20;
  for (int i = 0; i < n; ++i) {
    tenths.add(0.1);
    naive += 0.1;
  }
  const double exact = 0.1L * n;
  CHECK(std::abs(tenths.result() - exact) < std::abs(naive - exact));
  CHECK(std::abs(tenths.result() - exact) < 1e-9);
}

TEST_CASE("long rows agree between pairwise and plain accumulation") {
  const Fixture f(1.5, 13, 11, CoefficientMode::consistent, 8);
  for (double u : {0.3, 0.77}) {
    const double a = x1_partial(u, 0.8, f.pyr, f.prefix, 13, Summation::abel);
    const double n = x1_partial(u, 0.8, f.pyr, f.prefix, 13, Summation::naive);
    CHECK(std::abs(a - n) <= 1e-10 * x1_magnitude(u, 0.8, f.pyr, 13));
    const double pa = x2_partial(u, 0.8, f.pyr, f.prefix, 11, Summation::abel);
    const double pn = x2_partial(u, 0.8, f.pyr, f.prefix, 11, Summation::naive);
    CHECK(std::abs(pa - pn) <= 1e-10 * std::max(std::abs(pn), 1e-3));
  }
}

TEST_CASE("series weights reproduce the evaluators") {
  for (CoefficientMode mode : {CoefficientMode::independent, CoefficientMode::consistent}) {
    const Fixture f(1.5, 8, 6, mode, 55);
    for (double u : {0.0, 0.25, 0.6, 1.0}) {
      for (double v : {0.7, 0.9}) {
        const double x1 = x1_partial(u, v, f.pyr, f.prefix, 8);
        CHECK(x1_weights(u, v, 1.5, 8).apply(f.pyr) == doctest::Approx(x1).epsilon(1e-10).scale(1e-12));
        const double x2 = x2_partial(u, v, f.pyr, f.prefix, 6);
        CHECK(x2_weights(u, v, 1.5, 6).apply(f.pyr) == doctest::Approx(x2).epsilon(1e-10).scale(1e-12));
      }
    }
    CHECK_THROWS_AS(x1_weights(0.5, 0.8, 1.5, 9).apply(f.pyr), DepthError);
    CHECK_THROWS_AS(x2_weights(0.5, 0.8, 1.5, 7).apply(f.pyr), DepthError);
  }
}

TEST_CASE("field sweep") {
  const Fixture f(1.5, 7, 5, CoefficientMode::consistent, 2);
  const EvalDomain single{{0.4}, {0.8}, 0.8, 0.8};
  const FieldSample one = evaluate_field(single, f.pyr, f.prefix, FieldPart::total, {7, 5});
  REQUIRE(one.values.size() == 1);
  CHECK(one.values[0] == evaluate_point(0.4, 0.8, f.pyr, f.prefix, FieldPart::total, {7, 5}, Summation::abel));

  const EvalDomain grid = EvalDomain::uniform(33, 0.7, 0.95, 4);
  CHECK(grid.u_grid.front() == 0.0);
  CHECK(grid.u_grid.back() == 1.0);
  CHECK(grid.v_grid.front() == 0.7);
  CHECK(grid.v_grid.back() == 0.95);
  for (FieldPart which : {FieldPart::hf, FieldPart::lf_plus, FieldPart::lf_minus, FieldPart::lf, FieldPart::total}) {
    const FieldSample serial = evaluate_field(grid, f.pyr, f.prefix, which, {7, 5}, Summation::abel, 1);
    const FieldSample parallel = evaluate_field(grid, f.pyr, f.prefix, which, {7, 5}, Summation::abel, 4);
    CHECK(serial.values == parallel.values);
    for (std::size_t iv = 0; iv < serial.nv(); ++iv) CHECK(serial.at(0, iv) == 0.0);
    for (double x : serial.values) CHECK(std::isfinite(x));
  }

  const FieldSample hf = evaluate_field(grid, f.pyr, f.prefix, FieldPart::hf, {7, 5});
  const FieldSample lf = evaluate_field(grid, f.pyr, f.prefix, FieldPart::lf, {7, 5});
  const FieldSample total = evaluate_field(grid, f.pyr, f.prefix, FieldPart::total, {7, 5});
  for (std::size_t i = 0; i < total.values.size(); ++i) CHECK(total.values[i] == hf.values[i] + lf.values[i]);
}

TEST_CASE("field CSV layout") {
  const Fixture f(1.5, 3, 2, CoefficientMode::consistent, 2);
  const EvalDomain d{{0.0, 0.5, 1.0}, {0.7, 0.9}, 0.7, 0.9};
  const FieldSample s = evaluate_field(d, f.pyr, f.prefix, FieldPart::hf, {3, 2});
  std::ostringstream out;
  write_field_csv(out, s);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "u\\v,0.7,0.9");
  std::getline(in, line);
  CHECK(line == "0,0,0");
  int rows = 1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);
}

TEST_CASE("depth and domain errors") {
  const Fixture f(1.5, 4, 3, CoefficientMode::consistent, 2);
  CHECK_THROWS_AS(x1_partial(0.5, 0.8, f.pyr, f.prefix, 5), DepthError);
  CHECK_THROWS_AS(x1_partial(0.5, 0.8, f.pyr, f.prefix, -1), DepthError);
  CHECK_THROWS_AS(x2_partial(0.5, 0.8, f.pyr, f.prefix, 4), DepthError);
  CHECK_THROWS_AS(x2_plus_partial(0.5, 0.8, f.pyr, f.prefix, 4), DepthError);
  CHECK_THROWS_AS(x1_partial(1.5, 0.8, f.pyr, f.prefix, 2), ParameterError);
  CHECK_THROWS_AS(x1_partial(0.5, 0.6, f.pyr, f.prefix, 2), ParameterError);

  CHECK_THROWS_AS(EvalDomain::uniform(5, 0.6, 0.8, 2).validate(1.5), ParameterError);
  CHECK_THROWS_AS(EvalDomain::uniform(5, 0.8, 0.7, 2).validate(1.5), ParameterError);
  CHECK_THROWS_AS(EvalDomain::uniform(5, 0.7, 1.0, 2).validate(1.5), ParameterError);
  CHECK_THROWS_AS((EvalDomain{{0.5, 1.2}, {0.8}, 0.8, 0.8}).validate(1.5), ParameterError);
  CHECK_THROWS_AS(evaluate_field(EvalDomain::uniform(5, 0.7, 0.8, 2), f.pyr, f.prefix, FieldPart::hf, {5, 3}),
                  DepthError);
}

TEST_CASE("enum names") {
  CHECK(parse_summation("naive") == Summation::naive);
  CHECK(parse_summation(to_string(Summation::abel)) == Summation::abel);
  CHECK_THROWS_AS(parse_summation("kahan"), ParameterError);
  for (FieldPart p : {FieldPart::hf, FieldPart::lf_plus, FieldPart::lf_minus, FieldPart::lf, FieldPart::total}) {
    CHECK(parse_field_part(to_string(p)) == p);
  }
  CHECK_THROWS_AS(parse_field_part("mid"), ParameterError);
}
