#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "lmsm/analysis.hpp"
#include "lmsm/errors.hpp"
#include "lmsm/stable_rng.hpp"

using namespace lmsm;

namespace {

// Chambers-Mallows-Stuck, beta = 0, written out from the textbook form and fed
// by the standard library generator.
double cms_oracle(double alpha, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = 0.0;
  while (u == 0.0) u = unif(gen);
  const double V = std::numbers::pi * (u - 0.5);
  double e = 0.0;
  while (e == 0.0) e = unif(gen);
  const double W = -std::log(e);
  const double a = std::sin(alpha * V) / std::pow(std::cos(V), 1.0 / alpha);
  const double b = std::pow(std::cos(V - alpha * V) / W, (1.0 - alpha) / alpha);
  return a * b;
}

double quantile(std::vector<double> x, double q) {
  const auto i = static_cast<std::size_t>(q * static_cast<double>(x.size() - 1));
  std::nth_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(i), x.end());
  return x[i];
}

std::vector<double> abs_values(std::vector<double> x) {
  for (double& v : x) v = std::abs(v);
  return x;
}

}  // namespace

TEST_CASE("sample_sas matches an independent CMS oracle in |X| quantiles") {
  constexpr double alpha = 1.5;
  constexpr std::size_t n = 1000000;
  std::vector<double> ours(n);
  fill_sas(StableLaw{alpha, 1.0}, CounterRng(7), 0, ours);

  std::mt19937_64 gen(20240611);
  std::vector<double> oracle(n);
  for (double& x : oracle) x = cms_oracle(alpha, gen);

  ours = abs_values(ours);
  oracle = abs_values(oracle);
  const double m_ours = quantile(ours, 0.5);
  const double m_oracle = quantile(oracle, 0.5);
  CHECK(std::abs(m_ours / m_oracle - 1.0) < 0.01);
  for (double q : {0.25, 0.75, 0.9}) {
    CHECK(std::abs(quantile(ours, q) / quantile(oracle, q) - 1.0) < 0.03);
  }
}

TEST_CASE("empirical characteristic function is exp(-(sigma t)^alpha)") {
  for (double alpha : {1.2, 1.5, 1.8}) {
    const double sigma = 0.7;
    std::vector<double> x(100000);
    fill_sas(StableLaw{alpha, sigma}, CounterRng(11), 0, x);
    for (double t : {0.5, 1.0, 2.0}) {
      double acc = 0.0;
      for (double v : x) acc += std::cos(t * v);
      const double phi = acc / static_cast<double>(x.size());
      CHECK(std::abs(phi - std::exp(-std::pow(sigma * t, alpha))) < 0.01);
    }
  }
}

TEST_CASE("sample_sas is scale-linear and deterministic in the draw index") {
  const CounterRng rng(3, 9);
  for (std::uint64_t i : {0ull, 1ull, 1000ull, 123456789ull}) {
    const double unit = sample_sas(StableLaw{1.5, 1.0}, rng, i);
    CHECK(sample_sas(StableLaw{1.5, 2.5}, rng, i) == 2.5 * unit);
    CHECK(sample_sas(StableLaw{1.5, 1.0}, rng, i) == unit);
  }

  std::vector<double> block(64);
  fill_sas(StableLaw{1.3, 1.0}, rng, 100, block);
  RandomStream stream(rng, 100);
  for (double v : block) CHECK(sample_sas(StableLaw{1.3, 1.0}, stream) == v);
  CHECK(stream.position() == 164);

  // Reverse order gives the same draws.
  for (std::size_t i = block.size(); i-- > 0;) {
    CHECK(sample_sas(StableLaw{1.3, 1.0}, rng, 100 + i) == block[i]);
  }
}

TEST_CASE("distinct seeds and streams give distinct draws") {
  const StableLaw law{1.5, 1.0};
  CHECK(sample_sas(law, CounterRng(1), 0) != sample_sas(law, CounterRng(2), 0));
  CHECK(sample_sas(law, CounterRng(1, 0), 0) != sample_sas(law, CounterRng(1, 1), 0));
}

TEST_CASE("uniforms lie in the open unit interval") {
  const CounterRng rng(0);
  double lo = 1.0;
  double hi = 0.0;
  for (std::uint64_t c = 0; c < 200000; ++c) {
    const double u = rng.uniform(c);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  CHECK(standard_sas_from_uniforms(1.5, 0.5, 0.3) == 0.0);
}

TEST_CASE("stable law validation") {
  CHECK_THROWS_AS(StableLaw({1.5, 0.0}).validate(), ParameterError);
  CHECK_THROWS_AS(StableLaw({1.5, -1.0}).validate(), ParameterError);
  CHECK_THROWS_AS(StableLaw({1.0, 1.0}).validate(), ParameterError);
  CHECK_THROWS_AS(StableLaw({2.0, 1.0}).validate(), ParameterError);
  CHECK_THROWS_AS(sample_sas(StableLaw{1.5, 0.0}, CounterRng(1), 0), ParameterError);
  CHECK_NOTHROW(StableLaw({1.01, 1e-300}).validate());
}

TEST_CASE("Levy grid anchoring and extent") {
  const CounterRng rng(5);
  const LevyGrid g = build_levy_grid(1.5, -2.0, 1.0, 3, rng);
  CHECK(g.size() == 25);
  CHECK(g.at(0.0) == 0.0);
  CHECK(g.t_min() == -2.0);
  CHECK(g.t_max() == 1.0);

  const LevyGrid single = build_levy_grid(1.5, 0.0, 0.0, 4, rng);
  REQUIRE(single.size() == 1);
  CHECK(single.values[0] == 0.0);

  CHECK_THROWS_AS(build_levy_grid(1.5, 0.0, 0.3, 2, rng), ParameterError);
  CHECK_THROWS_AS(build_levy_grid(1.5, 0.5, 1.0, 2, rng), ParameterError);
  CHECK_THROWS_AS(build_levy_grid(1.5, 0.0, 1.0, -1, rng), ParameterError);
  CHECK_THROWS_AS(g.at(0.0625), ParameterError);
  CHECK_THROWS_AS(g.at(2.0), ResolutionError);
}

TEST_CASE("overlapping Levy grids from one stream agree bit for bit") {
  const CounterRng rng(17);
  const LevyGrid a = build_levy_grid(1.7, -1.0, 1.0, 5, rng);
  const LevyGrid b = build_levy_grid(1.7, -0.5, 2.0, 5, rng);
  for (std::int64_t tick = -16; tick <= 32; ++tick) CHECK(a.at_tick(tick) == b.at_tick(tick));
}

TEST_CASE("one-step increments have scale 2^{-level/alpha}") {
  constexpr double alpha = 1.5;
  const LevyGrid g = build_levy_grid(alpha, 0.0, 100000.0 / 16.0, 4, CounterRng(23));
  std::vector<double> inc(g.size() - 1);
  for (std::size_t i = 0; i + 1 < g.size(); ++i) inc[i] = g.values[i + 1] - g.values[i];
  const double expected = std::pow(1.0 / 16.0, 1.0 / alpha);
  CHECK(std::abs(estimate_scale(inc, alpha) / expected - 1.0) < 0.05);
}

TEST_CASE("sparse path values have the law of Z at their ticks") {
  constexpr double alpha = 1.5;
  const int level = 5;
  const std::vector<std::int64_t> ticks = lf_levy_ticks(level);
  const std::vector<std::int64_t> probes{-1, -16, -32, -512};
  std::vector<std::vector<double>> samples(probes.size());
  for (std::uint64_t seed = 0; seed < 4000; ++seed) {
    const SparseLevyPath p = build_sparse_levy_path(alpha, level, ticks, CounterRng(seed));
    for (std::size_t i = 0; i < probes.size(); ++i) samples[i].push_back(p.at_tick(probes[i]));
  }
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const double t = std::ldexp(static_cast<double>(-probes[i]), -level);
    CHECK(std::abs(estimate_scale(samples[i], alpha) / std::pow(t, 1.0 / alpha) - 1.0) < 0.1);
  }

  const SparseLevyPath p = build_sparse_levy_path(alpha, level, {-4, 0, -4, 3}, CounterRng(1));
  CHECK(p.size() == 3);
  CHECK(p.at_tick(0) == 0.0);
  CHECK_THROWS_AS(p.at_tick(-1), ResolutionError);
  CHECK_THROWS_AS(build_sparse_levy_path(alpha, level, {-2, -1}, CounterRng(1)), ParameterError);
}

TEST_CASE("zeta is the scaled second difference") {
  LevyGrid g;
  g.alpha = 1.5;
  g.level = 1;
  g.first_tick = 0;
  g.last_tick = 2;
  g.values = {0.0, 0.3, -1.1};  // Z(0), Z(1/2), Z(1)
  CHECK(zeta_from_levy(g, 0, 0) == doctest::Approx(2 * 0.3 - (-1.1)));
  CHECK_THROWS_AS(zeta_from_levy(g, 1, 0), ResolutionError);
  CHECK_THROWS_AS(zeta_from_levy(g, 0, 1), ResolutionError);

  LevyGrid affine;
  affine.alpha = 1.3;
  affine.level = 6;
  affine.first_tick = -64;
  affine.last_tick = 64;
  for (std::int64_t t = affine.first_tick; t <= affine.last_tick; ++t) {
    affine.values.push_back(2.5 * std::ldexp(static_cast<double>(t), -6));
  }
  for (int j = 0; j <= 5; ++j) {
    const std::int64_t n = std::int64_t{1} << j;
    for (std::int64_t k = -n; k < n; ++k) {
      CHECK(std::abs(zeta_from_levy(affine, j, k)) <= 1e-12);
    }
  }
}

TEST_CASE("zeta rows of a consistent pyramid have unit scale") {
  constexpr double alpha = 1.5;
  const CoefficientPyramid pyr = generate_coefficients(alpha, 18, 2, CoefficientMode::consistent, 99);
  CHECK(std::abs(estimate_scale(pyr.hf_row(17), alpha) - 1.0) < 0.05);
  CHECK(std::abs(estimate_scale(pyr.hf_row(14), alpha) - 1.0) < 0.05);

  const CoefficientPyramid lf = generate_coefficients(alpha, 1, 16, CoefficientMode::consistent, 99);
  std::vector<double> pooled;
  for (int j : {-1, 0, 1}) pooled.insert(pooled.end(), lf.lf_row(j).begin(), lf.lf_row(j).end());
  CHECK(pooled.size() == 131072);
  CHECK(std::abs(estimate_scale(pooled, alpha) - 1.0) < 0.05);
}

TEST_CASE("pyramid index sets") {
  const CoefficientPyramid pyr = generate_coefficients(1.5, 1, 2, CoefficientMode::consistent, 1);
  CHECK(pyr.hf.size() == 1);
  CHECK(pyr.hf_row(0).size() == 1);
  CHECK(pyr.lf_row(-1).size() == 2);
  CHECK(pyr.lf_row(0).size() == 4);
  CHECK(pyr.lf_row(1).size() == 2);
  CHECK_THROWS_AS(pyr.hf_row(1), DepthError);
  CHECK_THROWS_AS(pyr.lf_row(2), DepthError);

  for (CoefficientMode mode : {CoefficientMode::consistent, CoefficientMode::independent}) {
    for (int J_hf : {1, 3, 7}) {
      for (int J_lf : {2, 4, 6}) {
        const CoefficientPyramid p = generate_coefficients(1.4, J_hf, J_lf, mode, 2);
        for (int j = 0; j < J_hf; ++j) CHECK(p.hf_row(j).size() == (std::size_t{1} << j));
        for (int j = 1 - J_lf; j < J_lf; ++j) {
          CHECK(p.lf_row(j).size() == (std::size_t{1} << (J_lf - std::abs(j))));
        }
      }
    }
  }

  CHECK_THROWS_AS(generate_coefficients(1.5, 0, 2, CoefficientMode::consistent, 1), ParameterError);
  CHECK_THROWS_AS(generate_coefficients(1.5, 1, 1, CoefficientMode::consistent, 1), ParameterError);
  CHECK_THROWS_AS(generate_coefficients(2.0, 1, 2, CoefficientMode::consistent, 1), ParameterError);
  CHECK_THROWS_AS(generate_coefficients(1.5, 12, 6, CoefficientMode::consistent, 1, {1000}), BudgetError);
  CHECK_NOTHROW(generate_coefficients(1.5, 12, 6, CoefficientMode::consistent, 1));
}

TEST_CASE("consistent pyramids are second differences of the shared Levy paths") {
  constexpr double alpha = 1.6;
  const int J_hf = 6;
  const int J_lf = 4;
  const std::uint64_t seed = 31;
  const CoefficientPyramid pyr = generate_coefficients(alpha, J_hf, J_lf, CoefficientMode::consistent, seed);

  const CounterRng root(seed);
  const LevyGrid pos = build_levy_grid(alpha, 0.0, 1.0, J_hf, root.substream(kStreamPositiveGrid));
  CHECK(pyr.z1 == pos.at(1.0));
  for (int j = 0; j < J_hf; ++j) {
    for (std::size_t k = 0; k < pyr.hf_row(j).size(); ++k) {
      CHECK(pyr.hf_row(j)[k] == zeta_from_levy(pos, j, static_cast<std::int64_t>(k)));
    }
  }

  const SparseLevyPath neg =
      build_sparse_levy_path(alpha, J_lf, lf_levy_ticks(J_lf), root.substream(kStreamNegativePath));
  for (int j = 1 - J_lf; j < J_lf; ++j) {
    const auto row = pyr.lf_row(j);
    for (std::size_t k = 1; k <= row.size(); ++k) {
      CHECK(row[k - 1] == zeta_from_levy(neg, j, -static_cast<std::int64_t>(k)));
    }
  }
}

TEST_CASE("pyramid generation is deterministic") {
  for (CoefficientMode mode : {CoefficientMode::consistent, CoefficientMode::independent}) {
    const CoefficientPyramid a = generate_coefficients(1.5, 8, 5, mode, 77);
    const CoefficientPyramid b = generate_coefficients(1.5, 8, 5, mode, 77);
    CHECK(a.hf == b.hf);
    CHECK(a.lf == b.lf);
    CHECK(a.z1 == b.z1);
    const CoefficientPyramid c = generate_coefficients(1.5, 8, 5, mode, 78);
    CHECK(a.hf != c.hf);
  }
}

TEST_CASE("prefix sums follow the row conventions") {
  CoefficientPyramid pyr = generate_coefficients(1.5, 4, 3, CoefficientMode::independent, 4);
  for (auto& row : pyr.hf) std::fill(row.begin(), row.end(), 1.0);
  const PrefixSums ones = prefix_sums(pyr);
  for (int j = 0; j < 4; ++j) {
    for (std::size_t k = 0; k < ones.hf_row(j).size(); ++k) CHECK(ones.hf_row(j)[k] == static_cast<double>(k + 1));
  }

  const CoefficientPyramid p = generate_coefficients(1.5, 5, 4, CoefficientMode::consistent, 8);
  const PrefixSums s = prefix_sums(p);
  for (int j = 0; j < 5; ++j) {
    CHECK(s.hf_row(j)[0] == p.hf_row(j)[0]);
    double acc = 0.0;
    for (std::size_t k = 0; k < p.hf_row(j).size(); ++k) {
      acc += p.hf_row(j)[k];
      CHECK(s.hf_row(j)[k] == acc);
    }
  }
  for (int j = -3; j <= 3; ++j) {
    CHECK(s.lf_row(j)[0] == p.lf_row(j)[0]);
    double acc = 0.0;
    for (std::size_t k = 0; k < p.lf_row(j).size(); ++k) {
      acc += p.lf_row(j)[k];
      CHECK(s.lf_row(j)[k] == acc);
    }
  }
  CHECK_THROWS_AS(s.hf_row(5), DepthError);
}

TEST_CASE("prefix sums of a row have the law of Z(k+1)") {
  constexpr double alpha = 1.5;
  const std::vector<std::size_t> ks{0, 3, 15, 31};
  std::vector<std::vector<double>> samples(ks.size());
  for (std::uint64_t seed = 0; seed < 3000; ++seed) {
    const CoefficientPyramid p = generate_coefficients(alpha, 6, 2, CoefficientMode::consistent, seed);
    const PrefixSums s = prefix_sums(p);
    for (std::size_t i = 0; i < ks.size(); ++i) samples[i].push_back(s.hf_row(5)[ks[i]]);
  }
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double expected = std::pow(static_cast<double>(ks[i] + 1), 1.0 / alpha);
    CHECK(std::abs(estimate_scale(samples[i], alpha) / expected - 1.0) < 0.1);
  }
}

TEST_CASE("pyramid container round trip") {
  for (CoefficientMode mode : {CoefficientMode::consistent, CoefficientMode::independent}) {
    const CoefficientPyramid p = generate_coefficients(1.45, 6, 4, mode, 1234);
    std::stringstream buf;
    write_pyramid(buf, p);
    const CoefficientPyramid q = read_pyramid(buf);
    CHECK(q.alpha == p.alpha);
    CHECK(q.J_hf == p.J_hf);
    CHECK(q.J_lf == p.J_lf);
    CHECK(q.mode == p.mode);
    CHECK(q.seed == p.seed);
    CHECK(q.z1 == p.z1);
    CHECK(q.hf == p.hf);
    CHECK(q.lf == p.lf);
  }

  std::stringstream bad("NOTAPYRAMID.....");
  CHECK_THROWS_AS(read_pyramid(bad), SchemaError);

  const CoefficientPyramid p = generate_coefficients(1.5, 3, 2, CoefficientMode::independent, 1);
  std::stringstream full;
  write_pyramid(full, p);
  std::string bytes = full.str();
  bytes.resize(bytes.size() - 5);
  std::stringstream truncated(bytes);
  CHECK_THROWS_AS(read_pyramid(truncated), SchemaError);
}

TEST_CASE("mode names") {
  CHECK(parse_coefficient_mode("consistent") == CoefficientMode::consistent);
  CHECK(parse_coefficient_mode(to_string(CoefficientMode::independent)) == CoefficientMode::independent);
  CHECK_THROWS_AS(parse_coefficient_mode("iid"), ParameterError);
}
