#include "lmsm/stable_rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lmsm/errors.hpp"

namespace lmsm {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Upward draws of a sparse path start here so they never collide with downward ones.
constexpr std::uint64_t kUpwardOffset = std::uint64_t{1} << 62;

constexpr int kMaxShift = 62;

std::int64_t checked_shift(std::int64_t value, int shift) {
  if (shift < 0 || shift > kMaxShift) throw ResolutionError("dyadic shift out of range");
  const std::int64_t limit = std::int64_t{1} << (kMaxShift - shift);
  if (value >= limit || value <= -limit) throw ResolutionError("dyadic point out of range");
  return value * (std::int64_t{1} << shift);
}

std::int64_t to_tick(double t, int level, const char* what) {
  const double scaled = std::ldexp(t, level);
  if (!std::isfinite(scaled) || std::nearbyint(scaled) != scaled || std::fabs(scaled) > 0x1p62) {
    throw ParameterError(std::string(what) + " is not a multiple of 2^-level");
  }
  return static_cast<std::int64_t>(scaled);
}

void validate_alpha(double alpha) {
  if (!(alpha > 1.0 && alpha < 2.0)) {
    throw ParameterError("alpha must lie in (1,2), got " + std::to_string(alpha));
  }
}

template <class Path>
double zeta_impl(const Path& path, int j, std::int64_t k) {
  const int shift = path.level - j - 1;
  if (shift < 0) {
    throw ResolutionError("Levy path level " + std::to_string(path.level) +
                          " cannot resolve row j=" + std::to_string(j));
  }
  // Points k/2^j, (k+1/2)/2^j, (k+1)/2^j in ticks of 2^-level.
  const std::int64_t left = checked_shift(2 * k, shift);
  const std::int64_t mid = checked_shift(2 * k + 1, shift);
  const std::int64_t right = checked_shift(2 * k + 2, shift);
  if (!path.contains(left) || !path.contains(mid) || !path.contains(right)) {
    throw ResolutionError("zeta(" + std::to_string(j) + "," + std::to_string(k) +
                          ") references points outside the Levy path");
  }
  const double second_difference = path.at_tick(left) - 2.0 * path.at_tick(mid) + path.at_tick(right);
  return -std::exp2(static_cast<double>(j) / path.alpha) * second_difference;
}

}  // namespace

void StableLaw::validate() const {
  validate_alpha(alpha);
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ParameterError("stable scale must be positive, got " + std::to_string(scale));
  }
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), key_(mix64(seed ^ mix64(stream + 0xD1B54A32D192ED03ULL))) {}

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
  return mix64(mix64(key_ + counter * kGolden) ^ key_);
}

double CounterRng::uniform(std::uint64_t counter) const {
  return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1p-53;
}

double standard_sas_from_uniforms(double alpha, double u_angle, double u_exp) {
  const double angle = std::numbers::pi * (u_angle - 0.5);
  const double w = -std::log(u_exp);
  const double cos_angle = std::cos(angle);
  return std::sin(alpha * angle) / std::pow(cos_angle, 1.0 / alpha) *
         std::pow(std::cos((1.0 - alpha) * angle) / w, (1.0 - alpha) / alpha);
}

double sample_sas(const StableLaw& law, const CounterRng& rng, std::uint64_t index) {
  law.validate();
  return law.scale * standard_sas_from_uniforms(law.alpha, rng.uniform(2 * index), rng.uniform(2 * index + 1));
}

double sample_sas(const StableLaw& law, RandomStream& stream) {
  return sample_sas(law, stream.rng(), stream.advance());
}

void fill_sas(const StableLaw& law, const CounterRng& rng, std::uint64_t index0, std::span<double> out) {
  law.validate();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::uint64_t index = index0 + i;
    out[i] = law.scale * standard_sas_from_uniforms(law.alpha, rng.uniform(2 * index), rng.uniform(2 * index + 1));
  }
}

double LevyGrid::step() const { return std::ldexp(1.0, -level); }

double LevyGrid::at_tick(std::int64_t tick) const {
  if (!contains(tick)) throw ResolutionError("tick outside Levy grid");
  return values[static_cast<std::size_t>(tick - first_tick)];
}

double LevyGrid::at(double t) const { return at_tick(to_tick(t, level, "t")); }

LevyGrid build_levy_grid(double alpha, double t_min, double t_max, int level, const CounterRng& rng) {
  validate_alpha(alpha);
  if (level < 0 || level > 60) throw ParameterError("grid level must lie in [0,60]");
  if (!(t_min <= 0.0 && 0.0 <= t_max)) throw ParameterError("grid must satisfy t_min <= 0 <= t_max");

  LevyGrid grid;
  grid.alpha = alpha;
  grid.level = level;
  grid.first_tick = to_tick(t_min, level, "t_min");
  grid.last_tick = to_tick(t_max, level, "t_max");
  grid.values.assign(static_cast<std::size_t>(grid.last_tick - grid.first_tick + 1), 0.0);

  const StableLaw law{alpha, std::pow(std::ldexp(1.0, -level), 1.0 / alpha)};
  const auto origin = static_cast<std::size_t>(-grid.first_tick);
  for (std::int64_t tick = 0; tick < grid.last_tick; ++tick) {
    const auto i = origin + static_cast<std::size_t>(tick);
    grid.values[i + 1] = grid.values[i] + sample_sas(law, rng, static_cast<std::uint64_t>(tick));
  }
  for (std::int64_t tick = -1; tick >= grid.first_tick; --tick) {
    const auto i = static_cast<std::size_t>(tick - grid.first_tick);
    grid.values[i] = grid.values[i + 1] - sample_sas(law, rng, static_cast<std::uint64_t>(tick));
  }
  return grid;
}

bool SparseLevyPath::contains(std::int64_t tick) const {
  return std::binary_search(ticks.begin(), ticks.end(), tick);
}

double SparseLevyPath::at_tick(std::int64_t tick) const {
  const auto it = std::lower_bound(ticks.begin(), ticks.end(), tick);
  if (it == ticks.end() || *it != tick) throw ResolutionError("tick not on sparse Levy path");
  return values[static_cast<std::size_t>(it - ticks.begin())];
}

SparseLevyPath build_sparse_levy_path(double alpha, int level, std::vector<std::int64_t> ticks,
                                      const CounterRng& rng) {
  validate_alpha(alpha);
  std::sort(ticks.begin(), ticks.end());
  ticks.erase(std::unique(ticks.begin(), ticks.end()), ticks.end());
  const auto zero = std::lower_bound(ticks.begin(), ticks.end(), std::int64_t{0});
  if (zero == ticks.end() || *zero != 0) throw ParameterError("sparse Levy path must contain t = 0");

  SparseLevyPath path;
  path.alpha = alpha;
  path.level = level;
  path.values.assign(ticks.size(), 0.0);
  const auto origin = static_cast<std::size_t>(zero - ticks.begin());
  const double unit = std::ldexp(1.0, -level);

  std::uint64_t draw = 0;
  for (std::size_t i = origin; i-- > 0;) {
    const double gap = static_cast<double>(ticks[i + 1] - ticks[i]) * unit;
    const StableLaw law{alpha, std::pow(gap, 1.0 / alpha)};
    path.values[i] = path.values[i + 1] - sample_sas(law, rng, draw++);
  }
  draw = kUpwardOffset;
  for (std::size_t i = origin + 1; i < ticks.size(); ++i) {
    const double gap = static_cast<double>(ticks[i] - ticks[i - 1]) * unit;
    const StableLaw law{alpha, std::pow(gap, 1.0 / alpha)};
    path.values[i] = path.values[i - 1] + sample_sas(law, rng, draw++);
  }
  path.ticks = std::move(ticks);
  return path;
}

double zeta_from_levy(const LevyGrid& grid, int j, std::int64_t k) { return zeta_impl(grid, j, k); }

double zeta_from_levy(const SparseLevyPath& path, int j, std::int64_t k) { return zeta_impl(path, j, k); }

std::string_view to_string(CoefficientMode mode) {
  return mode == CoefficientMode::consistent ? "consistent" : "independent";
}

CoefficientMode parse_coefficient_mode(std::string_view name) {
  if (name == "consistent") return CoefficientMode::consistent;
  if (name == "independent") return CoefficientMode::independent;
  throw ParameterError("unknown coefficient mode '" + std::string(name) + "'");
}

std::size_t hf_row_length(int j) { return std::size_t{1} << j; }

std::size_t lf_row_length(int J_lf, int j) { return std::size_t{1} << (J_lf - std::abs(j)); }

std::span<const double> CoefficientPyramid::hf_row(int j) const {
  if (j < 0 || j >= J_hf) throw DepthError("hf row " + std::to_string(j) + " outside pyramid");
  return hf[static_cast<std::size_t>(j)];
}

std::span<const double> CoefficientPyramid::lf_row(int j) const {
  if (std::abs(j) >= J_lf) throw DepthError("lf row " + std::to_string(j) + " outside pyramid");
  return lf[static_cast<std::size_t>(j + J_lf - 1)];
}

std::span<const double> PrefixSums::hf_row(int j) const {
  if (j < 0 || j >= J_hf) throw DepthError("hf row " + std::to_string(j) + " outside prefix sums");
  return hf[static_cast<std::size_t>(j)];
}

std::span<const double> PrefixSums::lf_row(int j) const {
  if (std::abs(j) >= J_lf) throw DepthError("lf row " + std::to_string(j) + " outside prefix sums");
  return lf[static_cast<std::size_t>(j + J_lf - 1)];
}

std::vector<std::int64_t> lf_levy_ticks(int J_lf) {
  const int level = J_lf;
  std::vector<std::int64_t> ticks;
  for (int j = 1 - J_lf; j <= J_lf - 1; ++j) {
    const std::int64_t half = std::int64_t{1} << (level - j - 1);
    const auto n = static_cast<std::int64_t>(lf_row_length(J_lf, j));
    for (std::int64_t k = 1; k <= n; ++k) {
      // -k/2^j, (-k+1/2)/2^j, (-k+1)/2^j
      ticks.push_back(-2 * k * half);
      ticks.push_back((-2 * k + 1) * half);
    }
  }
  ticks.push_back(0);
  std::sort(ticks.begin(), ticks.end());
  ticks.erase(std::unique(ticks.begin(), ticks.end()), ticks.end());
  return ticks;
}

CoefficientPyramid generate_coefficients(double alpha, int J_hf, int J_lf, CoefficientMode mode,
                                         std::uint64_t seed, const GenerationOptions& options) {
  validate_alpha(alpha);
  if (J_hf < 1) throw ParameterError("J_hf must be >= 1");
  if (J_lf < 2) throw ParameterError("J_lf must be >= 2");
  if (J_hf > 40 || J_lf > 30) throw BudgetError("pyramid depth exceeds supported range");

  const std::size_t hf_entries = (std::size_t{1} << J_hf) + 1;
  // Each lf row of length n touches at most 2n distinct points; rows sum to < 3 * 2^J_lf.
  std::size_t lf_entries = 1;
  for (int j = 1 - J_lf; j <= J_lf - 1; ++j) lf_entries += 2 * lf_row_length(J_lf, j);
  if (hf_entries > options.entry_budget || lf_entries > options.entry_budget) {
    throw BudgetError("pyramid (J_hf=" + std::to_string(J_hf) + ", J_lf=" + std::to_string(J_lf) +
                      ") exceeds entry budget of " + std::to_string(options.entry_budget));
  }

  CoefficientPyramid pyr;
  pyr.alpha = alpha;
  pyr.J_hf = J_hf;
  pyr.J_lf = J_lf;
  pyr.mode = mode;
  pyr.seed = seed;
  pyr.hf.resize(static_cast<std::size_t>(J_hf));
  pyr.lf.resize(static_cast<std::size_t>(2 * J_lf - 1));
  for (int j = 0; j < J_hf; ++j) pyr.hf[static_cast<std::size_t>(j)].resize(hf_row_length(j));
  for (int j = 1 - J_lf; j <= J_lf - 1; ++j) {
    pyr.lf[static_cast<std::size_t>(j + J_lf - 1)].resize(lf_row_length(J_lf, j));
  }

  const CounterRng root(seed);
  if (mode == CoefficientMode::independent) {
    const StableLaw unit{alpha, 1.0};
    for (int j = 0; j < J_hf; ++j) {
      fill_sas(unit, root.substream(kStreamHfRow + static_cast<std::uint64_t>(j)), 0,
               pyr.hf[static_cast<std::size_t>(j)]);
    }
    for (int j = 1 - J_lf; j <= J_lf - 1; ++j) {
      fill_sas(unit, root.substream(kStreamLfRow + static_cast<std::uint64_t>(j + 64)), 0,
               pyr.lf[static_cast<std::size_t>(j + J_lf - 1)]);
    }
    pyr.z1 = sample_sas(unit, root.substream(kStreamZ1), 0);
    return pyr;
  }

  const LevyGrid positive = build_levy_grid(alpha, 0.0, 1.0, J_hf, root.substream(kStreamPositiveGrid));
  for (int j = 0; j < J_hf; ++j) {
    auto& row = pyr.hf[static_cast<std::size_t>(j)];
    for (std::size_t k = 0; k < row.size(); ++k) row[k] = zeta_from_levy(positive, j, static_cast<std::int64_t>(k));
  }
  pyr.z1 = positive.at_tick(positive.last_tick);

  const SparseLevyPath negative =
      build_sparse_levy_path(alpha, J_lf, lf_levy_ticks(J_lf), root.substream(kStreamNegativePath));
  for (int j = 1 - J_lf; j <= J_lf - 1; ++j) {
    auto& row = pyr.lf[static_cast<std::size_t>(j + J_lf - 1)];
    for (std::size_t k = 1; k <= row.size(); ++k) {
      row[k - 1] = zeta_from_levy(negative, j, -static_cast<std::int64_t>(k));
    }
  }
  return pyr;
}

PrefixSums prefix_sums(const CoefficientPyramid& pyramid) {
  PrefixSums sums;
  sums.J_hf = pyramid.J_hf;
  sums.J_lf = pyramid.J_lf;
  auto running = [](const std::vector<double>& row) {
    std::vector<double> out(row.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) out[k] = (acc += row[k]);
    return out;
  };
  sums.hf.reserve(pyramid.hf.size());
  for (const auto& row : pyramid.hf) sums.hf.push_back(running(row));
  sums.lf.reserve(pyramid.lf.size());
  for (const auto& row : pyramid.lf) sums.lf.push_back(running(row));
  return sums;
}

}  // namespace lmsm
