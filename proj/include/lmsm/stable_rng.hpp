#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace lmsm {

/// Symmetric alpha-stable law with characteristic function exp(-scale^alpha |t|^alpha).
struct StableLaw {
  double alpha = 1.5;
  double scale = 1.0;

  /// Throws ParameterError unless 1 < alpha < 2 and scale > 0.
  void validate() const;
};

/// Counter-based uniform generator. The value for a counter depends only on
/// (seed, stream, counter), so independent rows or replicates can be drawn in
/// any order, or concurrently, and still reproduce bit for bit.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t bits(std::uint64_t counter) const;
  /// Uniform on the open interval (0,1).
  double uniform(std::uint64_t counter) const;

  CounterRng substream(std::uint64_t stream) const { return CounterRng(seed_, stream); }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
};

/// Sequential cursor over a CounterRng; draw number i consumes counters 2i and 2i+1.
class RandomStream {
 public:
  explicit RandomStream(CounterRng rng, std::uint64_t start = 0) : rng_(rng), next_(start) {}

  std::uint64_t position() const { return next_; }
  const CounterRng& rng() const { return rng_; }
  std::uint64_t advance() { return next_++; }

 private:
  CounterRng rng_;
  std::uint64_t next_;
};

/// Chambers-Mallows-Stuck transform of two (0,1) uniforms into a standard
/// (scale 1) symmetric alpha-stable variate.
double standard_sas_from_uniforms(double alpha, double u_angle, double u_exp);

/// Draw number `index` of the stream; deterministic in (seed, stream, index).
double sample_sas(const StableLaw& law, const CounterRng& rng, std::uint64_t index);
double sample_sas(const StableLaw& law, RandomStream& stream);

/// Fills `out` with draws index0, index0+1, ... of the stream.
void fill_sas(const StableLaw& law, const CounterRng& rng, std::uint64_t index0, std::span<double> out);

/// Z_alpha sampled on the uniform grid t = tick * 2^-level, tick in [first_tick, last_tick].
struct LevyGrid {
  double alpha = 1.5;
  int level = 0;
  std::int64_t first_tick = 0;
  std::int64_t last_tick = 0;
  std::vector<double> values;

  double step() const;
  double t_min() const { return static_cast<double>(first_tick) * step(); }
  double t_max() const { return static_cast<double>(last_tick) * step(); }
  std::size_t size() const { return values.size(); }
  bool contains(std::int64_t tick) const { return tick >= first_tick && tick <= last_tick; }
  double at_tick(std::int64_t tick) const;
  double at(double t) const;
};

/// Cumulative sums of i.i.d. SaS(alpha, 2^{-level/alpha}) increments, anchored
/// so that the value at t = 0 is exactly 0. The increment over
/// [tick, tick+1] always uses counter `tick` of the stream, so two grids from
/// the same stream agree wherever they overlap in increments.
LevyGrid build_levy_grid(double alpha, double t_min, double t_max, int level, const CounterRng& rng);

/// Z_alpha known only on a sorted set of ticks (unit 2^-level) that contains 0.
/// Increments between consecutive ticks are SaS with scale gap^{1/alpha}, so the
/// joint law equals that of a dense grid restricted to the same ticks.
struct SparseLevyPath {
  double alpha = 1.5;
  int level = 0;
  std::vector<std::int64_t> ticks;
  std::vector<double> values;

  bool contains(std::int64_t tick) const;
  double at_tick(std::int64_t tick) const;
  std::size_t size() const { return ticks.size(); }
};

SparseLevyPath build_sparse_levy_path(double alpha, int level, std::vector<std::int64_t> ticks,
                                      const CounterRng& rng);

/// zeta_{j,k} = -2^{j/alpha} (Z(k/2^j) - 2 Z((k+1/2)/2^j) + Z((k+1)/2^j)).
/// j and k may be negative. Throws ResolutionError when a point is off the path.
double zeta_from_levy(const LevyGrid& grid, int j, std::int64_t k);
double zeta_from_levy(const SparseLevyPath& path, int j, std::int64_t k);

enum class CoefficientMode { consistent, independent };

std::string_view to_string(CoefficientMode mode);
CoefficientMode parse_coefficient_mode(std::string_view name);

/// Haar coefficients of the driving noise.
///   hf row j in [0, J_hf):           zeta_{j,k},  k = 0 .. 2^j - 1
///   lf row j in (-J_lf, J_lf):       zeta_{j,-k}, k = 1 .. 2^{J_lf - |j|}   (stored at index k-1)
struct CoefficientPyramid {
  double alpha = 1.5;
  int J_hf = 0;
  int J_lf = 0;
  CoefficientMode mode = CoefficientMode::consistent;
  std::uint64_t seed = 0;
  double z1 = 0.0;
  std::vector<std::vector<double>> hf;
  std::vector<std::vector<double>> lf;

  std::span<const double> hf_row(int j) const;
  std::span<const double> lf_row(int j) const;
};

std::size_t hf_row_length(int j);
std::size_t lf_row_length(int J_lf, int j);

/// Substreams of CounterRng(seed) used by generate_coefficients.
inline constexpr std::uint64_t kStreamPositiveGrid = 1;
inline constexpr std::uint64_t kStreamNegativePath = 2;
inline constexpr std::uint64_t kStreamZ1 = 3;
inline constexpr std::uint64_t kStreamHfRow = 0x100;  // + j
inline constexpr std::uint64_t kStreamLfRow = 0x200;  // + j + 64

struct GenerationOptions {
  /// Upper bound on the number of Levy-path points (consistent mode) or
  /// coefficients (independent mode) per half-line.
  std::size_t entry_budget = std::size_t{1} << 26;
};

CoefficientPyramid generate_coefficients(double alpha, int J_hf, int J_lf, CoefficientMode mode,
                                         std::uint64_t seed, const GenerationOptions& options = {});

/// The dyadic ticks (unit 2^-J_lf) of the negative half-line touched by lf rows.
std::vector<std::int64_t> lf_levy_ticks(int J_lf);

/// Running sums along k: hf rows start at m = 0, lf rows at m = 1.
struct PrefixSums {
  int J_hf = 0;
  int J_lf = 0;
  std::vector<std::vector<double>> hf;
  std::vector<std::vector<double>> lf;

  std::span<const double> hf_row(int j) const;
  std::span<const double> lf_row(int j) const;
};

PrefixSums prefix_sums(const CoefficientPyramid& pyramid);

/// Little-endian binary container: magic "LMSMPYR1", alpha (f64), J_hf (i32),
/// J_lf (i32), mode (u8), seed (u64), z1 (f64), then hf rows and lf rows
/// (j ascending, row-major f64).
void write_pyramid(std::ostream& out, const CoefficientPyramid& pyramid);
CoefficientPyramid read_pyramid(std::istream& in);

}  // namespace lmsm
