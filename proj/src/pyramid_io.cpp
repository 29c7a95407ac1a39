#include <array>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "lmsm/errors.hpp"
#include "lmsm/stable_rng.hpp"

namespace lmsm {

namespace {

constexpr std::array<char, 8> kMagic{'L', 'M', 'S', 'M', 'P', 'Y', 'R', '1'};

template <class UInt>
void put_le(std::ostream& out, UInt value) {
  std::array<char, sizeof(UInt)> bytes{};
  for (std::size_t i = 0; i < sizeof(UInt); ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

template <class UInt>
UInt get_le(std::istream& in) {
  std::array<unsigned char, sizeof(UInt)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw SchemaError("truncated pyramid container");
  UInt value = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) value |= static_cast<UInt>(bytes[i]) << (8 * i);
  return value;
}

void put_f64(std::ostream& out, double x) { put_le(out, std::bit_cast<std::uint64_t>(x)); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_le<std::uint64_t>(in)); }

}  // namespace

void write_pyramid(std::ostream& out, const CoefficientPyramid& pyramid) {
  out.write(kMagic.data(), kMagic.size());
  put_f64(out, pyramid.alpha);
  put_le(out, static_cast<std::uint32_t>(pyramid.J_hf));
  put_le(out, static_cast<std::uint32_t>(pyramid.J_lf));
  put_le(out, static_cast<std::uint8_t>(pyramid.mode == CoefficientMode::consistent ? 0 : 1));
  put_le(out, pyramid.seed);
  put_f64(out, pyramid.z1);
  for (const auto& row : pyramid.hf)
    for (double x : row) put_f64(out, x);
  for (const auto& row : pyramid.lf)
    for (double x : row) put_f64(out, x);
  if (!out) throw IoError("failed to write pyramid container");
}

CoefficientPyramid read_pyramid(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw SchemaError("not a pyramid container (bad magic)");

  CoefficientPyramid pyr;
  pyr.alpha = get_f64(in);
  pyr.J_hf = static_cast<int>(get_le<std::uint32_t>(in));
  pyr.J_lf = static_cast<int>(get_le<std::uint32_t>(in));
  const auto mode = get_le<std::uint8_t>(in);
  if (mode > 1) throw SchemaError("unknown coefficient mode tag " + std::to_string(mode));
  pyr.mode = mode == 0 ? CoefficientMode::consistent : CoefficientMode::independent;
  pyr.seed = get_le<std::uint64_t>(in);
  pyr.z1 = get_f64(in);
  if (pyr.J_hf < 1 || pyr.J_hf > 40 || pyr.J_lf < 2 || pyr.J_lf > 30) throw SchemaError("pyramid depths out of range");

  pyr.hf.resize(static_cast<std::size_t>(pyr.J_hf));
  for (int j = 0; j < pyr.J_hf; ++j) {
    auto& row = pyr.hf[static_cast<std::size_t>(j)];
    row.resize(hf_row_length(j));
    for (double& x : row) x = get_f64(in);
  }
  pyr.lf.resize(static_cast<std::size_t>(2 * pyr.J_lf - 1));
  for (int j = 1 - pyr.J_lf; j <= pyr.J_lf - 1; ++j) {
    auto& row = pyr.lf[static_cast<std::size_t>(j + pyr.J_lf - 1)];
    row.resize(lf_row_length(pyr.J_lf, j));
    for (double& x : row) x = get_f64(in);
  }
  return pyr;
}

}  // namespace lmsm
