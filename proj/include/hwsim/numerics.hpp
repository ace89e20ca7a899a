#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "hwsim/types.hpp"

namespace hwsim {

enum class FftDirection { forward, inverse };

/// Unitary DFT: forward computes X[k] = (1/sqrt(N)) sum_n x[n] e^{-j k 2pi n/N},
/// inverse uses the conjugate kernel with the same 1/sqrt(N) scaling.
/// Radix-2 in place for powers of two, direct evaluation otherwise.
void dft_inplace(std::span<cdouble> data, FftDirection dir);

std::vector<cdouble> dft(const std::vector<cdouble>& data, FftDirection dir);

/// Per-row unitary DFT of a matrix (each row is one length-N sequence).
void dft_rows_inplace(CMat& data, FftDirection dir);

/// Gaussian tail probability Q(x) = P(N(0,1) > x). Total on finite reals.
double q_function(double x);

/// Reproducible random stream. Identical (seed, stream_id) pairs reproduce the
/// same sequence bit for bit; distinct stream ids give independent sequences.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform();

  /// Standard normal via Box-Muller (fixed consumption of two uniforms per pair).
  double normal();

  /// Circularly symmetric complex Gaussian CN(0, variance).
  cdouble complex_normal(double variance);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// n i.i.d. CN(0, variance) samples. variance = 0 gives the all-zeros vector;
/// negative variance throws.
std::vector<cdouble> sample_cn(RngStream& rng, std::size_t n, double variance);

/// Stream-id tags so that independent parts of an experiment never share a stream.
namespace stream_kind {
inline constexpr std::uint64_t channel = std::uint64_t{1} << 56;
inline constexpr std::uint64_t frame = std::uint64_t{2} << 56;
inline constexpr std::uint64_t misc = std::uint64_t{3} << 56;
}  // namespace stream_kind

}  // namespace hwsim
