#include "hwsim/numerics.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace hwsim {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Twiddle tables are built once per size and kept for the process lifetime.
const std::vector<cdouble>& twiddle_table(std::size_t n) {
  static std::mutex mutex;
  static std::unordered_map<std::size_t, std::unique_ptr<std::vector<cdouble>>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[n];
  if (!slot) {
    slot = std::make_unique<std::vector<cdouble>>(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      (*slot)[k] = cdouble(std::cos(angle), std::sin(angle));
    }
  }
  return *slot;
}

void fft_radix2(std::span<cdouble> x, bool inverse) {
  const std::size_t n = x.size();
  const auto& tw = twiddle_table(n);
  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        cdouble w = tw[k * stride];
        if (inverse) w = std::conj(w);
        const cdouble u = x[i + k];
        const cdouble v = x[i + k + len / 2] * w;
        x[i + k] = u + v;
        x[i + k + len / 2] = u - v;
      }
    }
  }
}

void dft_direct(std::span<cdouble> x, bool inverse) {
  const std::size_t n = x.size();
  const auto& tw = twiddle_table(n);
  std::vector<cdouble> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cdouble acc(0.0, 0.0);
    for (std::size_t m = 0; m < n; ++m) {
      cdouble w = tw[(k * m) % n];
      if (inverse) w = std::conj(w);
      acc += x[m] * w;
    }
    out[k] = acc;
  }
  std::copy(out.begin(), out.end(), x.begin());
}

}  // namespace

void dft_inplace(std::span<cdouble> data, FftDirection dir) {
  const std::size_t n = data.size();
  if (n == 0) throw std::invalid_argument("dft: zero-length input");
  const bool inverse = (dir == FftDirection::inverse);
  if (n == 1) return;
  if (is_pow2(n)) {
    fft_radix2(data, inverse);
  } else {
    dft_direct(data, inverse);
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& v : data) v *= scale;
}

std::vector<cdouble> dft(const std::vector<cdouble>& data, FftDirection dir) {
  std::vector<cdouble> out = data;
  dft_inplace(out, dir);
  return out;
}

void dft_rows_inplace(CMat& data, FftDirection dir) {
  std::vector<cdouble> row(static_cast<std::size_t>(data.cols()));
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    for (Eigen::Index c = 0; c < data.cols(); ++c) row[static_cast<std::size_t>(c)] = data(r, c);
    dft_inplace(row, dir);
    for (Eigen::Index c = 0; c < data.cols(); ++c) data(r, c) = row[static_cast<std::size_t>(c)];
  }
}

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)};
  engine_.seed(seq);
}

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // u1 in (0, 1] keeps the log finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

cdouble RngStream::complex_normal(double variance) {
  if (variance < 0.0) throw std::invalid_argument("complex_normal: negative variance");
  if (variance == 0.0) return cdouble(0.0, 0.0);
  const double sigma = std::sqrt(0.5 * variance);
  const double re = normal();
  const double im = normal();
  return cdouble(sigma * re, sigma * im);
}

std::vector<cdouble> sample_cn(RngStream& rng, std::size_t n, double variance) {
  if (variance < 0.0) throw std::invalid_argument("sample_cn: negative variance");
  std::vector<cdouble> out(n);
  for (auto& v : out) v = rng.complex_normal(variance);
  return out;
}

}  // namespace hwsim
