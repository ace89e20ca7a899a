#include "hwsim/waveform.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hwsim {

SubcarrierLayout make_layout(int n_subcarriers, int n_occupied) {
  if (n_subcarriers < 1) throw std::invalid_argument("make_layout: N must be positive");
  if (n_occupied <= 0 || n_occupied % 2 != 0)
    throw std::invalid_argument("make_layout: S must be positive and even");
  if (n_occupied >= n_subcarriers)
    throw std::invalid_argument("make_layout: S must be < N (DC stays unoccupied)");
  SubcarrierLayout layout;
  layout.total = n_subcarriers;
  layout.occupied_count = n_occupied;
  layout.mask.assign(static_cast<std::size_t>(n_subcarriers), 0);
  layout.occupied.reserve(static_cast<std::size_t>(n_occupied));
  for (int k = 1; k <= n_occupied / 2; ++k) layout.occupied.push_back(k);
  for (int k = n_subcarriers - n_occupied / 2; k < n_subcarriers; ++k) layout.occupied.push_back(k);
  for (int k : layout.occupied) layout.mask[static_cast<std::size_t>(k)] = 1;
  return layout;
}

BitMatrix draw_bits(int n_users, const SubcarrierLayout& layout, RngStream& rng) {
  BitMatrix bits(n_users, 2 * layout.occupied_count);
  for (int u = 0; u < n_users; ++u)
    for (int i = 0; i < bits.cols(); ++i)
      bits(u, i) = static_cast<std::uint8_t>(rng.next_u64() >> 63);
  return bits;
}

FrequencyFrame map_qpsk(const BitMatrix& bits, const SubcarrierLayout& layout) {
  const int n_users = static_cast<int>(bits.rows());
  if (bits.cols() != 2 * layout.occupied_count)
    throw std::invalid_argument("map_qpsk: bit count does not match layout");
  const double amp = 1.0 / std::numbers::sqrt2;
  FrequencyFrame frame{CMat::Zero(n_users, layout.total), layout};
  for (int u = 0; u < n_users; ++u) {
    for (int i = 0; i < layout.occupied_count; ++i) {
      const double re = bits(u, 2 * i) ? -amp : amp;
      const double im = bits(u, 2 * i + 1) ? -amp : amp;
      frame.symbols(u, layout.occupied[static_cast<std::size_t>(i)]) = cdouble(re, im);
    }
  }
  return frame;
}

FrequencyFrame draw_symbols(const SubcarrierLayout& layout, int n_users, SymbolMode mode,
                            RngStream& rng) {
  if (n_users < 1) throw std::invalid_argument("draw_symbols: need at least one user");
  if (mode == SymbolMode::qpsk) return map_qpsk(draw_bits(n_users, layout, rng), layout);
  FrequencyFrame frame{CMat::Zero(n_users, layout.total), layout};
  for (int u = 0; u < n_users; ++u)
    for (int k : layout.occupied) frame.symbols(u, k) = rng.complex_normal(1.0);
  return frame;
}

TimeFrame ofdm_modulate(const FrequencyFrame& frame, int cp_len) {
  const int n = frame.layout.total;
  const int n_users = static_cast<int>(frame.symbols.rows());
  if (cp_len < 0 || cp_len >= n) throw std::invalid_argument("ofdm_modulate: bad prefix length");
  CMat body = frame.symbols;
  dft_rows_inplace(body, FftDirection::inverse);
  TimeFrame tf;
  tf.cp_len = cp_len;
  tf.samples.resize(n_users, cp_len + n);
  tf.samples.rightCols(n) = body;
  if (cp_len > 0) tf.samples.leftCols(cp_len) = body.rightCols(cp_len);
  return tf;
}

CMat ofdm_demodulate(const CMat& received) {
  CMat out = received;
  dft_rows_inplace(out, FftDirection::forward);
  return out;
}

BitMatrix qpsk_demap(const CMat& estimates, const SubcarrierLayout& layout) {
  const int n_users = static_cast<int>(estimates.rows());
  if (estimates.cols() != layout.total)
    throw std::invalid_argument("qpsk_demap: estimate width does not match layout");
  BitMatrix bits(n_users, 2 * layout.occupied_count);
  for (int u = 0; u < n_users; ++u) {
    for (int i = 0; i < layout.occupied_count; ++i) {
      const cdouble v = estimates(u, layout.occupied[static_cast<std::size_t>(i)]);
      bits(u, 2 * i) = v.real() < 0.0 ? 1 : 0;
      bits(u, 2 * i + 1) = v.imag() < 0.0 ? 1 : 0;
    }
  }
  return bits;
}

}  // namespace hwsim
