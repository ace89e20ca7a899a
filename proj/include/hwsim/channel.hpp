#pragma once

#include <vector>

#include "hwsim/numerics.hpp"
#include "hwsim/types.hpp"
#include "hwsim/waveform.hpp"

namespace hwsim {

/// Frequency-selective MIMO channel: L time-domain tap matrices H[l] (B x U)
/// plus the cached per-subcarrier responses H_hat[k] = sum_l H[l] e^{-j k 2pi l / N}.
struct ChannelRealization {
  std::vector<CMat> taps;  // L matrices, B x U
  std::vector<CMat> freq;  // N matrices, B x U

  int rx_count() const { return taps.empty() ? 0 : static_cast<int>(taps.front().rows()); }
  int tx_count() const { return taps.empty() ? 0 : static_cast<int>(taps.front().cols()); }
  int tap_count() const { return static_cast<int>(taps.size()); }
  int fft_size() const { return static_cast<int>(freq.size()); }
};

/// H_hat[k] for k = 0..N-1. Throws if there are more taps than subcarriers
/// (the cyclic-prefix model would be invalid).
std::vector<CMat> freq_response(const std::vector<CMat>& taps, int n_subcarriers);

/// Rayleigh taps, entries i.i.d. CN(0, 1/L), so average channel energy per
/// (rx, tx) pair is one. Frequency cache populated for n_subcarriers bins.
ChannelRealization draw_channel(int n_rx, int n_tx, int n_taps, int n_subcarriers,
                                RngStream& rng);

/// Received block x[n] = sum_l H[l] s[n-l] + w[n] for n = 0..N-1, with the
/// samples at negative n supplied by the frame's cyclic prefix and
/// w[n] ~ CN(0, noise_psd * I). Throws if the prefix is shorter than L-1.
CMat apply_channel(const ChannelRealization& channel, const TimeFrame& tx, double noise_psd,
                   RngStream& rng);

/// Tap dump/load as CSV rows (l, rx, tx, re, im) for regression fixtures.
/// Loading rebuilds the frequency cache; the round trip is exact.
void save_taps_csv(const ChannelRealization& channel, const std::string& path);
ChannelRealization load_taps_csv(const std::string& path, int n_subcarriers);

}  // namespace hwsim
