#pragma once

#include <cstdint>
#include <vector>

#include "hwsim/numerics.hpp"
#include "hwsim/types.hpp"

namespace hwsim {

/// Occupied/guard split of the N subcarriers. The default layout occupies the
/// S/2 subcarriers on each side of (and excluding) DC:
/// {1..S/2} u {N-S/2..N-1}.
struct SubcarrierLayout {
  int total = 0;               // N
  int occupied_count = 0;      // S
  std::vector<int> occupied;   // ascending subcarrier indices
  std::vector<char> mask;      // size N, nonzero on occupied bins

  bool is_occupied(int k) const { return mask[static_cast<std::size_t>(k)] != 0; }
};

/// Throws if S is odd, nonpositive, or if the layout rule is unsatisfiable
/// (S >= N would occupy DC).
SubcarrierLayout make_layout(int n_subcarriers, int n_occupied);

enum class SymbolMode { qpsk, gaussian };

/// Frequency-domain symbols for U users; guard bins are identically zero and
/// occupied bins carry unit-variance symbols.
struct FrequencyFrame {
  CMat symbols;  // U x N
  SubcarrierLayout layout;
};

/// Time-domain frame with cyclic prefix. Column c holds sample n = c - cp_len,
/// i.e. columns cover n = -cp_len .. N-1 and the first cp_len columns replicate
/// the last cp_len ones.
struct TimeFrame {
  CMat samples;  // U x (cp_len + N)
  int cp_len = 0;

  int fft_size() const { return static_cast<int>(samples.cols()) - cp_len; }
};

using BitMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// U x 2S i.i.d. equiprobable bits, two per occupied subcarrier.
BitMatrix draw_bits(int n_users, const SubcarrierLayout& layout, RngStream& rng);

/// Gray-labeled QPSK: bit pair (b0, b1) -> ((1-2*b0) + j(1-2*b1))/sqrt(2),
/// so 00 -> (+1+j)/sqrt(2). Bits ordered as in draw_bits.
FrequencyFrame map_qpsk(const BitMatrix& bits, const SubcarrierLayout& layout);

/// Unit-variance symbols on the occupied bins (QPSK or CN(0,1)).
FrequencyFrame draw_symbols(const SubcarrierLayout& layout, int n_users, SymbolMode mode,
                            RngStream& rng);

/// Per-user s_u[n] = (1/sqrt(N)) sum_{k in S} s_hat_u[k] e^{+j k 2pi n / N},
/// with a cp_len-sample cyclic prefix prepended.
TimeFrame ofdm_modulate(const FrequencyFrame& frame, int cp_len);

/// Per-row forward unitary DFT. Input covers n = 0..N-1 (prefix already gone).
CMat ofdm_demodulate(const CMat& received);

/// Hard decision per occupied bin: sign of real part gives the first bit, sign
/// of imaginary part the second; zero ties resolve to the positive quadrant
/// (bit 0). estimates is U x N, indexed like a FrequencyFrame.
BitMatrix qpsk_demap(const CMat& estimates, const SubcarrierLayout& layout);

}  // namespace hwsim
