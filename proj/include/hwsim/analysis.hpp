#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hwsim/bussgang.hpp"
#include "hwsim/channel.hpp"
#include "hwsim/impairments.hpp"
#include "hwsim/types.hpp"
#include "hwsim/waveform.hpp"

namespace hwsim {

/// Everything needed to run the exact nonlinear link for one channel draw.
struct LinkModel {
  SubcarrierLayout layout;
  ChannelRealization channel;
  HardwareChain chain;
  double noise_psd = 0.0;
};

/// One frame through the exact chain: modulate (prefix length L-1), channel
/// plus noise, hardware chain, demodulate. When phase noise is enabled a single
/// path covering the prefix samples as well (n = -L+1..N-1) is drawn and the
/// trailing N rotations are applied. Returns the B x N frequency-domain output.
CMat simulate_frame(const LinkModel& link, const FrequencyFrame& tx, RngStream& rng);

struct PsdCurve {
  std::vector<double> power;  // per-subcarrier linear power, k = 0..N-1
  std::string label;
};

enum class PsdMetric {
  trace,      // (1/B) tr(C_r_hat[k]) — matches the periodogram expectation
  diag_norm,  // (1/B) ||diag(C_r_hat[k])||_2^2 — audit variant
};

PsdCurve psd_analytic(const AggregateModel& model, PsdMetric metric = PsdMetric::trace);

/// Monte-Carlo periodogram of the exact chain, averaged over antennas and
/// frames: p[k] = (1/(B F)) sum_f sum_b |r_hat_b[k]|^2. Frame t uses the
/// dedicated stream (seed, frame | stream_base + t), so the result does not
/// depend on the worker count.
PsdCurve psd_empirical(const LinkModel& link, SymbolMode mode, int n_frames, std::uint64_t seed,
                       std::uint64_t stream_base, int n_workers);

/// Zero-forcing combiner for one subcarrier: with GH = diag(g_tot)*h_hat,
/// A = GH (GH^H GH)^{-1}, so that A^H diag(g_tot) h_hat = I. Throws when the
/// U x U Gram matrix is numerically rank deficient (condition estimate > 1e12).
CMat zf_matrix(const CMat& h_hat, const CVec& g_tot);

/// SINDR_u[k] = |a_u^H G h_u|^2 / (I_u + N_u + D_u) on the occupied bins,
/// with I_u the residual inter-user leakage, N_u = N0 ||a_u^H G||^2 and
/// D_u = a_u^H C_e_tot_hat[k] a_u. Rows index users, columns follow
/// layout.occupied. A zero denominator yields +infinity.
RMat sindr_grid(const std::vector<CMat>& zf_per_occupied, const ChannelRealization& channel,
                const CVec& g_tot, const SubcarrierCovarianceSet& c_e_tot_freq, double noise_psd,
                const SubcarrierLayout& layout);

/// Mean of Q(sqrt(SINDR)) over the grid; infinite entries contribute zero.
double ber_analytic(const RMat& sindr);

struct BerEstimate {
  double ber = 0.0;
  double halfwidth = 0.0;  // 95% binomial
  std::uint64_t bits = 0;
  std::uint64_t errors = 0;
};

/// Uncoded QPSK bit errors through the exact chain with the linearized-model
/// combiner, for one channel realization. Frame t uses stream
/// (seed, frame | stream_base + t).
BerEstimate ber_monte_carlo_frames(const LinkModel& link,
                                   const std::vector<CMat>& zf_per_occupied, int n_frames,
                                   std::uint64_t seed, std::uint64_t stream_base, int n_workers);

struct BerPoint {
  double ber_analytic = 0.0;  // mean over the channel draws
  BerEstimate mc;             // pooled over the same channel draws
  int channel_redraws = 0;    // rank-deficient draws replaced
};

/// Full dual-path experiment at one noise level: draws n_channels channels
/// (streams channel | channel_stream_base + index, redrawing on rank
/// deficiency), evaluates the linearized model and analytic BER per channel,
/// and runs n_frames_per_channel exact-chain frames per channel.
BerPoint ber_monte_carlo(const SubcarrierLayout& layout, int n_rx, int n_taps,
                         const HardwareChain& chain, double noise_psd, int n_users,
                         int n_channels, int n_frames_per_channel, std::uint64_t seed,
                         std::uint64_t channel_stream_base, std::uint64_t frame_stream_base,
                         int n_workers);

}  // namespace hwsim
