#pragma once

#include <vector>

#include "hwsim/channel.hpp"
#include "hwsim/impairments.hpp"
#include "hwsim/types.hpp"
#include "hwsim/waveform.hpp"

namespace hwsim {

/// N-periodic sequence of B x B spatial covariance matrices C[m], m = 0..N-1.
/// Circular Hermitian symmetry C[N-m] = C[m]^H is preserved by every producer
/// in this module.
struct LagCovarianceSequence {
  std::vector<CMat> mats;

  int period() const { return static_cast<int>(mats.size()); }
  int dim() const { return mats.empty() ? 0 : static_cast<int>(mats.front().rows()); }
};

/// Per-subcarrier B x B covariance matrices C_hat[k], k = 0..N-1.
struct SubcarrierCovarianceSet {
  std::vector<CMat> mats;

  int count() const { return static_cast<int>(mats.size()); }
  int dim() const { return mats.empty() ? 0 : static_cast<int>(mats.front().rows()); }
};

/// Covariance of the received frequency-domain signal before the hardware chain:
/// C_x_hat[k] = H_hat[k] H_hat[k]^H + N0*I on occupied bins (unit-variance
/// symbols), N0*I on guard bins.
SubcarrierCovarianceSet signal_cov_freq(const ChannelRealization& channel,
                                        const SubcarrierLayout& layout, double noise_psd);

/// C[m] = (1/N) sum_k C_hat[k] e^{+j k 2pi m / N} (per matrix entry).
LagCovarianceSequence cov_freq_to_lag(const SubcarrierCovarianceSet& freq);

/// C_hat[k] = sum_m C[m] e^{-j k 2pi m / N}; inverse of cov_freq_to_lag.
SubcarrierCovarianceSet cov_lag_to_freq(const LagCovarianceSequence& lag);

/// One hardware stage linearized around a Gaussian input: output = gain*input
/// + distortion, with the distortion uncorrelated with the input.
struct LinearizedComponent {
  CVec gain;                       // diagonal entries of the B x B gain
  LagCovarianceSequence dist_cov;  // distortion autocovariance C_e[m]
  LagCovarianceSequence out_cov;   // stage output autocovariance

  /// Pass-through stage: unit gain, zero distortion, output = input.
  static LinearizedComponent identity(const LagCovarianceSequence& input_cov);
};

/// Third-order amplifier stage. Exact for Gaussian input:
///   gain     = alpha1 + 2*alpha2*diag(C_x[0])
///   C_e[m]   = 2|alpha2|^2 C_x[m] o |C_x[m]|^2
///   C_y[m]   = |a1|^2 C_x[m] + 2 a1* a2 D C_x[m] + 2 a2* a1 C_x[m] D
///              + 4|a2|^2 D C_x[m] D + C_e[m],   D = diag(C_x[0])
/// which satisfies C_y[m] = G C_x[m] G^H + C_e[m] identically.
LinearizedComponent lna_linearize(const LagCovarianceSequence& c_x, const LnaParams& p);

/// Common-oscillator phase rotation with stationary AR(1) phase. With
/// s2 = stationary phase variance and circular lag |m| = min(m, N-m):
///   gain   = e^{-s2/2} (same on every antenna)
///   C_z[m] = e^{-s2 (1 - lambda^|m|)} C_y[m]
///   C_e[m] = (e^{-s2 (1 - lambda^|m|)} - e^{-s2}) C_y[m]
LinearizedComponent osc_linearize(const LagCovarianceSequence& c_y, const PhaseNoiseParams& p);

/// Finite-resolution quantizer stage. Uses only the lag-0 input covariance:
/// per-antenna gain (sigma_b^2 = [C_z[0]]_bb, M = 2^{q-1})
///   g_b = (step/(sqrt(pi) sigma_b)) sum_{i=1}^{2^q-1} e^{-step^2 (i-M)^2 / sigma_b^2}
/// and the diagonal lag-0 distortion approximation
///   c_b = (step^2/2)(2^q-1)^2 - g_b^2 sigma_b^2
///         - 4 step^2 sum_{i=1}^{2^q-1} (i-M)(1 - Q(sqrt(2) step (i-M)/sigma_b)),
/// with C_e[m] = 0 for m != 0. Throws if any antenna has nonpositive power.
LinearizedComponent adc_linearize(const LagCovarianceSequence& c_z, const AdcParams& p);

/// Composite linearization of the whole chain.
struct AggregateModel {
  CVec g_tot;                            // diag of G_adc G_osc G_lna
  LagCovarianceSequence c_e_tot;         // total distortion autocovariance
  SubcarrierCovarianceSet c_e_tot_freq;  // its per-subcarrier transform
  SubcarrierCovarianceSet c_r_freq;      // received covariance C_r_hat[k]
};

/// Combines the three stages:
///   C_e_tot[m]   = C_e_adc[m] + G_adc C_e_osc[m] G_adc^H
///                  + G_adc G_osc C_e_lna[m] G_osc^H G_adc^H
///   C_r_hat[k]   = G_tot C_x_hat[k] G_tot^H + C_e_tot_hat[k]
AggregateModel aggregate(const SubcarrierCovarianceSet& c_x_freq, const LinearizedComponent& lna,
                         const LinearizedComponent& osc, const LinearizedComponent& adc);

/// signal covariance -> lag domain -> per-stage linearization -> aggregate,
/// substituting pass-through components for disabled stages.
AggregateModel linearize_chain(const SubcarrierCovarianceSet& c_x_freq,
                               const HardwareChain& chain);

}  // namespace hwsim
