#pragma once

#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "hwsim/numerics.hpp"
#include "hwsim/types.hpp"

namespace hwsim {

/// Memoryless third-order amplifier model y = alpha1*x + alpha2*x*|x|^2, with
/// the same coefficients on every antenna.
struct LnaParams {
  cdouble alpha1{1.0, 0.0};
  cdouble alpha2{0.0, 0.0};
};

/// Residual oscillator phase error: AR(1) process
/// phi[n] = lambda*phi[n-1] + innov[n], innov ~ N(0, 2*pi*beta*Ts), started at
/// its stationary distribution. Requires 0 < lambda < 1.
struct PhaseNoiseParams {
  double lambda = 0.0;
  double beta_hz = 0.0;
  double sample_period_s = 0.0;

  double innovation_variance() const {
    return 2.0 * std::numbers::pi * beta_hz * sample_period_s;
  }
  double stationary_variance() const {
    return innovation_variance() / (1.0 - lambda * lambda);
  }
};

void validate(const PhaseNoiseParams& p);

/// Uniform midrise quantizer, applied independently per real dimension:
/// 2^bits output levels step*(i - 2^{bits-1}) + step/2, saturating outside
/// +-(step/2)*2^bits.
struct AdcParams {
  int bits = 0;       // q >= 1 bits per real dimension
  double step = 0.0;  // Delta > 0
};

void validate(const AdcParams& p);

CMat lna_apply(const CMat& x, const LnaParams& p);

/// Stationary AR(1) phase path of the requested length.
std::vector<double> phase_noise_path(const PhaseNoiseParams& p, int n_samples, RngStream& rng);

/// z_b[n] = e^{j phase[n]} y_b[n]; the same rotation hits every antenna
/// (common oscillator). Throws if the path length differs from the column count.
CMat mixer_apply(const CMat& y, std::span<const double> phase);

/// One real dimension of the quantizer. Values exactly on a cell boundary fall
/// in the upper cell; the two saturation branches clamp to the outermost levels.
double quantize_real(double value, const AdcParams& p);

CMat adc_quantize(const CMat& z, const AdcParams& p);

/// Enabled stages of the receiver hardware chain; disabled stages pass through.
struct HardwareChain {
  std::optional<LnaParams> lna;
  std::optional<PhaseNoiseParams> phase_noise;
  std::optional<AdcParams> adc;
};

/// adc_quantize(mixer_apply(lna_apply(x))), skipping disabled stages. The phase
/// path must match the column count when phase noise is enabled (it is ignored
/// otherwise).
CMat impair_chain(const CMat& x, const HardwareChain& chain, std::span<const double> phase);

}  // namespace hwsim
