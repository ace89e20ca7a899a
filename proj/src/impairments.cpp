#include "hwsim/impairments.hpp"

#include <cmath>
#include <stdexcept>

namespace hwsim {

void validate(const PhaseNoiseParams& p) {
  if (!(p.lambda > 0.0 && p.lambda < 1.0))
    throw std::invalid_argument("phase noise: lambda must lie in (0,1)");
  if (p.beta_hz < 0.0) throw std::invalid_argument("phase noise: beta must be >= 0");
  if (!(p.sample_period_s > 0.0))
    throw std::invalid_argument("phase noise: sample period must be positive");
}

void validate(const AdcParams& p) {
  if (p.bits < 1) throw std::invalid_argument("adc: bits must be >= 1");
  if (!(p.step > 0.0)) throw std::invalid_argument("adc: step must be positive");
}

CMat lna_apply(const CMat& x, const LnaParams& p) {
  return (p.alpha1 * x.array() + p.alpha2 * x.array() * x.array().abs2()).matrix();
}

std::vector<double> phase_noise_path(const PhaseNoiseParams& p, int n_samples, RngStream& rng) {
  validate(p);
  if (n_samples < 1) throw std::invalid_argument("phase_noise_path: need at least one sample");
  std::vector<double> phi(static_cast<std::size_t>(n_samples), 0.0);
  const double innov_var = p.innovation_variance();
  if (innov_var == 0.0) return phi;
  const double innov_std = std::sqrt(innov_var);
  phi[0] = std::sqrt(p.stationary_variance()) * rng.normal();
  for (int n = 1; n < n_samples; ++n)
    phi[static_cast<std::size_t>(n)] =
        p.lambda * phi[static_cast<std::size_t>(n - 1)] + innov_std * rng.normal();
  return phi;
}

CMat mixer_apply(const CMat& y, std::span<const double> phase) {
  if (static_cast<Eigen::Index>(phase.size()) != y.cols())
    throw std::invalid_argument("mixer_apply: phase path length mismatch");
  CMat z = y;
  for (Eigen::Index n = 0; n < z.cols(); ++n) {
    const double phi = phase[static_cast<std::size_t>(n)];
    z.col(n) *= cdouble(std::cos(phi), std::sin(phi));
  }
  return z;
}

double quantize_real(double value, const AdcParams& p) {
  // cell index floor(value/step) clamped to the 2^q cells; every output level
  // goes through the same expression so the alphabet is bitwise consistent
  // across the granular and saturated branches.
  const double half_levels = std::exp2(p.bits - 1);  // 2^{q-1}
  double cell = std::floor(value / p.step);
  cell = std::max(-half_levels, std::min(half_levels - 1.0, cell));
  return p.step * cell + 0.5 * p.step;
}

CMat adc_quantize(const CMat& z, const AdcParams& p) {
  validate(p);
  CMat r(z.rows(), z.cols());
  for (Eigen::Index c = 0; c < z.cols(); ++c)
    for (Eigen::Index row = 0; row < z.rows(); ++row)
      r(row, c) = cdouble(quantize_real(z(row, c).real(), p),
                          quantize_real(z(row, c).imag(), p));
  return r;
}

CMat impair_chain(const CMat& x, const HardwareChain& chain, std::span<const double> phase) {
  CMat out = chain.lna ? lna_apply(x, *chain.lna) : x;
  if (chain.phase_noise) out = mixer_apply(out, phase);
  if (chain.adc) out = adc_quantize(out, *chain.adc);
  return out;
}

}  // namespace hwsim
