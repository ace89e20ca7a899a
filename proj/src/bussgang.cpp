#include "hwsim/bussgang.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hwsim {

namespace {

// Entry-wise DFT across the sequence index. scale multiplies the plain
// (unnormalized-sum) transform result.
std::vector<CMat> transform_sequence(const std::vector<CMat>& seq, FftDirection dir,
                                     double scale) {
  const int n = static_cast<int>(seq.size());
  if (n == 0) throw std::invalid_argument("covariance transform: empty sequence");
  const int dim = static_cast<int>(seq.front().rows());
  std::vector<CMat> out(seq.size(), CMat(dim, dim));
  std::vector<cdouble> buf(static_cast<std::size_t>(n));
  // dft_inplace applies 1/sqrt(n); fold the residual into the requested scale.
  const double total = scale * std::sqrt(static_cast<double>(n));
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) {
      for (int m = 0; m < n; ++m) buf[static_cast<std::size_t>(m)] = seq[static_cast<std::size_t>(m)](r, c);
      dft_inplace(buf, dir);
      for (int m = 0; m < n; ++m) out[static_cast<std::size_t>(m)](r, c) = total * buf[static_cast<std::size_t>(m)];
    }
  }
  return out;
}

CMat scale_rows_cols(const CMat& m, const CVec& left, const CVec& right) {
  return left.asDiagonal() * m * right.conjugate().asDiagonal();
}

}  // namespace

SubcarrierCovarianceSet signal_cov_freq(const ChannelRealization& channel,
                                        const SubcarrierLayout& layout, double noise_psd) {
  if (channel.fft_size() != layout.total)
    throw std::invalid_argument("signal_cov_freq: channel/layout size mismatch");
  if (noise_psd < 0.0) throw std::invalid_argument("signal_cov_freq: negative noise level");
  const int dim = channel.rx_count();
  SubcarrierCovarianceSet cov;
  cov.mats.resize(static_cast<std::size_t>(layout.total));
  const CMat noise = noise_psd * CMat::Identity(dim, dim);
  for (int k = 0; k < layout.total; ++k) {
    if (layout.is_occupied(k)) {
      const CMat& h = channel.freq[static_cast<std::size_t>(k)];
      cov.mats[static_cast<std::size_t>(k)] = h * h.adjoint() + noise;
    } else {
      cov.mats[static_cast<std::size_t>(k)] = noise;
    }
  }
  return cov;
}

LagCovarianceSequence cov_freq_to_lag(const SubcarrierCovarianceSet& freq) {
  LagCovarianceSequence lag;
  lag.mats = transform_sequence(freq.mats, FftDirection::inverse,
                                1.0 / static_cast<double>(freq.count()));
  return lag;
}

SubcarrierCovarianceSet cov_lag_to_freq(const LagCovarianceSequence& lag) {
  SubcarrierCovarianceSet freq;
  freq.mats = transform_sequence(lag.mats, FftDirection::forward, 1.0);
  return freq;
}

LinearizedComponent LinearizedComponent::identity(const LagCovarianceSequence& input_cov) {
  LinearizedComponent comp;
  const int dim = input_cov.dim();
  comp.gain = CVec::Ones(dim);
  comp.out_cov = input_cov;
  comp.dist_cov.mats.assign(input_cov.mats.size(), CMat::Zero(dim, dim));
  return comp;
}

LinearizedComponent lna_linearize(const LagCovarianceSequence& c_x, const LnaParams& p) {
  const int dim = c_x.dim();
  const int n = c_x.period();
  const cdouble a1 = p.alpha1;
  const cdouble a2 = p.alpha2;
  const RVec power = c_x.mats[0].diagonal().real();

  LinearizedComponent comp;
  comp.gain = (a1 + 2.0 * a2 * power.array().cast<cdouble>()).matrix();
  comp.dist_cov.mats.resize(static_cast<std::size_t>(n));
  comp.out_cov.mats.resize(static_cast<std::size_t>(n));
  const double a2sq = std::norm(a2);
  for (int m = 0; m < n; ++m) {
    const CMat& cx = c_x.mats[static_cast<std::size_t>(m)];
    const CMat dist = (2.0 * a2sq) * (cx.array() * cx.array().abs2()).matrix();
    CMat out = std::norm(a1) * cx;
    out.noalias() += (2.0 * std::conj(a1) * a2) * (power.asDiagonal() * cx);
    out.noalias() += (2.0 * std::conj(a2) * a1) * (cx * power.asDiagonal());
    out.noalias() += (4.0 * a2sq) * (power.asDiagonal() * cx * power.asDiagonal());
    out += dist;
    comp.dist_cov.mats[static_cast<std::size_t>(m)] = dist;
    comp.out_cov.mats[static_cast<std::size_t>(m)] = std::move(out);
  }
  return comp;
}

LinearizedComponent osc_linearize(const LagCovarianceSequence& c_y, const PhaseNoiseParams& p) {
  validate(p);
  const int dim = c_y.dim();
  const int n = c_y.period();
  const double s2 = p.stationary_variance();
  LinearizedComponent comp;
  comp.gain = CVec::Constant(dim, cdouble(std::exp(-0.5 * s2), 0.0));
  comp.dist_cov.mats.resize(static_cast<std::size_t>(n));
  comp.out_cov.mats.resize(static_cast<std::size_t>(n));
  const double floor = std::exp(-s2);
  for (int m = 0; m < n; ++m) {
    const int circular = std::min(m, n - m);  // N-periodic lag
    const double keep = std::exp(-s2 * (1.0 - std::pow(p.lambda, circular)));
    comp.out_cov.mats[static_cast<std::size_t>(m)] = keep * c_y.mats[static_cast<std::size_t>(m)];
    comp.dist_cov.mats[static_cast<std::size_t>(m)] =
        (keep - floor) * c_y.mats[static_cast<std::size_t>(m)];
  }
  return comp;
}

LinearizedComponent adc_linearize(const LagCovarianceSequence& c_z, const AdcParams& p) {
  validate(p);
  const int dim = c_z.dim();
  const int n = c_z.period();
  const double step = p.step;
  const double levels = std::exp2(p.bits);
  const std::int64_t half_levels = std::int64_t{1} << (p.bits - 1);  // 2^{q-1}

  CVec gain(dim);
  RVec dist0(dim);
  for (int b = 0; b < dim; ++b) {
    const double sigma2 = c_z.mats[0](b, b).real();
    if (!(sigma2 > 0.0))
      throw std::invalid_argument("adc_linearize: nonpositive input power on antenna " +
                                  std::to_string(b));
    const double sigma = std::sqrt(sigma2);

    // sum over i = 1..2^q-1 of exp(-step^2 (i - 2^{q-1})^2 / sigma^2);
    // the offsets i - 2^{q-1} run over -(M-1)..M-1, so fold symmetric pairs.
    double esum = 1.0;  // j = 0 term
    for (std::int64_t j = 1; j < half_levels; ++j) {
      const double expo = step * step * static_cast<double>(j) * static_cast<double>(j) / sigma2;
      if (expo > 745.0) break;
      esum += 2.0 * std::exp(-expo);
    }
    const double g = step / (std::sqrt(std::numbers::pi) * sigma) * esum;

    // sum over i of (i - 2^{q-1}) (1 - Q(sqrt(2) step (i - 2^{q-1}) / sigma));
    // folding j with -j turns the summand into j (1 - 2 Q(a j)).
    double qsum = 0.0;
    for (std::int64_t j = 1; j < half_levels; ++j) {
      const double q = q_function(std::numbers::sqrt2 * step * static_cast<double>(j) / sigma);
      if (q == 0.0) break;
      qsum += static_cast<double>(j) * q;
    }
    const double lin_sum =
        static_cast<double>(half_levels) * static_cast<double>(half_levels - 1) / 2.0 - 2.0 * qsum;
    const double out_power = 0.5 * step * step * (levels - 1.0) * (levels - 1.0) -
                             4.0 * step * step * lin_sum;
    gain(b) = cdouble(g, 0.0);
    dist0(b) = out_power - g * g * sigma2;
  }

  LinearizedComponent comp;
  comp.gain = gain;
  comp.dist_cov.mats.assign(static_cast<std::size_t>(n), CMat::Zero(dim, dim));
  comp.dist_cov.mats[0] = dist0.cast<cdouble>().asDiagonal();
  comp.out_cov.mats.resize(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m)
    comp.out_cov.mats[static_cast<std::size_t>(m)] =
        scale_rows_cols(c_z.mats[static_cast<std::size_t>(m)], gain, gain) +
        comp.dist_cov.mats[static_cast<std::size_t>(m)];
  return comp;
}

AggregateModel aggregate(const SubcarrierCovarianceSet& c_x_freq, const LinearizedComponent& lna,
                         const LinearizedComponent& osc, const LinearizedComponent& adc) {
  const int dim = c_x_freq.dim();
  const int n = c_x_freq.count();
  if (lna.gain.size() != dim || osc.gain.size() != dim || adc.gain.size() != dim ||
      lna.dist_cov.period() != n || osc.dist_cov.period() != n || adc.dist_cov.period() != n)
    throw std::invalid_argument("aggregate: component dimensions do not match");

  AggregateModel model;
  model.g_tot = adc.gain.array() * osc.gain.array() * lna.gain.array();
  const CVec g_adc_osc = (adc.gain.array() * osc.gain.array()).matrix();
  model.c_e_tot.mats.resize(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) {
    CMat acc = adc.dist_cov.mats[static_cast<std::size_t>(m)];
    acc += scale_rows_cols(osc.dist_cov.mats[static_cast<std::size_t>(m)], adc.gain, adc.gain);
    acc += scale_rows_cols(lna.dist_cov.mats[static_cast<std::size_t>(m)], g_adc_osc, g_adc_osc);
    model.c_e_tot.mats[static_cast<std::size_t>(m)] = std::move(acc);
  }
  model.c_e_tot_freq = cov_lag_to_freq(model.c_e_tot);
  model.c_r_freq.mats.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    model.c_r_freq.mats[static_cast<std::size_t>(k)] =
        scale_rows_cols(c_x_freq.mats[static_cast<std::size_t>(k)], model.g_tot, model.g_tot) +
        model.c_e_tot_freq.mats[static_cast<std::size_t>(k)];
  return model;
}

AggregateModel linearize_chain(const SubcarrierCovarianceSet& c_x_freq,
                               const HardwareChain& chain) {
  const LagCovarianceSequence c_x = cov_freq_to_lag(c_x_freq);
  const LinearizedComponent lna =
      chain.lna ? lna_linearize(c_x, *chain.lna) : LinearizedComponent::identity(c_x);
  const LinearizedComponent osc = chain.phase_noise
                                      ? osc_linearize(lna.out_cov, *chain.phase_noise)
                                      : LinearizedComponent::identity(lna.out_cov);
  const LinearizedComponent adc = chain.adc ? adc_linearize(osc.out_cov, *chain.adc)
                                            : LinearizedComponent::identity(osc.out_cov);
  return aggregate(c_x_freq, lna, osc, adc);
}

}  // namespace hwsim
