#include "hwsim/analysis.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hwsim/parallel.hpp"

namespace hwsim {

namespace {

// Chain builds hold several N-long covariance sequences at once; keep the
// number of concurrent builds small regardless of the frame-level pool size.
int model_build_workers(int n_workers) { return std::min(resolve_workers(n_workers), 4); }

std::vector<CMat> zf_per_subcarrier(const ChannelRealization& channel, const CVec& g_tot,
                                    const SubcarrierLayout& layout) {
  std::vector<CMat> zf;
  zf.reserve(layout.occupied.size());
  for (int k : layout.occupied) {
    try {
      zf.push_back(zf_matrix(channel.freq[static_cast<std::size_t>(k)], g_tot));
    } catch (const std::runtime_error& e) {
      throw std::runtime_error(std::string(e.what()) + " on subcarrier " + std::to_string(k));
    }
  }
  return zf;
}

}  // namespace

CMat simulate_frame(const LinkModel& link, const FrequencyFrame& tx, RngStream& rng) {
  const int cp_len = link.channel.tap_count() - 1;
  const TimeFrame time_frame = ofdm_modulate(tx, cp_len);
  const CMat x = apply_channel(link.channel, time_frame, link.noise_psd, rng);
  std::vector<double> phase;
  std::span<const double> mix;
  if (link.chain.phase_noise) {
    // one oscillator path per frame, covering the prefix samples as well
    phase = phase_noise_path(*link.chain.phase_noise, cp_len + link.layout.total, rng);
    mix = std::span<const double>(phase).subspan(static_cast<std::size_t>(cp_len));
  }
  return ofdm_demodulate(impair_chain(x, link.chain, mix));
}

PsdCurve psd_analytic(const AggregateModel& model, PsdMetric metric) {
  PsdCurve curve;
  curve.label = "analytic";
  curve.power.resize(model.c_r_freq.mats.size());
  const double dim = static_cast<double>(model.c_r_freq.dim());
  for (std::size_t k = 0; k < model.c_r_freq.mats.size(); ++k) {
    const auto diag = model.c_r_freq.mats[k].diagonal().real();
    curve.power[k] = metric == PsdMetric::trace ? diag.sum() / dim
                                                : diag.squaredNorm() / dim;
  }
  return curve;
}

PsdCurve psd_empirical(const LinkModel& link, SymbolMode mode, int n_frames, std::uint64_t seed,
                       std::uint64_t stream_base, int n_workers) {
  if (n_frames < 1) throw std::invalid_argument("psd_empirical: need at least one frame");
  const int n = link.layout.total;
  const int n_users = link.channel.tx_count();
  std::vector<std::vector<double>> slots(static_cast<std::size_t>(n_frames));
  parallel_for(n_frames, n_workers, [&](int t) {
    RngStream rng(seed, stream_kind::frame | (stream_base + static_cast<std::uint64_t>(t)));
    const FrequencyFrame tx = draw_symbols(link.layout, n_users, mode, rng);
    const CMat r_hat = simulate_frame(link, tx, rng);
    std::vector<double> acc(static_cast<std::size_t>(n), 0.0);
    for (Eigen::Index k = 0; k < r_hat.cols(); ++k)
      for (Eigen::Index b = 0; b < r_hat.rows(); ++b)
        acc[static_cast<std::size_t>(k)] += std::norm(r_hat(b, k));
    slots[static_cast<std::size_t>(t)] = std::move(acc);
  });
  PsdCurve curve;
  curve.label = "empirical";
  curve.power.assign(static_cast<std::size_t>(n), 0.0);
  for (const auto& slot : slots)  // fixed frame order keeps the sum reproducible
    for (int k = 0; k < n; ++k) curve.power[static_cast<std::size_t>(k)] += slot[static_cast<std::size_t>(k)];
  const double scale = 1.0 / (static_cast<double>(link.channel.rx_count()) *
                              static_cast<double>(n_frames));
  for (auto& p : curve.power) p *= scale;
  return curve;
}

CMat zf_matrix(const CMat& h_hat, const CVec& g_tot) {
  const CMat gh = g_tot.asDiagonal() * h_hat;
  const CMat gram = gh.adjoint() * gh;
  const Eigen::PartialPivLU<CMat> lu(gram);
  const CMat gram_inv = lu.inverse();
  const double norm_fwd = gram.cwiseAbs().colwise().sum().maxCoeff();
  const double norm_inv = gram_inv.cwiseAbs().colwise().sum().maxCoeff();
  if (!gram_inv.allFinite() || !(norm_fwd * norm_inv < 1e12))
    throw std::runtime_error("zf_matrix: rank-deficient effective channel");
  return gh * gram_inv;
}

RMat sindr_grid(const std::vector<CMat>& zf_per_occupied, const ChannelRealization& channel,
                const CVec& g_tot, const SubcarrierCovarianceSet& c_e_tot_freq, double noise_psd,
                const SubcarrierLayout& layout) {
  const int n_users = channel.tx_count();
  const int n_occ = layout.occupied_count;
  if (static_cast<int>(zf_per_occupied.size()) != n_occ)
    throw std::invalid_argument("sindr_grid: combiner count does not match layout");
  RMat grid(n_users, n_occ);
  for (int i = 0; i < n_occ; ++i) {
    const int k = layout.occupied[static_cast<std::size_t>(i)];
    const CMat& a = zf_per_occupied[static_cast<std::size_t>(i)];
    const CMat gh = g_tot.asDiagonal() * channel.freq[static_cast<std::size_t>(k)];
    const CMat coupling = a.adjoint() * gh;  // U x U, identity under exact ZF
    const CMat& ce = c_e_tot_freq.mats[static_cast<std::size_t>(k)];
    for (int u = 0; u < n_users; ++u) {
      const double signal = std::norm(coupling(u, u));
      double leakage = 0.0;
      for (int v = 0; v < n_users; ++v)
        if (v != u) leakage += std::norm(coupling(u, v));
      const CVec a_u = a.col(u);
      const double noise = noise_psd * (g_tot.array() * a_u.array().conjugate()).matrix().squaredNorm();
      const double distortion = std::real(cdouble(a_u.dot(ce * a_u)));
      const double denom = leakage + noise + distortion;
      grid(u, i) = denom > 0.0 ? signal / denom : std::numeric_limits<double>::infinity();
    }
  }
  return grid;
}

double ber_analytic(const RMat& sindr) {
  double acc = 0.0;
  for (Eigen::Index c = 0; c < sindr.cols(); ++c) {
    for (Eigen::Index r = 0; r < sindr.rows(); ++r) {
      const double v = sindr(r, c);
      if (!(v >= 0.0)) throw std::invalid_argument("ber_analytic: invalid SINDR entry");
      if (!std::isinf(v)) acc += q_function(std::sqrt(v));
    }
  }
  return acc / (static_cast<double>(sindr.rows()) * static_cast<double>(sindr.cols()));
}

BerEstimate ber_monte_carlo_frames(const LinkModel& link,
                                   const std::vector<CMat>& zf_per_occupied, int n_frames,
                                   std::uint64_t seed, std::uint64_t stream_base, int n_workers) {
  if (n_frames < 1) throw std::invalid_argument("ber_monte_carlo_frames: need frames");
  const int n_users = link.channel.tx_count();
  const int n_occ = link.layout.occupied_count;
  std::vector<std::uint64_t> errors(static_cast<std::size_t>(n_frames), 0);
  parallel_for(n_frames, n_workers, [&](int t) {
    RngStream rng(seed, stream_kind::frame | (stream_base + static_cast<std::uint64_t>(t)));
    const BitMatrix bits = draw_bits(n_users, link.layout, rng);
    const FrequencyFrame tx = map_qpsk(bits, link.layout);
    const CMat r_hat = simulate_frame(link, tx, rng);
    CMat estimates = CMat::Zero(n_users, link.layout.total);
    for (int i = 0; i < n_occ; ++i) {
      const int k = link.layout.occupied[static_cast<std::size_t>(i)];
      estimates.col(k) = zf_per_occupied[static_cast<std::size_t>(i)].adjoint() * r_hat.col(k);
    }
    const BitMatrix decided = qpsk_demap(estimates, link.layout);
    std::uint64_t frame_errors = 0;
    for (Eigen::Index c = 0; c < bits.cols(); ++c)
      for (Eigen::Index r = 0; r < bits.rows(); ++r)
        frame_errors += bits(r, c) != decided(r, c);
    errors[static_cast<std::size_t>(t)] = frame_errors;
  });
  BerEstimate est;
  for (auto e : errors) est.errors += e;
  est.bits = static_cast<std::uint64_t>(n_frames) * static_cast<std::uint64_t>(n_users) *
             static_cast<std::uint64_t>(2 * n_occ);
  est.ber = static_cast<double>(est.errors) / static_cast<double>(est.bits);
  est.halfwidth = 1.96 * std::sqrt(est.ber * (1.0 - est.ber) / static_cast<double>(est.bits));
  return est;
}

BerPoint ber_monte_carlo(const SubcarrierLayout& layout, int n_rx, int n_taps,
                         const HardwareChain& chain, double noise_psd, int n_users,
                         int n_channels, int n_frames_per_channel, std::uint64_t seed,
                         std::uint64_t channel_stream_base, std::uint64_t frame_stream_base,
                         int n_workers) {
  if (n_channels < 1 || n_frames_per_channel < 1)
    throw std::invalid_argument("ber_monte_carlo: trial counts must be positive");

  struct PerChannel {
    LinkModel link;
    std::vector<CMat> zf;
    double ber_analytic = 0.0;
    int redraws = 0;
  };
  std::vector<PerChannel> per_channel(static_cast<std::size_t>(n_channels));

  parallel_for(n_channels, model_build_workers(n_workers), [&](int c) {
    PerChannel& slot = per_channel[static_cast<std::size_t>(c)];
    RngStream ch_rng(seed, stream_kind::channel |
                               (channel_stream_base + static_cast<std::uint64_t>(c)));
    for (int attempt = 0;; ++attempt) {
      if (attempt > 100)
        throw std::runtime_error("ber_monte_carlo: persistent rank-deficient channel draws");
      ChannelRealization ch = draw_channel(n_rx, n_users, n_taps, layout.total, ch_rng);
      const AggregateModel model = linearize_chain(signal_cov_freq(ch, layout, noise_psd), chain);
      try {
        slot.zf = zf_per_subcarrier(ch, model.g_tot, layout);
      } catch (const std::runtime_error&) {
        ++slot.redraws;
        continue;
      }
      slot.ber_analytic = ber_analytic(
          sindr_grid(slot.zf, ch, model.g_tot, model.c_e_tot_freq, noise_psd, layout));
      slot.link = LinkModel{layout, std::move(ch), chain, noise_psd};
      break;
    }
  });

  BerPoint point;
  const int total_frames = n_channels * n_frames_per_channel;
  std::vector<std::uint64_t> errors(static_cast<std::size_t>(total_frames), 0);
  parallel_for(total_frames, n_workers, [&](int idx) {
    const int c = idx / n_frames_per_channel;
    const PerChannel& slot = per_channel[static_cast<std::size_t>(c)];
    const BerEstimate est = ber_monte_carlo_frames(
        slot.link, slot.zf, 1, seed, frame_stream_base + static_cast<std::uint64_t>(idx), 1);
    errors[static_cast<std::size_t>(idx)] = est.errors;
  });

  for (int c = 0; c < n_channels; ++c) {
    point.ber_analytic += per_channel[static_cast<std::size_t>(c)].ber_analytic;
    point.channel_redraws += per_channel[static_cast<std::size_t>(c)].redraws;
  }
  point.ber_analytic /= static_cast<double>(n_channels);
  for (auto e : errors) point.mc.errors += e;
  point.mc.bits = static_cast<std::uint64_t>(total_frames) * static_cast<std::uint64_t>(n_users) *
                  static_cast<std::uint64_t>(2 * layout.occupied_count);
  point.mc.ber = static_cast<double>(point.mc.errors) / static_cast<double>(point.mc.bits);
  point.mc.halfwidth =
      1.96 * std::sqrt(point.mc.ber * (1.0 - point.mc.ber) / static_cast<double>(point.mc.bits));
  return point;
}

}  // namespace hwsim
