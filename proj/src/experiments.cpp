#include "hwsim/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "hwsim/analysis.hpp"
#include "hwsim/bussgang.hpp"
#include "hwsim/parallel.hpp"

namespace hwsim {

namespace {

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

double to_db(double power) { return 10.0 * std::log10(std::max(power, 1e-300)); }

void write_metadata(const ExperimentConfig& cfg, std::ostream& out) {
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(cfg.hash()));
  out << "# " << kVersionString << "\n";
  out << "# config_hash = " << hash << "\n";
  out << "# seed = " << cfg.seed << "\n";
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  return out;
}

LinkModel seeded_link(const ExperimentConfig& cfg, double n0) {
  RngStream ch_rng(cfg.seed, stream_kind::channel | 0);
  LinkModel link;
  link.layout = cfg.layout();
  link.channel = draw_channel(cfg.n_rx, cfg.n_users, cfg.n_taps, cfg.n_subcarriers, ch_rng);
  link.chain = cfg.chain(n0);
  link.noise_psd = n0;
  return link;
}

}  // namespace

ExperimentConfig apply_overrides(ExperimentConfig cfg, const RunOverrides& overrides) {
  if (overrides.has_seed) cfg.seed = overrides.seed;
  if (overrides.trials > 0) {
    cfg.psd_frames = overrides.trials;
    cfg.ber_frames_per_channel = overrides.trials;
  }
  return cfg;
}

void run_psd(const ExperimentConfig& cfg, std::ostream& out, int workers) {
  const LinkModel link = seeded_link(cfg, cfg.noise_psd);
  const AggregateModel model =
      linearize_chain(signal_cov_freq(link.channel, link.layout, cfg.noise_psd), link.chain);
  const PsdCurve analytic = psd_analytic(model, cfg.psd_metric);
  const PsdCurve empirical =
      psd_empirical(link, cfg.symbols, cfg.psd_frames, cfg.seed, 0, workers);
  write_metadata(cfg, out);
  out << "k,psd_analytic_db,psd_empirical_db,n_frames\n";
  for (int k = 0; k < cfg.n_subcarriers; ++k)
    out << k << ',' << fmt(to_db(analytic.power[static_cast<std::size_t>(k)])) << ','
        << fmt(to_db(empirical.power[static_cast<std::size_t>(k)])) << ',' << cfg.psd_frames
        << "\n";
}

int run_ber(const ExperimentConfig& cfg, std::ostream& out, int workers) {
  write_metadata(cfg, out);
  out << "snr_db,ber_analytic,ber_mc,mc_halfwidth,n_channels,n_bits\n";
  const SubcarrierLayout layout = cfg.layout();
  int total_redraws = 0;
  for (std::size_t i = 0; i < cfg.snr_db.size(); ++i) {
    const double n0 = std::pow(10.0, -cfg.snr_db[i] / 10.0);
    const std::uint64_t frame_base = static_cast<std::uint64_t>(i) *
                                     static_cast<std::uint64_t>(cfg.ber_channels) *
                                     static_cast<std::uint64_t>(cfg.ber_frames_per_channel);
    const BerPoint point =
        ber_monte_carlo(layout, cfg.n_rx, cfg.n_taps, cfg.chain(n0), n0, cfg.n_users,
                        cfg.ber_channels, cfg.ber_frames_per_channel, cfg.seed,
                        /*channel_stream_base=*/0, frame_base, workers);
    total_redraws += point.channel_redraws;
    out << fmt(cfg.snr_db[i]) << ',' << fmt(point.ber_analytic) << ',' << fmt(point.mc.ber) << ','
        << fmt(point.mc.halfwidth) << ',' << cfg.ber_channels << ',' << point.mc.bits << "\n";
  }
  return total_redraws;
}

void run_linearize(const ExperimentConfig& cfg, std::ostream& out) {
  const LinkModel link = seeded_link(cfg, cfg.noise_psd);
  const SubcarrierCovarianceSet c_x = signal_cov_freq(link.channel, link.layout, cfg.noise_psd);
  const LagCovarianceSequence c_x_lag = cov_freq_to_lag(c_x);
  const LinearizedComponent lna = link.chain.lna
                                      ? lna_linearize(c_x_lag, *link.chain.lna)
                                      : LinearizedComponent::identity(c_x_lag);
  const LinearizedComponent osc = link.chain.phase_noise
                                      ? osc_linearize(lna.out_cov, *link.chain.phase_noise)
                                      : LinearizedComponent::identity(lna.out_cov);
  const LinearizedComponent adc = link.chain.adc ? adc_linearize(osc.out_cov, *link.chain.adc)
                                                 : LinearizedComponent::identity(osc.out_cov);
  const AggregateModel model = aggregate(c_x, lna, osc, adc);

  write_metadata(cfg, out);
  out << "record,k,b,re,im\n";
  auto dump_gain = [&](const char* name, const CVec& gain) {
    for (int b = 0; b < cfg.n_rx; ++b)
      out << name << ",-1," << b << ',' << fmt(gain(b).real()) << ',' << fmt(gain(b).imag())
          << "\n";
  };
  dump_gain("g_lna", lna.gain);
  dump_gain("g_osc", osc.gain);
  dump_gain("g_adc", adc.gain);
  dump_gain("g_tot", model.g_tot);
  for (int k = 0; k < cfg.n_subcarriers; ++k)
    for (int b = 0; b < cfg.n_rx; ++b)
      out << "e_tot_diag," << k << ',' << b << ','
          << fmt(model.c_e_tot_freq.mats[static_cast<std::size_t>(k)](b, b).real()) << ",0\n";
}

void run_psd_file(const ExperimentConfig& cfg, const std::string& path, int workers) {
  auto out = open_out(path);
  run_psd(cfg, out, workers);
}

int run_ber_file(const ExperimentConfig& cfg, const std::string& path, int workers) {
  auto out = open_out(path);
  return run_ber(cfg, out, workers);
}

void run_linearize_file(const ExperimentConfig& cfg, const std::string& path) {
  auto out = open_out(path);
  run_linearize(cfg, out);
}

bool ValidateReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

namespace {

void add_check(ValidateReport& report, const std::string& name, double measured, double bound) {
  report.checks.push_back({name, measured, bound, measured <= bound});
}

double check_dft_roundtrip(std::uint64_t seed) {
  double worst = 0.0;
  for (int n : {6, 64, 1024}) {
    RngStream rng(seed, stream_kind::misc | 11);
    std::vector<cdouble> x = sample_cn(rng, static_cast<std::size_t>(n), 1.0);
    const auto back = dft(dft(x, FftDirection::forward), FftDirection::inverse);
    for (int i = 0; i < n; ++i)
      worst = std::max(worst, std::abs(back[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)]));
  }
  return worst;
}

double check_dft_parseval(std::uint64_t seed) {
  double worst = 0.0;
  for (int n : {5, 64, 300}) {
    RngStream rng(seed, stream_kind::misc | 12);
    std::vector<cdouble> x = sample_cn(rng, static_cast<std::size_t>(n), 2.0);
    const auto fwd = dft(x, FftDirection::forward);
    double e_in = 0.0, e_out = 0.0;
    for (const auto& v : x) e_in += std::norm(v);
    for (const auto& v : fwd) e_out += std::norm(v);
    worst = std::max(worst, std::abs(std::sqrt(e_out) - std::sqrt(e_in)) / std::sqrt(e_in));
  }
  return worst;
}

double check_qfunc_symmetry() {
  double worst = 0.0;
  for (double x = -8.0; x <= 8.0; x += 0.25)
    worst = std::max(worst, std::abs(q_function(-x) - (1.0 - q_function(x))));
  return worst;
}

struct SmallRig {
  SubcarrierLayout layout;
  ChannelRealization channel;
};

SmallRig small_rig(std::uint64_t seed) {
  SmallRig rig;
  rig.layout = make_layout(32, 12);
  RngStream rng(seed, stream_kind::misc | 20);
  rig.channel = draw_channel(3, 2, 5, 32, rng);
  return rig;
}

double check_cyclic_prefix(std::uint64_t seed) {
  const SubcarrierLayout layout = make_layout(32, 12);
  RngStream rng(seed, stream_kind::misc | 21);
  const TimeFrame tf = ofdm_modulate(draw_symbols(layout, 2, SymbolMode::qpsk, rng), 4);
  return (tf.samples.leftCols(4) - tf.samples.rightCols(4)).cwiseAbs().maxCoeff();
}

double check_mod_demod(std::uint64_t seed) {
  const SubcarrierLayout layout = make_layout(32, 12);
  RngStream rng(seed, stream_kind::misc | 22);
  const FrequencyFrame frame = draw_symbols(layout, 2, SymbolMode::gaussian, rng);
  const TimeFrame tf = ofdm_modulate(frame, 4);
  const CMat back = ofdm_demodulate(tf.samples.rightCols(32));
  return (back - frame.symbols).cwiseAbs().maxCoeff();
}

double check_qpsk_energy(std::uint64_t seed) {
  const SubcarrierLayout layout = make_layout(32, 12);
  RngStream rng(seed, stream_kind::misc | 23);
  const FrequencyFrame frame = draw_symbols(layout, 2, SymbolMode::qpsk, rng);
  double worst = 0.0;
  for (int k : layout.occupied)
    for (int u = 0; u < 2; ++u) worst = std::max(worst, std::abs(std::norm(frame.symbols(u, k)) - 1.0));
  return worst;
}

double check_demap_roundtrip(std::uint64_t seed) {
  const SubcarrierLayout layout = make_layout(32, 12);
  RngStream rng(seed, stream_kind::misc | 24);
  const BitMatrix bits = draw_bits(2, layout, rng);
  const BitMatrix back = qpsk_demap(map_qpsk(bits, layout).symbols, layout);
  return static_cast<double>((bits.array() != back.array()).count());
}

double check_cp_circularization(std::uint64_t seed) {
  const SmallRig rig = small_rig(seed);
  RngStream rng(seed, stream_kind::misc | 25);
  const FrequencyFrame frame = draw_symbols(rig.layout, 2, SymbolMode::gaussian, rng);
  const TimeFrame tf = ofdm_modulate(frame, rig.channel.tap_count() - 1);
  const CMat x = apply_channel(rig.channel, tf, 0.0, rng);
  const CMat x_hat = ofdm_demodulate(x);
  double worst = 0.0;
  for (int k = 0; k < rig.layout.total; ++k) {
    const CVec expect = rig.channel.freq[static_cast<std::size_t>(k)] * frame.symbols.col(k);
    worst = std::max(worst, (x_hat.col(k) - expect).cwiseAbs().maxCoeff());
  }
  return worst;
}

double check_quantizer_grid() {
  const AdcParams p{3, 0.25};
  int violations = 0;
  double prev = -1e300;
  const int grid = 10000;
  for (int i = 0; i < grid; ++i) {
    const double z = -6.0 + 12.0 * static_cast<double>(i) / (grid - 1);
    const double q = quantize_real(z, p);
    if (q < prev) ++violations;                                      // monotone
    prev = q;
    if (quantize_real(q, p) != q) ++violations;                      // idempotent
    const double neg = quantize_real(-z, p);
    const bool on_boundary = std::abs(z / p.step - std::round(z / p.step)) < 1e-9;
    if (!on_boundary && std::abs(neg + q) > 1e-12) ++violations;     // odd symmetry
    if (std::abs(z) < 0.5 * p.step * std::exp2(p.bits) && std::abs(q - z) > 0.5 * p.step + 1e-12)
      ++violations;                                                  // granular error bound
  }
  return violations;
}

double check_chain_power(std::uint64_t seed) {
  const SmallRig rig = small_rig(seed);
  RngStream rng(seed, stream_kind::misc | 26);
  const FrequencyFrame frame = draw_symbols(rig.layout, 2, SymbolMode::gaussian, rng);
  const TimeFrame tf = ofdm_modulate(frame, rig.channel.tap_count() - 1);
  const CMat x = apply_channel(rig.channel, tf, 0.1, rng);
  HardwareChain chain;
  chain.lna = LnaParams{cdouble(std::cos(0.3), std::sin(0.3)), 0.0};
  chain.phase_noise = PhaseNoiseParams{0.95, 800.0, 1e-7};
  const auto phase = phase_noise_path(*chain.phase_noise, rig.layout.total, rng);
  const CMat r = impair_chain(x, chain, phase);
  return std::abs(r.cwiseAbs2().sum() / x.cwiseAbs2().sum() - 1.0);
}

double check_ideal_reduction(std::uint64_t seed) {
  const SmallRig rig = small_rig(seed);
  const SubcarrierCovarianceSet c_x = signal_cov_freq(rig.channel, rig.layout, 0.25);
  const AggregateModel model = linearize_chain(c_x, HardwareChain{});
  double worst = (model.g_tot - CVec::Ones(3)).cwiseAbs().maxCoeff();
  for (const auto& m : model.c_e_tot.mats) worst = std::max(worst, m.cwiseAbs().maxCoeff());
  for (int k = 0; k < rig.layout.total; ++k)
    worst = std::max(worst, (model.c_r_freq.mats[static_cast<std::size_t>(k)] -
                             c_x.mats[static_cast<std::size_t>(k)])
                                .cwiseAbs()
                                .maxCoeff());
  return worst;
}

double check_distortion_identity(std::uint64_t seed, const ExperimentConfig& cfg) {
  const SmallRig rig = small_rig(seed);
  const LagCovarianceSequence c_x =
      cov_freq_to_lag(signal_cov_freq(rig.channel, rig.layout, 0.1));
  const LnaParams lna_params =
      cfg.lna_enable ? LnaParams{cfg.lna_alpha1, cfg.lna_alpha2} : LnaParams{1.05, -0.03};
  const LinearizedComponent lna = lna_linearize(c_x, lna_params);
  const PhaseNoiseParams pn{cfg.pn_enable ? cfg.pn_lambda : 0.99,
                            cfg.pn_enable ? cfg.pn_beta_hz : 1e3, 1e-7};
  const LinearizedComponent osc = osc_linearize(lna.out_cov, pn);
  double worst = 0.0;
  for (int m = 0; m < c_x.period(); ++m) {
    const CMat lhs_lna = lna.out_cov.mats[static_cast<std::size_t>(m)] -
                         lna.gain.asDiagonal() * c_x.mats[static_cast<std::size_t>(m)] *
                             lna.gain.conjugate().asDiagonal();
    worst = std::max(worst,
                     (lhs_lna - lna.dist_cov.mats[static_cast<std::size_t>(m)]).cwiseAbs().maxCoeff());
    const CMat lhs_osc = osc.out_cov.mats[static_cast<std::size_t>(m)] -
                         osc.gain.asDiagonal() * lna.out_cov.mats[static_cast<std::size_t>(m)] *
                             osc.gain.conjugate().asDiagonal();
    worst = std::max(worst,
                     (lhs_osc - osc.dist_cov.mats[static_cast<std::size_t>(m)]).cwiseAbs().maxCoeff());
  }
  return worst;
}

double check_osc_gain(const ExperimentConfig& cfg) {
  const double lambda = cfg.pn_enable ? cfg.pn_lambda : 0.99;
  const double beta = cfg.pn_enable ? cfg.pn_beta_hz : 1e3;
  const double ts = cfg.sample_period_s();
  LagCovarianceSequence c;
  c.mats.assign(8, CMat::Identity(2, 2));
  const LinearizedComponent osc = osc_linearize(c, PhaseNoiseParams{lambda, beta, ts});
  const double direct = std::exp(-std::numbers::pi * beta * ts / (1.0 - lambda * lambda));
  return std::abs(osc.gain(0).real() - direct);
}

// Distortion power of the linearized model vs the exact chain, band-averaged.
// The corrupt hook scales the model's composed distortion spectrum and must
// push this check over its bound.
double check_model_vs_simulation(const ExperimentConfig& cfg, bool corrupt, int workers) {
  const SubcarrierLayout layout = make_layout(64, 24);
  RngStream ch_rng(cfg.seed, stream_kind::misc | 30);
  const ChannelRealization channel = draw_channel(2, 2, 10, 64, ch_rng);
  const HardwareChain chain = cfg.chain(cfg.noise_psd);
  AggregateModel model = linearize_chain(signal_cov_freq(channel, layout, cfg.noise_psd), chain);
  if (corrupt)
    for (auto& m : model.c_e_tot_freq.mats) m *= 2.25;

  double model_mean = 0.0;
  for (const auto& m : model.c_e_tot_freq.mats) model_mean += m.diagonal().real().sum();
  model_mean /= static_cast<double>(layout.total) * 2.0;

  const int n_frames = 3000;
  const int cp = channel.tap_count() - 1;
  std::vector<double> slot(static_cast<std::size_t>(n_frames), 0.0);
  parallel_for(n_frames, workers, [&](int t) {
    RngStream rng(cfg.seed, stream_kind::misc | (100 + static_cast<std::uint64_t>(t)));
    const FrequencyFrame tx = draw_symbols(layout, 2, SymbolMode::gaussian, rng);
    const TimeFrame tf = ofdm_modulate(tx, cp);
    const CMat x = apply_channel(channel, tf, cfg.noise_psd, rng);
    std::vector<double> phase;
    std::span<const double> mix;
    if (chain.phase_noise) {
      phase = phase_noise_path(*chain.phase_noise, cp + layout.total, rng);
      mix = std::span<const double>(phase).subspan(static_cast<std::size_t>(cp));
    }
    const CMat r_hat = ofdm_demodulate(impair_chain(x, chain, mix));
    const CMat e_hat = r_hat - model.g_tot.asDiagonal() * ofdm_demodulate(x);
    slot[static_cast<std::size_t>(t)] = e_hat.cwiseAbs2().sum();
  });
  double mc_mean = 0.0;
  for (double v : slot) mc_mean += v;
  mc_mean /= static_cast<double>(n_frames) * static_cast<double>(layout.total) * 2.0;

  const double scale = std::max(model_mean, 1e-12);
  return std::abs(mc_mean - model_mean) / scale;
}

double check_zf_identity(std::uint64_t seed) {
  const SmallRig rig = small_rig(seed);
  CVec g(3);
  g << cdouble(0.9, 0.1), cdouble(1.1, -0.05), cdouble(0.95, 0.0);
  double worst = 0.0;
  for (int k : rig.layout.occupied) {
    const CMat& h = rig.channel.freq[static_cast<std::size_t>(k)];
    const CMat a = zf_matrix(h, g);
    worst = std::max(worst, (a.adjoint() * (g.asDiagonal() * h) - CMat::Identity(2, 2))
                                .cwiseAbs()
                                .maxCoeff());
  }
  return worst;
}

double check_sindr_scalar() {
  SubcarrierLayout layout = make_layout(4, 2);
  ChannelRealization ch;
  ch.taps = {CMat::Constant(1, 1, cdouble(2.0, 0.0))};
  ch.freq = freq_response(ch.taps, 4);
  const CVec g = CVec::Ones(1);
  std::vector<CMat> zf;
  for (int k : layout.occupied) zf.push_back(zf_matrix(ch.freq[static_cast<std::size_t>(k)], g));
  SubcarrierCovarianceSet ce;
  ce.mats.assign(4, CMat::Zero(1, 1));
  const RMat grid = sindr_grid(zf, ch, g, ce, 1.0, layout);
  return std::abs(grid(0, 0) - 4.0);
}

double check_ber_agreement(const ExperimentConfig& cfg, int workers) {
  const double snr_db = cfg.snr_db[cfg.snr_db.size() / 2];
  const double n0 = std::pow(10.0, -snr_db / 10.0);
  const BerPoint point =
      ber_monte_carlo(cfg.layout(), cfg.n_rx, cfg.n_taps, cfg.chain(n0), n0, cfg.n_users,
                      /*n_channels=*/4, /*n_frames_per_channel=*/4, cfg.seed,
                      /*channel_stream_base=*/500, /*frame_stream_base=*/0, workers);
  const double tolerance = std::max(0.5 * point.ber_analytic, 5.0 * point.mc.halfwidth);
  if (tolerance <= 0.0) return point.mc.ber == point.ber_analytic ? 0.0 : 1e300;
  return std::abs(point.mc.ber - point.ber_analytic) / tolerance;
}

double check_config_roundtrip(const ExperimentConfig& cfg) {
  const ExperimentConfig back = parse_config_text(cfg.canonical_text(), "<canonical>");
  return back.canonical_text() == cfg.canonical_text() ? 0.0 : 1.0;
}

}  // namespace

ValidateReport run_validate(const ExperimentConfig& cfg, const ValidateOptions& options,
                            int workers) {
  ValidateReport report;
  const std::uint64_t seed = cfg.seed;
  add_check(report, "numerics.dft_roundtrip", check_dft_roundtrip(seed), 1e-12);
  add_check(report, "numerics.dft_parseval", check_dft_parseval(seed), 1e-10);
  add_check(report, "numerics.qfunc_symmetry", check_qfunc_symmetry(), 1e-14);
  add_check(report, "numerics.qfunc_value", std::abs(q_function(1.0) - 0.15865525393145705),
            1e-12);
  add_check(report, "waveform.cyclic_prefix", check_cyclic_prefix(seed), 0.0);
  add_check(report, "waveform.mod_demod_roundtrip", check_mod_demod(seed), 1e-10);
  add_check(report, "waveform.qpsk_unit_energy", check_qpsk_energy(seed), 1e-12);
  add_check(report, "waveform.qpsk_demap_roundtrip", check_demap_roundtrip(seed), 0.0);
  add_check(report, "channel.cp_circularization", check_cp_circularization(seed), 1e-9);
  add_check(report, "impairments.quantizer_grid", check_quantizer_grid(), 0.0);
  add_check(report, "impairments.chain_power", check_chain_power(seed), 1e-12);
  add_check(report, "bussgang.ideal_reduction", check_ideal_reduction(seed), 1e-14);
  add_check(report, "bussgang.distortion_identity", check_distortion_identity(seed, cfg), 1e-12);
  add_check(report, "bussgang.osc_gain", check_osc_gain(cfg), 1e-12);
  add_check(report, "bussgang.model_vs_simulation",
            check_model_vs_simulation(cfg, options.corrupt_ce_tot, workers), 0.15);
  add_check(report, "analysis.zf_identity", check_zf_identity(seed), 1e-9);
  add_check(report, "analysis.sindr_scalar", check_sindr_scalar(), 1e-12);
  add_check(report, "analysis.ber_agreement", check_ber_agreement(cfg, workers), 1.0);
  add_check(report, "harness.config_roundtrip", check_config_roundtrip(cfg), 0.0);
  return report;
}

void write_validate_json(const ValidateReport& report, const ExperimentConfig& cfg,
                         std::ostream& out) {
  nlohmann::ordered_json doc;
  doc["version"] = kVersionString;
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(cfg.hash()));
  doc["config_hash"] = hash;
  doc["all_pass"] = report.all_pass();
  auto checks = nlohmann::ordered_json::array();
  for (const auto& c : report.checks) {
    nlohmann::ordered_json item;
    item["name"] = c.name;
    item["measured"] = c.measured;
    item["bound"] = c.bound;
    item["verdict"] = c.pass ? "pass" : "fail";
    checks.push_back(item);
  }
  doc["checks"] = checks;
  out << doc.dump(2) << "\n";
}

}  // namespace hwsim
