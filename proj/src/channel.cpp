#include "hwsim/channel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace hwsim {

std::vector<CMat> freq_response(const std::vector<CMat>& taps, int n_subcarriers) {
  if (taps.empty()) throw std::invalid_argument("freq_response: no taps");
  const int n_taps = static_cast<int>(taps.size());
  if (n_taps > n_subcarriers)
    throw std::invalid_argument("freq_response: more taps than subcarriers");
  std::vector<CMat> freq(static_cast<std::size_t>(n_subcarriers));
  for (int k = 0; k < n_subcarriers; ++k) {
    CMat acc = taps[0];
    for (int l = 1; l < n_taps; ++l) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) *
                           static_cast<double>(l) / static_cast<double>(n_subcarriers);
      acc += taps[static_cast<std::size_t>(l)] * cdouble(std::cos(angle), std::sin(angle));
    }
    freq[static_cast<std::size_t>(k)] = std::move(acc);
  }
  return freq;
}

ChannelRealization draw_channel(int n_rx, int n_tx, int n_taps, int n_subcarriers,
                                RngStream& rng) {
  if (n_rx < 1 || n_tx < 1 || n_taps < 1)
    throw std::invalid_argument("draw_channel: dimensions must be positive");
  ChannelRealization ch;
  ch.taps.resize(static_cast<std::size_t>(n_taps));
  const double tap_variance = 1.0 / static_cast<double>(n_taps);
  for (auto& tap : ch.taps) {
    tap.resize(n_rx, n_tx);
    for (Eigen::Index c = 0; c < tap.cols(); ++c)
      for (Eigen::Index r = 0; r < tap.rows(); ++r) tap(r, c) = rng.complex_normal(tap_variance);
  }
  ch.freq = freq_response(ch.taps, n_subcarriers);
  return ch;
}

CMat apply_channel(const ChannelRealization& channel, const TimeFrame& tx, double noise_psd,
                   RngStream& rng) {
  const int n_taps = channel.tap_count();
  if (tx.cp_len < n_taps - 1)
    throw std::invalid_argument("apply_channel: cyclic prefix shorter than L-1");
  if (channel.tx_count() != static_cast<int>(tx.samples.rows()))
    throw std::invalid_argument("apply_channel: user count mismatch");
  const int n = tx.fft_size();
  const int n_rx = channel.rx_count();
  CMat out = CMat::Zero(n_rx, n);
  for (int l = 0; l < n_taps; ++l)
    out.noalias() += channel.taps[static_cast<std::size_t>(l)] *
                     tx.samples.middleCols(tx.cp_len - l, n);
  if (noise_psd > 0.0) {
    for (int col = 0; col < n; ++col)
      for (int row = 0; row < n_rx; ++row) out(row, col) += rng.complex_normal(noise_psd);
  }
  return out;
}

void save_taps_csv(const ChannelRealization& channel, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_taps_csv: cannot open '" + path + "'");
  out << "l,rx,tx,re,im\n";
  char buf[96];
  for (int l = 0; l < channel.tap_count(); ++l) {
    const CMat& tap = channel.taps[static_cast<std::size_t>(l)];
    for (int r = 0; r < tap.rows(); ++r)
      for (int c = 0; c < tap.cols(); ++c) {
        std::snprintf(buf, sizeof buf, "%d,%d,%d,%.17g,%.17g\n", l, r, c, tap(r, c).real(),
                      tap(r, c).imag());
        out << buf;
      }
  }
}

ChannelRealization load_taps_csv(const std::string& path, int n_subcarriers) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_taps_csv: cannot open '" + path + "'");
  std::string line;
  std::getline(in, line);  // header
  struct Entry {
    int l, r, c;
    cdouble v;
  };
  std::vector<Entry> entries;
  int max_l = -1, max_r = -1, max_c = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Entry e;
    double re = 0.0, im = 0.0;
    if (std::sscanf(line.c_str(), "%d,%d,%d,%lf,%lf", &e.l, &e.r, &e.c, &re, &im) != 5)
      throw std::runtime_error("load_taps_csv: malformed row '" + line + "'");
    e.v = cdouble(re, im);
    max_l = std::max(max_l, e.l);
    max_r = std::max(max_r, e.r);
    max_c = std::max(max_c, e.c);
    entries.push_back(e);
  }
  if (entries.empty()) throw std::runtime_error("load_taps_csv: no tap rows in '" + path + "'");
  ChannelRealization ch;
  ch.taps.assign(static_cast<std::size_t>(max_l + 1), CMat::Zero(max_r + 1, max_c + 1));
  for (const Entry& e : entries) ch.taps[static_cast<std::size_t>(e.l)](e.r, e.c) = e.v;
  ch.freq = freq_response(ch.taps, n_subcarriers);
  return ch;
}

}  // namespace hwsim
