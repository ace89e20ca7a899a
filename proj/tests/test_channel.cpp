#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "hwsim/channel.hpp"

using namespace hwsim;

TEST_CASE("tap energy is normalized to one") {
  RngStream rng(21, 0);
  double energy = 0.0;
  const int draws = 2500;
  for (int i = 0; i < draws; ++i) {
    const ChannelRealization ch = draw_channel(2, 2, 10, 16, rng);
    for (const auto& tap : ch.taps) energy += tap.cwiseAbs2().sum();
  }
  energy /= draws * 4.0;  // per (rx, tx) pair
  CHECK(energy == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("single-tap channels are frequency flat") {
  RngStream rng(22, 0);
  const ChannelRealization ch = draw_channel(3, 2, 1, 8, rng);
  for (int k = 0; k < 8; ++k)
    CHECK((ch.freq[static_cast<std::size_t>(k)] - ch.taps[0]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("per-subcarrier gain has unit mean power") {
  RngStream rng(23, 0);
  double energy = 0.0;
  const int draws = 2000;
  for (int i = 0; i < draws; ++i) {
    const ChannelRealization ch = draw_channel(1, 1, 10, 16, rng);
    for (int k = 0; k < 16; ++k) energy += std::norm(ch.freq[static_cast<std::size_t>(k)](0, 0));
  }
  CHECK(energy / (draws * 16.0) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("two equal taps give the two-point transform") {
  std::vector<CMat> taps{CMat::Identity(2, 2), CMat::Identity(2, 2)};
  const auto freq = freq_response(taps, 2);
  CHECK((freq[0] - 2.0 * CMat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(freq[1].cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("frequency response satisfies Parseval") {
  RngStream rng(24, 0);
  const ChannelRealization ch = draw_channel(3, 2, 5, 32, rng);
  double tap_energy = 0.0, freq_energy = 0.0;
  for (const auto& tap : ch.taps) tap_energy += tap.cwiseAbs2().sum();
  for (const auto& f : ch.freq) freq_energy += f.cwiseAbs2().sum();
  CHECK(freq_energy == doctest::Approx(32.0 * tap_energy).epsilon(1e-10));
}

TEST_CASE("more taps than subcarriers is rejected") {
  std::vector<CMat> taps(5, CMat::Identity(1, 1));
  CHECK_THROWS(freq_response(taps, 4));
}

TEST_CASE("identity channel passes the signal through") {
  const SubcarrierLayout layout = make_layout(16, 6);
  RngStream rng(25, 0);
  const TimeFrame tf = ofdm_modulate(draw_symbols(layout, 2, SymbolMode::qpsk, rng), 0);
  ChannelRealization ch;
  ch.taps = {CMat::Identity(2, 2)};
  ch.freq = freq_response(ch.taps, 16);
  const CMat x = apply_channel(ch, tf, 0.0, rng);
  CHECK((x - tf.samples).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("prefix converts the channel to per-subcarrier products") {
  const SubcarrierLayout layout = make_layout(64, 24);
  RngStream rng(26, 0);
  const ChannelRealization ch = draw_channel(4, 3, 7, 64, rng);
  const FrequencyFrame frame = draw_symbols(layout, 3, SymbolMode::gaussian, rng);
  const TimeFrame tf = ofdm_modulate(frame, 6);
  const CMat x_hat = ofdm_demodulate(apply_channel(ch, tf, 0.0, rng));
  double worst = 0.0;
  for (int k = 0; k < 64; ++k) {
    const CVec expect = ch.freq[static_cast<std::size_t>(k)] * frame.symbols.col(k);
    worst = std::max(worst, (x_hat.col(k) - expect).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("noise level matches the requested variance") {
  const SubcarrierLayout layout = make_layout(64, 24);
  RngStream rng(27, 0);
  ChannelRealization ch;
  ch.taps = {CMat::Zero(2, 1)};
  ch.freq = freq_response(ch.taps, 64);
  FrequencyFrame zero{CMat::Zero(1, 64), layout};
  const TimeFrame tf = ofdm_modulate(zero, 0);
  double power = 0.0;
  int count = 0;
  for (int rep = 0; rep < 800; ++rep) {
    const CMat x = apply_channel(ch, tf, 2.0, rng);
    power += x.cwiseAbs2().sum();
    count += static_cast<int>(x.size());
  }
  CHECK(count >= 100000);
  CHECK(power / count == doctest::Approx(2.0).epsilon(0.03));
}

TEST_CASE("tap dump and load round trip exactly") {
  RngStream rng(29, 0);
  const ChannelRealization ch = draw_channel(3, 2, 4, 16, rng);
  const std::string path = "taps_roundtrip.csv";
  save_taps_csv(ch, path);
  const ChannelRealization back = load_taps_csv(path, 16);
  REQUIRE(back.tap_count() == 4);
  for (int l = 0; l < 4; ++l)
    CHECK((back.taps[static_cast<std::size_t>(l)] - ch.taps[static_cast<std::size_t>(l)])
              .cwiseAbs()
              .maxCoeff() == 0.0);
  for (int k = 0; k < 16; ++k)
    CHECK((back.freq[static_cast<std::size_t>(k)] - ch.freq[static_cast<std::size_t>(k)])
              .cwiseAbs()
              .maxCoeff() == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("short prefix is rejected") {
  const SubcarrierLayout layout = make_layout(16, 6);
  RngStream rng(28, 0);
  const ChannelRealization ch = draw_channel(2, 2, 5, 16, rng);
  const TimeFrame tf = ofdm_modulate(draw_symbols(layout, 2, SymbolMode::qpsk, rng), 3);
  CHECK_THROWS(apply_channel(ch, tf, 0.0, rng));
}
