#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "hwsim/waveform.hpp"

using namespace hwsim;

TEST_CASE("default layout rule") {
  const SubcarrierLayout layout = make_layout(8, 4);
  CHECK(layout.occupied == std::vector<int>{1, 2, 6, 7});
  CHECK(layout.is_occupied(1));
  CHECK_FALSE(layout.is_occupied(0));
  CHECK_FALSE(layout.is_occupied(3));
}

TEST_CASE("production-size layout") {
  const SubcarrierLayout layout = make_layout(1024, 300);
  CHECK(layout.occupied.size() == 300);
  CHECK_FALSE(layout.is_occupied(0));
  std::set<int> unique(layout.occupied.begin(), layout.occupied.end());
  CHECK(unique.size() == 300);
  for (int k : layout.occupied) CHECK((k >= 1 && k < 1024));
}

TEST_CASE("layout rejections") {
  CHECK_THROWS(make_layout(4, 4));   // would occupy DC
  CHECK_THROWS(make_layout(16, 5));  // odd
  CHECK_THROWS(make_layout(8, 10));  // more than N
  CHECK_THROWS(make_layout(8, 0));
}

TEST_CASE("qpsk symbols have unit energy and zero guards") {
  const SubcarrierLayout layout = make_layout(64, 24);
  RngStream rng(3, 0);
  const FrequencyFrame frame = draw_symbols(layout, 3, SymbolMode::qpsk, rng);
  for (int u = 0; u < 3; ++u) {
    for (int k = 0; k < 64; ++k) {
      if (layout.is_occupied(k))
        CHECK(std::norm(frame.symbols(u, k)) == doctest::Approx(1.0).epsilon(1e-12));
      else
        CHECK(frame.symbols(u, k) == cdouble(0.0, 0.0));
    }
  }
}

TEST_CASE("gaussian symbols are unit variance") {
  const SubcarrierLayout layout = make_layout(64, 32);
  RngStream rng(4, 0);
  double power = 0.0;
  int count = 0;
  for (int rep = 0; rep < 3200; ++rep) {
    const FrequencyFrame frame = draw_symbols(layout, 1, SymbolMode::gaussian, rng);
    for (int k : layout.occupied) {
      power += std::norm(frame.symbols(0, k));
      ++count;
    }
  }
  CHECK(count >= 100000);
  CHECK(power / count == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("modulating zero gives zero") {
  const SubcarrierLayout layout = make_layout(16, 4);
  FrequencyFrame frame{CMat::Zero(2, 16), layout};
  const TimeFrame tf = ofdm_modulate(frame, 3);
  CHECK(tf.samples.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single occupied tone is a complex exponential") {
  const SubcarrierLayout layout = make_layout(4, 2);
  FrequencyFrame frame{CMat::Zero(1, 4), layout};
  frame.symbols(0, 1) = cdouble(2.0, 0.0);
  const TimeFrame tf = ofdm_modulate(frame, 0);
  for (int n = 0; n < 4; ++n) {
    const double angle = std::numbers::pi * n / 2.0;
    CHECK(std::abs(tf.samples(0, n) - cdouble(std::cos(angle), std::sin(angle))) < 1e-12);
  }
}

TEST_CASE("cyclic prefix replicates the frame tail") {
  const SubcarrierLayout layout = make_layout(64, 24);
  RngStream rng(5, 0);
  const TimeFrame tf = ofdm_modulate(draw_symbols(layout, 2, SymbolMode::qpsk, rng), 9);
  CHECK((tf.samples.leftCols(9) - tf.samples.rightCols(9)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("average transmit power is S/N") {
  const SubcarrierLayout layout = make_layout(64, 24);
  RngStream rng(6, 0);
  double power = 0.0;
  int count = 0;
  for (int rep = 0; rep < 700; ++rep) {
    const TimeFrame tf = ofdm_modulate(draw_symbols(layout, 1, SymbolMode::qpsk, rng), 0);
    power += tf.samples.cwiseAbs2().sum();
    count += static_cast<int>(tf.samples.cols());
  }
  const double expect = 24.0 / 64.0;
  CHECK(power / count == doctest::Approx(expect).epsilon(0.05));

  // production numerology: S/N = 300/1024, about 0.293
  const SubcarrierLayout big = make_layout(1024, 300);
  double big_power = 0.0;
  int big_count = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const TimeFrame tf = ofdm_modulate(draw_symbols(big, 1, SymbolMode::qpsk, rng), 0);
    big_power += tf.samples.cwiseAbs2().sum();
    big_count += static_cast<int>(tf.samples.cols());
  }
  CHECK(big_power / big_count == doctest::Approx(300.0 / 1024.0).epsilon(0.05));
}

TEST_CASE("demodulate inverts modulate") {
  const SubcarrierLayout layout = make_layout(48, 20);
  RngStream rng(7, 0);
  const FrequencyFrame frame = draw_symbols(layout, 4, SymbolMode::gaussian, rng);
  const TimeFrame tf = ofdm_modulate(frame, 5);
  const CMat back = ofdm_demodulate(tf.samples.rightCols(48));
  CHECK((back - frame.symbols).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("demodulating a bare tone concentrates on its bin") {
  const int n = 32, k0 = 5;
  CMat tone(1, n);
  for (int t = 0; t < n; ++t) {
    const double angle = 2.0 * std::numbers::pi * k0 * t / n;
    tone(0, t) = cdouble(std::cos(angle), std::sin(angle));
  }
  const CMat spec = ofdm_demodulate(tone);
  CHECK(std::abs(spec(0, k0) - cdouble(std::sqrt(32.0), 0.0)) < 1e-10);
  for (int k = 0; k < n; ++k)
    if (k != k0) CHECK(std::abs(spec(0, k)) < 1e-10);
}

TEST_CASE("demodulation is linear") {
  RngStream rng(8, 0);
  CMat x(2, 16), y(2, 16);
  for (int c = 0; c < 16; ++c)
    for (int r = 0; r < 2; ++r) {
      x(r, c) = rng.complex_normal(1.0);
      y(r, c) = rng.complex_normal(1.0);
    }
  const cdouble a(0.3, -1.2), b(-0.7, 0.4);
  const CMat lhs = ofdm_demodulate((a * x + b * y).eval());
  const CMat rhs = a * ofdm_demodulate(x) + b * ofdm_demodulate(y);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("demap inverts map and resolves ties upward") {
  const SubcarrierLayout layout = make_layout(32, 12);
  RngStream rng(9, 0);
  const BitMatrix bits = draw_bits(3, layout, rng);
  CHECK((bits.array() != qpsk_demap(map_qpsk(bits, layout).symbols, layout).array()).count() == 0);

  CMat estimates = CMat::Zero(1, 32);
  estimates(0, layout.occupied[0]) = cdouble(0.1, -0.9);
  const BitMatrix decided = qpsk_demap(estimates, layout);
  CHECK(decided(0, 0) == 0);  // positive real part
  CHECK(decided(0, 1) == 1);  // negative imaginary part
  // the zero estimate on occupied bin #1 decides to the positive quadrant
  CHECK(decided(0, 2) == 0);
  CHECK(decided(0, 3) == 0);
}
