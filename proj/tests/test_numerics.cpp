#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "hwsim/numerics.hpp"
#include "oracles.hpp"

using namespace hwsim;

TEST_CASE("forward DFT of a constant four-vector") {
  const std::vector<cdouble> x(4, cdouble(1.0, 0.0));
  const auto fwd = dft(x, FftDirection::forward);
  CHECK(std::abs(fwd[0] - cdouble(2.0, 0.0)) < 1e-12);
  for (int k = 1; k < 4; ++k) CHECK(std::abs(fwd[static_cast<std::size_t>(k)]) < 1e-12);
}

TEST_CASE("DFT round trip and Parseval across sizes") {
  for (int n : {1, 2, 6, 37, 64, 300, 1024, 4096}) {
    RngStream rng(7, static_cast<std::uint64_t>(n));
    const auto x = sample_cn(rng, static_cast<std::size_t>(n), 1.0);
    const auto fwd = dft(x, FftDirection::forward);
    const auto back = dft(fwd, FftDirection::inverse);
    double max_err = 0.0, e_in = 0.0, e_out = 0.0;
    for (int i = 0; i < n; ++i) {
      max_err = std::max(max_err, std::abs(back[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)]));
      e_in += std::norm(x[static_cast<std::size_t>(i)]);
      e_out += std::norm(fwd[static_cast<std::size_t>(i)]);
    }
    CAPTURE(n);
    CHECK(max_err < 1e-12);
    CHECK(std::abs(std::sqrt(e_out) / std::sqrt(e_in) - 1.0) < 1e-10);
  }
}

TEST_CASE("DFT matches the direct long-double evaluation") {
  for (int n : {6, 37, 64, 257}) {
    RngStream rng(11, static_cast<std::uint64_t>(n));
    const auto x = sample_cn(rng, static_cast<std::size_t>(n), 1.0);
    for (auto dir : {FftDirection::forward, FftDirection::inverse}) {
      const auto got = dft(x, dir);
      const auto want = oracles::dft_direct(x, dir);
      for (int i = 0; i < n; ++i)
        CHECK(std::abs(got[static_cast<std::size_t>(i)] - want[static_cast<std::size_t>(i)]) < 1e-10);
    }
  }
}

TEST_CASE("DFT rejects empty input") {
  std::vector<cdouble> empty;
  CHECK_THROWS(dft(empty, FftDirection::forward));
}

TEST_CASE("q_function basics") {
  CHECK(q_function(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(q_function(40.0) < 1e-300);
  CHECK(q_function(1.0) == doctest::Approx(0.158655).epsilon(1e-5));
  for (double x = -6.0; x <= 6.0; x += 0.37)
    CHECK(std::abs(q_function(-x) - (1.0 - q_function(x))) < 1e-14);
  double prev = 1.0;
  for (double x = -8.0; x <= 8.0; x += 0.05) {
    CHECK(q_function(x) <= prev);
    prev = q_function(x);
  }
}

TEST_CASE("q_function agrees with the integration oracle on [-8, 8]") {
  for (double x = -8.0; x <= 8.0; x += 0.125)
    CHECK(std::abs(q_function(x) - oracles::gaussian_tail(x)) < 1e-9);
}

TEST_CASE("streams are reproducible and distinct") {
  RngStream a(123, 5), b(123, 5), c(123, 6);
  bool any_diff = false;
  for (int i = 0; i < 1000; ++i) {
    const auto va = a.next_u64();
    CHECK(va == b.next_u64());
    any_diff = any_diff || (va != c.next_u64());
  }
  CHECK(any_diff);
}

TEST_CASE("complex Gaussian moments") {
  RngStream rng(2024, 1);
  const std::size_t n = 1'000'000;
  const double variance = 3.0;
  const auto x = sample_cn(rng, n, variance);
  cdouble mean(0.0, 0.0);
  double power = 0.0, re_var = 0.0, im_var = 0.0, cross = 0.0;
  for (const auto& v : x) {
    mean += v;
    power += std::norm(v);
    re_var += v.real() * v.real();
    im_var += v.imag() * v.imag();
    cross += v.real() * v.imag();
  }
  mean /= static_cast<double>(n);
  power /= static_cast<double>(n);
  CHECK(std::abs(mean) <= 4.0 * std::sqrt(variance / static_cast<double>(n)));
  CHECK(power == doctest::Approx(variance).epsilon(0.02));
  CHECK(re_var / static_cast<double>(n) == doctest::Approx(variance / 2).epsilon(0.02));
  CHECK(im_var / static_cast<double>(n) == doctest::Approx(variance / 2).epsilon(0.02));
  CHECK(std::abs(cross / static_cast<double>(n)) < 4.0 * variance / 2.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("degenerate and invalid variance") {
  RngStream rng(1, 1);
  const auto zeros = sample_cn(rng, 16, 0.0);
  for (const auto& v : zeros) CHECK(v == cdouble(0.0, 0.0));
  CHECK_THROWS(sample_cn(rng, 4, -1.0));
}
