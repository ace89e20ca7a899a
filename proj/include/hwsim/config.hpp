#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hwsim/analysis.hpp"
#include "hwsim/impairments.hpp"
#include "hwsim/types.hpp"
#include "hwsim/waveform.hpp"

namespace hwsim {

/// Raised for malformed or out-of-range configuration input; the message names
/// the offending key. Mapped to exit code 2 by the CLI.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DeltaRule { paper, fixed };

/// Flat key = value experiment description. See configs/paper.cfg for the
/// documented schema and defaults.
struct ExperimentConfig {
  int n_rx = 0;          // B
  int n_users = 0;       // U
  int n_subcarriers = 0; // N
  int n_occupied = 0;    // S
  int n_taps = 0;        // L
  double f_sub_hz = 15e3;
  double noise_psd = 0.0;              // n0 (psd/linearize/validate runs)
  std::vector<double> snr_db;          // ber runs; SNR = 1/N0
  std::uint64_t seed = 1;
  SymbolMode symbols = SymbolMode::qpsk;

  bool lna_enable = false;
  cdouble lna_alpha1{1.0, 0.0};
  cdouble lna_alpha2{0.0, 0.0};

  bool pn_enable = false;
  double pn_lambda = 0.0;
  double pn_beta_hz = 0.0;

  bool adc_enable = false;
  int adc_bits = 0;
  DeltaRule adc_delta_rule = DeltaRule::paper;
  double adc_delta = 0.0;  // used when adc_delta_rule == fixed

  int psd_frames = 500;
  PsdMetric psd_metric = PsdMetric::trace;
  int ber_channels = 20;
  int ber_frames_per_channel = 10;

  double sample_rate_hz() const { return n_subcarriers * f_sub_hz; }
  double sample_period_s() const { return 1.0 / sample_rate_hz(); }
  double oversampling_rate() const {
    return static_cast<double>(n_subcarriers) / static_cast<double>(n_occupied);
  }

  /// Quantizer step for a given noise level: the paper rule scales with the
  /// expected per-antenna input power, step = 0.086*sqrt(U*S/N + n0).
  double resolve_delta(double n0) const;

  /// Enabled impairment stages with all derived parameters resolved.
  HardwareChain chain(double n0) const;

  SubcarrierLayout layout() const { return make_layout(n_subcarriers, n_occupied); }

  /// Canonical serialization (fixed key order); parsing it back reproduces the
  /// same configuration.
  std::string canonical_text() const;

  /// FNV-1a hash of the canonical text, reported in output metadata.
  std::uint64_t hash() const;
};

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);
ExperimentConfig load_config(const std::string& path);

}  // namespace hwsim
