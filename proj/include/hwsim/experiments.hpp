#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hwsim/config.hpp"

namespace hwsim {

inline constexpr const char* kVersionString = "ofdm-hwsim v0.1.0";

/// CLI-level overrides applied on top of a loaded config.
struct RunOverrides {
  bool has_seed = false;
  std::uint64_t seed = 0;
  int trials = 0;  // >0 replaces psd.frames and ber.frames_per_channel
};

ExperimentConfig apply_overrides(ExperimentConfig cfg, const RunOverrides& overrides);

/// PSD experiment: one seeded channel, analytic curve from the linearized model
/// and a Monte-Carlo periodogram of the exact chain, written as CSV
/// (k, psd_analytic_db, psd_empirical_db, n_frames).
void run_psd(const ExperimentConfig& cfg, std::ostream& out, int workers);

/// BER sweep over the config's SNR grid (SNR = 1/N0): analytic and Monte-Carlo
/// BER over the same seeded channel set, written as CSV
/// (snr_db, ber_analytic, ber_mc, mc_halfwidth, n_channels, n_bits).
/// Returns the number of rank-deficient channel draws that were replaced.
int run_ber(const ExperimentConfig& cfg, std::ostream& out, int workers);

/// Dumps the linearized model for one seeded channel as CSV (record, k, b, re, im):
/// per-antenna gain diagonals (records g_lna, g_osc, g_adc, g_tot with k = -1)
/// and the per-subcarrier distortion diagonal (record e_tot_diag).
void run_linearize(const ExperimentConfig& cfg, std::ostream& out);

// File variants; the CSV bytes depend only on config + seed.
void run_psd_file(const ExperimentConfig& cfg, const std::string& path, int workers);
int run_ber_file(const ExperimentConfig& cfg, const std::string& path, int workers);
void run_linearize_file(const ExperimentConfig& cfg, const std::string& path);

struct ValidateCheck {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct ValidateReport {
  std::vector<ValidateCheck> checks;
  bool all_pass() const;
};

struct ValidateOptions {
  /// Test hook: corrupts the composed distortion covariance before the
  /// model-vs-simulation equivalence check, which must then fail.
  bool corrupt_ce_tot = false;
};

/// Reduced-scale self-check suite: module invariants plus desk-scale versions
/// of the PSD and BER agreement experiments, using the config's impairment
/// parameters.
ValidateReport run_validate(const ExperimentConfig& cfg, const ValidateOptions& options,
                            int workers);

void write_validate_json(const ValidateReport& report, const ExperimentConfig& cfg,
                         std::ostream& out);

}  // namespace hwsim
