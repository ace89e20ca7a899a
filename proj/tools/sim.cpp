#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hwsim/config.hpp"
#include "hwsim/experiments.hpp"
#include "hwsim/parallel.hpp"

namespace {

struct GlobalArgs {
  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  bool has_seed = false;
  int trials = 0;
  int workers = 0;
};

hwsim::ExperimentConfig load(const GlobalArgs& args) {
  hwsim::RunOverrides overrides;
  overrides.has_seed = args.has_seed;
  overrides.seed = args.seed;
  overrides.trials = args.trials;
  return hwsim::apply_overrides(hwsim::load_config(args.config_path), overrides);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Massive MU-MIMO-OFDM uplink simulator with nonideal receiver hardware"};
  app.require_subcommand(1);

  GlobalArgs args;
  app.add_option("--seed", args.seed, "Override the config seed")->each([&](const std::string&) {
    args.has_seed = true;
  });
  app.add_option("--trials", args.trials,
                 "Override psd.frames / ber.frames_per_channel");
  app.add_option("--workers", args.workers, "Worker threads (0 = all cores)");

  auto add_common = [&](CLI::App* sub, bool needs_out) {
    sub->fallthrough();  // accept the global options after the subcommand too
    sub->add_option("--config", args.config_path, "Experiment config file")->required();
    if (needs_out) sub->add_option("--out", args.out_path, "Output CSV path")->required();
  };

  CLI::App* psd = app.add_subcommand("psd", "Analytic vs Monte-Carlo per-subcarrier PSD");
  add_common(psd, true);
  CLI::App* ber = app.add_subcommand("ber", "Analytic vs Monte-Carlo BER over the SNR grid");
  add_common(ber, true);
  CLI::App* lin = app.add_subcommand("linearize", "Dump linearized-model gains and distortion");
  add_common(lin, true);
  CLI::App* val = app.add_subcommand("validate", "Run the self-check suite");
  add_common(val, false);
  bool corrupt_ce_tot = false;
  val->add_flag("--corrupt-ce-tot", corrupt_ce_tot,
                "Test hook: corrupt the composed distortion covariance")
      ->group("");  // hidden

  CLI11_PARSE(app, argc, argv);

  try {
    const hwsim::ExperimentConfig cfg = load(args);
    if (psd->parsed()) {
      hwsim::run_psd_file(cfg, args.out_path, args.workers);
    } else if (ber->parsed()) {
      const int redraws = hwsim::run_ber_file(cfg, args.out_path, args.workers);
      if (redraws > 0)
        std::cerr << "note: " << redraws << " rank-deficient channel draw(s) replaced\n";
    } else if (lin->parsed()) {
      hwsim::run_linearize_file(cfg, args.out_path);
    } else if (val->parsed()) {
      hwsim::ValidateOptions options;
      options.corrupt_ce_tot = corrupt_ce_tot;
      const hwsim::ValidateReport report = hwsim::run_validate(cfg, options, args.workers);
      hwsim::write_validate_json(report, cfg, std::cout);
      return report.all_pass() ? 0 : 1;
    }
  } catch (const hwsim::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
