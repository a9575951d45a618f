// Calibration helper: fits the measurement-study noise sigmas and sweeps
// simulation campaign knobs. The fitted values are baked into the library
// defaults; rerun this tool to reproduce or re-tune them.

#include <cstdio>
#include <cstdint>
#include <string>

#include <CLI11.hpp>

#include "pointsim/measure.hpp"
#include "pointsim/simworld.hpp"

namespace {

int fit_measure_sigmas(int trials, std::uint64_t seed) {
  pointsim::measure::CompareConfig cfg;
  cfg.trials = trials;
  const std::array<double, 3> targets = {491.9, 333.3, 157.8};
  const auto fitted = pointsim::measure::fit_noise_sigmas(targets, cfg, seed);

  cfg.scenario.sigmas = fitted;
  const auto check = pointsim::measure::run_comparison(cfg, seed + 1);

  std::printf("fitted sigmas (deg): forearm=%.4f finger=%.4f eyes=%.4f\n",
              fitted.forearm_deg, fitted.finger_deg, fitted.eyes_deg);
  for (auto a : pointsim::measure::kAllApproaches) {
    const auto& st = check.stats[static_cast<int>(a)];
    std::printf("  %s mean=%.1f mm (target %.1f)\n",
                std::string(pointsim::measure::approach_label(a)).c_str(),
                st.mean_error_mm, targets[static_cast<int>(a)]);
  }
  return 0;
}

int sweep_campaign(const std::string& mode, int trials, std::uint64_t seed) {
  using namespace pointsim::sim;
  CampaignConfig cfg = mode == "rover" ? CampaignConfig::rover()
                                       : CampaignConfig::quadruped();
  const auto result =
      run_campaign(cfg, trials, pointsim::percept::NoiseProfile::nominal(),
                   seed);
  const auto& s = result.summary;
  std::printf(
      "%s: n=%d dispatched=%d success=%.1f%% mean_err=%.0f mm (std %.0f) "
      "mean_dist=%.0f mm\n",
      mode.c_str(), s.n_trials, s.n_dispatched, 100.0 * s.success_rate,
      s.mean_reach_error_mm, s.std_reach_error_mm, s.mean_distance_mm);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pointsim calibration helper"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  int trials = 20000;

  auto* measures = app.add_subcommand(
      "measures", "fit the measurement-study noise sigmas");
  measures->add_option("--trials", trials, "trials per evaluation");
  measures->add_option("--seed", seed, "master seed");

  std::string mode = "quadruped";
  int campaign_trials = 300;
  auto* campaign =
      app.add_subcommand("campaign", "run a campaign with current defaults");
  campaign->add_option("--mode", mode, "quadruped or rover");
  campaign->add_option("--trials", campaign_trials, "number of trials");
  campaign->add_option("--seed", seed, "master seed");

  CLI11_PARSE(app, argc, argv);

  if (measures->parsed()) return fit_measure_sigmas(trials, seed);
  return sweep_campaign(mode, campaign_trials, seed);
}
