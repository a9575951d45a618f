// pointsim — pointing-directive geometry and pipeline simulation toolkit.
//
// Subcommands: compare-measures, simulate, replay, metrics.
// Exit codes: 0 success, 1 runtime failure, 2 usage/config error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pointsim/io.hpp"
#include "pointsim/measure.hpp"
#include "pointsim/metrics.hpp"
#include "pointsim/perception.hpp"
#include "pointsim/pipeline.hpp"
#include "pointsim/simworld.hpp"

namespace fs = std::filesystem;
using namespace pointsim;
using nlohmann::json;

namespace {

struct SharedOptions {
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  std::string format = "csv";

  io::Format fmt() const {
    return format == "jsonl" ? io::Format::kJsonl : io::Format::kCsv;
  }
};

void add_shared(CLI::App* cmd, SharedOptions& shared) {
  cmd->add_option("--seed", shared.seed, "master seed for all randomness");
  cmd->add_option("--out-dir", shared.out_dir, "directory for output files");
  cmd->add_option("--format", shared.format, "row-file format")
      ->check(CLI::IsMember({"csv", "jsonl"}));
}

int cmd_compare_measures(const SharedOptions& shared,
                         const measure::CompareConfig& cfg) {
  const auto result = measure::run_comparison(cfg, shared.seed);
  const auto written =
      io::write_comparison_outputs(shared.out_dir, shared.fmt(), result,
                                   shared.seed);
  for (auto approach : measure::kAllApproaches) {
    const auto& st = result.stats[static_cast<int>(approach)];
    std::printf("%s mean error: %.1f mm (std %.1f, n %d)\n",
                std::string(measure::approach_label(approach)).c_str(),
                st.mean_error_mm, st.std_error_mm, st.n_trials);
  }
  for (const auto& path : written) {
    std::printf("wrote %s\n", path.string().c_str());
  }
  return 0;
}

int cmd_simulate(const SharedOptions& shared, sim::CampaignConfig cfg,
                 int trials, const std::string& profile_tag) {
  const auto tag = percept::tag_from_label(profile_tag);
  if (!tag) {
    throw io::ConfigError("unknown profile tag: " + profile_tag);
  }
  cfg.tag = *tag;

  const auto result = sim::run_campaign(
      cfg, trials, percept::NoiseProfile::nominal(), shared.seed);
  const auto written =
      io::write_campaign_outputs(shared.out_dir, shared.fmt(), result,
                                 shared.seed);

  const auto& s = result.summary;
  std::printf(
      "%s campaign: %d trials, %.1f%% success, mean reach error %.0f mm "
      "(std %.0f), mean distance %.0f mm\n",
      s.mode == sim::MotionMode::kQuadruped ? "quadruped" : "rover",
      s.n_trials, 100.0 * s.success_rate, s.mean_reach_error_mm,
      s.std_reach_error_mm, s.mean_distance_mm);
  for (const auto& path : written) {
    std::printf("wrote %s\n", path.string().c_str());
  }
  return 0;
}

json command_to_json(const pipeline::TargetCommand& cmd) {
  json j;
  j["t"] = cmd.t;
  j["feature"] = {{"p_mm",
                   {cmd.source_feature.position_mm.x(),
                    cmd.source_feature.position_mm.y(),
                    cmd.source_feature.position_mm.z()}},
                  {"beta_deg", geo::rad2deg(cmd.source_feature.pitch_rad)},
                  {"gamma_deg", geo::rad2deg(cmd.source_feature.yaw_rad)}};
  if (const auto* direct = std::get_if<pipeline::DirectGoal>(&cmd.target)) {
    j["mode"] = "direct_goal";
    j["goal_mm"] = {direct->goal_mm.x(), direct->goal_mm.y(),
                    direct->goal_mm.z()};
  } else {
    const auto& line = std::get<pipeline::FloorLine>(cmd.target).line;
    j["mode"] = "floor_line";
    j["line"] = {{"origin_mm",
                  {line.origin.x(), line.origin.y(), line.origin.z()}},
                 {"dir", {line.direction.x(), line.direction.y(),
                          line.direction.z()}}};
  }
  return j;
}

int cmd_replay(const SharedOptions& shared, const std::string& log_path,
               pipeline::Config pipe_cfg, double robot_height_mm,
               double mount_x, double mount_y, double mount_z,
               double mount_yaw_deg) {
  std::ifstream in(log_path);
  if (!in) {
    std::fprintf(stderr, "cannot open log: %s\n", log_path.c_str());
    return 1;
  }

  geo::RigidTransformd mount;
  mount.rotation = geo::rot_z(geo::deg2rad(mount_yaw_deg));
  mount.translation = geo::Vec3d(mount_x, mount_y, mount_z);

  pipeline::Pipeline pipe(pipe_cfg, mount, robot_height_mm);
  percept::ReplayProvider provider;
  percept::ReplayLogReader reader(in);

  fs::create_directories(shared.out_dir);
  const auto out_path = fs::path(shared.out_dir) / "commands.jsonl";
  std::ofstream out(out_path);

  int n_frames = 0, n_commands = 0, n_failures = 0;
  while (auto record = reader.next()) {
    ++n_frames;
    provider.prime(*record);
    const auto result = pipe.step(record->frame, provider);
    if (result.command) {
      ++n_commands;
      const json j = command_to_json(*result.command);
      out << j.dump() << '\n';
      std::printf("command %s\n", j.dump().c_str());
    } else if (result.event == pipeline::Event::kDispatchFailed) {
      ++n_failures;
      std::printf("dispatch failure at t=%.3f\n", record->frame.t);
    }
  }
  std::printf("replayed %d frames: %d commands, %d dispatch failures\n",
              n_frames, n_commands, n_failures);
  std::printf("wrote %s\n", out_path.string().c_str());
  return 0;
}

int cmd_metrics(const SharedOptions& shared,
                const std::vector<std::string>& iou_paths,
                const std::string& series_path, const std::string& key_col,
                const std::string& err_col, double bin_width,
                const std::string& deltas_path) {
  const int selected = (!iou_paths.empty() ? 1 : 0) +
                       (!series_path.empty() ? 1 : 0) +
                       (!deltas_path.empty() ? 1 : 0);
  if (selected != 1) {
    throw io::ConfigError(
        "metrics: choose exactly one of --iou, --series, --deltas");
  }

  if (!iou_paths.empty()) {
    const auto a = io::read_pbm(iou_paths[0]);
    const auto b = io::read_pbm(iou_paths[1]);
    std::printf("IoU: %.6f\n", metrics::mask_iou(a, b));
    return 0;
  }

  if (!series_path.empty()) {
    const auto table = io::read_csv(series_path);
    const auto keys = table.numeric_column(key_col, series_path);
    const auto errs = table.numeric_column(err_col, series_path);
    metrics::ErrorSeries series;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      series.values.emplace_back(keys[i], errs[i]);
    }
    const auto bins = metrics::bin_by_distance(series, bin_width);
    const auto path = io::write_binned_csv(shared.out_dir, "binned.csv", bins);
    double sum = 0.0;
    for (const auto& [_, e] : series.values) sum += e;
    std::printf("%zu samples, mean %.6f; %zu bins\n", series.values.size(),
                sum / series.values.size(), bins.size());
    std::printf("wrote %s\n", path.string().c_str());
    return 0;
  }

  const auto table = io::read_csv(deltas_path);
  if (table.column_index("dx_mm") >= 0) {
    const auto dx = table.numeric_column("dx_mm", deltas_path);
    const auto dy = table.numeric_column("dy_mm", deltas_path);
    const auto dz = table.numeric_column("dz_mm", deltas_path);
    std::vector<geo::Vec3d> deltas;
    for (std::size_t i = 0; i < dx.size(); ++i) {
      deltas.emplace_back(dx[i], dy[i], dz[i]);
    }
    std::printf("position RMSE: %.6f mm\n", metrics::rmse_mm(deltas));
  }
  for (const char* col : {"yaw_err_deg", "pitch_err_deg"}) {
    if (table.column_index(col) >= 0) {
      const auto vals = table.numeric_column(col, deltas_path);
      std::printf("%s MAE: %.6f deg\n", col, metrics::mae_deg(vals));
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pointing-directive geometry and pipeline simulation toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI config file ([subcommand] sections)");

  // compare-measures
  SharedOptions cm_shared;
  measure::CompareConfig cm_cfg;
  auto* cm = app.add_subcommand(
      "compare-measures",
      "synthetic comparison of the FA/IF/EF pointing measurements");
  add_shared(cm, cm_shared);
  cm->add_option("--trials", cm_cfg.trials, "number of poses")
      ->check(CLI::PositiveNumber);
  cm->add_option("--bin-mm", cm_cfg.bin_mm, "distance bin width")
      ->check(CLI::PositiveNumber);
  cm->add_option("--sigma-fa", cm_cfg.scenario.sigmas.forearm_deg,
                 "forearm deviation sigma (deg)");
  cm->add_option("--sigma-if", cm_cfg.scenario.sigmas.finger_deg,
                 "finger jitter sigma (deg)");
  cm->add_option("--sigma-ef", cm_cfg.scenario.sigmas.eyes_deg,
                 "eyes-finger offset sigma (deg)");
  cm->add_option("--min-dist", cm_cfg.scenario.min_target_dist_mm,
                 "minimum target distance (mm)");
  cm->add_option("--max-dist", cm_cfg.scenario.max_target_dist_mm,
                 "maximum target distance (mm)");

  // simulate
  SharedOptions sim_shared;
  std::string sim_mode;
  std::string sim_profile = "nominal";
  int sim_trials = 15;
  double target_dist_mean = -1, target_dist_sd = -1;
  double lidar_sigma = -1, rtk_rate = -1, rtk_bound = -1;
  double speed = -1, bench_radius = -1;
  auto* simulate =
      app.add_subcommand("simulate", "robot-reach simulation campaign");
  add_shared(simulate, sim_shared);
  simulate->add_option("--mode", sim_mode, "robot platform")
      ->required()
      ->check(CLI::IsMember({"quadruped", "rover"}));
  simulate->add_option("--trials", sim_trials, "number of trials")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--profile", sim_profile,
                       "perception scenario tag (nominal, gloves, "
                       "out_of_frame, occlusion, multi_user, sitting, "
                       "dual_arm)");
  simulate->add_option("--target-dist-mean", target_dist_mean,
                       "mean robot-target distance (mm)");
  simulate->add_option("--target-dist-sd", target_dist_sd,
                       "robot-target distance spread (mm)");
  simulate->add_option("--lidar-sigma", lidar_sigma,
                       "rover localization noise (mm)");
  simulate->add_option("--rtk-rate", rtk_rate,
                       "quadruped drift rate (mm/sqrt(s))");
  simulate->add_option("--rtk-bound", rtk_bound,
                       "quadruped drift bound (mm)");
  simulate->add_option("--speed", speed, "robot speed (mm/s)");
  simulate->add_option("--bench-radius", bench_radius,
                       "rover target obstacle radius (mm)");

  // replay
  SharedOptions rp_shared;
  std::string rp_log;
  pipeline::Config rp_cfg;
  std::string rp_mode = "direct-goal";
  double rp_height = 450.0;
  double rp_mount_x = 80.0, rp_mount_y = 0.0, rp_mount_z = 0.0;
  double rp_mount_yaw = 0.0;
  auto* replay = app.add_subcommand(
      "replay", "drive the gesture pipeline from a recorded JSONL session");
  add_shared(replay, rp_shared);
  replay->add_option("log", rp_log, "session log (JSON Lines)")->required();
  replay->add_option("--mode", rp_mode, "target mode")
      ->check(CLI::IsMember({"direct-goal", "floor-line"}));
  replay->add_option("--robot-height", rp_height,
                     "camera mount height above the floor (mm)");
  replay->add_option("--debounce-k", rp_cfg.debounce.required_consecutive,
                     "consecutive positives required")
      ->check(CLI::PositiveNumber);
  replay->add_option("--certainty-threshold",
                     rp_cfg.debounce.certainty_threshold,
                     "qualifying certainty");
  replay->add_option("--settle", rp_cfg.settle_frames,
                     "estimates fused after the trigger")
      ->check(CLI::PositiveNumber);
  replay->add_option("--cooldown", rp_cfg.cooldown_s,
                     "re-arm delay after a dispatch (s)");
  replay->add_option("--mount-x", rp_mount_x, "camera offset x (mm)");
  replay->add_option("--mount-y", rp_mount_y, "camera offset y (mm)");
  replay->add_option("--mount-z", rp_mount_z, "camera offset z (mm)");
  replay->add_option("--mount-yaw", rp_mount_yaw, "camera yaw offset (deg)");

  // metrics
  SharedOptions mt_shared;
  std::vector<std::string> mt_iou;
  std::string mt_series, mt_deltas;
  std::string mt_key_col = "distance_mm", mt_err_col = "error_mm";
  double mt_bin = 500.0;
  auto* metrics_cmd = app.add_subcommand(
      "metrics", "evaluation metrics over mask and error files");
  add_shared(metrics_cmd, mt_shared);
  metrics_cmd->add_option("--iou", mt_iou, "two PBM masks to compare")
      ->expected(2);
  metrics_cmd->add_option("--series", mt_series,
                          "CSV with (key, error) columns to bin");
  metrics_cmd->add_option("--key-col", mt_key_col, "binning key column");
  metrics_cmd->add_option("--err-col", mt_err_col, "error column");
  metrics_cmd->add_option("--bin", mt_bin, "bin width")
      ->check(CLI::PositiveNumber);
  metrics_cmd->add_option("--deltas", mt_deltas,
                          "CSV with dx_mm,dy_mm,dz_mm and/or "
                          "yaw_err_deg,pitch_err_deg columns");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (cm->parsed()) {
      return cmd_compare_measures(cm_shared, cm_cfg);
    }
    if (simulate->parsed()) {
      auto cfg = sim_mode == "rover" ? sim::CampaignConfig::rover()
                                     : sim::CampaignConfig::quadruped();
      if (target_dist_mean > 0) cfg.target_dist_mean_mm = target_dist_mean;
      if (target_dist_sd > 0) cfg.target_dist_sd_mm = target_dist_sd;
      if (lidar_sigma >= 0) cfg.world.localization = sim::LidarGaussianModel{lidar_sigma};
      if (rtk_rate >= 0 || rtk_bound >= 0) {
        sim::RtkDriftModel drift;
        if (auto* d = std::get_if<sim::RtkDriftModel>(&cfg.world.localization)) {
          drift = *d;
        }
        if (rtk_rate >= 0) drift.rate_mm_per_sqrt_s = rtk_rate;
        if (rtk_bound >= 0) drift.bound_mm = rtk_bound;
        cfg.world.localization = drift;
      }
      if (speed > 0) cfg.world.motion.speed_mm_s = speed;
      if (bench_radius >= 0) cfg.bench_radius_mm = bench_radius;
      return cmd_simulate(sim_shared, cfg, sim_trials, sim_profile);
    }
    if (replay->parsed()) {
      rp_cfg.mode = rp_mode == "floor-line" ? pipeline::Mode::kFloorLine
                                            : pipeline::Mode::kDirectGoal;
      return cmd_replay(rp_shared, rp_log, rp_cfg, rp_height, rp_mount_x,
                        rp_mount_y, rp_mount_z, rp_mount_yaw);
    }
    if (metrics_cmd->parsed()) {
      return cmd_metrics(mt_shared, mt_iou, mt_series, mt_key_col, mt_err_col,
                         mt_bin, mt_deltas);
    }
  } catch (const io::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;  // no subcommand matched
}
