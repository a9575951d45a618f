#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include "pointsim/geometry.hpp"
#include "pointsim/perception.hpp"
#include "pointsim/pipeline.hpp"
#include "pointsim/rng.hpp"

// Desk-scale reproduction of the robot-reach experiments. World frame:
// z-up, floor at z = 0, all lengths mm. The robot is a point with a heading;
// a camera is mounted at height h through a fixed rigid transform. A
// simulated user raises an arm and points at a floor target; frames with
// ground-truth features feed the gesture pipeline through a noise-calibrated
// oracle provider, and the resulting command drives the robot.

namespace pointsim::sim {

using Vec2d = Eigen::Vector2d;

enum class MotionMode { kQuadruped, kRover };

struct DiscObstacle {
  Vec2d center_mm;
  double radius_mm = 0.0;
};

struct RectObstacle {
  Vec2d min_mm;
  Vec2d max_mm;
};

using Obstacle = std::variant<DiscObstacle, RectObstacle>;

/// Bounded random-walk localization bias (satellite-fix drift): per-axis
/// Gaussian increments scaled by sqrt(dt), reflecting at +-bound.
struct RtkDriftModel {
  double rate_mm_per_sqrt_s = 80.0;
  double bound_mm = 550.0;
};

/// Scan-matching localization: believed = true + iid Gaussian per update.
struct LidarGaussianModel {
  double sigma_mm = 30.0;
};

using LocalizationModel = std::variant<RtkDriftModel, LidarGaussianModel>;

class LocalizationSim {
 public:
  explicit LocalizationSim(LocalizationModel model) : model_(model) {}

  Vec2d update(const Vec2d& true_pos_mm, double dt, Rng& rng);
  const Vec2d& bias() const { return bias_; }

 private:
  LocalizationModel model_;
  Vec2d bias_ = Vec2d::Zero();
};

struct MotionParams {
  double speed_mm_s = 600.0;
  double turn_rate_rad_s = 1.8;
  double align_gate_rad = 0.5;  // translate only when roughly facing the goal
};

struct RobotState {
  Vec2d position_mm = Vec2d::Zero();
  double heading_rad = 0.0;
  Vec2d believed_position_mm = Vec2d::Zero();
};

/// One unicycle control step toward a world-frame goal. Decisions (bearing,
/// remaining distance) are made against the believed position; the true pose
/// is what moves.
RobotState robot_step(const RobotState& state, const Vec2d& goal_world_mm,
                      const MotionParams& params, double dt);

struct WorldConfig {
  // Scene
  Vec2d user_xy_mm{0.0, 2000.0};
  double finger_height_mm = 1400.0;
  Vec2d robot_xy_mm{0.0, 0.0};
  double robot_heading_rad = 0.0;
  Vec2d target_xy_mm{2000.0, 3000.0};
  std::vector<Obstacle> obstacles;

  /// Tag stamped on every frame; selects the perception-profile row.
  percept::ScenarioTag scenario_tag = percept::ScenarioTag::kNominal;

  // Robot
  MotionMode mode = MotionMode::kQuadruped;
  double camera_height_mm = 450.0;
  geo::RigidTransformd camera_to_robot =
      geo::RigidTransformd::from_translation(geo::Vec3d(80.0, 0.0, 0.0));
  LocalizationModel localization = RtkDriftModel{};
  MotionParams motion;

  // Gesture stream
  double fps = 30.0;
  double idle_s = 1.0;
  double raise_s = 0.3;
  double hold_max_s = 4.0;
  pipeline::Config gesture;  // mode is set from `mode` when the trial runs

  // Drive phase
  double control_dt_s = 0.05;
  double drive_timeout_s = 120.0;
  double stop_tolerance_mm = 0.001;  // controller-space arrival precision
  double standoff_mm = 300.0;            // stop distance from obstacle surface
  double corridor_halfwidth_mm = 300.0;  // obstacle blocks path within this
  double lookahead_mm = 1000.0;          // pure-pursuit distance on the line
  double line_max_mm = 20000.0;          // floor line length driven at most
  double success_radius_mm = 1000.0;
};

struct TrialRecord {
  std::uint64_t seed = 0;
  MotionMode mode = MotionMode::kQuadruped;
  bool dispatched = false;
  bool success = false;
  Vec2d true_target_mm = Vec2d::Zero();
  Vec2d commanded_goal_mm = Vec2d::Zero();  // rover: start of the floor line
  Vec2d final_position_mm = Vec2d::Zero();
  double reach_error_mm = 0.0;
  double distance_at_pointing_mm = 0.0;
  double min_obstacle_clearance_mm = std::numeric_limits<double>::infinity();
};

/// Full trial: gesture stream -> pipeline -> motion, with localization in the
/// loop throughout. Deterministic for a given (world, profile, seed).
TrialRecord run_trial(const WorldConfig& world,
                      const percept::NoiseProfile& profile,
                      std::uint64_t seed);

struct CampaignConfig {
  WorldConfig world;  // template; user/robot/target placement is resampled
  percept::ScenarioTag tag = percept::ScenarioTag::kNominal;

  double target_dist_mean_mm = 3800.0;
  double target_dist_sd_mm = 950.0;
  double target_dist_min_mm = 2000.0;
  double target_dist_max_mm = 6000.0;
  double target_bearing_max_rad = geo::deg2rad(50.0);
  double user_dist_min_mm = 1500.0;
  double user_dist_max_mm = 4000.0;
  double user_bearing_max_rad = geo::deg2rad(35.0);
  double bench_radius_mm = 0.0;  // > 0: a disc obstacle is placed on the target

  static CampaignConfig quadruped();
  static CampaignConfig rover();
};

struct CampaignSummary {
  MotionMode mode = MotionMode::kQuadruped;
  int n_trials = 0;
  int n_dispatched = 0;
  int n_success = 0;
  double success_rate = 0.0;
  double mean_reach_error_mm = 0.0;  // over successful trials
  double std_reach_error_mm = 0.0;
  double mean_distance_mm = 0.0;  // robot-to-target at pointing time, all trials
};

struct CampaignResult {
  CampaignSummary summary;
  std::vector<TrialRecord> trials;
};

/// Samples a world per trial (independent stream per index) and aggregates.
/// Bit-identical across reruns with the same master seed.
CampaignResult run_campaign(const CampaignConfig& config, int n_trials,
                            const percept::NoiseProfile& profile,
                            std::uint64_t master_seed);

}  // namespace pointsim::sim
