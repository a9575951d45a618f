#include "pointsim/simworld.hpp"

#include <algorithm>
#include <cmath>

namespace pointsim::sim {

namespace {

Vec2d rot2(double rad, const Vec2d& v) {
  const double c = std::cos(rad), s = std::sin(rad);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

double reflect_into(double x, double bound) {
  // One reflection is enough for step sizes well under the bound.
  if (x > bound) return 2.0 * bound - x;
  if (x < -bound) return -2.0 * bound - x;
  return x;
}

/// Distance from a point to an obstacle surface (negative when inside).
double surface_distance(const Vec2d& p, const Obstacle& obstacle) {
  if (const auto* disc = std::get_if<DiscObstacle>(&obstacle)) {
    return (p - disc->center_mm).norm() - disc->radius_mm;
  }
  const auto& rect = std::get<RectObstacle>(obstacle);
  const double dx =
      std::max({rect.min_mm.x() - p.x(), 0.0, p.x() - rect.max_mm.x()});
  const double dy =
      std::max({rect.min_mm.y() - p.y(), 0.0, p.y() - rect.max_mm.y()});
  if (dx > 0.0 || dy > 0.0) return std::hypot(dx, dy);
  // Inside: negative distance to the nearest edge.
  const double inner = std::min(
      std::min(p.x() - rect.min_mm.x(), rect.max_mm.x() - p.x()),
      std::min(p.y() - rect.min_mm.y(), rect.max_mm.y() - p.y()));
  return -inner;
}

/// True when an obstacle blocks the heading corridor within stopping range:
/// surface ahead of the robot, closer than the standoff, and laterally within
/// the robot's corridor.
bool obstacle_ahead(const Vec2d& pos, double heading,
                    const std::vector<Obstacle>& obstacles, double standoff,
                    double corridor) {
  const Vec2d h(std::cos(heading), std::sin(heading));
  const Vec2d n(-h.y(), h.x());
  for (const auto& obstacle : obstacles) {
    if (const auto* disc = std::get_if<DiscObstacle>(&obstacle)) {
      const Vec2d rel = disc->center_mm - pos;
      const double along = rel.dot(h);
      const double lateral = std::abs(rel.dot(n));
      if (along > 0.0 && along <= disc->radius_mm + standoff &&
          lateral <= disc->radius_mm + corridor) {
        return true;
      }
    } else {
      const auto& rect = std::get<RectObstacle>(obstacle);
      const Vec2d center = 0.5 * (rect.min_mm + rect.max_mm);
      const Vec2d half = 0.5 * (rect.max_mm - rect.min_mm);
      const Vec2d rel = center - pos;
      const double reach = half.norm();
      const double along = rel.dot(h);
      const double lateral = std::abs(rel.dot(n));
      if (along > 0.0 && along <= reach + standoff &&
          lateral <= reach + corridor) {
        return true;
      }
    }
  }
  return false;
}

double min_clearance(const Vec2d& pos, const std::vector<Obstacle>& obstacles) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& obstacle : obstacles) {
    best = std::min(best, surface_distance(pos, obstacle));
  }
  return best;
}

struct GestureGeometry {
  geo::PointingFeature exact_feature;  // camera frame
  geo::RigidTransformd world_to_camera;
};

GestureGeometry gesture_geometry(const WorldConfig& world) {
  geo::RigidTransformd robot_to_world;
  robot_to_world.rotation = geo::rot_z(world.robot_heading_rad);
  robot_to_world.translation = geo::Vec3d(
      world.robot_xy_mm.x(), world.robot_xy_mm.y(), world.camera_height_mm);
  const auto camera_to_world =
      geo::compose(robot_to_world, world.camera_to_robot);
  const auto world_to_camera = geo::invert(camera_to_world);

  const geo::Vec3d finger_w(world.user_xy_mm.x(), world.user_xy_mm.y(),
                            world.finger_height_mm);
  const geo::Vec3d target_w(world.target_xy_mm.x(), world.target_xy_mm.y(),
                            0.0);

  const auto dir_camera = geo::transform_direction(
      world_to_camera, geo::UnitVec3d::normalized(target_w - finger_w));
  const auto [pitch, yaw] = geo::angles_from_direction(dir_camera);

  GestureGeometry g;
  g.exact_feature.position_mm = geo::transform_point(world_to_camera, finger_w);
  g.exact_feature.pitch_rad = pitch;
  g.exact_feature.yaw_rad = yaw;
  g.world_to_camera = world_to_camera;
  return g;
}

}  // namespace

Vec2d LocalizationSim::update(const Vec2d& true_pos_mm, double dt, Rng& rng) {
  if (const auto* drift = std::get_if<RtkDriftModel>(&model_)) {
    const double step_sigma = drift->rate_mm_per_sqrt_s * std::sqrt(dt);
    for (int i = 0; i < 2; ++i) {
      bias_[i] = reflect_into(bias_[i] + rng.gaussian(0.0, step_sigma),
                              drift->bound_mm);
    }
    return true_pos_mm + bias_;
  }
  const auto& lidar = std::get<LidarGaussianModel>(model_);
  return true_pos_mm + Vec2d(rng.gaussian(0.0, lidar.sigma_mm),
                             rng.gaussian(0.0, lidar.sigma_mm));
}

RobotState robot_step(const RobotState& state, const Vec2d& goal_world_mm,
                      const MotionParams& params, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("robot_step: dt must be > 0");

  RobotState next = state;
  const Vec2d to_goal = goal_world_mm - state.believed_position_mm;
  const double dist = to_goal.norm();
  if (dist < 1e-9) return next;

  const double desired = std::atan2(to_goal.y(), to_goal.x());
  const double err = geo::wrap_angle(desired - state.heading_rad);
  const double max_turn = params.turn_rate_rad_s * dt;
  if (std::abs(err) <= max_turn) {
    next.heading_rad = desired;
  } else {
    next.heading_rad = geo::wrap_angle(
        state.heading_rad + (err > 0.0 ? max_turn : -max_turn));
  }

  const double residual = geo::wrap_angle(desired - next.heading_rad);
  if (std::abs(residual) <= params.align_gate_rad) {
    const double step = std::min(params.speed_mm_s * dt, dist);
    next.position_mm +=
        step * Vec2d(std::cos(next.heading_rad), std::sin(next.heading_rad));
  }
  return next;
}

TrialRecord run_trial(const WorldConfig& world,
                      const percept::NoiseProfile& profile,
                      std::uint64_t seed) {
  TrialRecord record;
  record.seed = seed;
  record.mode = world.mode;
  record.true_target_mm = world.target_xy_mm;

  percept::OracleProvider provider(profile, Rng::derive_seed(seed, 1));
  Rng loc_rng = Rng::derive(seed, 2);
  LocalizationSim localization(world.localization);

  pipeline::Config gesture_cfg = world.gesture;
  gesture_cfg.mode = world.mode == MotionMode::kQuadruped
                         ? pipeline::Mode::kDirectGoal
                         : pipeline::Mode::kFloorLine;
  pipeline::Pipeline gesture(gesture_cfg, world.camera_to_robot,
                             world.camera_height_mm);

  const GestureGeometry geom = gesture_geometry(world);

  RobotState robot{world.robot_xy_mm, world.robot_heading_rad,
                   world.robot_xy_mm};
  record.distance_at_pointing_mm =
      (world.robot_xy_mm - world.target_xy_mm).norm();

  const double frame_dt = 1.0 / world.fps;
  const int n_idle = static_cast<int>(std::lround(world.idle_s * world.fps));
  const int n_raise = static_cast<int>(std::lround(world.raise_s * world.fps));
  const int n_hold =
      static_cast<int>(std::lround(world.hold_max_s * world.fps));

  std::optional<pipeline::TargetCommand> command;
  double t = 0.0;
  for (int i = 0; i < n_idle + n_raise + n_hold && !command; ++i) {
    t += frame_dt;
    percept::Frame frame;
    frame.t = t;
    frame.tags = {world.scenario_tag};
    if (i < n_idle) {
      frame.ground_truth = percept::GroundTruth{false, std::nullopt};
    } else if (i < n_idle + n_raise) {
      // Arm on its way up: feature drifts toward the final hold values while
      // the gesture does not yet read as pointing.
      const double u = static_cast<double>(i - n_idle + 1) / (n_raise + 1);
      geo::PointingFeature f = geom.exact_feature;
      f.pitch_rad = std::min(geo::deg2rad(85.0),
                             f.pitch_rad + geo::deg2rad(35.0) * (1.0 - u));
      f.yaw_rad =
          geo::wrap_angle(f.yaw_rad - geo::deg2rad(10.0) * (1.0 - u));
      f.position_mm.z() -= 200.0 * (1.0 - u);
      frame.ground_truth = percept::GroundTruth{false, f};
    } else {
      frame.ground_truth = percept::GroundTruth{true, geom.exact_feature};
    }

    const auto result = gesture.step(frame, provider);
    robot.believed_position_mm =
        localization.update(robot.position_mm, frame_dt, loc_rng);
    if (result.command) {
      command = result.command;
    } else if (result.event == pipeline::Event::kDispatchFailed) {
      break;
    }
  }

  record.final_position_mm = robot.position_mm;
  record.reach_error_mm = (robot.position_mm - world.target_xy_mm).norm();
  if (!command) {
    record.dispatched = false;
    record.success = false;
    return record;
  }
  record.dispatched = true;

  // The command is in the robot frame; anchor it in the world through the
  // believed pose at dispatch time (heading is assumed known).
  const double heading0 = robot.heading_rad;
  Vec2d goal_w = Vec2d::Zero();
  Vec2d line_origin_w = Vec2d::Zero();
  Vec2d line_dir_w = Vec2d::UnitX();
  if (const auto* direct = std::get_if<pipeline::DirectGoal>(&command->target)) {
    goal_w = robot.believed_position_mm +
             rot2(heading0, Vec2d(direct->goal_mm.x(), direct->goal_mm.y()));
    record.commanded_goal_mm = goal_w;
  } else {
    const auto& line = std::get<pipeline::FloorLine>(command->target).line;
    line_origin_w =
        robot.believed_position_mm +
        rot2(heading0, Vec2d(line.origin.x(), line.origin.y()));
    line_dir_w = rot2(heading0, Vec2d(line.direction.x(), line.direction.y()))
                     .normalized();
    record.commanded_goal_mm = line_origin_w;
  }

  const double dt = world.control_dt_s;
  const int max_steps =
      static_cast<int>(std::lround(world.drive_timeout_s / dt));
  record.min_obstacle_clearance_mm =
      std::min(record.min_obstacle_clearance_mm,
               min_clearance(robot.position_mm, world.obstacles));

  for (int step = 0; step < max_steps; ++step) {
    if (!world.obstacles.empty() &&
        obstacle_ahead(robot.position_mm, robot.heading_rad, world.obstacles,
                       world.standoff_mm, world.corridor_halfwidth_mm)) {
      break;
    }

    Vec2d chase = goal_w;
    if (world.mode == MotionMode::kRover) {
      const double along = std::clamp(
          (robot.believed_position_mm - line_origin_w).dot(line_dir_w), 0.0,
          world.line_max_mm);
      if (along >= world.line_max_mm - 1.0) break;  // end of the line
      chase = line_origin_w +
              std::min(along + world.lookahead_mm, world.line_max_mm) *
                  line_dir_w;
    }

    const Vec2d true_before = robot.position_mm;
    const Vec2d believed_before = robot.believed_position_mm;
    robot = robot_step(robot, chase, world.motion, dt);
    robot.believed_position_mm =
        localization.update(robot.position_mm, dt, loc_rng);
    record.min_obstacle_clearance_mm =
        std::min(record.min_obstacle_clearance_mm,
                 min_clearance(robot.position_mm, world.obstacles));

    // Arrival = the commanded displacement is fully executed. Checked in
    // controller space (believed start + executed motion): the step length
    // is capped at the believed remaining distance, so the landing step
    // closes that gap exactly no matter how localization moves afterwards.
    if (world.mode == MotionMode::kQuadruped) {
      const Vec2d controller_pos =
          believed_before + (robot.position_mm - true_before);
      if ((goal_w - controller_pos).norm() <= world.stop_tolerance_mm) break;
    }
  }

  record.final_position_mm = robot.position_mm;
  record.reach_error_mm = (robot.position_mm - world.target_xy_mm).norm();
  record.success = record.reach_error_mm <= world.success_radius_mm;
  return record;
}

CampaignConfig CampaignConfig::quadruped() {
  CampaignConfig cfg;
  cfg.world.mode = MotionMode::kQuadruped;
  cfg.world.camera_height_mm = 450.0;
  cfg.world.localization = RtkDriftModel{80.0, 550.0};
  cfg.world.motion = {600.0, 1.8, 0.5};
  cfg.target_dist_mean_mm = 3800.0;
  cfg.target_dist_sd_mm = 950.0;
  cfg.target_dist_min_mm = 2000.0;
  cfg.target_dist_max_mm = 6000.0;
  return cfg;
}

CampaignConfig CampaignConfig::rover() {
  CampaignConfig cfg;
  cfg.world.mode = MotionMode::kRover;
  cfg.world.camera_height_mm = 700.0;
  cfg.world.localization = LidarGaussianModel{300.0};
  cfg.world.motion = {800.0, 1.5, 0.5};
  cfg.target_dist_mean_mm = 7200.0;
  cfg.target_dist_sd_mm = 2500.0;
  cfg.target_dist_min_mm = 3500.0;
  cfg.target_dist_max_mm = 13000.0;
  cfg.bench_radius_mm = 200.0;
  return cfg;
}

CampaignResult run_campaign(const CampaignConfig& config, int n_trials,
                            const percept::NoiseProfile& profile,
                            std::uint64_t master_seed) {
  if (n_trials < 1) {
    throw std::invalid_argument("run_campaign: n_trials must be >= 1");
  }

  CampaignResult result;
  result.trials.reserve(n_trials);

  for (int trial = 0; trial < n_trials; ++trial) {
    const std::uint64_t trial_seed =
        Rng::derive_seed(master_seed, static_cast<std::uint64_t>(trial));
    Rng scene_rng = Rng::derive(trial_seed, 0);

    WorldConfig world = config.world;
    world.scenario_tag = config.tag;
    world.robot_xy_mm = Vec2d::Zero();
    world.robot_heading_rad = scene_rng.uniform(-M_PI, M_PI);
    world.obstacles.clear();

    // Rejection-sample a geometry the gesture model supports.
    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
      const double target_dist = std::clamp(
          scene_rng.gaussian(config.target_dist_mean_mm,
                             config.target_dist_sd_mm),
          config.target_dist_min_mm, config.target_dist_max_mm);
      const double target_bearing = scene_rng.uniform(
          -config.target_bearing_max_rad, config.target_bearing_max_rad);
      const double user_dist =
          scene_rng.uniform(config.user_dist_min_mm, config.user_dist_max_mm);
      const double user_bearing = scene_rng.uniform(
          -config.user_bearing_max_rad, config.user_bearing_max_rad);

      world.target_xy_mm =
          target_dist * Vec2d(std::cos(world.robot_heading_rad +
                                       target_bearing),
                              std::sin(world.robot_heading_rad +
                                       target_bearing));
      world.user_xy_mm =
          user_dist *
          Vec2d(std::cos(world.robot_heading_rad + user_bearing),
                std::sin(world.robot_heading_rad + user_bearing));

      if ((world.target_xy_mm - world.user_xy_mm).norm() < 800.0) continue;
      const auto geom = gesture_geometry(world);
      if (std::abs(geo::rad2deg(geom.exact_feature.yaw_rad)) > 110.0) continue;
      if (geo::rad2deg(geom.exact_feature.pitch_rad) < 3.0) continue;
      placed = true;
    }
    if (!placed) {
      throw std::runtime_error("run_campaign: could not place a valid scene");
    }
    if (config.bench_radius_mm > 0.0) {
      world.obstacles.push_back(
          DiscObstacle{world.target_xy_mm, config.bench_radius_mm});
    }

    result.trials.push_back(run_trial(world, profile, trial_seed));
  }

  CampaignSummary& s = result.summary;
  s.mode = config.world.mode;
  s.n_trials = n_trials;
  double err_sum = 0.0, err_sq = 0.0, dist_sum = 0.0;
  for (const auto& t : result.trials) {
    s.n_dispatched += t.dispatched;
    s.n_success += t.success;
    dist_sum += t.distance_at_pointing_mm;
    if (t.success) {
      err_sum += t.reach_error_mm;
      err_sq += t.reach_error_mm * t.reach_error_mm;
    }
  }
  s.success_rate = static_cast<double>(s.n_success) / n_trials;
  s.mean_distance_mm = dist_sum / n_trials;
  if (s.n_success > 0) {
    s.mean_reach_error_mm = err_sum / s.n_success;
    const double var = std::max(
        0.0, err_sq / s.n_success - s.mean_reach_error_mm * s.mean_reach_error_mm);
    s.std_reach_error_mm = std::sqrt(var);
  }
  return result;
}

}  // namespace pointsim::sim
