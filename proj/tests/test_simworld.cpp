#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pointsim/simworld.hpp"

using namespace pointsim;
using sim::Vec2d;

namespace {

sim::WorldConfig zero_noise_world() {
  sim::WorldConfig w;
  w.localization = sim::RtkDriftModel{0.0, 400.0};
  w.user_xy_mm = Vec2d(500.0, 1800.0);
  w.target_xy_mm = Vec2d(3200.0, -800.0);
  return w;
}

}  // namespace

TEST_CASE("robot_step kinematics") {
  sim::MotionParams mp{500.0, 1.5, 0.5};

  sim::RobotState at_goal{Vec2d(100, 100), 0.3, Vec2d(100, 100)};
  const auto same = sim::robot_step(at_goal, Vec2d(100, 100), mp, 0.1);
  CHECK(same.position_mm == at_goal.position_mm);
  CHECK(same.heading_rad == at_goal.heading_rad);

  // Goal straight ahead: 0.5 m/s for 0.1 s advances 50 mm.
  sim::RobotState ahead{Vec2d(0, 0), 0.0, Vec2d(0, 0)};
  const auto moved = sim::robot_step(ahead, Vec2d(1000, 0), mp, 0.1);
  CHECK(moved.position_mm.x() == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(moved.position_mm.y() == 0.0);

  // Goal behind: the first steps rotate without translating.
  const auto turning = sim::robot_step(ahead, Vec2d(-1000, 0), mp, 0.1);
  CHECK(std::abs(turning.heading_rad) ==
        doctest::Approx(mp.turn_rate_rad_s * 0.1).epsilon(1e-12));
  CHECK(turning.position_mm.norm() == 0.0);

  CHECK_THROWS_AS(sim::robot_step(ahead, Vec2d(1, 0), mp, 0.0),
                  std::invalid_argument);
}

TEST_CASE("robot_step navigates against the believed position") {
  sim::MotionParams mp{500.0, 2.0, 0.5};
  // Believed position offset to the left: the robot aims right of the goal.
  sim::RobotState s{Vec2d(0, 0), 0.0, Vec2d(0, 200)};
  const auto next = sim::robot_step(s, Vec2d(2000, 200), mp, 0.1);
  // Bearing from believed (0,200) to goal (2000,200) is straight +x.
  CHECK(next.heading_rad == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(next.position_mm.x() == doctest::Approx(50.0).epsilon(1e-9));
}

TEST_CASE("localization models") {
  Rng rng(5);

  sim::LocalizationSim exact(sim::RtkDriftModel{0.0, 100.0});
  CHECK(exact.update(Vec2d(10, 20), 0.05, rng) == Vec2d(10, 20));

  sim::LocalizationSim perfect_lidar(sim::LidarGaussianModel{0.0});
  CHECK(perfect_lidar.update(Vec2d(-5, 3), 0.05, rng) == Vec2d(-5, 3));

  // Lidar noise: per-axis MAE approaches sigma * sqrt(2/pi).
  sim::LocalizationSim lidar(sim::LidarGaussianModel{30.0});
  double abs_sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const Vec2d believed = lidar.update(Vec2d::Zero(), 0.05, rng);
    abs_sum += std::abs(believed.x()) + std::abs(believed.y());
  }
  CHECK(abs_sum / (2 * n) ==
        doctest::Approx(oracles::folded_normal_mean(30.0)).epsilon(0.03));
}

TEST_CASE("drift bias grows like a random walk then saturates at the bound") {
  const double rate = 5.0 / std::sqrt(0.05);  // 5 mm per step at dt = 0.05
  const double bound = 400.0;

  // Before the bound bites: E|bias| per axis ~ sigma*sqrt(n)*sqrt(2/pi).
  double abs_sum = 0.0;
  const int reps = 400, steps = 100;
  for (int r = 0; r < reps; ++r) {
    Rng rng(1000 + r);
    sim::LocalizationSim loc(sim::RtkDriftModel{rate, bound});
    for (int i = 0; i < steps; ++i) loc.update(Vec2d::Zero(), 0.05, rng);
    abs_sum += std::abs(loc.bias().x()) + std::abs(loc.bias().y());
  }
  const double expected = oracles::folded_normal_mean(5.0 * std::sqrt(steps));
  CHECK(abs_sum / (2 * reps) == doctest::Approx(expected).epsilon(0.12));

  // Long-run: reflected at the bound, never beyond it.
  Rng rng(77);
  sim::LocalizationSim loc(sim::RtkDriftModel{rate, bound});
  double max_abs = 0.0;
  for (int i = 0; i < 100000; ++i) {
    loc.update(Vec2d::Zero(), 0.05, rng);
    max_abs = std::max({max_abs, std::abs(loc.bias().x()),
                        std::abs(loc.bias().y())});
  }
  CHECK(max_abs <= bound);
  CHECK(max_abs > bound * 0.5);  // the walk actually explores the range
}

TEST_CASE("zero-noise quadruped trial reaches the target exactly") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    sim::WorldConfig w = zero_noise_world();
    // Scatter the geometry a little per seed.
    Rng rng(seed);
    w.user_xy_mm = Vec2d(rng.uniform(-500, 1500), rng.uniform(1200, 3000));
    w.target_xy_mm = Vec2d(rng.uniform(1500, 4500), rng.uniform(-2500, 2500));
    w.robot_heading_rad = rng.uniform(-0.6, 0.6);
    if ((w.target_xy_mm - w.user_xy_mm).norm() < 1000.0) continue;

    const auto rec =
        sim::run_trial(w, percept::NoiseProfile::zero(), seed);
    if (!rec.dispatched) continue;  // gesture out of the supported yaw range
    CHECK(rec.reach_error_mm < 1.0);
    CHECK(rec.success);
  }
}

TEST_CASE("trial records are deterministic per seed") {
  sim::WorldConfig w = zero_noise_world();
  w.localization = sim::RtkDriftModel{36.0, 400.0};
  const auto profile = percept::NoiseProfile::nominal();
  const auto a = sim::run_trial(w, profile, 123);
  const auto b = sim::run_trial(w, profile, 123);
  CHECK(a.reach_error_mm == b.reach_error_mm);
  CHECK(a.final_position_mm == b.final_position_mm);
  CHECK(a.dispatched == b.dispatched);
}

TEST_CASE("rover with the bench removed drives past the target") {
  sim::WorldConfig w = zero_noise_world();
  w.mode = sim::MotionMode::kRover;
  w.camera_height_mm = 700.0;
  w.user_xy_mm = Vec2d(0.0, 1500.0);
  w.target_xy_mm = Vec2d(6000.0, 1500.0);
  w.line_max_mm = 12000.0;
  // No obstacle: nothing stops the drive along the line.
  const auto rec = sim::run_trial(w, percept::NoiseProfile::zero(), 3);
  REQUIRE(rec.dispatched);
  CHECK_FALSE(rec.success);
  CHECK(rec.reach_error_mm > w.success_radius_mm);
  // It ended near the far end of the commanded line.
  CHECK((rec.final_position_mm - rec.true_target_mm).norm() > 3000.0);
}

TEST_CASE("rover stops at the bench with positive clearance") {
  sim::WorldConfig w = zero_noise_world();
  w.mode = sim::MotionMode::kRover;
  w.camera_height_mm = 700.0;
  w.user_xy_mm = Vec2d(0.0, 1500.0);
  w.target_xy_mm = Vec2d(6000.0, 1500.0);
  w.obstacles.push_back(sim::DiscObstacle{w.target_xy_mm, 200.0});
  const auto rec = sim::run_trial(w, percept::NoiseProfile::zero(), 3);
  REQUIRE(rec.dispatched);
  CHECK(rec.success);
  CHECK(rec.min_obstacle_clearance_mm >= 0.0);
  CHECK(rec.reach_error_mm < 1000.0);
}

TEST_CASE("rover never crosses an obstacle even with noise") {
  auto cfg = sim::CampaignConfig::rover();
  const auto result =
      sim::run_campaign(cfg, 60, percept::NoiseProfile::nominal(), 99);
  for (const auto& trial : result.trials) {
    CHECK(trial.min_obstacle_clearance_mm >= 0.0);
  }
}

TEST_CASE("campaigns are bit-identical across reruns") {
  auto cfg = sim::CampaignConfig::quadruped();
  const auto profile = percept::NoiseProfile::nominal();
  const auto a = sim::run_campaign(cfg, 25, profile, 11);
  const auto b = sim::run_campaign(cfg, 25, profile, 11);
  CHECK(a.summary.mean_reach_error_mm == b.summary.mean_reach_error_mm);
  CHECK(a.summary.success_rate == b.summary.success_rate);
  REQUIRE(a.trials.size() == b.trials.size());
  for (std::size_t i = 0; i < a.trials.size(); ++i) {
    CHECK(a.trials[i].reach_error_mm == b.trials[i].reach_error_mm);
    CHECK(a.trials[i].final_position_mm == b.trials[i].final_position_mm);
  }
}

TEST_CASE("error decomposes across noise sources") {
  auto combined_cfg = sim::CampaignConfig::quadruped();

  auto loc_only_cfg = combined_cfg;
  auto perception_only_cfg = combined_cfg;
  perception_only_cfg.world.localization = sim::RtkDriftModel{0.0, 400.0};

  const int n = 400;
  const auto combined = sim::run_campaign(
      combined_cfg, n, percept::NoiseProfile::nominal(), 314);
  const auto loc_only =
      sim::run_campaign(loc_only_cfg, n, percept::NoiseProfile::zero(), 314);
  const auto perception_only = sim::run_campaign(
      perception_only_cfg, n, percept::NoiseProfile::nominal(), 314);

  auto variance = [](const sim::CampaignResult& r) {
    double sum = 0.0, sum_sq = 0.0;
    int n_ok = 0;
    for (const auto& t : r.trials) {
      if (!t.dispatched) continue;
      sum += t.reach_error_mm;
      sum_sq += t.reach_error_mm * t.reach_error_mm;
      ++n_ok;
    }
    const double mean = sum / n_ok;
    return sum_sq / n_ok - mean * mean;
  };

  const double v_combined = variance(combined);
  // Statistical inequality; 15% slack for Monte-Carlo noise at n = 400.
  CHECK(variance(loc_only) <= v_combined * 1.15);
  CHECK(variance(perception_only) <= v_combined * 1.15);
}

TEST_CASE("campaign summaries aggregate their trials") {
  auto cfg = sim::CampaignConfig::quadruped();
  const auto result =
      sim::run_campaign(cfg, 40, percept::NoiseProfile::nominal(), 8);
  CHECK(result.trials.size() == 40);
  CHECK(result.summary.n_trials == 40);
  int successes = 0;
  for (const auto& t : result.trials) successes += t.success;
  CHECK(result.summary.n_success == successes);
  CHECK(result.summary.success_rate ==
        doctest::Approx(successes / 40.0).epsilon(1e-12));
  CHECK(result.summary.mean_distance_mm > cfg.target_dist_min_mm);
  CHECK(result.summary.mean_distance_mm < cfg.target_dist_max_mm);
}
