#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "pointsim/geometry.hpp"
#include "pointsim/metrics.hpp"
#include "pointsim/rng.hpp"

// Synthetic comparison of three ways to measure a pointing direction:
//   FA  forearm vector (elbow -> wrist), key point at the wrist
//   IF  index-finger axis (wrist -> fingertip), key point at the fingertip
//   EF  eyes-to-finger vector (nose root -> fingertip), key point at the
//       fingertip
// Poses are generated so that, without noise, all three rays pass exactly
// through the intended target; per-approach angular jitter then differentiates
// their accuracy.

namespace pointsim::measure {

struct InfeasibleScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Approach { kForearm = 0, kIndexFinger = 1, kEyesFinger = 2 };
inline constexpr std::array<Approach, 3> kAllApproaches = {
    Approach::kForearm, Approach::kIndexFinger, Approach::kEyesFinger};

std::string_view approach_label(Approach a);  // "FA", "IF", "EF"

/// Angular jitter (degrees, 1-sigma) applied per approach: a deviation angle
/// at the wrist for FA, finger-axis jitter for IF, and a head/nose offset for
/// EF. Defaults are the shipped calibration (see the calibrate tool).
struct ArmNoiseSigmas {
  double forearm_deg = 13.98;
  double finger_deg = 9.99;
  double eyes_deg = 4.73;
};

struct ScenarioConfig {
  double min_target_dist_mm = 1000.0;  // nose-to-target
  double max_target_dist_mm = 5000.0;
  double nose_height_mm = 1600.0;
  double min_target_z_mm = 100.0;     // keep targets above the floor
  double min_depression_deg = 3.0;    // shallowest downward aim
  double upper_arm_mm = 300.0;
  double forearm_mm = 280.0;
  double hand_mm = 180.0;
  double sight_len_mm = 600.0;  // nose-to-fingertip along the aim line
  ArmNoiseSigmas sigmas;
};

struct CompareConfig {
  ScenarioConfig scenario;
  int trials = 10000;
  double bin_mm = 500.0;
};

/// Marker positions for one captured pose, world frame, mm.
struct ArmPose {
  geo::Vec3d shoulder;
  geo::Vec3d elbow;
  geo::Vec3d wrist;
  geo::Vec3d fingertip;
  geo::Vec3d nose_root;
  geo::Vec3d intended_target;
};

struct MeasurementSample {
  Approach approach;
  geo::Vec3d key_point_mm;
  geo::Vec3d direction;  // not normalized; the error metric normalizes
  geo::Vec3d target_mm;
  double user_distance_mm = 0.0;
};

struct ApproachStats {
  Approach approach;
  int n_trials = 0;
  double mean_error_mm = 0.0;
  double std_error_mm = 0.0;
  std::vector<metrics::BinStat> by_distance;
};

struct ComparisonRow {
  int trial = 0;
  Approach approach;
  double distance_mm = 0.0;
  double error_mm = 0.0;
};

struct ComparisonResult {
  std::array<ApproachStats, 3> stats;
  std::vector<ComparisonRow> rows;
};

/// Deterministic pose for (seed, scenario): target sampled in the configured
/// distance band, arm built collinear with the nose-to-target line, then
/// perturbed by the per-approach noise angles.
ArmPose generate_arm_pose(std::uint64_t seed, const ScenarioConfig& scenario);

MeasurementSample extract_measurement(const ArmPose& pose, Approach approach);

/// Runs `trials` poses (one independent stream per trial derived from the
/// master seed) and aggregates per-approach means and distance-binned curves.
ComparisonResult run_comparison(const CompareConfig& config,
                                std::uint64_t master_seed);

/// Coarse-to-fine grid fit of the three noise sigmas against target mean
/// errors (mm). Used by the calibrate tool to produce the shipped defaults.
ArmNoiseSigmas fit_noise_sigmas(const std::array<double, 3>& target_means_mm,
                                CompareConfig config,
                                std::uint64_t master_seed);

}  // namespace pointsim::measure
