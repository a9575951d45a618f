#include "pointsim/measure.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Geometry>

namespace pointsim::measure {

namespace {

/// Rotate `dir` by a Gaussian-drawn angle about a uniformly random axis
/// perpendicular to it. The deviation angle is folded-normal(sigma).
geo::Vec3d perturb_direction(const geo::Vec3d& dir, double sigma_rad,
                             Rng& rng) {
  if (sigma_rad <= 0.0) return dir;
  const double angle = rng.gaussian(0.0, sigma_rad);
  const double phi = rng.uniform(0.0, 2.0 * M_PI);
  const Eigen::Vector3d e1 = dir.unitOrthogonal();
  const Eigen::Vector3d e2 = dir.cross(e1).normalized();
  const Eigen::Vector3d axis = std::cos(phi) * e1 + std::sin(phi) * e2;
  return Eigen::AngleAxisd(angle, axis) * dir;
}

double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double stddev(const std::vector<double>& xs, double m) {
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size()));
}

}  // namespace

std::string_view approach_label(Approach a) {
  switch (a) {
    case Approach::kForearm: return "FA";
    case Approach::kIndexFinger: return "IF";
    case Approach::kEyesFinger: return "EF";
  }
  return "?";
}

ArmPose generate_arm_pose(std::uint64_t seed, const ScenarioConfig& sc) {
  const double reach = sc.sight_len_mm;
  if (sc.min_target_dist_mm <= reach * 1.2) {
    throw InfeasibleScenarioError(
        "generate_arm_pose: target distance range overlaps the arm reach");
  }

  Rng rng(seed);
  const geo::Vec3d nose(0.0, 0.0, sc.nose_height_mm);

  // Target on a sphere of radius D around the nose, aimed downward between
  // the configured depression limits so it stays above the floor.
  const double dist = rng.uniform(sc.min_target_dist_mm, sc.max_target_dist_mm);
  const double azimuth = rng.uniform(-M_PI, M_PI);
  const double max_drop = sc.nose_height_mm - sc.min_target_z_mm;
  const double max_depression =
      std::asin(std::clamp(max_drop / dist, 0.0, 0.95));
  const double depression = rng.uniform(
      std::min(geo::deg2rad(sc.min_depression_deg), max_depression),
      max_depression);
  const geo::Vec3d aim(std::cos(depression) * std::cos(azimuth),
                       std::cos(depression) * std::sin(azimuth),
                       -std::sin(depression));
  const geo::Vec3d target = nose + dist * aim;

  // Ideal pose: nose, fingertip, wrist, and elbow all on the aim line.
  ArmPose pose;
  pose.intended_target = target;
  pose.fingertip = nose + reach * aim;

  const double sigma_if = geo::deg2rad(sc.sigmas.finger_deg);
  const double sigma_fa = geo::deg2rad(sc.sigmas.forearm_deg);
  const double sigma_ef = geo::deg2rad(sc.sigmas.eyes_deg);

  // Hand segment tilts by the finger jitter, forearm by the wrist deviation,
  // and the nose shifts so the eyes-finger line tilts by the head offset.
  const geo::Vec3d hand_dir = perturb_direction(aim, sigma_if, rng);
  pose.wrist = pose.fingertip - sc.hand_mm * hand_dir;

  const geo::Vec3d forearm_dir = perturb_direction(aim, sigma_fa, rng);
  pose.elbow = pose.wrist - sc.forearm_mm * forearm_dir;

  const geo::Vec3d sight_dir = perturb_direction(aim, sigma_ef, rng);
  pose.nose_root = pose.fingertip - reach * sight_dir;

  pose.shoulder = pose.elbow - sc.upper_arm_mm * aim;
  return pose;
}

MeasurementSample extract_measurement(const ArmPose& pose, Approach approach) {
  MeasurementSample s;
  s.approach = approach;
  s.target_mm = pose.intended_target;
  s.user_distance_mm = (pose.intended_target - pose.nose_root).norm();
  switch (approach) {
    case Approach::kForearm:
      s.direction = pose.wrist - pose.elbow;
      s.key_point_mm = pose.wrist;
      break;
    case Approach::kIndexFinger:
      s.direction = pose.fingertip - pose.wrist;
      s.key_point_mm = pose.fingertip;
      break;
    case Approach::kEyesFinger:
      s.direction = pose.fingertip - pose.nose_root;
      s.key_point_mm = pose.fingertip;
      break;
  }
  return s;
}

ComparisonResult run_comparison(const CompareConfig& config,
                                std::uint64_t master_seed) {
  if (config.trials < 1) {
    throw std::invalid_argument("run_comparison: trial count must be >= 1");
  }

  ComparisonResult result;
  result.rows.reserve(static_cast<std::size_t>(config.trials) * 3);
  std::array<std::vector<double>, 3> errors;
  std::array<metrics::ErrorSeries, 3> series;

  for (int trial = 0; trial < config.trials; ++trial) {
    const ArmPose pose = generate_arm_pose(
        Rng::derive_seed(master_seed, static_cast<std::uint64_t>(trial)),
        config.scenario);
    for (Approach approach : kAllApproaches) {
      const MeasurementSample s = extract_measurement(pose, approach);
      const double err =
          geo::pointing_error(s.target_mm, s.key_point_mm, s.direction);
      const int idx = static_cast<int>(approach);
      errors[idx].push_back(err);
      series[idx].values.emplace_back(s.user_distance_mm, err);
      result.rows.push_back({trial, approach, s.user_distance_mm, err});
    }
  }

  for (Approach approach : kAllApproaches) {
    const int idx = static_cast<int>(approach);
    ApproachStats& st = result.stats[idx];
    st.approach = approach;
    st.n_trials = config.trials;
    st.mean_error_mm = mean(errors[idx]);
    st.std_error_mm = stddev(errors[idx], st.mean_error_mm);
    st.by_distance = metrics::bin_series(series[idx], config.bin_mm,
                                         config.scenario.min_target_dist_mm);
  }
  return result;
}

ArmNoiseSigmas fit_noise_sigmas(const std::array<double, 3>& target_means_mm,
                                CompareConfig config,
                                std::uint64_t master_seed) {
  auto mean_for = [&](const ArmNoiseSigmas& sigmas, Approach approach) {
    config.scenario.sigmas = sigmas;
    const auto result = run_comparison(config, master_seed);
    return result.stats[static_cast<int>(approach)].mean_error_mm;
  };

  auto set_sigma = [](ArmNoiseSigmas& s, Approach a, double value) {
    switch (a) {
      case Approach::kForearm: s.forearm_deg = value; break;
      case Approach::kIndexFinger: s.finger_deg = value; break;
      case Approach::kEyesFinger: s.eyes_deg = value; break;
    }
  };

  ArmNoiseSigmas fitted;
  // IF and EF are independent of the other sigmas; FA picks up a small
  // cross-term from the finger jitter (it moves the wrist), so fit it last.
  const Approach order[] = {Approach::kIndexFinger, Approach::kEyesFinger,
                            Approach::kForearm};
  for (int pass = 0; pass < 2; ++pass) {
    for (Approach approach : order) {
      const double target = target_means_mm[static_cast<int>(approach)];
      double lo = 0.5, hi = 30.0;
      double best = lo, best_gap = 1e18;
      const int steps = pass == 0 ? 30 : 60;
      // Refine around the previous estimate on the second pass.
      if (pass == 1) {
        const double center = [&] {
          switch (approach) {
            case Approach::kForearm: return fitted.forearm_deg;
            case Approach::kIndexFinger: return fitted.finger_deg;
            case Approach::kEyesFinger: return fitted.eyes_deg;
          }
          return 10.0;
        }();
        lo = std::max(0.1, center * 0.8);
        hi = center * 1.2;
      }
      for (int i = 0; i <= steps; ++i) {
        const double sigma = lo + (hi - lo) * i / steps;
        ArmNoiseSigmas candidate = fitted;
        set_sigma(candidate, approach, sigma);
        const double gap =
            std::abs(mean_for(candidate, approach) - target);
        if (gap < best_gap) {
          best_gap = gap;
          best = sigma;
        }
      }
      set_sigma(fitted, approach, best);
    }
  }
  return fitted;
}

}  // namespace pointsim::measure
