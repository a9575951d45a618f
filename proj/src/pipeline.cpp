#include "pointsim/pipeline.hpp"

#include <algorithm>
#include <cmath>

namespace pointsim::pipeline {

namespace {

double median(std::vector<double> xs) {
  const std::size_t n = xs.size();
  const std::size_t mid = n / 2;
  std::nth_element(xs.begin(), xs.begin() + mid, xs.end());
  if (n % 2 == 1) return xs[mid];
  const double hi = xs[mid];
  const double lo = *std::max_element(xs.begin(), xs.begin() + mid);
  return 0.5 * (lo + hi);
}

/// Median on the circle: recenter the samples around their mean direction,
/// take the ordinary median, and map back.
double circular_median(const std::vector<double>& angles_rad) {
  double s = 0.0, c = 0.0;
  for (double a : angles_rad) {
    s += std::sin(a);
    c += std::cos(a);
  }
  const double center = std::atan2(s, c);
  std::vector<double> recentered;
  recentered.reserve(angles_rad.size());
  for (double a : angles_rad) {
    recentered.push_back(geo::wrap_angle(a - center));
  }
  return geo::wrap_angle(center + median(std::move(recentered)));
}

}  // namespace

geo::PointingFeature settle_and_fuse(
    std::span<const geo::PointingFeature> estimates) {
  if (estimates.empty()) {
    throw std::invalid_argument("settle_and_fuse: no estimates collected");
  }
  std::vector<double> xs, ys, zs, pitches, yaws;
  for (const auto& e : estimates) {
    xs.push_back(e.position_mm.x());
    ys.push_back(e.position_mm.y());
    zs.push_back(e.position_mm.z());
    pitches.push_back(e.pitch_rad);
    yaws.push_back(e.yaw_rad);
  }
  geo::PointingFeature fused;
  fused.position_mm =
      geo::Vec3d(median(std::move(xs)), median(std::move(ys)),
                 median(std::move(zs)));
  fused.pitch_rad = median(std::move(pitches));
  fused.yaw_rad = circular_median(yaws);
  return fused;
}

TargetCommand dispatch_target(const geo::PointingFeature& feature,
                              const geo::RigidTransformd& camera_to_robot,
                              double robot_height_mm, Mode mode, double t) {
  feature.validate();
  const auto dir_camera = feature.direction();
  const auto dir_robot = geo::transform_direction(camera_to_robot, dir_camera);
  const geo::Vec3d finger_robot =
      geo::transform_point(camera_to_robot, feature.position_mm);

  TargetCommand cmd;
  cmd.source_feature = feature;
  cmd.camera_to_robot = camera_to_robot;
  cmd.t = t;
  if (mode == Mode::kDirectGoal) {
    cmd.target =
        DirectGoal{geo::resolve_target(finger_robot, dir_robot,
                                       robot_height_mm)};
  } else {
    cmd.target = FloorLine{geo::project_to_floor_line(finger_robot, dir_robot,
                                                      robot_height_mm)};
  }
  return cmd;
}

Pipeline::Pipeline(Config config, geo::RigidTransformd camera_to_robot,
                   double robot_height_mm)
    : config_(config),
      camera_to_robot_(std::move(camera_to_robot)),
      robot_height_mm_(robot_height_mm),
      debouncer_(config.debounce) {
  if (config_.settle_frames < 1) {
    throw std::invalid_argument("Pipeline: settle_frames must be >= 1");
  }
  camera_to_robot_.validate();
}

void Pipeline::reset() {
  phase_ = Phase::kIdle;
  debouncer_.reset();
  estimates_.clear();
  frames_remaining_ = 0;
  seen_frame_ = false;
}

StepResult Pipeline::idle_step(const percept::Frame& frame,
                               percept::Provider& provider) {
  StepResult result;
  const auto cls = provider.classify(frame);
  if (debouncer_.update(cls).fired) {
    phase_ = Phase::kSettling;
    estimates_.clear();
    frames_remaining_ = config_.settle_frames;
    result.event = Event::kTriggered;
  }
  result.phase = phase_;
  return result;
}

StepResult Pipeline::step(const percept::Frame& frame,
                          percept::Provider& provider) {
  if (seen_frame_ && frame.t <= last_t_) {
    throw PipelineError("Pipeline: frame timestamps must strictly increase");
  }
  last_t_ = frame.t;
  seen_frame_ = true;

  switch (phase_) {
    case Phase::kIdle:
      return idle_step(frame, provider);

    case Phase::kSettling: {
      StepResult result;
      estimates_.push_back(provider.estimate(frame));
      if (--frames_remaining_ > 0) {
        result.phase = phase_;
        return result;
      }
      const auto fused = settle_and_fuse(estimates_);
      estimates_.clear();
      try {
        result.command = dispatch_target(fused, camera_to_robot_,
                                         robot_height_mm_, config_.mode,
                                         frame.t);
        result.event = Event::kDispatched;
        phase_ = Phase::kDispatched;
        rearm_t_ = frame.t + config_.cooldown_s;
      } catch (const geo::GeometryError&) {
        // Not dispatchable (level/upward pointing or finger below floor);
        // surface as an event and go back to idling.
        result.event = Event::kDispatchFailed;
        phase_ = Phase::kIdle;
        debouncer_.reset();
      }
      result.phase = phase_;
      return result;
    }

    case Phase::kDispatched: {
      if (frame.t >= rearm_t_) {
        phase_ = Phase::kIdle;
        debouncer_.reset();
        return idle_step(frame, provider);
      }
      StepResult result;
      result.phase = phase_;
      return result;
    }
  }
  throw PipelineError("Pipeline: unreachable phase");
}

}  // namespace pointsim::pipeline
