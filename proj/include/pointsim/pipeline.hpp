#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "pointsim/geometry.hpp"
#include "pointsim/perception.hpp"

namespace pointsim::pipeline {

struct PipelineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Mode { kDirectGoal, kFloorLine };

struct Config {
  percept::DebounceConfig debounce;
  int settle_frames = 5;     // estimates collected after the trigger
  double cooldown_s = 2.0;   // frame time before re-arming after a dispatch
  Mode mode = Mode::kDirectGoal;
};

struct DirectGoal {
  geo::Vec3d goal_mm;  // robot frame; z = -h
};

struct FloorLine {
  geo::Rayd line;  // origin on the floor plane, horizontal direction
};

struct TargetCommand {
  std::variant<DirectGoal, FloorLine> target;
  geo::PointingFeature source_feature;  // fused estimate, camera frame
  geo::RigidTransformd camera_to_robot;
  double t = 0.0;
};

/// Component-wise median of the collected estimates; yaw uses a circular
/// median so streams straddling +-180 deg fuse sensibly. Robust to a moving
/// arm in the early settle frames.
geo::PointingFeature settle_and_fuse(
    std::span<const geo::PointingFeature> estimates);

/// Maps a camera-frame feature into the robot frame and resolves the target:
/// a floor point in DirectGoal mode, the floor-projected pointing line in
/// FloorLine mode. Geometry errors (level pointing, finger below floor)
/// propagate to the caller.
TargetCommand dispatch_target(const geo::PointingFeature& feature,
                              const geo::RigidTransformd& camera_to_robot,
                              double robot_height_mm, Mode mode, double t);

enum class Phase { kIdle, kSettling, kDispatched };

enum class Event {
  kNone,
  kTriggered,        // debounce fired; settle window opened
  kDispatched,       // command emitted this step
  kDispatchFailed,   // fused gesture had no resolvable target
};

struct StepResult {
  std::optional<TargetCommand> command;
  Event event = Event::kNone;
  Phase phase = Phase::kIdle;
};

/// Frame-driven gesture state machine.
///
/// | phase      | on frame                                  | next           |
/// |------------|-------------------------------------------|----------------|
/// | Idle       | classify + debounce; trigger?             | Settling       |
/// | Settling   | collect estimate; window done? fuse+emit  | Dispatched     |
/// |            | ... or dispatch failure                   | Idle           |
/// | Dispatched | cooldown elapsed? re-arm and classify     | Idle           |
///
/// Exactly one command is emitted per trigger. Single-writer: one thread owns
/// the instance and feeds frames in timestamp order.
class Pipeline {
 public:
  Pipeline(Config config, geo::RigidTransformd camera_to_robot,
           double robot_height_mm);

  StepResult step(const percept::Frame& frame, percept::Provider& provider);

  Phase phase() const { return phase_; }
  const Config& config() const { return config_; }
  void reset();

 private:
  StepResult idle_step(const percept::Frame& frame,
                       percept::Provider& provider);

  Config config_;
  geo::RigidTransformd camera_to_robot_;
  double robot_height_mm_;

  Phase phase_ = Phase::kIdle;
  percept::Debouncer debouncer_;
  std::vector<geo::PointingFeature> estimates_;
  int frames_remaining_ = 0;
  double rearm_t_ = 0.0;
  double last_t_ = 0.0;
  bool seen_frame_ = false;
};

}  // namespace pointsim::pipeline
