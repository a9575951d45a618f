#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pointsim/geometry.hpp"
#include "pointsim/rng.hpp"

namespace pointsim::percept {

/// Yaw range the estimator supports; gestures outside it are treated as
/// not-pointing and estimates are clamped to it.
inline constexpr double kYawSupportLimitDeg = 125.0;

struct MissingGroundTruthError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct StreamExhaustedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ReplayParseError : std::runtime_error {
  ReplayParseError(const std::string& what, int line)
      : std::runtime_error("replay log line " + std::to_string(line) + ": " +
                           what),
        line_number(line) {}
  int line_number;
};

enum class ScenarioTag {
  kNominal = 0,
  kGloves,
  kOutOfFrame,
  kOcclusion,
  kMultiUser,
  kSitting,
  kDualArm,
};
inline constexpr int kNumScenarioTags = 7;

std::string_view tag_label(ScenarioTag tag);
std::optional<ScenarioTag> tag_from_label(std::string_view label);

struct GroundTruth {
  bool is_pointing = false;
  std::optional<geo::PointingFeature> feature;
};

/// One observation step. Stands in for a camera image: carries no pixels,
/// only the ground-truth pointing state and scenario tags that drive the
/// oracle provider.
struct Frame {
  double t = 0.0;
  std::optional<GroundTruth> ground_truth;
  std::vector<ScenarioTag> tags;
};

struct Classification {
  bool is_pointing = false;
  double certainty = 0.0;
};

/// Accuracy figures for one scenario tag.
struct TagProfile {
  double classify_success_rate = 1.0;
  double pos_rmse_mm = 0.0;
  double pos_std_mm = 0.0;
  double pitch_mae_deg = 0.0;
  double pitch_std_deg = 0.0;
  double yaw_mae_deg = 0.0;
  double yaw_std_deg = 0.0;
};

/// Noise-calibrated stand-in for the trained recognition/estimation models.
/// Per-tag rows hold the published accuracy figures; the certainty means
/// drive a Beta model (high certainty for correct predictions, low for
/// incorrect ones).
struct NoiseProfile {
  std::array<TagProfile, kNumScenarioTags> per_tag{};
  double certainty_correct_mean = 0.95;
  double certainty_incorrect_mean = 0.35;

  const TagProfile& row(ScenarioTag tag) const {
    return per_tag[static_cast<int>(tag)];
  }
  TagProfile& row(ScenarioTag tag) { return per_tag[static_cast<int>(tag)]; }

  /// Row that applies to a frame: the worst (lowest success rate) of its
  /// tags; untagged frames count as nominal.
  const TagProfile& row_for(const Frame& frame) const;

  /// Reference accuracy profile shipped with the toolkit.
  static NoiseProfile nominal();
  /// All noise off, classification always right, certainty 1.
  static NoiseProfile zero();
};

class Provider {
 public:
  virtual ~Provider() = default;
  virtual Classification classify(const Frame& frame) = 0;
  virtual geo::PointingFeature estimate(const Frame& frame) = 0;
};

/// Perturbs ground truth according to a NoiseProfile. Deterministic for a
/// given seed; one instance per frame stream.
class OracleProvider : public Provider {
 public:
  OracleProvider(NoiseProfile profile, std::uint64_t seed)
      : profile_(std::move(profile)), rng_(seed) {}

  Classification classify(const Frame& frame) override;
  geo::PointingFeature estimate(const Frame& frame) override;

 private:
  NoiseProfile profile_;
  Rng rng_;
};

/// Qualifying classification = pointing with certainty at or above the
/// threshold. The trigger fires on the k-th consecutive qualifying frame;
/// anything else (a negative or a low-certainty positive) resets the streak.
struct DebounceConfig {
  int required_consecutive = 3;
  double certainty_threshold = 0.5;
};

struct TriggerDecision {
  bool fired = false;
  int streak = 0;
};

class Debouncer {
 public:
  explicit Debouncer(DebounceConfig config) : config_(config) {}

  TriggerDecision update(const Classification& cls);
  void reset() { streak_ = 0; }
  const DebounceConfig& config() const { return config_; }

 private:
  DebounceConfig config_;
  int streak_ = 0;
};

// Replay logs: JSON Lines, one record per frame.
// {"t":..., "tags":[...], "gt":{"pointing":..., "p_mm":[x,y,z],
//  "beta_deg":..., "gamma_deg":...}, "cls":{"pointing":..., "certainty":...},
//  "est":{"p_mm":[...], "beta_deg":..., "gamma_deg":...}}
// "gt" and "est" are optional per record; angles are degrees on disk.

struct ReplayRecord {
  Frame frame;
  Classification cls;
  std::optional<geo::PointingFeature> estimate;
};

class ReplayLogReader {
 public:
  explicit ReplayLogReader(std::istream& in) : in_(in) {}

  /// Next record in file order; nullopt once the stream is exhausted.
  /// Malformed lines raise ReplayParseError with the line number.
  std::optional<ReplayRecord> next();

 private:
  std::istream& in_;
  int line_ = 0;
};

void write_replay_log(std::ostream& out, std::span<const ReplayRecord> records);

/// Serves logged classifications/estimates to a pipeline, one record per
/// frame. Asking beyond the primed record raises StreamExhaustedError.
class ReplayProvider : public Provider {
 public:
  void prime(const ReplayRecord& record) { record_ = record; }

  Classification classify(const Frame&) override {
    if (!record_) throw StreamExhaustedError("replay: no record primed");
    return record_->cls;
  }

  geo::PointingFeature estimate(const Frame&) override {
    if (!record_ || !record_->estimate) {
      throw StreamExhaustedError("replay: no estimate in current record");
    }
    return *record_->estimate;
  }

 private:
  std::optional<ReplayRecord> record_;
};

}  // namespace pointsim::percept
