#include "pointsim/perception.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include <json.hpp>

namespace pointsim::percept {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, kNumScenarioTags> kTagLabels = {
    "nominal",    "gloves",  "out_of_frame", "occlusion",
    "multi_user", "sitting", "dual_arm",
};

// Gaussian sigma whose folded-normal mean equals the target MAE.
double sigma_for_mae(double mae) { return mae * std::sqrt(M_PI / 2.0); }

// Beta parameters with the requested mean at a fixed concentration.
std::pair<double, double> beta_params(double mean, double concentration) {
  const double m = std::clamp(mean, 0.01, 0.99);
  return {m * concentration, (1.0 - m) * concentration};
}

}  // namespace

std::string_view tag_label(ScenarioTag tag) {
  return kTagLabels[static_cast<int>(tag)];
}

std::optional<ScenarioTag> tag_from_label(std::string_view label) {
  for (int i = 0; i < kNumScenarioTags; ++i) {
    if (kTagLabels[i] == label) return static_cast<ScenarioTag>(i);
  }
  return std::nullopt;
}

const TagProfile& NoiseProfile::row_for(const Frame& frame) const {
  const TagProfile* worst = &row(ScenarioTag::kNominal);
  for (ScenarioTag tag : frame.tags) {
    const TagProfile& candidate = row(tag);
    if (candidate.classify_success_rate < worst->classify_success_rate) {
      worst = &candidate;
    }
  }
  return *worst;
}

NoiseProfile NoiseProfile::nominal() {
  NoiseProfile p;
  p.row(ScenarioTag::kNominal) = {0.972, 61.3, 30.0, 0.61, 0.63, 1.4, 1.3};
  p.row(ScenarioTag::kGloves) = {0.949, 81.3, 44.0, 10.89, 6.9, 11.02, 3.2};
  p.row(ScenarioTag::kOutOfFrame) = {0.955, 75.5, 35.8, 10.22, 3.7, 12.44, 6.1};
  p.row(ScenarioTag::kOcclusion) = {0.895, 70.9, 29.6, 11.75, 5.9, 12.86, 3.7};
  p.row(ScenarioTag::kMultiUser) = {0.905, 72.3, 34.1, 6.57, 2.98, 7.43, 4.54};
  p.row(ScenarioTag::kSitting) = {0.979, 68.8, 35.6, 3.87, 1.88, 5.08, 2.12};
  p.row(ScenarioTag::kDualArm) = {0.878, 70.1, 38.8, 7.45, 2.61, 8.03, 2.94};
  return p;
}

NoiseProfile NoiseProfile::zero() {
  NoiseProfile p;
  for (auto& row : p.per_tag) {
    row = {1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  }
  p.certainty_correct_mean = 1.0;
  p.certainty_incorrect_mean = 0.0;
  return p;
}

Classification OracleProvider::classify(const Frame& frame) {
  if (!frame.ground_truth) {
    throw MissingGroundTruthError("oracle classify: frame has no ground truth");
  }
  const GroundTruth& gt = *frame.ground_truth;

  // Out-of-range yaw never appears in the training data; such gestures read
  // as not-pointing.
  bool label = gt.is_pointing;
  if (label && gt.feature &&
      std::abs(geo::rad2deg(gt.feature->yaw_rad)) > kYawSupportLimitDeg) {
    label = false;
  }

  const TagProfile& row = profile_.row_for(frame);
  const bool correct = rng_.bernoulli(row.classify_success_rate);

  Classification cls;
  cls.is_pointing = correct ? label : !label;
  const double mean = correct ? profile_.certainty_correct_mean
                              : profile_.certainty_incorrect_mean;
  if (mean >= 1.0) {
    cls.certainty = 1.0;
  } else if (mean <= 0.0) {
    cls.certainty = 0.0;
  } else {
    const auto [a, b] = beta_params(mean, correct ? 20.0 : 10.0);
    cls.certainty = rng_.beta(a, b);
  }
  return cls;
}

geo::PointingFeature OracleProvider::estimate(const Frame& frame) {
  if (!frame.ground_truth || !frame.ground_truth->feature) {
    throw MissingGroundTruthError(
        "oracle estimate: frame has no ground-truth feature");
  }
  const TagProfile& row = profile_.row_for(frame);
  geo::PointingFeature est = *frame.ground_truth->feature;

  const double pos_sigma = row.pos_rmse_mm / std::sqrt(3.0);
  for (int i = 0; i < 3; ++i) {
    est.position_mm[i] += rng_.gaussian(0.0, pos_sigma);
  }
  est.pitch_rad +=
      geo::deg2rad(rng_.gaussian(0.0, sigma_for_mae(row.pitch_mae_deg)));
  est.yaw_rad +=
      geo::deg2rad(rng_.gaussian(0.0, sigma_for_mae(row.yaw_mae_deg)));

  est.yaw_rad = geo::wrap_angle(est.yaw_rad);
  const double yaw_limit = geo::deg2rad(kYawSupportLimitDeg);
  est.yaw_rad = std::clamp(est.yaw_rad, -yaw_limit, yaw_limit);
  // Keep pitch inside the open (-90, 90) domain of the angle mapping.
  const double pitch_limit = geo::deg2rad(89.99);
  est.pitch_rad = std::clamp(est.pitch_rad, -pitch_limit, pitch_limit);
  return est;
}

TriggerDecision Debouncer::update(const Classification& cls) {
  const bool qualifies = cls.is_pointing &&
                         cls.certainty >= config_.certainty_threshold;
  if (qualifies) {
    ++streak_;
  } else {
    streak_ = 0;
  }
  TriggerDecision decision{false, streak_};
  if (qualifies && streak_ >= config_.required_consecutive) {
    decision.fired = true;
    streak_ = 0;  // a trigger is an edge; the next one needs a fresh streak
  }
  return decision;
}

namespace {

json feature_to_json(const geo::PointingFeature& f) {
  return json{{"p_mm", {f.position_mm.x(), f.position_mm.y(),
                        f.position_mm.z()}},
              {"beta_deg", geo::rad2deg(f.pitch_rad)},
              {"gamma_deg", geo::rad2deg(f.yaw_rad)}};
}

geo::PointingFeature feature_from_json(const json& j) {
  geo::PointingFeature f;
  const auto& p = j.at("p_mm");
  f.position_mm = geo::Vec3d(p.at(0).get<double>(), p.at(1).get<double>(),
                             p.at(2).get<double>());
  f.pitch_rad = geo::deg2rad(j.at("beta_deg").get<double>());
  f.yaw_rad = geo::deg2rad(j.at("gamma_deg").get<double>());
  return f;
}

}  // namespace

std::optional<ReplayRecord> ReplayLogReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ReplayParseError(e.what(), line_);
    }
    try {
      ReplayRecord rec;
      rec.frame.t = j.at("t").get<double>();
      if (j.contains("tags")) {
        for (const auto& t : j.at("tags")) {
          const auto tag = tag_from_label(t.get<std::string>());
          if (!tag) {
            throw ReplayParseError("unknown tag '" + t.get<std::string>() +
                                       "'",
                                   line_);
          }
          rec.frame.tags.push_back(*tag);
        }
      }
      if (j.contains("gt") && !j.at("gt").is_null()) {
        GroundTruth gt;
        gt.is_pointing = j.at("gt").at("pointing").get<bool>();
        if (j.at("gt").contains("p_mm")) {
          gt.feature = feature_from_json(j.at("gt"));
        }
        rec.frame.ground_truth = gt;
      }
      rec.cls.is_pointing = j.at("cls").at("pointing").get<bool>();
      rec.cls.certainty = j.at("cls").at("certainty").get<double>();
      if (j.contains("est") && !j.at("est").is_null()) {
        rec.estimate = feature_from_json(j.at("est"));
      }
      return rec;
    } catch (const ReplayParseError&) {
      throw;
    } catch (const json::exception& e) {
      throw ReplayParseError(e.what(), line_);
    }
  }
  return std::nullopt;
}

void write_replay_log(std::ostream& out,
                      std::span<const ReplayRecord> records) {
  for (const auto& rec : records) {
    json j;
    j["t"] = rec.frame.t;
    json tags = json::array();
    for (ScenarioTag tag : rec.frame.tags) {
      tags.push_back(std::string(tag_label(tag)));
    }
    j["tags"] = tags;
    if (rec.frame.ground_truth) {
      const GroundTruth& gt = *rec.frame.ground_truth;
      json g{{"pointing", gt.is_pointing}};
      if (gt.feature) {
        g.update(feature_to_json(*gt.feature));
      }
      j["gt"] = g;
    }
    j["cls"] = json{{"pointing", rec.cls.is_pointing},
                    {"certainty", rec.cls.certainty}};
    if (rec.estimate) {
      j["est"] = feature_to_json(*rec.estimate);
    }
    out << j.dump() << '\n';
  }
}

}  // namespace pointsim::percept
