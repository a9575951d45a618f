#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pointsim/geometry.hpp"

namespace pointsim::metrics {

struct DimensionMismatchError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct EmptyInputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Row-major binary mask.
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  static Mask zeros(int w, int h) {
    Mask m;
    m.width = w;
    m.height = h;
    m.bits.assign(static_cast<std::size_t>(w) * h, 0);
    return m;
  }

  std::uint8_t& at(int x, int y) {
    return bits[static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t at(int x, int y) const {
    return bits[static_cast<std::size_t>(y) * width + x];
  }
};

/// Intersection over union of two equally sized masks.
/// Two empty masks count as a perfect match (1.0).
double mask_iou(const Mask& a, const Mask& b);

/// Root mean square of the Euclidean norms of position deltas (mm).
double rmse_mm(std::span<const geo::Vec3d> deltas);

/// Mean absolute error of angle deltas in degrees. Each delta is wrapped to
/// (-180, 180] first, so a raw delta of 358 deg contributes 2 deg.
double mae_deg(std::span<const double> deltas_deg);

/// Wrap a degree value to (-180, 180].
double wrap_deg(double deg);

/// Sequence of (key, error) samples; key is a distance in mm or an angle in
/// degrees depending on the unit tag.
struct ErrorSeries {
  enum class Unit { kMillimeters, kDegrees };
  Unit unit = Unit::kMillimeters;
  std::vector<std::pair<double, double>> values;  // (key, error)
};

struct BinStat {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;
  double mean = 0.0;
  double stddev = 0.0;
};

/// Mean/stddev of the errors per key bin. Bins are anchored at `lo` (the
/// sample minimum by default) and cover through the sample maximum; the last
/// bin is closed on the right so every sample lands somewhere.
std::vector<BinStat> bin_series(const ErrorSeries& series, double bin_width,
                                double lo);
std::vector<BinStat> bin_by_distance(const ErrorSeries& series, double bin_mm);

/// Per-angle-bin error stats for polar error plots. Keys are wrapped to
/// (-180, 180] before binning.
std::vector<BinStat> angle_histogram(const ErrorSeries& series,
                                     double bin_deg);

}  // namespace pointsim::metrics
