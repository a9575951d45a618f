#include "pointsim/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace pointsim::metrics {

double mask_iou(const Mask& a, const Mask& b) {
  if (a.width != b.width || a.height != b.height) {
    throw DimensionMismatchError("mask_iou: mask dimensions differ");
  }
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < a.bits.size(); ++i) {
    const bool pa = a.bits[i] != 0;
    const bool pb = b.bits[i] != 0;
    inter += pa && pb;
    uni += pa || pb;
  }
  if (uni == 0) return 1.0;  // two blank masks agree perfectly
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double rmse_mm(std::span<const geo::Vec3d> deltas) {
  if (deltas.empty()) throw EmptyInputError("rmse_mm: empty input");
  double sum_sq = 0.0;
  for (const auto& d : deltas) sum_sq += d.squaredNorm();
  return std::sqrt(sum_sq / static_cast<double>(deltas.size()));
}

double wrap_deg(double deg) {
  double a = std::fmod(deg, 360.0);
  if (a <= -180.0) a += 360.0;
  if (a > 180.0) a -= 360.0;
  return a;
}

double mae_deg(std::span<const double> deltas_deg) {
  if (deltas_deg.empty()) throw EmptyInputError("mae_deg: empty input");
  double sum = 0.0;
  for (double d : deltas_deg) sum += std::abs(wrap_deg(d));
  return sum / static_cast<double>(deltas_deg.size());
}

std::vector<BinStat> bin_series(const ErrorSeries& series, double bin_width,
                                double lo) {
  if (bin_width <= 0.0) {
    throw std::invalid_argument("bin_series: bin width must be positive");
  }
  if (series.values.empty()) throw EmptyInputError("bin_series: empty input");

  double hi = lo;
  for (const auto& [key, _] : series.values) hi = std::max(hi, key);
  const int n_bins =
      std::max(1, static_cast<int>(std::ceil((hi - lo) / bin_width)));

  std::vector<BinStat> bins(n_bins);
  std::vector<double> sum(n_bins, 0.0), sum_sq(n_bins, 0.0);
  for (int i = 0; i < n_bins; ++i) {
    bins[i].lo = lo + i * bin_width;
    bins[i].hi = lo + (i + 1) * bin_width;
  }
  for (const auto& [key, err] : series.values) {
    int idx = static_cast<int>(std::floor((key - lo) / bin_width));
    idx = std::clamp(idx, 0, n_bins - 1);  // last bin closed on the right
    bins[idx].count += 1;
    sum[idx] += err;
    sum_sq[idx] += err * err;
  }
  for (int i = 0; i < n_bins; ++i) {
    if (bins[i].count == 0) continue;
    const double n = bins[i].count;
    bins[i].mean = sum[i] / n;
    const double var = std::max(0.0, sum_sq[i] / n - bins[i].mean * bins[i].mean);
    bins[i].stddev = std::sqrt(var);
  }
  return bins;
}

std::vector<BinStat> bin_by_distance(const ErrorSeries& series,
                                     double bin_mm) {
  if (series.values.empty()) {
    throw EmptyInputError("bin_by_distance: empty input");
  }
  double lo = series.values.front().first;
  for (const auto& [key, _] : series.values) lo = std::min(lo, key);
  return bin_series(series, bin_mm, lo);
}

std::vector<BinStat> angle_histogram(const ErrorSeries& series,
                                     double bin_deg) {
  if (series.values.empty()) {
    throw EmptyInputError("angle_histogram: empty input");
  }
  ErrorSeries wrapped;
  wrapped.unit = ErrorSeries::Unit::kDegrees;
  wrapped.values.reserve(series.values.size());
  for (const auto& [key, err] : series.values) {
    wrapped.values.emplace_back(wrap_deg(key), err);
  }
  double lo = wrapped.values.front().first;
  for (const auto& [key, _] : wrapped.values) lo = std::min(lo, key);
  return bin_series(wrapped, bin_deg, lo);
}

}  // namespace pointsim::metrics
