#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "pointsim/measure.hpp"
#include "pointsim/metrics.hpp"
#include "pointsim/simworld.hpp"

namespace pointsim::io {

struct ParseError : std::runtime_error {
  ParseError(const std::string& file, int line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what) {}
};

/// Bad flags or option values; maps to the usage exit code.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Format { kCsv, kJsonl };

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  int column_index(const std::string& name) const;
  /// Column parsed as doubles; throws ParseError with the data line number.
  std::vector<double> numeric_column(const std::string& name,
                                     const std::string& file) const;
};

CsvTable read_csv(const std::filesystem::path& path);

// Plain-text portable bitmaps (P1) carry the binary masks.
metrics::Mask read_pbm(const std::filesystem::path& path);
void write_pbm(const std::filesystem::path& path, const metrics::Mask& mask);

/// approach_errors.{csv|jsonl} + summary.json under out_dir.
/// Returns the paths written.
std::vector<std::filesystem::path> write_comparison_outputs(
    const std::filesystem::path& out_dir, Format format,
    const measure::ComparisonResult& result, std::uint64_t seed);

/// trials.{csv|jsonl} + summary.json under out_dir.
std::vector<std::filesystem::path> write_campaign_outputs(
    const std::filesystem::path& out_dir, Format format,
    const sim::CampaignResult& result, std::uint64_t seed);

/// binned.csv: lo,hi,count,mean,stddev rows.
std::filesystem::path write_binned_csv(const std::filesystem::path& out_dir,
                                       const std::string& name,
                                       const std::vector<metrics::BinStat>& bins);

}  // namespace pointsim::io
