#include "pointsim/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace pointsim::io {

namespace {

using nlohmann::json;

std::string fmt(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

json summary_bins(const std::vector<metrics::BinStat>& bins) {
  json arr = json::array();
  for (const auto& b : bins) {
    arr.push_back({{"lo_mm", b.lo},
                   {"hi_mm", b.hi},
                   {"count", b.count},
                   {"mean", b.mean},
                   {"stddev", b.stddev}});
  }
  return arr;
}

}  // namespace

int CsvTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::vector<double> CsvTable::numeric_column(const std::string& name,
                                             const std::string& file) const {
  const int idx = column_index(name);
  if (idx < 0) {
    throw ParseError(file, 1, "missing column '" + name + "'");
  }
  std::vector<double> values;
  values.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (static_cast<std::size_t>(idx) >= row.size()) {
      throw ParseError(file, static_cast<int>(r) + 2, "short row");
    }
    try {
      values.push_back(std::stod(row[idx]));
    } catch (const std::exception&) {
      throw ParseError(file, static_cast<int>(r) + 2,
                       "not a number: '" + row[idx] + "'");
    }
  }
  return values;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  CsvTable table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      table.columns = split_csv_line(line);
    } else {
      auto cells = split_csv_line(line);
      if (cells.size() != table.columns.size()) {
        throw ParseError(path.string(), line_no, "wrong field count");
      }
      table.rows.push_back(std::move(cells));
    }
  }
  if (table.columns.empty()) {
    throw ParseError(path.string(), 1, "empty file, expected a header row");
  }
  return table;
}

metrics::Mask read_pbm(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path.string());

  auto next_token = [&](const char* what) {
    std::string tok;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return tok;
    }
    throw ParseError(path.string(), 0, std::string("missing ") + what);
  };

  if (next_token("magic") != "P1") {
    throw ParseError(path.string(), 1, "expected plain PBM (P1)");
  }
  const int width = std::stoi(next_token("width"));
  const int height = std::stoi(next_token("height"));
  if (width <= 0 || height <= 0) {
    throw ParseError(path.string(), 1, "bad dimensions");
  }
  metrics::Mask mask = metrics::Mask::zeros(width, height);
  std::size_t i = 0;
  while (i < mask.bits.size()) {
    const std::string tok = next_token("pixel");
    for (char c : tok) {  // P1 allows packed digits
      if (c != '0' && c != '1') {
        throw ParseError(path.string(), 0, "bad pixel value");
      }
      if (i >= mask.bits.size()) {
        throw ParseError(path.string(), 0, "too many pixels");
      }
      mask.bits[i++] = (c == '1');
    }
  }
  return mask;
}

void write_pbm(const std::filesystem::path& path, const metrics::Mask& mask) {
  auto out = open_out(path);
  out << "P1\n" << mask.width << " " << mask.height << "\n";
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      out << (mask.at(x, y) ? '1' : '0');
      out << (x + 1 == mask.width ? '\n' : ' ');
    }
  }
}

std::vector<std::filesystem::path> write_comparison_outputs(
    const std::filesystem::path& out_dir, Format format,
    const measure::ComparisonResult& result, std::uint64_t seed) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;

  const auto rows_path =
      out_dir / (format == Format::kCsv ? "approach_errors.csv"
                                        : "approach_errors.jsonl");
  {
    auto out = open_out(rows_path);
    if (format == Format::kCsv) {
      out << "approach,distance_mm,error_mm,trial_id\n";
      for (const auto& row : result.rows) {
        out << measure::approach_label(row.approach) << ','
            << fmt(row.distance_mm, 3) << ',' << fmt(row.error_mm, 6) << ','
            << row.trial << '\n';
      }
    } else {
      for (const auto& row : result.rows) {
        json j{{"approach", std::string(measure::approach_label(row.approach))},
               {"distance_mm", row.distance_mm},
               {"error_mm", row.error_mm},
               {"trial_id", row.trial}};
        out << j.dump() << '\n';
      }
    }
  }
  written.push_back(rows_path);

  json summary;
  summary["seed"] = seed;
  summary["n_trials"] = result.stats[0].n_trials;
  for (const auto& st : result.stats) {
    const std::string key{measure::approach_label(st.approach)};
    summary["approaches"][key] = {
        {"mean_error_mm", st.mean_error_mm},
        {"std_error_mm", st.std_error_mm},
        {"n_trials", st.n_trials},
        {"by_distance", summary_bins(st.by_distance)}};
  }
  const auto summary_path = out_dir / "summary.json";
  open_out(summary_path) << summary.dump(2) << '\n';
  written.push_back(summary_path);
  return written;
}

std::vector<std::filesystem::path> write_campaign_outputs(
    const std::filesystem::path& out_dir, Format format,
    const sim::CampaignResult& result, std::uint64_t seed) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;

  auto mode_label = [](sim::MotionMode m) {
    return m == sim::MotionMode::kQuadruped ? "quadruped" : "rover";
  };

  const auto rows_path = out_dir / (format == Format::kCsv ? "trials.csv"
                                                           : "trials.jsonl");
  {
    auto out = open_out(rows_path);
    if (format == Format::kCsv) {
      out << "trial,seed,mode,dispatched,success,reach_error_mm,"
             "distance_mm,target_x_mm,target_y_mm,goal_x_mm,goal_y_mm,"
             "final_x_mm,final_y_mm,min_clearance_mm\n";
    }
    for (std::size_t i = 0; i < result.trials.size(); ++i) {
      const auto& t = result.trials[i];
      if (format == Format::kCsv) {
        out << i << ',' << t.seed << ',' << mode_label(t.mode) << ','
            << (t.dispatched ? 1 : 0) << ',' << (t.success ? 1 : 0) << ','
            << fmt(t.reach_error_mm, 3) << ','
            << fmt(t.distance_at_pointing_mm, 3) << ','
            << fmt(t.true_target_mm.x(), 3) << ','
            << fmt(t.true_target_mm.y(), 3) << ','
            << fmt(t.commanded_goal_mm.x(), 3) << ','
            << fmt(t.commanded_goal_mm.y(), 3) << ','
            << fmt(t.final_position_mm.x(), 3) << ','
            << fmt(t.final_position_mm.y(), 3) << ','
            << (std::isfinite(t.min_obstacle_clearance_mm)
                    ? fmt(t.min_obstacle_clearance_mm, 3)
                    : "inf")
            << '\n';
      } else {
        json j{{"trial", i},
               {"seed", t.seed},
               {"mode", mode_label(t.mode)},
               {"dispatched", t.dispatched},
               {"success", t.success},
               {"reach_error_mm", t.reach_error_mm},
               {"distance_mm", t.distance_at_pointing_mm},
               {"target_mm", {t.true_target_mm.x(), t.true_target_mm.y()}},
               {"goal_mm", {t.commanded_goal_mm.x(), t.commanded_goal_mm.y()}},
               {"final_mm",
                {t.final_position_mm.x(), t.final_position_mm.y()}}};
        if (std::isfinite(t.min_obstacle_clearance_mm)) {
          j["min_clearance_mm"] = t.min_obstacle_clearance_mm;
        }
        out << j.dump() << '\n';
      }
    }
  }
  written.push_back(rows_path);

  const auto& s = result.summary;
  json summary{{"mode", mode_label(s.mode)},
               {"seed", seed},
               {"n_trials", s.n_trials},
               {"n_dispatched", s.n_dispatched},
               {"n_success", s.n_success},
               {"success_rate", s.success_rate},
               {"mean_reach_error_mm", s.mean_reach_error_mm},
               {"std_reach_error_mm", s.std_reach_error_mm},
               {"mean_distance_mm", s.mean_distance_mm}};
  const auto summary_path = out_dir / "summary.json";
  open_out(summary_path) << summary.dump(2) << '\n';
  written.push_back(summary_path);
  return written;
}

std::filesystem::path write_binned_csv(
    const std::filesystem::path& out_dir, const std::string& name,
    const std::vector<metrics::BinStat>& bins) {
  std::filesystem::create_directories(out_dir);
  const auto path = out_dir / name;
  auto out = open_out(path);
  out << "lo,hi,count,mean,stddev\n";
  for (const auto& b : bins) {
    out << fmt(b.lo, 3) << ',' << fmt(b.hi, 3) << ',' << b.count << ','
        << fmt(b.mean, 6) << ',' << fmt(b.stddev, 6) << '\n';
  }
  return path;
}

}  // namespace pointsim::io
