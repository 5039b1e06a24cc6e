#pragma once

// Result emission. The suite writes one long-format CSV per reward mode
// plus one cross-environment average file; --format md adds a markdown
// rendering per mode with environments as rows and profiles as columns,
// bolding each row's minimum. All files are UTF-8, comma-delimited, LF,
// fixed two-decimal percentages in the table files and full precision in
// the optional raw per-run file.
//
// Everything is rendered in memory first and written through temp-file
// renames, so a failing suite never leaves a partial results file behind.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "banditlab/core.hpp"
#include "banditlab/experiments.hpp"

namespace banditlab {

namespace detail {

inline std::string format_pct(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", fraction * 100.0);
  return buf;
}

}  // namespace detail

inline constexpr const char* kResultsHeader =
    "dataset,mode,profile,mean_error_pct,std_error_pct,runs,horizon,base_seed";

inline std::string render_results_csv(const std::vector<AggregateRow>& rows,
                                      std::size_t horizon, std::uint64_t base_seed) {
  std::ostringstream out;
  out << kResultsHeader << '\n';
  for (const auto& row : rows) {
    out << row.environment << ',' << to_string(row.mode) << ',' << row.profile << ','
        << detail::format_pct(row.mean_error) << ',' << detail::format_pct(row.std_error) << ','
        << row.runs << ',' << horizon << ',' << base_seed << '\n';
  }
  return out.str();
}

inline std::string render_raw_csv(const std::vector<RunResult>& runs) {
  std::ostringstream out;
  out << "dataset,mode,profile,run_index,seed,horizon,tau,alpha,phi,beta,"
         "total_regret,error_rate,pull_counts\n";
  for (const auto& r : runs) {
    out << r.environment << ',' << to_string(r.mode) << ',' << r.profile << ',' << r.run_index
        << ',' << r.seed << ',' << r.horizon << ',' << detail::format_double(r.realized.tau) << ','
        << detail::format_double(r.realized.alpha) << ',' << detail::format_double(r.realized.phi)
        << ',' << detail::format_double(r.realized.beta) << ','
        << detail::format_double(r.total_regret) << ',' << detail::format_double(r.error_rate)
        << ',';
    for (std::size_t i = 0; i < r.pull_counts.size(); ++i) {
      if (i) out << ';';
      out << r.pull_counts[i];
    }
    out << '\n';
  }
  return out.str();
}

// One markdown table for a single mode: rows are environments (in first-seen
// order), columns are profiles, the per-row minimum mean is bolded.
inline std::string render_markdown_table(const std::vector<AggregateRow>& mode_rows,
                                         const std::string& title) {
  std::vector<std::string> profiles;
  std::vector<std::string> environments;
  std::map<std::pair<std::string, std::string>, const AggregateRow*> cells;
  for (const auto& row : mode_rows) {
    if (std::find(profiles.begin(), profiles.end(), row.profile) == profiles.end()) {
      profiles.push_back(row.profile);
    }
    if (std::find(environments.begin(), environments.end(), row.environment) ==
        environments.end()) {
      environments.push_back(row.environment);
    }
    cells[{row.environment, row.profile}] = &row;
  }

  std::ostringstream out;
  out << "## " << title << "\n\n";
  out << "| dataset |";
  for (const auto& p : profiles) out << ' ' << p << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < profiles.size(); ++i) out << "---|";
  out << '\n';
  for (const auto& env : environments) {
    double min_mean = std::numeric_limits<double>::infinity();
    for (const auto& p : profiles) {
      auto it = cells.find({env, p});
      if (it != cells.end()) min_mean = std::min(min_mean, it->second->mean_error);
    }
    out << "| " << env << " |";
    for (const auto& p : profiles) {
      auto it = cells.find({env, p});
      if (it == cells.end()) {
        out << " |";
        continue;
      }
      const AggregateRow& cell = *it->second;
      const bool best = cell.mean_error == min_mean;
      out << ' ';
      if (best) out << "**";
      out << detail::format_pct(cell.mean_error);
      if (best) out << "**";
      out << " ± " << detail::format_pct(cell.std_error) << " |";
    }
    out << '\n';
  }
  return out.str();
}

// filename -> rendered content for a full suite.
inline std::map<std::string, std::string> build_suite_files(const ExperimentConfig& config,
                                                            const SuiteResult& result,
                                                            bool markdown, bool raw) {
  std::map<std::string, std::string> files;
  for (const RewardMode mode : config.modes) {
    std::vector<AggregateRow> mode_rows;
    for (const auto& row : result.rows) {
      if (row.mode == mode && row.environment != kAverageEnvName) mode_rows.push_back(row);
    }
    const std::string stem = std::string("results_") + to_string(mode);
    files[stem + ".csv"] = render_results_csv(mode_rows, config.horizon, config.base_seed);
    if (markdown) {
      files[stem + ".md"] =
          render_markdown_table(mode_rows, std::string(to_string(mode)) + " reward environment");
    }
  }
  std::vector<AggregateRow> average_rows;
  for (const auto& row : result.rows) {
    if (row.environment == kAverageEnvName) average_rows.push_back(row);
  }
  files["results_average.csv"] =
      render_results_csv(average_rows, config.horizon, config.base_seed);
  if (markdown) {
    // For the average table, one row per mode reads better than one row per
    // "average" pseudo-environment.
    std::vector<AggregateRow> relabeled = average_rows;
    for (auto& row : relabeled) row.environment = std::string(to_string(row.mode)) + " environment";
    files["results_average.md"] = render_markdown_table(relabeled, "average over environments");
  }
  if (raw) {
    files["runs_raw.csv"] = render_raw_csv(result.runs);
  }
  return files;
}

inline void write_files_atomic(const std::filesystem::path& out_dir,
                               const std::map<std::string, std::string>& files) {
  std::filesystem::create_directories(out_dir);
  for (const auto& [name, content] : files) {
    const auto final_path = out_dir / name;
    const auto tmp_path = out_dir / (name + ".tmp");
    {
      std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write " + tmp_path.string());
      out << content;
      if (!out) throw std::runtime_error("write failed for " + tmp_path.string());
    }
    std::filesystem::rename(tmp_path, final_path);
  }
}

}  // namespace banditlab
