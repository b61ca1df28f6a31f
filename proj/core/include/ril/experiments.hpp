#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ril/lattice.hpp"

namespace ril {

// Replicated Monte Carlo studies. Every cell of every report is
// reproducible from (config, base_seed): replicate r of walk j draws from
// the stream (base_seed, j, r) and aggregation runs in replicate order, so
// results do not depend on the thread count.
struct ExperimentConfig {
  // walk: "simple" | "lazy-simple" | "file:<path>"
  std::string walk = "lazy-simple";
  int d = 2;
  double eta = 0.25;  // laziness, lazy-simple only
  int p = 2;

  std::vector<std::int64_t> n_grid;
  // "loglog" | "log^{2/3-eps}" | "explicit"
  std::string bn_rule = "loglog";
  std::vector<double> bn_explicit;

  std::vector<int> moments = {1};
  std::vector<double> lambda_grid;
  double epsilon = 0.5;             // block-study threshold factor
  std::string statistic = "J";      // moments study: "J" | "I" | "both"
  std::string checkpoints = "geometric";  // lil study: "geometric" | "superexp"

  std::int64_t replicates = 1000;
  std::uint64_t base_seed = 1;
  int threads = 0;  // 0 = all logical cores
  std::string output_dir;

  StepDistribution make_distribution() const;
  double bn_of(std::int64_t n, std::size_t grid_index) const;
  // explicit-b_n runs bypass the preset growth conditions; reports label
  // them so results are not read as covered by the proven ranges
  bool bn_outside_preset() const { return bn_rule == "explicit"; }
  void validate() const;

  std::map<std::string, std::string> echo() const;
};

struct CellRow {
  std::string experiment;
  int d = 0;
  int p = 0;
  std::int64_t n = 0;
  double m_or_lambda = 0.0;
  double b_n = 0.0;
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::int64_t replicates = 0;
  std::uint64_t seed = 0;
  double walltime_s = 0.0;
};

struct ExperimentReport {
  std::string experiment;
  std::vector<CellRow> rows;
  std::map<std::string, std::string> config_echo;
  // named per-cell series that have no CSV column (tail diagnostics,
  // quantiles, flags); mirrored into the JSON output
  std::map<std::string, std::vector<double>> extra;
  double walltime_s = 0.0;

  // schema=1 CSV: one row per cell. All bytes except the walltime_s
  // column are reproducible from (config, seed).
  void write_csv(const std::string& path) const;
  // JSON mirror with the full config embedded
  void write_json(const std::string& path) const;
  std::string csv_string() const;
};

// Resolved config + seed + rng stream rule + version, written before any
// results so failed runs still leave a record.
void write_manifest(const ExperimentConfig& config,
                    const std::string& subcommand, const std::string& path);

// E J_n^m (and optionally E I_n) cells over the (n, m) grid, raw and with
// the dimension's scaling factor applied: (log n)^{pm} / n^m for d = 2,
// n^{-m/2} for d = 3.
ExperimentReport estimate_moments(const ExperimentConfig& config);

// P{J_n >= thr(lambda)} per lambda, thr(lambda) = lambda n b_n^{p-1} /
// (log n)^p for d = 2 and lambda sqrt(n b_n^3) for d = 3, with the decay
// diagnostic -(1/b_n) log P-hat. Cells whose count is below 10 are flagged
// as inestimable, and all-zero cells are reported, not errored.
ExperimentReport estimate_tail(const ExperimentConfig& config);

// Running maxima of the normalized statistic
//   d = 2: J_n (log n)^p / (n (log log n)^{p-1})
//   d = 3: J_n / sqrt(n (log log n)^3)
// at checkpoint times, with cross-replicate mean and quantiles.
ExperimentReport lil_track(const ExperimentConfig& config);

// Distribution of the single-walk cross-block intersection sum against the
// threshold epsilon n / log n (d = 2) or epsilon n (d = 3).
ExperimentReport block_partition_study(const ExperimentConfig& config);

// Plain mean/stderr of J_n or I_n at one n; the oracle-equivalence checks
// use these directly.
struct McEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::int64_t replicates = 0;
};

McEstimate mc_estimate_EJ(const StepDistribution& dist, int p, std::int64_t n,
                          std::int64_t replicates, std::uint64_t seed,
                          int threads = 0);
McEstimate mc_estimate_EI(const StepDistribution& dist, int p, std::int64_t n,
                          std::int64_t replicates, std::uint64_t seed,
                          int threads = 0);

// gnuplot script templating for a written report
std::string gnuplot_script_for(const ExperimentReport& report,
                               const std::string& csv_path);

}  // namespace ril
