#include "ril/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "ril/constants.hpp"
#include "ril/oracles.hpp"
#include "ril/range_stats.hpp"
#include "ril/rng.hpp"
#include "ril/site_hash.hpp"

namespace ril {

namespace {

constexpr const char* kVersion = "ril 0.1.0";

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// static partition over replicate indices; fn(r) must only touch slot r
template <typename Fn>
void run_replicates(std::int64_t replicates, int threads, Fn&& fn) {
  threads = std::min<std::int64_t>(resolve_threads(threads), replicates);
  if (threads <= 1) {
    for (std::int64_t r = 0; r < replicates; ++r) fn(r);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (int t = 0; t < threads; ++t) {
    const std::int64_t lo = replicates * t / threads;
    const std::int64_t hi = replicates * (t + 1) / threads;
    pool.emplace_back([&, lo, hi]() {
      try {
        for (std::int64_t r = lo; r < hi; ++r) fn(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct MeanStderr {
  double mean = 0.0;
  double se = 0.0;
};

MeanStderr mean_stderr(const std::vector<double>& xs) {
  MeanStderr out;
  const double R = static_cast<double>(xs.size());
  for (const double x : xs) out.mean += x;
  out.mean /= R;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (const double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / (R - 1.0) / R);
  }
  return out;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

// Advances p independent walks in lockstep. A site joins the intersection
// exactly when the last of the p walks first visits it, so J can be read
// at any checkpoint without re-scanning the ranges.
class JointWalker {
 public:
  JointWalker(const StepDistribution& dist, int p, std::uint64_t seed,
              std::uint64_t replicate, std::int64_t expected_n,
              bool track_local_times)
      : dim_(dist.dim()), track_lt_(track_local_times) {
    const std::size_t reserve =
        static_cast<std::size_t>(std::min<std::int64_t>(expected_n + 8, 1 << 22));
    const Point origin{0, 0, 0};
    const std::uint64_t key0 = pack_site(origin, dim_);
    for (int j = 0; j < p; ++j) {
      streams_.emplace_back(dist, seed, static_cast<std::uint64_t>(j), replicate);
      ranges_.emplace_back(reserve);
      ranges_.back().insert(key0);
      if (track_lt_) {
        local_.emplace_back(reserve);
        local_.back().increment(key0);
      }
    }
  }

  void advance_to(std::int64_t n) {
    const int p = static_cast<int>(streams_.size());
    for (; time_ < n; ++time_) {
      for (int j = 0; j < p; ++j) {
        const Point& pos = streams_[static_cast<std::size_t>(j)].step();
        const std::uint64_t key = pack_site(pos, dim_);
        if (track_lt_) local_[static_cast<std::size_t>(j)].increment(key);
        if (ranges_[static_cast<std::size_t>(j)].insert(key)) {
          bool in_all = true;
          for (int k = 0; k < p && in_all; ++k)
            if (k != j) in_all = ranges_[static_cast<std::size_t>(k)].contains(key);
          if (in_all) ++joint_sites_;
        }
      }
    }
  }

  std::int64_t J() const { return joint_sites_; }
  std::int64_t time() const { return time_; }

  std::int64_t I() const {
    if (!track_lt_) throw ConfigError("local times were not tracked");
    std::size_t smallest = 0;
    for (std::size_t j = 1; j < local_.size(); ++j)
      if (local_[j].distinct_sites() < local_[smallest].distinct_sites())
        smallest = j;
    std::int64_t total = 0;
    local_[smallest].for_each([&](std::uint64_t key, std::int64_t c) {
      std::int64_t prod = c;
      for (std::size_t j = 0; j < local_.size(); ++j) {
        if (j == smallest) continue;
        const std::int64_t cj = local_[j].count(key);
        if (cj == 0) return;
        prod *= cj;
      }
      total += prod;
    });
    return total;
  }

 private:
  int dim_;
  bool track_lt_;
  std::vector<WalkStream> streams_;
  std::vector<SiteHashSet> ranges_;
  std::vector<SiteCounter> local_;
  std::int64_t joint_sites_ = 1;  // origin, time 0
  std::int64_t time_ = 0;
};

void assert_j_bounds(std::int64_t J, std::int64_t n, std::uint64_t seed,
                     std::int64_t replicate) {
  if (J < 1 || J > n + 1)
    throw std::runtime_error(
        "invariant 1 <= J <= n+1 violated: J=" + std::to_string(J) +
        " at n=" + std::to_string(n) + ", seed=" + std::to_string(seed) +
        ", replicate=" + std::to_string(replicate));
}

double scale_factor(int d, int p, std::int64_t n, int m) {
  if (d == 2)
    return std::pow(std::pow(std::log(static_cast<double>(n)), p) /
                        static_cast<double>(n),
                    m);
  return std::pow(static_cast<double>(n), -0.5 * m);
}

double tail_threshold(int d, int p, std::int64_t n, double b_n, double lambda) {
  if (d == 2)
    return lambda * static_cast<double>(n) * std::pow(b_n, p - 1) /
           std::pow(std::log(static_cast<double>(n)), p);
  return lambda * std::sqrt(static_cast<double>(n) * b_n * b_n * b_n);
}

double lil_normalizer(int d, int p, std::int64_t n) {
  const double nn = static_cast<double>(n);
  const double ll = std::log(std::log(nn));
  if (d == 2) return std::pow(std::log(nn), p) / (nn * std::pow(ll, p - 1));
  return 1.0 / std::sqrt(nn * ll * ll * ll);
}

}  // namespace

StepDistribution ExperimentConfig::make_distribution() const {
  if (walk == "simple") return make_simple_walk(d);
  if (walk == "lazy-simple") return make_lazy(make_simple_walk(d), eta);
  if (walk.rfind("file:", 0) == 0)
    return load_step_distribution(walk.substr(5));
  throw ConfigError("unknown walk '" + walk +
                    "'; expected simple, lazy-simple or file:<path>");
}

double ExperimentConfig::bn_of(std::int64_t n, std::size_t grid_index) const {
  if (bn_rule == "loglog") {
    if (n < 16) throw ConfigError("b_n = loglog(n) needs n >= 16");
    return std::log(std::log(static_cast<double>(n)));
  }
  if (bn_rule == "log^{2/3-eps}") {
    if (n < 3) throw ConfigError("b_n = (log n)^{2/3-eps} needs n >= 3");
    return std::pow(std::log(static_cast<double>(n)), 2.0 / 3.0 - 0.1);
  }
  if (bn_rule == "explicit") {
    if (bn_explicit.empty()) throw ConfigError("explicit b_n list is empty");
    if (bn_explicit.size() == 1) return bn_explicit[0];
    if (grid_index >= bn_explicit.size())
      throw ConfigError("explicit b_n list shorter than the n grid");
    return bn_explicit[grid_index];
  }
  throw ConfigError("unknown b_n rule '" + bn_rule + "'");
}

void ExperimentConfig::validate() const {
  if (n_grid.empty()) throw ConfigError("n grid is empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1) throw ConfigError("n grid entries must be >= 1");
    if (i > 0 && n_grid[i] <= n_grid[i - 1])
      throw ConfigError("n grid must be strictly increasing");
  }
  if (replicates < 1) throw ConfigError("replicates must be >= 1");
  if (p < 2) throw ConfigError("intersection experiments need p >= 2");
  if (statistic != "J" && statistic != "I" && statistic != "both")
    throw ConfigError("statistic must be J, I or both");
  if (checkpoints != "geometric" && checkpoints != "superexp")
    throw ConfigError("checkpoints must be geometric or superexp");
  for (const int m : moments)
    if (m < 0 || m > 4) throw ConfigError("moments must lie in [0, 4]");
  for (const double lam : lambda_grid)
    if (!(lam > 0.0)) throw ConfigError("lambda grid must be positive");
  (void)make_distribution();
}

std::map<std::string, std::string> ExperimentConfig::echo() const {
  std::map<std::string, std::string> e;
  e["walk"] = walk;
  e["d"] = std::to_string(d);
  e["eta"] = format_double(eta);
  e["p"] = std::to_string(p);
  std::ostringstream ns;
  for (std::size_t i = 0; i < n_grid.size(); ++i)
    ns << (i ? "," : "") << n_grid[i];
  e["n_grid"] = ns.str();
  e["bn_rule"] = bn_rule;
  if (!bn_explicit.empty()) {
    std::ostringstream bs;
    for (std::size_t i = 0; i < bn_explicit.size(); ++i)
      bs << (i ? "," : "") << format_double(bn_explicit[i]);
    e["bn_explicit"] = bs.str();
  }
  std::ostringstream ms;
  for (std::size_t i = 0; i < moments.size(); ++i)
    ms << (i ? "," : "") << moments[i];
  e["moments"] = ms.str();
  std::ostringstream ls;
  for (std::size_t i = 0; i < lambda_grid.size(); ++i)
    ls << (i ? "," : "") << format_double(lambda_grid[i]);
  e["lambda_grid"] = ls.str();
  e["epsilon"] = format_double(epsilon);
  e["statistic"] = statistic;
  e["checkpoints"] = checkpoints;
  e["replicates"] = std::to_string(replicates);
  e["base_seed"] = std::to_string(base_seed);
  e["rng"] = Xoshiro256pp::kStreamRule;
  e["outside_proven_regime"] = bn_outside_preset() ? "true" : "false";
  return e;
}

void ExperimentReport::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << csv_string();
}

std::string ExperimentReport::csv_string() const {
  std::ostringstream out;
  out << "# schema=1\n";
  out << "experiment,d,p,n,m_or_lambda,b_n,estimate,stderr,replicates,seed,"
         "walltime_s\n";
  for (const auto& row : rows) {
    out << row.experiment << ',' << row.d << ',' << row.p << ',' << row.n
        << ',' << format_double(row.m_or_lambda) << ','
        << format_double(row.b_n) << ',' << format_double(row.estimate) << ','
        << format_double(row.stderr_) << ',' << row.replicates << ','
        << row.seed << ',' << format_double(row.walltime_s) << '\n';
  }
  return out.str();
}

void ExperimentReport::write_json(const std::string& path) const {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["experiment"] = experiment;
  j["version"] = kVersion;
  j["config"] = config_echo;
  j["walltime_s"] = walltime_s;
  auto& cells = j["cells"];
  cells = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json c;
    c["experiment"] = row.experiment;
    c["d"] = row.d;
    c["p"] = row.p;
    c["n"] = row.n;
    c["m_or_lambda"] = row.m_or_lambda;
    c["b_n"] = row.b_n;
    c["estimate"] = row.estimate;
    c["stderr"] = row.stderr_;
    c["replicates"] = row.replicates;
    c["seed"] = row.seed;
    cells.push_back(std::move(c));
  }
  for (const auto& [name, series] : extra) j["extra"][name] = series;
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << j.dump(2) << "\n";
}

void write_manifest(const ExperimentConfig& config,
                    const std::string& subcommand, const std::string& path) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["version"] = kVersion;
  j["subcommand"] = subcommand;
  j["seed"] = config.base_seed;
  j["rng"] = Xoshiro256pp::kStreamRule;
  j["config"] = config.echo();
  j["output_dir"] = config.output_dir;
  j["oracle_cache_dir"] = oracle_cache_dir();
  j["created_unix"] =
      std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count();
  if (!config.output_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(config.output_dir, ec);
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write manifest " + path);
  out << j.dump(2) << "\n";
}

ExperimentReport estimate_moments(const ExperimentConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const StepDistribution dist = config.make_distribution();
  const int d = dist.dim();
  const std::int64_t R = config.replicates;
  const std::vector<std::int64_t>& grid = config.n_grid;
  const std::int64_t n_max = grid.back();
  const bool want_I = config.statistic != "J";
  const bool want_J = config.statistic != "I";

  std::vector<std::vector<double>> J_at(grid.size());
  std::vector<std::vector<double>> I_at(grid.size());
  for (auto& v : J_at) v.assign(static_cast<std::size_t>(R), 0.0);
  if (want_I)
    for (auto& v : I_at) v.assign(static_cast<std::size_t>(R), 0.0);

  run_replicates(R, config.threads, [&](std::int64_t r) {
    JointWalker walker(dist, config.p, config.base_seed,
                       static_cast<std::uint64_t>(r), n_max, want_I);
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
      walker.advance_to(grid[gi]);
      const std::int64_t J = walker.J();
      assert_j_bounds(J, grid[gi], config.base_seed, r);
      J_at[gi][static_cast<std::size_t>(r)] = static_cast<double>(J);
      if (want_I) {
        const std::int64_t I = walker.I();
        if (J > I)
          throw std::runtime_error("invariant J <= I violated at replicate " +
                                   std::to_string(r) + ", seed " +
                                   std::to_string(config.base_seed));
        I_at[gi][static_cast<std::size_t>(r)] = static_cast<double>(I);
      }
    }
  });

  ExperimentReport report;
  report.experiment = "moments";
  report.config_echo = config.echo();

  std::vector<double> powers(static_cast<std::size_t>(R));
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    for (const int m : config.moments) {
      const auto emit = [&](const char* name,
                            const std::vector<double>& samples, double scale) {
        for (std::int64_t r = 0; r < R; ++r)
          powers[static_cast<std::size_t>(r)] =
              std::pow(samples[static_cast<std::size_t>(r)], m);
        const MeanStderr ms = mean_stderr(powers);
        CellRow row;
        row.experiment = name;
        row.d = d;
        row.p = config.p;
        row.n = grid[gi];
        row.m_or_lambda = m;
        row.b_n = 0.0;
        row.estimate = ms.mean * scale;
        row.stderr_ = ms.se * scale;
        row.replicates = R;
        row.seed = config.base_seed;
        report.rows.push_back(row);
      };
      if (want_J) {
        emit("moments", J_at[gi], 1.0);
        emit("moments-scaled", J_at[gi], scale_factor(d, config.p, grid[gi], m));
      }
      if (want_I) emit("moments-I", I_at[gi], 1.0);
    }
  }

  report.walltime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  for (auto& row : report.rows) row.walltime_s = report.walltime_s;
  return report;
}

ExperimentReport estimate_tail(const ExperimentConfig& config) {
  config.validate();
  if (config.lambda_grid.empty())
    throw ConfigError("tail experiment needs a lambda grid");
  const auto t0 = std::chrono::steady_clock::now();
  const StepDistribution dist = config.make_distribution();
  const int d = dist.dim();
  const std::int64_t R = config.replicates;
  const std::vector<std::int64_t>& grid = config.n_grid;

  std::vector<std::vector<double>> J_at(grid.size());
  for (auto& v : J_at) v.assign(static_cast<std::size_t>(R), 0.0);

  run_replicates(R, config.threads, [&](std::int64_t r) {
    JointWalker walker(dist, config.p, config.base_seed,
                       static_cast<std::uint64_t>(r), grid.back(), false);
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
      walker.advance_to(grid[gi]);
      const std::int64_t J = walker.J();
      assert_j_bounds(J, grid[gi], config.base_seed, r);
      J_at[gi][static_cast<std::size_t>(r)] = static_cast<double>(J);
    }
  });

  ExperimentReport report;
  report.experiment = "tails";
  report.config_echo = config.echo();
  std::vector<double> thresholds, diagnostics, low_count_flags;

  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    const std::int64_t n = grid[gi];
    const double b_n = config.bn_of(n, gi);
    for (const double lambda : config.lambda_grid) {
      const double thr = tail_threshold(d, config.p, n, b_n, lambda);
      std::int64_t count = 0;
      for (std::int64_t r = 0; r < R; ++r)
        if (J_at[gi][static_cast<std::size_t>(r)] >= thr) ++count;
      const double phat = static_cast<double>(count) / static_cast<double>(R);
      CellRow row;
      row.experiment = "tails";
      row.d = d;
      row.p = config.p;
      row.n = n;
      row.m_or_lambda = lambda;
      row.b_n = b_n;
      row.estimate = phat;
      row.stderr_ = std::sqrt(phat * (1.0 - phat) / static_cast<double>(R));
      row.replicates = R;
      row.seed = config.base_seed;
      report.rows.push_back(row);

      thresholds.push_back(thr);
      diagnostics.push_back(count > 0 ? -std::log(phat) / b_n : -1.0);
      low_count_flags.push_back(count < 10 ? 1.0 : 0.0);
    }
  }
  report.extra["threshold"] = thresholds;
  // -1 marks all-zero cells, which are reported rather than errored
  report.extra["decay_diagnostic"] = diagnostics;
  report.extra["inestimable"] = low_count_flags;

  report.walltime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  for (auto& row : report.rows) row.walltime_s = report.walltime_s;
  return report;
}

namespace {

std::vector<std::int64_t> lil_checkpoints(const ExperimentConfig& config) {
  if (config.n_grid.size() > 1) {
    for (const auto n : config.n_grid)
      if (n < 16) throw ConfigError("lil checkpoints must start at n >= 16");
    return config.n_grid;
  }
  const std::int64_t n_max = config.n_grid.back();
  if (n_max < 16) throw ConfigError("lil tracking needs n >= 16");
  std::vector<std::int64_t> grid;
  if (config.checkpoints == "superexp") {
    for (std::int64_t k = 3;; ++k) {
      double v = 1.0;
      for (std::int64_t i = 0; i < k; ++i) v *= static_cast<double>(k);
      if (v > static_cast<double>(n_max)) break;
      grid.push_back(static_cast<std::int64_t>(v));
    }
    if (grid.empty() || grid.back() != n_max) grid.push_back(n_max);
  } else {
    for (std::int64_t n = 16; n < n_max; n *= 2) grid.push_back(n);
    grid.push_back(n_max);
  }
  return grid;
}

}  // namespace

ExperimentReport lil_track(const ExperimentConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const StepDistribution dist = config.make_distribution();
  const int d = dist.dim();
  const std::int64_t R = config.replicates;
  const std::vector<std::int64_t> grid = lil_checkpoints(config);

  std::vector<std::vector<double>> runmax(grid.size());
  for (auto& v : runmax) v.assign(static_cast<std::size_t>(R), 0.0);

  run_replicates(R, config.threads, [&](std::int64_t r) {
    JointWalker walker(dist, config.p, config.base_seed,
                       static_cast<std::uint64_t>(r), grid.back(), false);
    double running = 0.0;
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
      walker.advance_to(grid[gi]);
      const std::int64_t J = walker.J();
      assert_j_bounds(J, grid[gi], config.base_seed, r);
      running = std::max(
          running, static_cast<double>(J) * lil_normalizer(d, config.p, grid[gi]));
      runmax[gi][static_cast<std::size_t>(r)] = running;
    }
  });

  ExperimentReport report;
  report.experiment = "lil";
  report.config_echo = config.echo();
  std::vector<double> q10s, q50s, q90s;
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    const MeanStderr ms = mean_stderr(runmax[gi]);
    CellRow row;
    row.experiment = "lil";
    row.d = d;
    row.p = config.p;
    row.n = grid[gi];
    row.m_or_lambda = 0.0;
    row.b_n = std::log(std::log(static_cast<double>(grid[gi])));
    row.estimate = ms.mean;
    row.stderr_ = ms.se;
    row.replicates = R;
    row.seed = config.base_seed;
    report.rows.push_back(row);

    std::vector<double> sorted = runmax[gi];
    std::sort(sorted.begin(), sorted.end());
    q10s.push_back(quantile_sorted(sorted, 0.10));
    q50s.push_back(quantile_sorted(sorted, 0.50));
    q90s.push_back(quantile_sorted(sorted, 0.90));
  }
  report.extra["running_max_q10"] = q10s;
  report.extra["running_max_q50"] = q50s;
  report.extra["running_max_q90"] = q90s;

  report.walltime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  for (auto& row : report.rows) row.walltime_s = report.walltime_s;
  return report;
}

ExperimentReport block_partition_study(const ExperimentConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const StepDistribution dist = config.make_distribution();
  const int d = dist.dim();
  const std::int64_t R = config.replicates;

  ExperimentReport report;
  report.experiment = "blocks";
  report.config_echo = config.echo();
  std::vector<double> mean_sums, thresholds, mean_ratios;

  for (std::size_t gi = 0; gi < config.n_grid.size(); ++gi) {
    const std::int64_t n = config.n_grid[gi];
    const double b_n = config.bn_of(n, gi);
    const BlockPartition blocks = BlockPartition::from_rate(n, b_n);
    const double threshold =
        d == 2 ? config.epsilon * static_cast<double>(n) /
                     std::log(static_cast<double>(n))
               : config.epsilon * static_cast<double>(n);

    std::vector<double> sums(static_cast<std::size_t>(R));
    run_replicates(R, config.threads, [&](std::int64_t r) {
      const WalkPath path = simulate(dist, blocks.span(), config.base_seed, 0,
                                     static_cast<std::uint64_t>(r));
      sums[static_cast<std::size_t>(r)] =
          static_cast<double>(cross_block_intersections(path, blocks));
    });

    std::int64_t exceed = 0;
    double sum_total = 0.0;
    for (const double s : sums) {
      if (s >= threshold) ++exceed;
      sum_total += s;
    }
    const double frac = static_cast<double>(exceed) / static_cast<double>(R);

    CellRow row;
    row.experiment = "blocks";
    row.d = d;
    row.p = config.p;
    row.n = n;
    row.m_or_lambda = config.epsilon;
    row.b_n = b_n;
    row.estimate = frac;
    row.stderr_ = std::sqrt(frac * (1.0 - frac) / static_cast<double>(R));
    row.replicates = R;
    row.seed = config.base_seed;
    report.rows.push_back(row);

    mean_sums.push_back(sum_total / static_cast<double>(R));
    thresholds.push_back(threshold);
    mean_ratios.push_back(sum_total / static_cast<double>(R) / threshold);
  }
  report.extra["mean_cross_block_sum"] = mean_sums;
  report.extra["threshold"] = thresholds;
  report.extra["mean_ratio_to_threshold"] = mean_ratios;

  report.walltime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  for (auto& row : report.rows) row.walltime_s = report.walltime_s;
  return report;
}

McEstimate mc_estimate_EJ(const StepDistribution& dist, int p, std::int64_t n,
                          std::int64_t replicates, std::uint64_t seed,
                          int threads) {
  std::vector<double> samples(static_cast<std::size_t>(replicates));
  run_replicates(replicates, threads, [&](std::int64_t r) {
    JointWalker walker(dist, p, seed, static_cast<std::uint64_t>(r), n, false);
    walker.advance_to(n);
    assert_j_bounds(walker.J(), n, seed, r);
    samples[static_cast<std::size_t>(r)] = static_cast<double>(walker.J());
  });
  const MeanStderr ms = mean_stderr(samples);
  return {ms.mean, ms.se, replicates};
}

McEstimate mc_estimate_EI(const StepDistribution& dist, int p, std::int64_t n,
                          std::int64_t replicates, std::uint64_t seed,
                          int threads) {
  std::vector<double> samples(static_cast<std::size_t>(replicates));
  run_replicates(replicates, threads, [&](std::int64_t r) {
    JointWalker walker(dist, p, seed, static_cast<std::uint64_t>(r), n, true);
    walker.advance_to(n);
    const std::int64_t J = walker.J();
    const std::int64_t I = walker.I();
    assert_j_bounds(J, n, seed, r);
    if (J > I)
      throw std::runtime_error("invariant J <= I violated, seed " +
                               std::to_string(seed) + " replicate " +
                               std::to_string(r));
    samples[static_cast<std::size_t>(r)] = static_cast<double>(I);
  });
  const MeanStderr ms = mean_stderr(samples);
  return {ms.mean, ms.se, replicates};
}

std::string gnuplot_script_for(const ExperimentReport& report,
                               const std::string& csv_path) {
  std::ostringstream os;
  os << "# gnuplot script generated alongside " << csv_path << "\n";
  os << "set datafile separator ','\n";
  os << "set key left top\n";
  os << "set logscale x\n";
  if (report.experiment == "tails") {
    os << "set xlabel 'lambda'\nset ylabel 'tail probability'\n";
    os << "set logscale y\n";
    os << "plot '" << csv_path
       << "' every ::2 using 5:7 with linespoints title 'P{J_n >= thr(lambda)}'\n";
  } else if (report.experiment == "blocks") {
    os << "set xlabel 'n'\nset ylabel 'exceedance fraction'\n";
    os << "plot '" << csv_path
       << "' every ::2 using 4:7 with linespoints title 'cross-block exceedance'\n";
  } else {
    os << "set xlabel 'n'\nset ylabel 'estimate'\n";
    os << "plot '" << csv_path
       << "' every ::2 using 4:7:8 with yerrorlines title '" << report.experiment
       << "'\n";
  }
  return os.str();
}

}  // namespace ril
