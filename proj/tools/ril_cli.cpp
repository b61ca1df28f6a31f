// ril: range-intersection laboratory for lattice random walks.
//
// Subcommands: constants, moments, tails, lil, blocks, oracle-suite,
// simulate. Every run resolves its configuration, writes a manifest into
// the output directory first, then computes. Exit codes: 0 success,
// 2 unknown subcommand, 3 invalid configuration, 4 infeasible budget.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ril/constants.hpp"
#include "ril/experiments.hpp"
#include "ril/hitting.hpp"
#include "ril/oracles.hpp"
#include "ril/pmf.hpp"
#include "ril/range_stats.hpp"
#include "ril/rng.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct CommonArgs {
  ril::ExperimentConfig config;
  bool seed_given = false;
  bool emit_gnuplot = false;
  std::string out = "ril-out";
};

void add_walk_options(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--walk", args.config.walk,
                  "simple | lazy-simple | file:<path>");
  cmd->add_option("--d", args.config.d, "lattice dimension");
  cmd->add_option("--eta", args.config.eta, "laziness for lazy-simple");
  cmd->add_option("--p", args.config.p, "number of independent walks");
}

void add_run_options(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--seed", args.config.base_seed, "base seed; omitted = entropy")
      ->each([&args](const std::string&) { args.seed_given = true; });
  cmd->add_option("--threads", args.config.threads,
                  "worker threads (0 = logical cores)");
  cmd->add_option("--replicates", args.config.replicates, "Monte Carlo replicates");
  cmd->add_option("--out", args.out, "output directory");
  cmd->add_flag("--emit-gnuplot", args.emit_gnuplot,
                "also write a gnuplot script per experiment");
}

void resolve_seed(CommonArgs& args) {
  if (!args.seed_given) {
    std::random_device rd;
    args.config.base_seed =
        (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    std::printf("seed drawn from entropy: %llu\n",
                static_cast<unsigned long long>(args.config.base_seed));
  }
}

void prepare_output(CommonArgs& args, const std::string& subcommand) {
  args.config.output_dir = args.out;
  fs::create_directories(args.out);
  const std::string cache = ril::oracle_cache_dir();
  if (cache.empty())
    ril::set_oracle_cache_dir((fs::path(args.out) / "oracle-cache").string());
  ril::write_manifest(args.config, subcommand,
                      (fs::path(args.out) / "manifest.json").string());
  std::printf("manifest: %s\n",
              (fs::path(args.out) / "manifest.json").string().c_str());
}

void write_report(const ril::ExperimentReport& report, const CommonArgs& args,
                  const std::string& name) {
  const auto csv = fs::path(args.out) / (name + ".csv");
  const auto json = fs::path(args.out) / (name + ".json");
  report.write_csv(csv.string());
  report.write_json(json.string());
  std::printf("wrote %s and %s\n", csv.string().c_str(), json.string().c_str());
  if (args.emit_gnuplot) {
    const auto gp = fs::path(args.out) / (name + ".gp");
    std::ofstream out(gp);
    out << ril::gnuplot_script_for(report, csv.string());
    std::printf("wrote %s\n", gp.string().c_str());
  }
}

int run_constants(CommonArgs& args, std::int64_t K, int quad_points,
                  int gn_points, std::vector<double>& lambda_grid) {
  resolve_seed(args);
  prepare_output(args, "constants");

  const ril::StepDistribution dist = args.config.make_distribution();
  const ril::Covariance cov = ril::covariance(dist);
  if (cov.singular) {
    std::fprintf(stderr,
                 "error: step covariance is singular; the rate constants "
                 "downstream are undefined\n");
    return 3;
  }

  ordered_json out;
  out["d"] = dist.dim();
  out["p"] = args.config.p;
  out["detGamma"] = cov.det;

  ril::RateParams params;
  params.d = dist.dim();
  params.p = args.config.p;
  params.det_gamma = cov.det;

  ordered_json method;
  method["rng"] = ril::Xoshiro256pp::kStreamRule;
  if (dist.dim() == 3) {
    const auto integral = ril::gamma_escape_integral(dist, quad_points);
    const auto sum = ril::gamma_escape_sum(dist, K);
    params.gamma_escape = integral.gamma;
    out["gamma_escape"] = integral.gamma;
    method["gamma_integral_quad_points"] = quad_points;
    method["gamma_integral_refinement_depth"] = integral.refinement_depth;
    method["gamma_sum_K"] = K;
    method["gamma_sum_value"] = sum.gamma;
    method["gamma_sum_error_bound"] = sum.error_bound;
  } else {
    out["gamma_escape"] = nullptr;
  }

  ril::GnGrid grid;
  grid.points = gn_points;
  const ril::GnResult gn = ril::gn_constant(dist.dim(), args.config.p, grid);
  params.kappa = gn.kappa;
  out["kappa"] = gn.kappa;
  method["gn_points"] = gn_points;
  method["gn_r_max"] = gn.r_max_used;
  method["gn_iterations"] = gn.iterations;

  ordered_json rate;
  rate["lambda"] = lambda_grid;
  std::vector<double> rates;
  for (const double lam : lambda_grid) rates.push_back(ril::md_rate(params, lam));
  rate["rate"] = rates;
  out["md_rate"] = rate;
  out["lil_constant"] = ril::lil_constant(params);
  out["method"] = method;

  const auto path = fs::path(args.out) / "constants.json";
  std::ofstream file(path);
  file << out.dump(2) << "\n";
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_simulate(CommonArgs& args, std::int64_t n, std::uint64_t walk_index,
                 std::uint64_t replicate) {
  resolve_seed(args);
  prepare_output(args, "simulate");
  const ril::StepDistribution dist = args.config.make_distribution();
  const ril::WalkPath path =
      ril::simulate(dist, n, args.config.base_seed, walk_index, replicate);
  const auto csv = fs::path(args.out) / "path.csv";
  std::ofstream out(csv);
  out << "k";
  for (int i = 0; i < dist.dim(); ++i) out << ",x" << (i + 1);
  out << "\n";
  for (std::size_t k = 0; k < path.positions.size(); ++k) {
    out << k;
    for (int i = 0; i < dist.dim(); ++i) out << ',' << path.positions[k][i];
    out << "\n";
  }
  const ril::SiteSet range = ril::range_of(path, 0, n);
  std::printf("wrote %s (range size %lld)\n", csv.string().c_str(),
              static_cast<long long>(range.count()));
  return 0;
}

struct SuiteRow {
  std::string name;
  bool pass;
  std::string detail;
};

int run_oracle_suite(CommonArgs& args, bool fast) {
  resolve_seed(args);
  prepare_output(args, "oracle-suite");
  std::vector<SuiteRow> rows;
  const auto check = [&rows](const std::string& name, bool pass,
                             const std::string& detail) {
    rows.push_back({name, pass, detail});
  };
  char buf[160];

  const ril::StepDistribution simple2 = ril::make_simple_walk(2);
  const ril::StepDistribution lazy2 =
      ril::make_lazy(ril::make_simple_walk(2), 0.25);
  const ril::StepDistribution simple3 = ril::make_simple_walk(3);

  // hitting-time lower bound, exact DP vs partial Green sums
  {
    const std::int64_t n = fast ? 12 : 30;
    for (const auto* dist : {&simple2, &lazy2}) {
      const auto report = ril::check_hitting_lower_bound(*dist, n, 5);
      std::snprintf(buf, sizeof(buf), "%lld sites, worst margin %.2e",
                    static_cast<long long>(report.cases_checked),
                    report.worst_margin);
      check("hitting lower bound d=2 (" + (*dist).describe() + ")",
            report.violations == 0, buf);
    }
    const auto report3 =
        ril::check_hitting_lower_bound(simple3, fast ? 10 : 20, 4);
    std::snprintf(buf, sizeof(buf), "%lld sites",
                  static_cast<long long>(report3.cases_checked));
    check("hitting lower bound d=3", report3.violations == 0, buf);
  }

  // range-size tail submultiplicativity by exact enumeration
  {
    const std::int64_t n = fast ? 6 : 7;
    bool all = true;
    std::int64_t cases = 0;
    for (std::int64_t a = 0; a <= n + 1; ++a) {
      for (std::int64_t b = 0; a + b <= n + 1; ++b) {
        const auto rep = ril::check_range_subadditivity(simple2, n, a, b);
        all = all && rep.violations == 0;
        ++cases;
      }
    }
    std::snprintf(buf, sizeof(buf), "n=%lld, %lld (a,b) pairs",
                  static_cast<long long>(n), static_cast<long long>(cases));
    check("range subadditivity", all, buf);
  }

  // exact expectations vs enumeration
  {
    const std::int64_t n = fast ? 4 : 6;
    for (const int p : {2, 3}) {
      const double dp = ril::exact_EJ(lazy2, p, n);
      const double en = ril::enumeration_EJ_moment(lazy2, p, n, 1);
      std::snprintf(buf, sizeof(buf), "DP %.12f vs enum %.12f", dp, en);
      check("exact E[J] p=" + std::to_string(p), std::abs(dp - en) < 1e-10, buf);
      const double gi = ril::exact_EI(lazy2, p, n);
      const double ei = ril::enumeration_EI(lazy2, p, n);
      std::snprintf(buf, sizeof(buf), "Green %.12f vs enum %.12f", gi, ei);
      check("exact E[I] p=" + std::to_string(p), std::abs(gi - ei) < 1e-10, buf);
    }
    const double er = ril::enumeration_expected_range(simple2, fast ? 4 : 6);
    const ril::FirstPassageTable table(simple2, fast ? 4 : 6);
    double hit_sum = 0.0;
    table.for_each_site(
        [&](const ril::Point& x) { hit_sum += table.hit_by_horizon(x); });
    std::snprintf(buf, sizeof(buf), "enum %.12f vs hit-sum %.12f", er, hit_sum);
    check("expected range identity", std::abs(er - hit_sum) < 1e-10, buf);
  }

  // block moment inequality, exact mode
  {
    for (const int m : {1, 2}) {
      const auto rep = ril::check_block_moment_inequality(
          simple2, 2, {2, 2}, m, ril::MomentCheckMode::kExact);
      std::snprintf(buf, sizeof(buf), "lhs %.9f <= rhs %.9f", rep.lhs, rep.rhs);
      check("block moment inequality m=" + std::to_string(m),
            rep.holds && rep.margin >= -1e-10, buf);
    }
  }

  int width = 0;
  for (const auto& row : rows) width = std::max(width, static_cast<int>(row.name.size()));
  bool all_pass = true;
  for (const auto& row : rows) {
    all_pass = all_pass && row.pass;
    std::printf("%s  %-*s  %s\n", row.pass ? "PASS" : "FAIL", width,
                row.name.c_str(), row.detail.c_str());
  }
  std::printf("%s\n", all_pass ? "oracle-suite: all checks passed"
                               : "oracle-suite: FAILURES present");
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  static const std::vector<std::string> known = {
      "constants", "moments", "tails",    "lil",
      "blocks",    "oracle-suite", "simulate"};
  if (argc >= 2 && argv[1][0] != '-') {
    const std::string sub = argv[1];
    if (std::find(known.begin(), known.end(), sub) == known.end()) {
      std::fprintf(stderr, "error: unknown subcommand '%s'\n", sub.c_str());
      return 2;
    }
  }

  CLI::App app{"lattice random-walk range-intersection laboratory"};
  app.require_subcommand(0, 1);
  app.option_defaults()->always_capture_default();  // defaults show in --help
  app.set_config("--config", "", "configuration file (key = value, sections per subcommand)");

  CommonArgs args;
  args.config.n_grid = {1024};

  // constants
  std::int64_t K = 10000;
  int quad_points = 16;
  int gn_points = 401;
  std::vector<double> lambda_grid = {0.5, 1.0, 2.0};
  auto* constants = app.add_subcommand(
      "constants", "closed-form rate constants as JSON");
  add_walk_options(constants, args);
  add_run_options(constants, args);
  constants->add_option("--K", K, "return-probability summation horizon");
  constants->add_option("--quad-points", quad_points, "quadrature nodes per slab");
  constants->add_option("--gn-points", gn_points, "radial grid points");
  constants->add_option("--lambda-grid", lambda_grid, "rate evaluation grid");

  // experiments
  auto* moments = app.add_subcommand("moments", "replicated J-moment scaling study");
  std::vector<std::int64_t> n_list = {1024};
  add_walk_options(moments, args);
  add_run_options(moments, args);
  moments->add_option("--n", n_list, "time horizons");
  moments->add_option("--m", args.config.moments, "moment orders");
  moments->add_option("--statistic", args.config.statistic, "J | I | both");
  moments->add_option("--bn", args.config.bn_rule,
                      "loglog | log^{2/3-eps} | explicit");
  moments->add_option("--bn-values", args.config.bn_explicit, "explicit b_n list");

  auto* tails = app.add_subcommand("tails", "tail probabilities vs the decay rates");
  add_walk_options(tails, args);
  add_run_options(tails, args);
  tails->add_option("--n", n_list, "time horizons");
  tails->add_option("--lambda", args.config.lambda_grid, "threshold levels");
  tails->add_option("--bn", args.config.bn_rule, "loglog | log^{2/3-eps} | explicit");
  tails->add_option("--bn-values", args.config.bn_explicit, "explicit b_n list");

  auto* lil = app.add_subcommand("lil", "running-max tracking of the limsup law");
  add_walk_options(lil, args);
  add_run_options(lil, args);
  lil->add_option("--n", n_list, "checkpoint horizons (or one maximum)");
  lil->add_option("--checkpoints", args.config.checkpoints, "geometric | superexp");

  auto* blocks = app.add_subcommand("blocks", "cross-block intersection study");
  add_walk_options(blocks, args);
  add_run_options(blocks, args);
  blocks->add_option("--n", n_list, "time horizons");
  blocks->add_option("--bn", args.config.bn_rule, "loglog | log^{2/3-eps} | explicit");
  blocks->add_option("--bn-values", args.config.bn_explicit, "explicit b_n list");
  blocks->add_option("--epsilon", args.config.epsilon, "threshold factor");

  auto* suite = app.add_subcommand("oracle-suite", "run every exact oracle check");
  bool fast = false;
  add_run_options(suite, args);
  suite->add_flag("--fast", fast, "smaller horizons for a quick pass");

  auto* simulate = app.add_subcommand("simulate", "write one reproducible path");
  std::int64_t sim_n = 1000;
  std::uint64_t sim_walk_index = 0, sim_replicate = 0;
  add_walk_options(simulate, args);
  add_run_options(simulate, args);
  simulate->add_option("--n", sim_n, "walk length");
  simulate->add_option("--walk-index", sim_walk_index, "stream walk index");
  simulate->add_option("--replicate", sim_replicate, "stream replicate index");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 3;  // bad option value or unreadable config file
  }

  try {
    if (constants->parsed())
      return run_constants(args, K, quad_points, gn_points, lambda_grid);
    if (simulate->parsed()) return run_simulate(args, sim_n, sim_walk_index, sim_replicate);
    if (suite->parsed()) return run_oracle_suite(args, fast);

    args.config.n_grid = n_list;
    std::sort(args.config.n_grid.begin(), args.config.n_grid.end());
    if (moments->parsed()) {
      resolve_seed(args);
      prepare_output(args, "moments");
      write_report(ril::estimate_moments(args.config), args, "moments");
      return 0;
    }
    if (tails->parsed()) {
      resolve_seed(args);
      prepare_output(args, "tails");
      write_report(ril::estimate_tail(args.config), args, "tails");
      return 0;
    }
    if (lil->parsed()) {
      resolve_seed(args);
      prepare_output(args, "lil");
      write_report(ril::lil_track(args.config), args, "lil");
      return 0;
    }
    if (blocks->parsed()) {
      resolve_seed(args);
      prepare_output(args, "blocks");
      write_report(ril::block_partition_study(args.config), args, "blocks");
      return 0;
    }
    std::cout << app.help() << "\n";
    return 0;
  } catch (const ril::BudgetError& e) {
    std::fprintf(stderr, "error (budget): %s\n", e.what());
    return 4;
  } catch (const ril::ConfigError& e) {
    std::fprintf(stderr, "error (config): %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
