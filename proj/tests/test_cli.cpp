// End-to-end checks of the ril binary: exit codes, manifest-first
// behaviour, reproducible outputs. Invoked by ctest with the binary path
// as argv[1].

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int failures = 0;

void expect(bool ok, const std::string& what) {
  std::printf("%s  %s\n", ok ? "PASS" : "FAIL", what.c_str());
  if (!ok) ++failures;
}

int run(const std::string& cmd) {
  const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// the walltime column is timing metadata; everything else must reproduce
std::string mask_walltime(const std::string& csv) {
  std::string out;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#' &&
        line.find("experiment") == std::string::npos) {
      const std::size_t comma = line.rfind(',');
      if (comma != std::string::npos) line.resize(comma);
    }
    out += line;
    out += '\n';
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <path-to-ril-binary>\n", argv[0]);
    return 2;
  }
  const std::string ril = argv[1];
  const fs::path work = fs::temp_directory_path() / "ril-cli-tests";
  fs::remove_all(work);
  fs::create_directories(work);

  expect(run(ril + " definitely-not-a-subcommand") == 2,
         "unknown subcommand exits 2");
  expect(run(ril + " moments --config " + (work / "missing.toml").string()) == 3,
         "missing config file exits 3");
  expect(run(ril + " moments --replicates not-a-number") == 3,
         "bad option value exits 3");

  const std::string out1 = (work / "m1").string();
  const std::string base = ril +
      " moments --walk lazy-simple --d 2 --eta 0.25 --p 2 --n 64 --m 1"
      " --replicates 300 --seed 4242 --threads 2 --emit-gnuplot --out ";
  expect(run(base + out1) == 0, "moments run exits 0");
  expect(fs::exists(fs::path(out1) / "manifest.json"), "manifest written");
  expect(fs::exists(fs::path(out1) / "moments.csv"), "csv written");
  expect(fs::exists(fs::path(out1) / "moments.json"), "json mirror written");
  expect(fs::exists(fs::path(out1) / "moments.gp"), "gnuplot script written");

  const std::string out2 = (work / "m2").string();
  expect(run(base + out2) == 0, "repeat run exits 0");
  expect(mask_walltime(slurp(fs::path(out1) / "moments.csv")) ==
             mask_walltime(slurp(fs::path(out2) / "moments.csv")),
         "rerun reproduces the CSV (timing column aside)");

  // manifest-first: an invalid b_n rule fails after the manifest exists
  const std::string out3 = (work / "m3").string();
  const int code = run(ril +
      " blocks --walk lazy-simple --d 2 --p 2 --n 8 --bn loglog"
      " --replicates 10 --seed 1 --out " + out3);
  expect(code == 3, "infeasible b_n rule exits 3");
  expect(fs::exists(fs::path(out3) / "manifest.json"),
         "manifest exists even though the run failed");

  const std::string out4 = (work / "c1").string();
  expect(run(ril + " constants --walk simple --d 3 --p 2 --K 2000 --seed 5"
                   " --out " + out4) == 0,
         "constants run exits 0");
  const std::string json = slurp(fs::path(out4) / "constants.json");
  expect(json.find("\"gamma_escape\"") != std::string::npos &&
             json.find("\"kappa\"") != std::string::npos &&
             json.find("\"lil_constant\"") != std::string::npos &&
             json.find("\"md_rate\"") != std::string::npos,
         "constants JSON carries the rate bundle");

  const std::string out5 = (work / "s1").string();
  expect(run(ril + " simulate --walk simple --d 2 --n 100 --seed 9 --out " +
             out5) == 0,
         "simulate run exits 0");
  expect(fs::exists(fs::path(out5) / "path.csv"), "path csv written");

  // custom distribution from a structured text file
  const fs::path dist_file = work / "biased.txt";
  {
    std::ofstream out(dist_file);
    out << "laziness = 0.1\n1 0 0.4\n-1 0 0.4\n0 1 0.1\n0 -1 0.1\n";
  }
  const std::string out7 = (work / "s2").string();
  expect(run(ril + " simulate --walk file:" + dist_file.string() +
             " --n 50 --seed 2 --out " + out7) == 0,
         "simulate with a file-backed walk exits 0");

  const std::string out6 = (work / "o1").string();
  expect(run(ril + " oracle-suite --fast --seed 3 --out " + out6) == 0,
         "oracle-suite --fast passes and exits 0");

  expect(run(ril + " tails --walk simple --d 3 --p 2 --n 400 --bn explicit"
                   " --bn-values 3 --lambda 0.05 --lambda 0.2 --replicates 200"
                   " --seed 6 --out " + (work / "t1").string()) == 0,
         "tails run exits 0");
  expect(run(ril + " lil --walk lazy-simple --d 2 --p 2 --n 512"
                   " --replicates 40 --seed 6 --out " + (work / "l1").string()) == 0,
         "lil run exits 0");
  expect(run(ril + " blocks --walk lazy-simple --d 2 --p 2 --n 4096 --bn loglog"
                   " --replicates 50 --seed 6 --out " + (work / "b1").string()) == 0,
         "blocks run exits 0");
  expect(run(ril + " constants --walk simple --d 2 --p 3 --seed 6 --out " +
             (work / "c2").string()) == 0,
         "constants without an escape probability (d=2) exits 0");

  std::printf("%s\n", failures == 0 ? "cli tests: all passed"
                                    : "cli tests: FAILURES present");
  return failures == 0 ? 0 : 1;
}
