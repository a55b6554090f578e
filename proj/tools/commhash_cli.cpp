// commhash bench --backend ec --sizes 4,8,16 --trials 10 --seed 1 --out results.csv --fit
// commhash verify --table1 data/table1.csv
#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "commhash/bench.hpp"

namespace {

int run_bench_cmd(const std::string& backend, const std::vector<std::size_t>& sizes,
                  std::size_t trials, std::uint64_t seed, unsigned bits, const std::string& out,
                  bool fit) {
  commhash::bench::BenchOptions options;
  options.backend = backend == "ec" ? commhash::Backend::kEc : commhash::Backend::kModp;
  options.sizes = sizes;
  options.trials = trials;
  options.seed = seed;
  options.modp_bits = bits;

  auto points = commhash::bench::run_bench(options);
  std::string csv = commhash::bench::to_csv(points);
  if (out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream file(out);
    if (!file) {
      std::cerr << "cannot write " << out << "\n";
      return 1;
    }
    file << csv;
  }
  if (fit) std::cout << commhash::bench::to_json(commhash::bench::linear_fit(points)) << "\n";
  return 0;
}

int run_verify_cmd(const std::string& path) {
  auto table = commhash::bench::read_table1(path);
  auto ec = commhash::bench::linear_fit(table.n, table.ec_s);
  auto modp = commhash::bench::linear_fit(table.n, table.modp_s);
  std::cout << "{\"ec\":" << commhash::bench::to_json(ec)
            << ",\"modp\":" << commhash::bench::to_json(modp) << "}\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"commutative hashing protocol benchmarks"};
  app.require_subcommand(1);

  std::string backend = "ec";
  std::vector<std::size_t> sizes{4, 8, 16, 32, 64, 128, 256, 512};
  std::size_t trials = 10;
  std::uint64_t seed = 1;
  unsigned bits = 2048;
  std::string out;
  bool fit = false;

  auto* bench = app.add_subcommand("bench", "time end-to-end sessions against participant count");
  bench->add_option("--backend", backend, "group backend")
      ->check(CLI::IsMember({"modp", "ec"}))
      ->capture_default_str();
  bench->add_option("--sizes", sizes, "participant counts, comma separated")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  bench->add_option("--trials", trials, "runs per size")->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--seed", seed, "seed for keys and schedules")->capture_default_str();
  bench->add_option("--bits", bits, "MODP modulus size")->capture_default_str();
  bench->add_option("--out", out, "CSV output path (stdout when absent)");
  bench->add_flag("--fit", fit, "print the least-squares line as JSON");

  std::string table1;
  auto* verify = app.add_subcommand("verify", "fit lines to the published timing table");
  verify->add_option("--table1", table1, "CSV with columns N,ec_s,modp_s")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bench) return run_bench_cmd(backend, sizes, trials, seed, bits, out, fit);
    return run_verify_cmd(table1);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
