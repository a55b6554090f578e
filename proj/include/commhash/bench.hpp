#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "commhash/group.hpp"

namespace commhash::bench {

struct BenchPoint {
  Backend backend;
  std::size_t n;       // participants
  std::size_t trials;
  double mean_s;
  double stddev_s;     // sample standard deviation; 0 for one trial
};

struct LinearFit {
  double slope;
  double intercept;
  double r_squared;
};

struct BenchOptions {
  Backend backend = Backend::kEc;
  std::vector<std::size_t> sizes;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  unsigned modp_bits = 2048;  // ignored for EC, which always runs secp256k1
};

/// Times full in-process basic sessions (upload request through stored
/// digest). Keys and group parameters are prepared outside the timed region.
/// Throws std::runtime_error if any session fails.
std::vector<BenchPoint> run_bench(const BenchOptions& options);
std::vector<BenchPoint> run_bench(const GroupParams& params, std::span<const std::size_t> sizes,
                                  std::size_t trials, std::uint64_t seed);

/// Ordinary least squares y = slope * x + intercept. Needs at least two
/// distinct x values, otherwise std::invalid_argument.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);
LinearFit linear_fit(std::span<const BenchPoint> points);

// Published timings: CSV with header N,ec_s,modp_s.
struct Table1 {
  std::vector<double> n;
  std::vector<double> ec_s;
  std::vector<double> modp_s;
};
/// Throws std::runtime_error for an unreadable file or a malformed row.
Table1 read_table1(const std::string& path);

std::string to_csv(std::span<const BenchPoint> points);
std::string to_json(const LinearFit& fit);
std::string backend_name(Backend backend);

}  // namespace commhash::bench
