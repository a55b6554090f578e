#include "commhash/bench.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

#include "commhash/cvhp.hpp"
#include "commhash/net.hpp"
#include "commhash/rng.hpp"

namespace commhash::bench {

std::string backend_name(Backend backend) { return backend == Backend::kEc ? "ec" : "modp"; }

std::vector<BenchPoint> run_bench(const GroupParams& params, std::span<const std::size_t> sizes,
                                  std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw std::invalid_argument("trials must be >= 1");
  Rng rng(seed);
  {
    // untimed; builds the generator tables
    net::BasicConfig warm{params, {generate_keys(params, rng)}, 1, params.scalar(1),
                          PlainMessage{}, rng(), {}, false};
    net::run_basic_session(warm);
  }
  std::vector<BenchPoint> points;
  for (std::size_t n : sizes) {
    if (n == 0) throw std::invalid_argument("participant count must be >= 1");
    std::vector<double> samples;
    samples.reserve(trials);
    for (std::size_t t = 0; t < trials; ++t) {
      net::BasicConfig config{params, {}, 1, params.scalar(rng.below(params.order())),
                              PlainMessage{}, rng(), {}, false};
      config.keys.reserve(n);
      for (std::size_t i = 0; i < n; ++i) config.keys.push_back(generate_keys(params, rng));

      auto start = std::chrono::steady_clock::now();
      net::BasicRun run = net::run_basic_session(config);
      auto stop = std::chrono::steady_clock::now();

      if (!run.digest) {
        throw std::runtime_error("benchmark session with N=" + std::to_string(n) + " failed: " +
                                 (run.error ? to_string(*run.error) : std::string("no digest")));
      }
      samples.push_back(std::chrono::duration<double>(stop - start).count());
    }
    double mean = 0;
    for (double s : samples) mean += s;
    mean /= static_cast<double>(trials);
    double var = 0;
    for (double s : samples) var += (s - mean) * (s - mean);
    double sd = trials > 1 ? std::sqrt(var / static_cast<double>(trials - 1)) : 0.0;
    points.push_back({params.backend(), n, trials, mean, sd});
  }
  return points;
}

std::vector<BenchPoint> run_bench(const BenchOptions& options) {
  GroupParams params = options.backend == Backend::kEc
                           ? secp256k1()
                           : generate_group(Backend::kModp, options.modp_bits, options.seed);
  return run_bench(params, options.sizes, options.trials, options.seed);
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("x and y differ in length");
  if (x.size() < 2 || std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) {
    throw std::invalid_argument("linear fit needs at least two distinct x values");
  }
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = x[static_cast<std::size_t>(i)];
    design(i, 1) = 1.0;
    rhs(i) = y[static_cast<std::size_t>(i)];
  }
  Eigen::Vector2d beta = design.colPivHouseholderQr().solve(rhs);

  Eigen::VectorXd residual = rhs - design * beta;
  double ss_res = residual.squaredNorm();
  double ss_tot = (rhs.array() - rhs.mean()).square().sum();
  double r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return {beta(0), beta(1), std::clamp(r2, 0.0, 1.0)};
}

LinearFit linear_fit(std::span<const BenchPoint> points) {
  std::vector<double> x, y;
  for (const auto& p : points) {
    x.push_back(static_cast<double>(p.n));
    y.push_back(p.mean_s);
  }
  return linear_fit(x, y);
}

Table1 read_table1(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("N,ec_s,modp_s", 0) != 0) {
    throw std::runtime_error(path + ": expected header N,ec_s,modp_s");
  }
  Table1 t;
  for (std::size_t row = 2; std::getline(in, line); ++row) {
    if (line.empty() || line == "\r") continue;
    std::istringstream fields(line);
    std::string a, b, c;
    std::getline(fields, a, ',');
    std::getline(fields, b, ',');
    std::getline(fields, c, ',');
    try {
      t.n.push_back(std::stod(a));
      t.ec_s.push_back(std::stod(b));
      t.modp_s.push_back(std::stod(c));
    } catch (const std::exception&) {
      throw std::runtime_error(path + ": malformed row " + std::to_string(row));
    }
  }
  return t;
}

std::string to_csv(std::span<const BenchPoint> points) {
  std::ostringstream out;
  out.precision(9);
  out << "backend,N,trials,mean_s,stddev_s\n";
  for (const auto& p : points) {
    out << backend_name(p.backend) << ',' << p.n << ',' << p.trials << ',' << p.mean_s << ','
        << p.stddev_s << '\n';
  }
  return out.str();
}

std::string to_json(const LinearFit& fit) {
  nlohmann::ordered_json j;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["r2"] = fit.r_squared;
  return j.dump();
}

}  // namespace commhash::bench
