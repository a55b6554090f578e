// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "commhash/bench.hpp"
#include "commhash/cvhp.hpp"
#include "commhash/fixtures.hpp"
#include "commhash/net.hpp"
#include "commhash/threshold.hpp"

using namespace commhash;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool ok;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check) {
  auto start = Clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (!o.ok) ++failures;
  std::printf("%s %2d %s (%.2fs) %s\n", o.ok ? "PASS" : "FAIL", id, name.c_str(), secs,
              o.detail.c_str());
  std::fflush(stdout);
}

double since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

net::BasicConfig config_for(const GroupParams& g, std::size_t n, Rng& rng) {
  net::BasicConfig c{g, {}, 1, g.scalar(rng.below(g.order())), PlainMessage{}, rng(), {}, false};
  for (std::size_t i = 0; i < n; ++i) c.keys.push_back(generate_keys(g, rng));
  c.owner = static_cast<std::uint16_t>(1 + rng.below(std::uint64_t{n}));
  return c;
}

std::vector<std::vector<std::uint16_t>> subsets(std::uint16_t n, std::size_t k) {
  std::vector<std::vector<std::uint16_t>> out;
  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + static_cast<long>(k), true);
  do {
    std::vector<std::uint16_t> s;
    for (std::uint16_t i = 0; i < n; ++i) {
      if (pick[i]) s.push_back(static_cast<std::uint16_t>(i + 1));
    }
    out.push_back(s);
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return out;
}

Outcome end_to_end() {
  auto start = Clock::now();
  const GroupParams groups[] = {secp256k1(), rfc3526_modp(2048)};
  Rng rng(1001);
  for (int i = 0; i < 500; ++i) {
    const auto& g = groups[i % 2];
    auto c = config_for(g, 1 + rng.below(std::uint64_t{8}), rng);
    auto run = net::run_basic_session(c);
    if (!run.digest || *run.digest != reference_digest(g, c.m, c.keys)) {
      return {false, "session " + std::to_string(i) + " mismatch"};
    }
  }
  double t = since(start);
  return {t < 30.0, fmt("500 sessions in %.2fs, limit 30s", t)};
}

Outcome owner_and_order_invariance() {
  const GroupParams groups[] = {secp256k1(), rfc3526_modp(2048), fixtures::toy_curve(),
                                fixtures::toy_modp_subgroup()};
  Rng rng(1002);
  std::size_t runs = 0;
  for (int i = 0; i < 200; ++i) {
    const auto& g = groups[i % 4];
    auto c = config_for(g, 1 + rng.below(std::uint64_t{5}), rng);
    const Bytes expected = encode(g, reference_digest(g, c.m, c.keys));
    for (std::uint16_t owner = 1; owner <= c.keys.size(); ++owner) {
      for (int order = 0; order < 2; ++order) {
        c.owner = owner;
        c.seed = rng();
        std::shuffle(c.keys.begin(), c.keys.end(), rng);
        auto run = net::run_basic_session(c);
        ++runs;
        if (!run.digest || encode(g, *run.digest) != expected) {
          return {false, "multiset " + std::to_string(i) + " differs"};
        }
      }
    }
  }
  return {true, std::to_string(runs) + " sessions byte-identical"};
}

Outcome toy_digest() {
  auto g = fixtures::toy_modp_subgroup();
  net::BasicConfig c{g,      {{g.scalar(2), g.scalar(3)}, {g.scalar(4), g.scalar(6)}},
                     1,      g.scalar(5),
                     PlainMessage{}, 7,
                     {},     false};
  auto run = net::run_basic_session(c);
  bool ok = g.p() == 23 && g.a().residue_value() == 2 && g.b().residue_value() == 3 &&
            run.digest && run.digest->residue_value() == 18;
  return {ok, run.digest ? "digest " + run.digest->residue_value().get_str() : "no digest"};
}

Outcome threshold_subsets() {
  Rng rng(1004);
  for (const auto& g : {secp256k1(), rfc3526_modp(2048), fixtures::toy_modp_subgroup()}) {
    Scalar s0 = g.scalar(rng.below(g.order()));
    Scalar t0 = g.scalar(rng.below(g.order()));
    Scalar m = g.scalar(rng.below(g.order()));
    GroupElement expected = cvhp(g, m + s0, t0);
    for (const auto& q : subsets(5, 3)) {
      threshold::ThresholdOptions opts;
      opts.subset = q;
      auto r = threshold::threshold_session(g, s0, t0, 3, 5, q.front(), m, rng, opts);
      if (r.digest != expected) return {false, "subset mismatch"};
    }
  }
  auto g = fixtures::toy_modp_subgroup();
  auto r = threshold::threshold_session(g, g.scalar(5), g.scalar(6), 3, 5, 1, g.scalar(4), rng);
  bool toy = r.digest.residue_value() == 4;
  return {toy, "30 subsets agree; toy digest " + r.digest.residue_value().get_str()};
}

Outcome multiply() {
  Rng rng(1005);
  auto nonzero = [&](const GroupParams& g) { return g.scalar(1 + rng.below(g.order() - 1)); };
  for (const auto& g : {fixtures::toy_modp_subgroup(), secp256k1()}) {
    for (int i = 0; i < 1000; ++i) {
      Scalar x = nonzero(g), y = nonzero(g);
      Scalar r1 = nonzero(g), r2 = nonzero(g), rs = nonzero(g);
      auto tr = threshold::run_multiply(x, y, r1, r2, rs);
      if (tr.result != x * y) return {false, "random triple mismatch"};
      if (r1 != g.scalar(1) && tr.messages[0] == x) return {false, "x travelled unblinded"};
      if (g.order() > 1000) {
        // messages 0 and 3 reach P2, message 2 reaches P1
        for (std::size_t k : {0, 2, 3}) {
          if (tr.messages[k] == x || tr.messages[k] == y) return {false, "input exposed"};
        }
      }
    }
  }
  auto g = fixtures::toy_modp_subgroup();
  auto tr = threshold::run_multiply(g.scalar(3), g.scalar(4), g.scalar(2), g.scalar(5),
                                    g.scalar(7));
  std::string seen;
  for (const auto& s : tr.messages) seen += s.value().get_str() + ",";
  seen += tr.result.value().get_str();
  return {seen == "6,10,4,2,7,1", "pinned transcript " + seen};
}

Outcome shamir() {
  Rng rng(1006);
  std::vector<GroupParams> groups{fixtures::toy_modp_subgroup(), secp256k1()};
  std::size_t checks = 0;
  for (const auto& g : groups) {
    for (std::uint16_t n = 1; n <= 6; ++n) {
      for (std::size_t k = 1; k <= n; ++k) {
        Scalar secret = g.scalar(rng.below(g.order()));
        auto f = threshold::random_polynomial(g, secret, k, rng);
        for (const auto& q : subsets(n, k)) {
          std::vector<Scalar> xs, ys;
          for (auto i : q) {
            xs.push_back(g.scalar(i));
            ys.push_back(threshold::poly_eval(f, xs.back()));
          }
          auto l = threshold::lagrange_at_zero(xs);
          Scalar acc = g.scalar(0);
          for (std::size_t j = 0; j < xs.size(); ++j) acc = acc + l[j] * ys[j];
          if (acc != secret) return {false, "reconstruction failed"};
          ++checks;
        }
      }
    }
  }
  bool sizes = groups[0].order() == 11 && mpz_sizeinbase(groups[1].order().get_mpz_t(), 2) == 256;
  return {sizes, std::to_string(checks) + " subsets over GF(11) and a 256-bit field"};
}

Outcome table1_fit() {
  auto start = Clock::now();
  auto t = bench::read_table1(std::string(COMMHASH_DATA_DIR) + "/table1.csv");
  auto ec = bench::linear_fit(t.n, t.ec_s);
  auto zp = bench::linear_fit(t.n, t.modp_s);
  double secs = since(start);
  bool ok = std::abs(ec.slope - 0.008) <= 0.05 * 0.008 &&
            std::abs(ec.intercept - (-0.733)) <= 0.05 &&
            std::abs(zp.slope - 0.13) <= 0.05 * 0.13 && secs < 1.0;
  return {ok, fmt("ec slope %.5f intercept %.4f, modp slope %.5f", ec.slope, ec.intercept,
                  zp.slope)};
}

Outcome fresh_bench() {
  auto start = Clock::now();
  std::vector<std::size_t> sizes{4, 8, 16, 32, 64, 128, 256, 512};
  bench::BenchOptions ec_opts{Backend::kEc, sizes, 5, 1, 2048};
  bench::BenchOptions zp_opts{Backend::kModp, sizes, 5, 1, 2048};
  auto ec = bench::run_bench(ec_opts);
  auto zp = bench::run_bench(zp_opts);
  auto ec_fit = bench::linear_fit(ec);
  auto zp_fit = bench::linear_fit(zp);
  double ec64 = 0, zp64 = 0;
  for (const auto& p : ec) {
    if (p.n == 64) ec64 = p.mean_s;
  }
  for (const auto& p : zp) {
    if (p.n == 64) zp64 = p.mean_s;
  }
  double secs = since(start);
  bool ok = ec_fit.r_squared >= 0.99 && zp_fit.r_squared >= 0.99 && zp64 >= 2 * ec64 &&
            secs < 600;
  return {ok, fmt("R2 ec %.4f modp %.4f, modp/ec at N=64 %.2fx", ec_fit.r_squared,
                  zp_fit.r_squared, zp64 / ec64)};
}

Outcome error_paths() {
  using namespace net;
  Rng rng(1009);
  auto g = secp256k1();
  std::size_t cases = 0;
  auto ordinals = [](const BasicRun& run, MsgType type) {
    std::vector<std::size_t> out;
    for (const auto& d : run.trace) {
      if (decode_frame(d.envelope.wire).type == type) out.push_back(d.ordinal);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  for (bool sealed : {false, true}) {
    auto c = config_for(g, 4, rng);
    auto clean = run_basic_session(c);
    c.sealed = sealed;
    auto shares = ordinals(clean, MsgType::kShare);
    std::size_t last_len = 0;
    for (const auto& d : clean.trace) {
      if (d.ordinal == shares[1]) last_len = d.envelope.wire.size();
    }
    struct Case {
      Fault fault;
      ErrorCode expected;
    };
    std::vector<Case> cases_here{
        {{shares[0], FaultKind::kReplaceNonce}, ErrorCode::kNonceMismatch},
        {{ordinals(clean, MsgType::kNonce)[1], FaultKind::kReplaceNonce}, ErrorCode::kNonceMismatch},
        {{shares[2], FaultKind::kDuplicate}, ErrorCode::kDuplicate},
        {{shares[3], FaultKind::kDrop}, ErrorCode::kMissing},
        {{shares[1], FaultKind::kFlip, sealed ? 40 : last_len - 1},
         sealed ? ErrorCode::kMalformed : ErrorCode::kDecryptFail},
    };
    for (const auto& k : cases_here) {
      auto faulty = c;
      faulty.plan.faults = {k.fault};
      auto run = run_basic_session(faulty);
      ++cases;
      if (run.digest || run.error != k.expected) {
        return {false, "fault " + to_string(k.fault.kind) + " gave the wrong outcome"};
      }
    }
  }

  const GroupParams groups[] = {fixtures::toy_curve(), secp256k1(), fixtures::toy_modp_subgroup()};
  int failed = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto& fg = groups[trial % 3];
    auto c = config_for(fg, 2 + rng.below(std::uint64_t{4}), rng);
    auto clean = run_basic_session(c);
    if (!clean.digest) return {false, "clean run failed"};
    c.sealed = trial % 2 == 0;
    std::vector<const Delivery*> targets;
    for (const auto& d : clean.trace) {
      auto t = decode_frame(d.envelope.wire).type;
      if (t == MsgType::kNonce || t == MsgType::kShare) targets.push_back(&d);
    }
    std::size_t nfaults = 1 + rng.below(std::uint64_t{3});
    for (std::size_t i = 0; i < nfaults; ++i) {
      const Delivery* d = targets[rng.below(std::uint64_t{targets.size()})];
      auto kind = static_cast<FaultKind>(rng.below(std::uint64_t{5}));
      Fault f{d->ordinal, kind, 0};
      if (kind == FaultKind::kFlip) {
        std::size_t size = d->envelope.wire.size();
        f.offset = rng.below(std::uint64_t{c.sealed ? 4 * size : size});
        if (!c.sealed && decode_frame(d->envelope.wire).type == MsgType::kShare) {
          std::size_t elem = element_encoding_size(fg, d->envelope.wire[kFrameHeaderSize]);
          f.offset = rng.below(std::uint64_t{size - elem});
          if (f.offset >= kFrameHeaderSize) f.offset += elem;
        }
      }
      c.plan.faults.push_back(f);
    }
    auto run = run_basic_session(c);
    ++cases;
    if (run.digest && *run.digest != *clean.digest) {
      return {false, "fuzz trial " + std::to_string(trial) + " stored a wrong digest"};
    }
    if (run.digest && run.error) return {false, "digest stored alongside an error"};
    if (!run.digest) ++failed;
  }
  return {failed > 0, std::to_string(cases) + " cases, " + std::to_string(failed) +
                          " fuzz runs rejected, no wrong digest"};
}

Outcome collision() {
  Rng rng(1010);
  std::size_t checks = 0;
  for (long d = 1; d < 19; ++d) {
    auto c = fixtures::toy_curve_planted(d);
    for (int i = 0; i < 20; ++i) {
      Scalar k = c.scalar(rng.below(c.order()));
      Scalar l = c.scalar(rng.below(c.order()));
      Scalar shift = c.scalar(1 + rng.below(std::uint64_t{18}));
      // h(k + d*s, l - s) == h(k, l)
      Scalar k2 = k + c.scalar(d) * shift, l2 = l - shift;
      if (cvhp(c, k, l) != cvhp(c, k2, l2)) return {false, "not a collision"};
      if (collision_to_dlog(c, k, l, k2, l2) != c.scalar(d)) return {false, "wrong log"};
      ++checks;
    }
  }
  return {true, std::to_string(checks) + " collisions, every planted log recovered"};
}

}  // namespace

int main() {
  report(1, "end-to-end digest equals reference", end_to_end);
  report(2, "owner placement and ordering invariance", owner_and_order_invariance);
  report(3, "toy subgroup digest", toy_digest);
  report(4, "threshold subsets and toy digest", threshold_subsets);
  report(5, "multiply protocol", multiply);
  report(6, "shamir exhaustive reconstruction", shamir);
  report(7, "published timing fit", table1_fit);
  report(8, "fresh timing linearity and backend ratio", fresh_bench);
  report(9, "error paths and fault fuzz", error_paths);
  report(10, "collision extraction on toy curve", collision);
  std::printf("%d failed\n", failures);
  return failures == 0 ? 0 : 1;
}
