#include <gtest/gtest.h>

#include "commhash/fixtures.hpp"
#include "commhash/net.hpp"

using namespace commhash;
using namespace commhash::net;

namespace {

BasicConfig config_for(const GroupParams& g, std::size_t n, std::uint64_t seed) {
  Rng rng(seed ^ 0x5eed);
  BasicConfig c{g, {}, 1, g.scalar(rng.below(g.order())), PlainMessage{}, seed, {}, false};
  for (std::size_t i = 0; i < n; ++i) c.keys.push_back(generate_keys(g, rng));
  return c;
}

MsgType type_of(const Delivery& d) { return decode_frame(d.envelope.wire).type; }

// Send-order ordinals of frames of one type in a fault-free run.
std::vector<std::size_t> ordinals_of(const BasicRun& run, MsgType type) {
  std::vector<std::size_t> out;
  for (const auto& d : run.trace) {
    if (type_of(d) == type) out.push_back(d.ordinal);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Router, CleanRunEndsWithResult) {
  auto c = config_for(fixtures::toy_modp_subgroup(), 2, 1);
  auto run = run_basic_session(c);
  ASSERT_TRUE(run.digest.has_value());
  EXPECT_EQ(*run.digest, reference_digest(c.params, c.m, c.keys));
  EXPECT_EQ(run.owner_result, run.digest);
  ASSERT_FALSE(run.trace.empty());
  EXPECT_EQ(type_of(run.trace.back()), MsgType::kResult);
  EXPECT_EQ(type_of(run.trace.front()), MsgType::kUploadRequest);
  // upload, 2 nonces, 2 shares, result
  EXPECT_EQ(run.trace.size(), 6u);
}

TEST(Router, SameSeedSameTrace) {
  auto c = config_for(secp256k1(), 6, 2);
  auto a = run_basic_session(c);
  auto b = run_basic_session(c);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    EXPECT_EQ(a.trace[i].ordinal, b.trace[i].ordinal);
    EXPECT_EQ(a.trace[i].envelope.wire, b.trace[i].envelope.wire);
  }
}

TEST(Router, SeedsChangeInterleavingNotDigest) {
  auto c = config_for(secp256k1(), 8, 3);
  std::set<std::vector<std::size_t>> orders;
  std::optional<GroupElement> digest;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    c.seed = seed;
    auto run = run_basic_session(c);
    ASSERT_TRUE(run.digest.has_value());
    if (digest) {
      EXPECT_EQ(*run.digest, *digest);
    }
    digest = run.digest;
    std::vector<std::size_t> order;
    for (const auto& d : run.trace) order.push_back(d.envelope.from * 1000 + d.envelope.to);
    orders.insert(order);
  }
  EXPECT_GT(orders.size(), 1u);
  EXPECT_EQ(*digest, reference_digest(c.params, c.m, c.keys));
}

TEST(Router, PerLinkFifo) {
  auto g = fixtures::toy_modp_subgroup();
  struct Sink : Endpoint {
    std::uint16_t id() const override { return 1; }
    std::vector<Outbound> receive(const Frame& f) override {
      got.push_back(f.sender);
      return {};
    }
    std::vector<std::uint16_t> got;
  };
  struct Source : Endpoint {
    explicit Source(std::uint16_t i) : i_(i) {}
    std::uint16_t id() const override { return i_; }
    std::vector<Outbound> receive(const Frame&) override { return {}; }
    std::uint16_t i_;
  };
  Sink sink;
  Source a(2), b(3);
  Router r(g, RouterOptions{77, {}, false, std::nullopt});
  r.attach(sink);
  r.attach(a);
  r.attach(b);
  for (std::uint16_t i = 0; i < 20; ++i) {
    Frame fa{MsgType::kShare, {}, static_cast<std::uint16_t>(100 + i), {}};
    Frame fb{MsgType::kShare, {}, static_cast<std::uint16_t>(200 + i), {}};
    r.post(2, {1, fa});
    r.post(3, {1, fb});
  }
  r.run();
  std::vector<std::uint16_t> from_a, from_b;
  for (auto s : sink.got) (s < 200 ? from_a : from_b).push_back(s);
  EXPECT_TRUE(std::is_sorted(from_a.begin(), from_a.end()));
  EXPECT_TRUE(std::is_sorted(from_b.begin(), from_b.end()));
  EXPECT_EQ(sink.got.size(), 40u);
  EXPECT_THROW(r.post(1, {9, Frame{MsgType::kShare, {}, 0, {}}}), std::invalid_argument);
}

class Faults : public ::testing::TestWithParam<bool> {
 protected:
  BasicConfig c = [] {
    auto cfg = config_for(secp256k1(), 4, 4);
    return cfg;
  }();
  BasicRun clean = run_basic_session(c);

  BasicRun with(Fault f) {
    BasicConfig faulty = c;
    faulty.sealed = GetParam();
    faulty.plan.faults.push_back(f);
    return run_basic_session(faulty);
  }
};

TEST_P(Faults, ReplaceNonceOnShare) {
  auto run = with({ordinals_of(clean, MsgType::kShare)[1], FaultKind::kReplaceNonce});
  EXPECT_FALSE(run.digest.has_value());
  EXPECT_EQ(run.error, ErrorCode::kNonceMismatch);
  EXPECT_TRUE(run.unapplied.empty());
}

TEST_P(Faults, ReplaceNonceOnNonce) {
  auto run = with({ordinals_of(clean, MsgType::kNonce)[2], FaultKind::kReplaceNonce});
  EXPECT_FALSE(run.digest.has_value());
  EXPECT_EQ(run.error, ErrorCode::kNonceMismatch);
}

TEST_P(Faults, DropShare) {
  auto run = with({ordinals_of(clean, MsgType::kShare)[0], FaultKind::kDrop});
  EXPECT_FALSE(run.digest.has_value());
  EXPECT_EQ(run.error, ErrorCode::kMissing);
}

TEST_P(Faults, DuplicateShare) {
  auto run = with({ordinals_of(clean, MsgType::kShare)[3], FaultKind::kDuplicate});
  EXPECT_FALSE(run.digest.has_value());
  EXPECT_EQ(run.error, ErrorCode::kDuplicate);
}

TEST_P(Faults, CorruptCiphertext) {
  // last byte of a SHARE frame is the echo tag
  auto ord = ordinals_of(clean, MsgType::kShare)[2];
  std::size_t len = 0;
  for (const auto& d : clean.trace) {
    if (d.ordinal == ord) len = d.envelope.wire.size();
  }
  auto run = with({ord, FaultKind::kFlip, GetParam() ? 40 : len - 1});
  EXPECT_FALSE(run.digest.has_value());
  EXPECT_EQ(run.error, GetParam() ? ErrorCode::kMalformed : ErrorCode::kDecryptFail);
}

TEST_P(Faults, ReorderIsBenign) {
  auto run = with({ordinals_of(clean, MsgType::kNonce)[0], FaultKind::kReorder});
  ASSERT_TRUE(run.digest.has_value());
  EXPECT_EQ(run.digest, clean.digest);
}

INSTANTIATE_TEST_SUITE_P(Transport, Faults, ::testing::Values(false, true),
                         [](const auto& info) { return info.param ? "sealed" : "plain"; });

// Random fault plans touching NONCE and SHARE frames never leave a wrong
// digest behind. The sealed channel covers every byte; on the plain channel
// flips avoid the share element, which nothing binds to the nonce.
TEST(FaultFuzz, ThousandPlansNeverStoreAWrongDigest) {
  const std::vector<GroupParams> groups{fixtures::toy_curve(), secp256k1(),
                                        fixtures::toy_modp_subgroup()};
  Rng rng(99);
  int failed = 0, stored = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto& g = groups[trial % groups.size()];
    auto c = config_for(g, 2 + rng.below(std::uint64_t{4}), rng());
    c.owner = static_cast<std::uint16_t>(1 + rng.below(std::uint64_t{c.keys.size()}));
    BasicRun clean = run_basic_session(c);
    ASSERT_TRUE(clean.digest.has_value());
    c.sealed = trial % 2 == 0;

    std::vector<const Delivery*> targets;
    for (const auto& d : clean.trace) {
      auto t = type_of(d);
      if (t == MsgType::kNonce || t == MsgType::kShare) targets.push_back(&d);
    }

    std::size_t nfaults = 1 + rng.below(std::uint64_t{3});
    for (std::size_t i = 0; i < nfaults; ++i) {
      const Delivery* d = targets[rng.below(std::uint64_t{targets.size()})];
      auto kind = static_cast<FaultKind>(rng.below(std::uint64_t{5}));
      Fault f{d->ordinal, kind, 0};
      if (kind == FaultKind::kFlip) {
        std::size_t size = d->envelope.wire.size();
        // sealed frames are longer; the router reduces the offset mod the length
        f.offset = rng.below(std::uint64_t{c.sealed ? 4 * size : size});
        if (!c.sealed && type_of(*d) == MsgType::kShare) {
          // keep to the header and the echo ciphertext
          std::size_t elem = element_encoding_size(g, d->envelope.wire[kFrameHeaderSize]);
          std::size_t allowed = size - elem;
          f.offset = rng.below(std::uint64_t{allowed});
          if (f.offset >= kFrameHeaderSize) f.offset += elem;
        }
      }
      c.plan.faults.push_back(f);
    }

    BasicRun run = run_basic_session(c);
    if (run.digest) {
      ++stored;
      ASSERT_EQ(*run.digest, *clean.digest) << "trial " << trial;
    } else {
      ++failed;
    }
  }
  EXPECT_GT(failed, 0);
  EXPECT_GT(stored, 0);
}

TEST(Inject, AppliesEachMutationOnce) {
  auto c = config_for(fixtures::toy_curve(), 3, 5);
  auto clean = run_basic_session(c);
  std::vector<Envelope> trace;
  for (const auto& d : clean.trace) trace.push_back(d.envelope);
  Rng rng(1);
  GroupElement pub = c.params.a();

  auto dropped = inject({{{1, FaultKind::kDrop}}}, trace, c.params, pub, rng);
  EXPECT_EQ(dropped.size(), trace.size() - 1);
  auto duped = inject({{{1, FaultKind::kDuplicate}}}, trace, c.params, pub, rng);
  EXPECT_EQ(duped.size(), trace.size() + 1);
  auto flipped = inject({{{0, FaultKind::kFlip, 2}}}, trace, c.params, pub, rng);
  EXPECT_EQ(flipped[0].wire[2], trace[0].wire[2] ^ 0xff);

  EXPECT_THROW(inject({{{trace.size(), FaultKind::kDrop}}}, trace, c.params, pub, rng),
               std::out_of_range);
  EXPECT_THROW(inject({{{0, FaultKind::kFlip, trace[0].wire.size()}}}, trace, c.params, pub, rng),
               std::out_of_range);
}
