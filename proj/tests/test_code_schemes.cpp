#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <string>

#include "bxc/code_scheme.hpp"
#include "bxc/constructions.hpp"
#include "bxc/error.hpp"

using namespace bxc;

namespace {

ChannelSet channels(int m, int n, std::uint64_t seed) { return sample_channels({m, n, 0.5}, seed); }

Vector random_vector(Eigen::Index len, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector x(len);
  for (Eigen::Index i = 0; i < len; ++i) x(i) = normal(rng);
  return x;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected bxc::Error");
  return ErrorCode::kInvalidArgument;
}

// Closed-form per-topology counts, written independently of the builders.
int expected_single(Topology t, int m, int n) {
  const int lo = std::min(m, n);
  const int hi = std::max(m, n);
  const std::string name(t.name());
  if (name == "empty") return 0;
  if (name.rfind("s", 0) == 0) return lo;
  if (name.rfind("par", 0) == 0) return 2 * lo;
  if (name.rfind("mac", 0) == 0) return std::min(2 * m, n);
  if (name.rfind("bc", 0) == 0) return std::min(m, 2 * n);
  if (name[0] == 'z') return std::min(hi, 2 * lo);
  return std::min(2 * lo, (4 * hi) / 3);  // f
}

int length_of(const CodeScheme& s, const std::string& id) { return s.find(id)->length; }

}  // namespace

TEST_CASE("block spec tags and labels") {
  CHECK(BlockSpec::identity(0, 3).tag() == "I-slice");
  CHECK(BlockSpec::pinv(2, 3).tag() == "pinv");
  CHECK(BlockSpec::align(1, 2).tag() == "align");
  CHECK(BlockSpec::joint(3, 2).tag() == "align");
  CHECK(BlockSpec::null(4, 1).tag() == "null");
  CHECK(BlockSpec::null(2, 1).label() == "phi2");
  CHECK(BlockSpec::align(1, 2).label() == "G1");
  CHECK(BlockSpec::pinv(3, 3).label() == "H3^+");
  CHECK(BlockSpec::identity(1, 2).label() == "I[1:3]");
  CHECK(joint_partner(1) == 2);
  CHECK(joint_partner(4) == 3);
}

TEST_CASE("materialized blocks satisfy their defining identities") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const ChannelSet c = channels(4, 3, seed);
    for (int k = 1; k <= 4; ++k) {
      CHECK((c.alias(k) * materialize(BlockSpec::null(k, 1), c)).norm() < 1e-10);
      CHECK((c.alias(k) * materialize(BlockSpec::pinv(k, 3), c) - Matrix::Identity(3, 3)).norm() <
            1e-10);
    }
    const Matrix g1 = materialize(BlockSpec::align(1, 2), c);
    const Matrix g2 = materialize(BlockSpec::align(2, 2), c);
    CHECK((c.alias(1) * g1 - c.alias(2) * g2).norm() < 1e-10);

    const ChannelSet t = channels(3, 4, seed);
    for (int k : {1, 3}) {
      const Matrix ga = materialize(BlockSpec::joint(k, 2), t);
      const Matrix gb = materialize(BlockSpec::joint(joint_partner(k), 2), t);
      CHECK((t.alias(k) * ga - t.alias(joint_partner(k)) * gb).norm() < 1e-10);
      CHECK(linalg::rank(t.alias(k) * ga) == 2);
    }
  }
  const ChannelSet c = channels(3, 3, 1);
  CHECK(materialize(BlockSpec::null(1, 0), c).cols() == 0);  // empty block, no null space needed
  CHECK(code_of([&] { materialize(BlockSpec::null(1, 1), c); }) == ErrorCode::kNoNullSpace);
}

TEST_CASE("effective channel basics") {
  const ChannelSet c = channels(4, 3, 5);
  CodeScheme off{"off", 4, 3, {{"x", 2, 1}}, {{topo::kEmpty, {}}}, {}};
  off.slots[0].tx[0].push_back({"x", BlockSpec::identity(0, 2)});
  const EffectiveChannel e0 = effective_channel(c, off);
  CHECK(e0.h.rows() == 6);
  CHECK(e0.h.cols() == 2);
  CHECK(e0.h.isZero(0.0));

  CodeScheme full{"f", 4, 3, {{"x1", 4, 1}, {"x2", 4, 2}}, {{topo::kF, {}}}, {}};
  full.slots[0].tx[0].push_back({"x1", BlockSpec::identity(0, 4)});
  full.slots[0].tx[1].push_back({"x2", BlockSpec::identity(0, 4)});
  const EffectiveChannel e1 = effective_channel(c, full);
  Matrix expected(6, 8);
  expected << c.alias(1), c.alias(2), c.alias(3), c.alias(4);
  CHECK((e1.h - expected).norm() < 1e-14);

  CHECK(code_of([&] { effective_channel(channels(3, 3, 1), full); }) ==
        ErrorCode::kDimensionMismatch);
}

TEST_CASE("effective channel block sparsity follows topology") {
  const ChannelSet c = channels(3, 3, 9);
  for (const auto t : topo::all()) {
    CodeScheme s{"probe", 3, 3, {{"x1", 3, 1}, {"x2", 3, 2}}, {{t, {}}}, {}};
    s.slots[0].tx[0].push_back({"x1", BlockSpec::identity(0, 3)});
    s.slots[0].tx[1].push_back({"x2", BlockSpec::identity(0, 3)});
    const EffectiveChannel e = effective_channel(c, s);
    for (int rx = 1; rx <= 2; ++rx) {
      for (int tx = 1; tx <= 2; ++tx) {
        const bool zero = e.block(rx, 0, tx == 1 ? "x1" : "x2").isZero(0.0);
        CHECK(zero == !t.on(rx, tx));
      }
    }
  }
}

TEST_CASE("pair code layouts and stages") {
  const CodeScheme a = build_z1z2_code({4, 3, 0.5});
  CHECK(a.total_length() == 10);
  CHECK(a.stage_count() == 2);
  CHECK(a.slots[0].topology == topo::kZ1);
  CHECK(a.slots[1].topology == topo::kZ2);
  CHECK(length_of(a, "a") == 3);
  CHECK(length_of(a, "b") == 1);
  CHECK(length_of(a, "c") == 2);

  const CodeScheme b = build_z1z2_code({3, 4, 0.5});
  CHECK(b.total_length() == 10);

  const CodeScheme z34 = build_z1z2_code({2, 2, 0.5}, "z3z4");
  CHECK(z34.total_length() == 6);
  CHECK(z34.slots[0].topology == topo::kZ4);
  CHECK(z34.slots[1].topology == topo::kZ3);

  CHECK(code_of([] { build_z1z2_code({4, 2, 0.5}); }) == ErrorCode::kOutsideHypothesis);
  CHECK(code_of([] { build_z1z2_code({4, 3, 0.5}, "z1z3"); }) == ErrorCode::kInvalidArgument);
  try {
    build_z1z2_code({2, 4, 0.5});
  } catch (const Error& e) {
    CHECK(std::string(e.what()) == "shape outside lemma hypothesis");
  }
}

TEST_CASE("five-slot code layouts") {
  const CodeScheme w = build_zf_code({4, 3, 0.5});
  CHECK(w.total_length() == 26);
  CHECK(w.stage_count() == 3);
  for (const char* id : {"a", "b", "h", "i"}) CHECK(length_of(w, id) == 3);
  for (const char* id : {"c", "d", "j", "k"}) CHECK(length_of(w, id) == 2);
  for (const char* id : {"e", "f", "g", "l", "m", "n"}) CHECK(length_of(w, id) == 1);
  for (const char* id : {"a", "b", "c", "d", "e", "f", "g"}) CHECK(w.find(id)->tx == 1);
  for (const char* id : {"h", "i", "j", "k", "l", "m", "n"}) CHECK(w.find(id)->tx == 2);

  const CodeScheme t = build_zf_code({3, 4, 0.5});
  CHECK(t.total_length() == 26);
  for (const char* id : {"a", "b", "h", "i"}) CHECK(length_of(t, id) == 3);
  for (const char* id : {"c", "d", "j", "k"}) CHECK(length_of(t, id) == 2);
  for (const char* id : {"e", "f", "g", "l", "m", "n"}) CHECK(length_of(t, id) == 1);

  const CodeScheme sq = build_zf_code({3, 3, 0.5});
  CHECK(sq.total_length() == 24);
  for (const char* id : {"e", "f", "g", "l", "m", "n"}) CHECK(length_of(sq, id) == 0);

  CHECK(code_of([] { build_zf_code({3, 2, 0.5}); }) == ErrorCode::kOutsideHypothesis);
  CHECK(code_of([] { build_zf_code({2, 3, 0.5}); }) == ErrorCode::kOutsideHypothesis);
}

TEST_CASE("variable-count identities and decodability for all small shapes") {
  for (int m = 1; m <= 8; ++m) {
    for (int n = 1; n <= 8; ++n) {
      const Dimensions d{m, n, 0.5};
      const int lo = std::min(m, n);
      const int hi = std::max(m, n);
      const ChannelSet c = channels(m, n, static_cast<std::uint64_t>(m * 10 + n));
      if (2 * lo > hi) {
        for (const char* pair : {"z1z2", "z3z4"}) {
          const CodeScheme s = build_z1z2_code(d, pair);
          CHECK(s.total_length() == 2 * lo + hi);
          const VerifyResult v = verify_decodability(c, s, 2);
          CHECK_MESSAGE(v.ok, pair, " M=", m, " N=", n, ": ", v.failure);
          CHECK(v.achieved_dof == 2 * lo + hi);
        }
      }
      if (3 * lo > 2 * hi) {
        const CodeScheme s = build_zf_code(d);
        CHECK(s.total_length() == 6 * lo + 2 * hi);
        const VerifyResult v = verify_decodability(c, s, 2);
        CHECK_MESSAGE(v.ok, "zf M=", m, " N=", n, ": ", v.failure);
      }
    }
  }
}

TEST_CASE("orientation duality of the five-slot code") {
  for (int m = 1; m <= 8; ++m) {
    for (int n = m; n <= 8; ++n) {
      if (3 * m <= 2 * n) continue;
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const VerifyResult a = verify_decodability(channels(m, n, seed), build_zf_code({m, n, 0.5}), 1);
        const VerifyResult b = verify_decodability(channels(n, m, seed), build_zf_code({n, m, 0.5}), 1);
        CHECK(a.ok);
        CHECK(b.ok);
        CHECK(a.achieved_dof == b.achieved_dof);
      }
    }
  }
}

TEST_CASE("single-topology codes") {
  CHECK(build_single_topology_code(topo::kS11, {4, 2, 0.5}).total_length() == 2);
  CHECK(build_single_topology_code(topo::kEmpty, {4, 3, 0.5}).total_length() == 0);
  CHECK(build_single_topology_code(topo::kF, {3, 3, 0.5}).total_length() == 4);
  CHECK(build_single_topology_code(topo::kF, {6, 6, 0.5}).total_length() == 8);
  CHECK(build_single_topology_code(topo::kF, {4, 2, 0.5}).total_length() == 4);
  CHECK(standalone_f_supported({2, 5, 0.5}));
  CHECK_FALSE(standalone_f_supported({4, 3, 0.5}));
  try {
    build_single_topology_code(topo::kF, {4, 3, 0.5});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnsupportedShape);
    CHECK(std::string(e.what()) == "standalone f-code unsupported for this shape");
  }
  CHECK(build_fallback_code(topo::kF, {4, 3, 0.5}).total_length() == 5);

  for (int m = 1; m <= 6; ++m) {
    for (int n = 1; n <= 6; ++n) {
      const ChannelSet c = channels(m, n, static_cast<std::uint64_t>(100 + m * 7 + n));
      for (const auto t : topo::all()) {
        const CodeScheme s = build_fallback_code(t, {m, n, 0.5});
        CHECK(s.slots.size() == 1);
        CHECK(s.slots[0].topology == t);
        CHECK_MESSAGE(s.total_length() == expected_single(t, m, n), t.name(), " M=", m, " N=", n);
        const VerifyResult v = verify_decodability(c, s, 1);
        CHECK_MESSAGE(v.ok, t.name(), " M=", m, " N=", n, ": ", v.failure);
      }
    }
  }
}

TEST_CASE("fallback f counts are symmetric in M and N") {
  for (int m = 1; m <= 8; ++m) {
    for (int n = 1; n <= 8; ++n) {
      CHECK(build_fallback_code(topo::kF, {m, n, 0.5}).total_length() ==
            build_fallback_code(topo::kF, {n, m, 0.5}).total_length());
    }
  }
}

TEST_CASE("nulling and alignment identities inside constructed schemes") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    for (const auto& [m, n] : {std::pair{4, 3}, {5, 4}, {3, 4}, {4, 5}}) {
      const ChannelSet c = channels(m, n, seed);
      const CodeScheme s = build_zf_code({m, n, 0.5});
      std::map<int, Matrix> g;
      for (const auto& slot : s.slots) {
        for (const auto& blocks : slot.tx) {
          for (const auto& b : blocks) {
            const Matrix x = materialize(b.spec, c);
            if (b.spec.kind == BlockKind::kNullSpace) {
              CHECK((c.alias(b.spec.channel) * x).norm() < 1e-10);
            }
            if (b.spec.tag() == "align") g[b.spec.channel] = x;
          }
        }
      }
      REQUIRE(g.size() == 4);
      CHECK((c.alias(1) * g[1] - c.alias(2) * g[2]).norm() < 1e-10);
      CHECK((c.alias(3) * g[3] - c.alias(4) * g[4]).norm() < 1e-10);
    }
  }
}

TEST_CASE("sic decode examples") {
  {
    const ChannelSet c = channels(4, 3, 21);
    const CodeScheme s = build_z1z2_code({4, 3, 0.5});
    const EffectiveChannel e = effective_channel(c, s);
    const Vector x = random_vector(e.h.cols(), 1);
    CHECK(x.size() == 10);
    CHECK((sic_decode(e, s.schedule, x) - x).norm() <= 1e-6 * x.norm());
  }
  {
    const ChannelSet c = channels(4, 3, 22);
    const CodeScheme s = build_zf_code({4, 3, 0.5});
    const EffectiveChannel e = effective_channel(c, s);
    const Vector x = random_vector(e.h.cols(), 2);
    CHECK(x.size() == 26);
    CHECK((sic_decode(e, s.schedule, x) - x).norm() <= 1e-6 * x.norm());
  }
  {
    const CodeScheme s = build_single_topology_code(topo::kEmpty, {2, 2, 0.5});
    const EffectiveChannel e = effective_channel(channels(2, 2, 1), s);
    CHECK(sic_decode(e, s.schedule, Vector(0)).size() == 0);
  }
}

TEST_CASE("round trip over 100 seeded scheme instances") {
  const std::vector<std::pair<Dimensions, int>> shapes = {
      {{4, 3, 0.5}, 0}, {{3, 4, 0.5}, 0}, {{5, 4, 0.5}, 0}, {{4, 3, 0.5}, 1}, {{3, 2, 0.5}, 1}};
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto& [d, kind] = shapes[seed % shapes.size()];
    const CodeScheme s = kind == 0 ? build_zf_code(d) : build_z1z2_code(d, seed % 2 ? "z3z4" : "z1z2");
    const EffectiveChannel e = effective_channel(sample_channels(d, seed), s);
    const Vector x = random_vector(e.h.cols(), seed + 7);
    const Vector xhat = sic_decode(e, s.schedule, x);
    CHECK((xhat - x).norm() <= 1e-6 * x.norm());
  }
}

TEST_CASE("verify_decodability examples") {
  const VerifyResult zf = verify_decodability(channels(4, 3, 77), build_zf_code({4, 3, 0.5}), 10);
  CHECK(zf.ok);
  CHECK(zf.achieved_dof == 26);
  const VerifyResult pair = verify_decodability(channels(3, 4, 78), build_z1z2_code({3, 4, 0.5}), 10);
  CHECK(pair.ok);
  CHECK(pair.achieved_dof == 10);

  // Two streams through the same precoder column cannot be told apart.
  CodeScheme clash{"clash", 3, 3, {{"u", 1, 1}, {"v", 1, 1}}, {{topo::kS11, {}}}, {}};
  clash.slots[0].tx[0] = {{"u", BlockSpec::identity(0, 1)}, {"v", BlockSpec::identity(0, 1)}};
  clash.schedule.push_back({.stage = 1, .rx = 1, .slots = {0}, .solve = {"u", "v"}});
  const VerifyResult bad = verify_decodability(channels(3, 3, 1), clash, 3);
  CHECK_FALSE(bad.ok);
  CHECK(bad.achieved_dof == 0);
  CHECK(bad.failure.find("scheme infeasible for this channel realization") != std::string::npos);
  CHECK_FALSE(verify_decodability(channels(3, 3, 1), clash, 0).ok);
}

TEST_CASE("validation rejects malformed schemes") {
  const auto base = [] {
    CodeScheme s{"s", 3, 3, {{"u", 1, 1}, {"v", 1, 2}}, {{topo::kMac1, {}}}, {}};
    s.slots[0].tx[0] = {{"u", BlockSpec::identity(0, 1)}};
    s.slots[0].tx[1] = {{"v", BlockSpec::identity(0, 1)}};
    s.schedule.push_back({.stage = 1, .rx = 1, .slots = {0}, .solve = {"u", "v"}});
    return s;
  };
  CHECK_NOTHROW(validate(base()));

  auto twice = base();
  twice.schedule.push_back({.stage = 1, .rx = 2, .slots = {0}, .solve = {"u"}});
  CHECK(code_of([&] { validate(twice); }) == ErrorCode::kMalformedScheme);

  auto never = base();
  never.schedule[0].solve = {"u"};
  CHECK(code_of([&] { validate(never); }) == ErrorCode::kMalformedScheme);

  auto unknown_cancel = base();
  unknown_cancel.schedule[0].cancel = {"v"};
  CHECK(code_of([&] { validate(unknown_cancel); }) == ErrorCode::kMalformedScheme);

  auto other_rx = base();
  other_rx.schedule = {{.stage = 1, .rx = 1, .slots = {0}, .solve = {"u"}},
                       {.stage = 2, .rx = 2, .slots = {0}, .solve = {"v"}, .cancel = {"u"}}};
  CHECK(code_of([&] { validate(other_rx); }) == ErrorCode::kMalformedScheme);

  auto backwards = base();
  backwards.schedule = {{.stage = 2, .rx = 1, .slots = {0}, .solve = {"u"}},
                        {.stage = 1, .rx = 1, .slots = {0}, .solve = {"v"}}};
  CHECK(code_of([&] { validate(backwards); }) == ErrorCode::kMalformedScheme);

  auto wrong_tx = base();
  wrong_tx.variables[1].tx = 1;
  CHECK(code_of([&] { validate(wrong_tx); }) == ErrorCode::kMalformedScheme);

  auto crowded = base();
  crowded.variables[0].length = 4;
  crowded.slots[0].tx[0][0].spec = BlockSpec::identity(0, 4);
  CHECK(code_of([&] { validate(crowded); }) == ErrorCode::kMalformedScheme);

  auto silent = base();
  silent.variables.push_back({"w", 1, 1});
  silent.schedule[0].solve.push_back("w");
  CHECK(code_of([&] { validate(silent); }) == ErrorCode::kMalformedScheme);

  auto bad_slot = base();
  bad_slot.schedule[0].slots = {3};
  CHECK(code_of([&] { validate(bad_slot); }) == ErrorCode::kMalformedScheme);
}

TEST_CASE("relabeling maps topologies, owners and receivers") {
  const CodeScheme s = build_z1z2_code({4, 3, 0.5});
  const CodeScheme rx = relabel(s, false, true, "rx");
  CHECK(rx.slots[0].topology == topo::kZ2);
  CHECK(rx.slots[1].topology == topo::kZ1);
  CHECK(rx.schedule[0].rx == 1);
  const CodeScheme tx = relabel(s, true, false, "tx");
  CHECK(tx.find("a")->tx == 2);
  CHECK(tx.slots[0].topology == topo::kZ4);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CHECK(verify_decodability(channels(4, 3, seed), rx, 1).ok);
    CHECK(verify_decodability(channels(4, 3, seed), tx, 1).ok);
    CHECK(verify_decodability(channels(4, 3, seed), relabel(s, true, true, "both"), 1).ok);
  }
}
