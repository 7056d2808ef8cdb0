#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "bxc/error.hpp"
#include "bxc/super_precoder.hpp"

using namespace bxc;

namespace {

// Zero pattern per (receiver, slot) row over all columns, 'x' = nonzero.
void check_pattern(const EffectiveChannel& e, const std::vector<std::string>& rows) {
  REQUIRE(rows.size() == 10);
  for (int rx = 1; rx <= 2; ++rx) {
    for (int t = 0; t < 5; ++t) {
      const std::string& want = rows[(rx - 1) * 5 + t];
      REQUIRE(want.size() == e.columns.size());
      for (std::size_t c = 0; c < e.columns.size(); ++c) {
        const bool zero = e.block(rx, t, e.columns[c].id).norm() < 1e-10;
        CHECK_MESSAGE(zero == (want[c] == '0'), "rx", rx, " slot ", t, " column ",
                      e.columns[c].id);
      }
    }
  }
}

}  // namespace

TEST_CASE("block-level grid layout") {
  const SuperPrecoder sp = build_block_ia_precoder({4, 3, 0.5});
  CHECK(sp.total_length() == 24);
  REQUIRE(sp.grid[0].size() == 4);
  REQUIRE(sp.grid[1].size() == 4);
  // Rows z1, z2, z3, z4, f.
  const std::vector<std::vector<std::string>> a = {
      {"zero", "I-slice", "zero", "zero", "zero"},
      {"pinv", "zero", "zero", "pinv", "pinv"},
      {"I-slice", "zero", "zero", "zero", "zero"},
      {"zero", "pinv", "pinv", "zero", "pinv"},
  };
  const std::vector<std::vector<std::string>> b = {
      {"zero", "zero", "I-slice", "zero", "zero"},
      {"pinv", "zero", "zero", "pinv", "pinv"},
      {"zero", "zero", "zero", "I-slice", "zero"},
      {"zero", "pinv", "pinv", "zero", "pinv"},
  };
  for (int c = 0; c < 4; ++c) {
    for (int r = 0; r < 5; ++r) {
      CHECK(sp.cell_tag(1, c, r) == a[c][r]);
      CHECK(sp.cell_tag(2, c, r) == b[c][r]);
    }
  }
  CHECK(sp.rows[4] == topo::kF);
}

TEST_CASE("block-level effective channel zero pattern") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ChannelSet c = sample_channels({4, 3, 0.5}, seed);
    const EffectiveChannel e = effective_channel(c, build_block_ia_precoder({4, 3, 0.5}));
    CHECK(e.h.rows() == 30);
    CHECK(e.h.cols() == 24);
    // Columns a1 a2 a3 a4 b1 b2 b3 b4.
    check_pattern(e, {"0xx00x00", "0000000x", "000x0000", "0x000xx0", "0x0x0x0x",
                      "00000x00", "x00x000x", "000xx00x", "0x000000", "0x0x0x0x"});
    // At Rx1, a2 and b2 land on identical images; at Rx2, a4 and b4 do.
    for (int t : {0, 3, 4}) CHECK((e.block(1, t, "a2") - e.block(1, t, "b2")).norm() < 1e-10);
    for (int t : {1, 2, 4}) CHECK((e.block(2, t, "a4") - e.block(2, t, "b4")).norm() < 1e-10);
    CHECK((e.block(1, 0, "a2") - Matrix::Identity(3, 3)).norm() < 1e-10);
  }
}

TEST_CASE("refined effective channel zero pattern") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ChannelSet c = sample_channels({4, 3, 0.5}, seed);
    const EffectiveChannel e = effective_channel(c, build_refined_ia_precoder({4, 3, 0.5}));
    CHECK(e.h.cols() == 26);
    // Columns a1 a2g a2n a2m a3 a4g a4n | b1 b2g b2n b3 b4g b4n b4m.
    check_pattern(e, {"0x0xx00" "0x00000", "0000000" "0000xx0", "00000xx" "0000000",
                      "0x0x000" "0x0x000", "0x0x0xx" "0x00xx0",
                      "0000000" "0xx0000", "x0000x0" "0000x0x", "00000x0" "x000x0x",
                      "0xx0000" "0000000", "0xx00x0" "0xx0x0x"});
    // The phi_1 column is silent at Rx1 and the phi_3 column at Rx2.
    for (int t = 0; t < 5; ++t) {
      CHECK(e.block(1, t, "a2n").norm() < 1e-10);
      CHECK(e.block(2, t, "a2m").norm() < 1e-10);
    }
  }
}

TEST_CASE("decodable counts") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const ChannelSet c = sample_channels({4, 3, 0.5}, seed);
    const VerifyResult block = verify_decodability(c, build_block_ia_precoder({4, 3, 0.5}), 1, seed);
    const VerifyResult refined =
        verify_decodability(c, build_refined_ia_precoder({4, 3, 0.5}), 1, seed);
    CHECK_MESSAGE(block.ok, block.failure);
    CHECK_MESSAGE(refined.ok, refined.failure);
    CHECK(block.achieved_dof == 24);
    CHECK(refined.achieved_dof == 26);
    CHECK(refined.achieved_dof - block.achieved_dof == 2);
  }
}

TEST_CASE("general shapes scale the block widths") {
  struct Case {
    int m, n, block, refined;
  };
  for (const Case& k : {Case{3, 3, 24, 24}, Case{5, 4, 32, 34}, Case{7, 6, 48, 50},
                        Case{5, 3, 24, -1}, Case{2, 2, 16, 16}}) {
    const Dimensions d{k.m, k.n, 0.5};
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const ChannelSet c = sample_channels(d, seed);
      const VerifyResult b = verify_decodability(c, build_block_ia_precoder(d), 1);
      CHECK_MESSAGE(b.ok, k.m, "x", k.n, ": ", b.failure);
      CHECK(b.achieved_dof == k.block);
      if (k.refined > 0) {
        const VerifyResult r = verify_decodability(c, build_refined_ia_precoder(d), 1);
        CHECK_MESSAGE(r.ok, k.m, "x", k.n, ": ", r.failure);
        CHECK(r.achieved_dof == k.refined);
      }
    }
  }
}

TEST_CASE("shape checks") {
  CHECK_THROWS_AS(build_block_ia_precoder({3, 4, 0.5}), Error);
  CHECK_THROWS_AS(build_block_ia_precoder({4, 2, 0.5}), Error);
  CHECK_THROWS_AS(build_refined_ia_precoder({5, 3, 0.5}), Error);
  CHECK_THROWS_AS(build_refined_ia_precoder({3, 4, 0.5}), Error);
}

TEST_CASE("scheme view keeps the grid") {
  const SuperPrecoder sp = build_refined_ia_precoder({4, 3, 0.5});
  const CodeScheme s = sp.to_code_scheme();
  CHECK(s.total_length() == 26);
  CHECK(s.slots.size() == 5);
  CHECK(s.variables.size() == 14);
  CHECK_NOTHROW(validate(s));
}
