#pragma once

#include <cstdint>
#include <string>

#include "bxc/channel_model.hpp"

namespace bxc {

/// Count-based assignment of realized slots to code blocks.
struct Allocation {
  std::int64_t zf_blocks = 0;    // one slot each of z1, z2, z3, z4, f
  std::int64_t z12_blocks = 0;   // one z1 and one z2 slot
  std::int64_t z34_blocks = 0;   // one z3 and one z4 slot
  TopologyHistogram singles{};   // one-slot blocks per topology
  TopologyHistogram leftover{};  // idle slots (only the empty topology ends up here)

  /// Slots used by blocks, per topology.
  TopologyHistogram consumed() const;
  std::int64_t block_count() const;
};

/// Greedy allocation by antenna ratio:
///   2 min <= max : singles only
///   3 min <= 2 max: {z1,z2} and {z3,z4} pairs, singles elsewhere
///   otherwise     : five-slot blocks up to the scarcest of z1..z4, f; then
///                   pairs on the remaining z slots; singles for the rest.
/// Spare f slots get build_fallback_code, which equals the standalone code
/// where one exists.
Allocation schedule_codes(const TopologyHistogram& hist, const Dimensions& dims);

/// Variables carried by an allocation: block count times code length, summed.
std::int64_t allocated_variables(const Allocation& a, const Dimensions& dims);

struct SimConfig {
  Dimensions dims;
  std::int64_t slots = 0;
  std::uint64_t seed = 0;
  double decode_fraction = 0.01;  // share of blocks that get an extra full SIC decode
};

struct SimResult {
  Dimensions dims;
  std::int64_t n = 0;
  std::uint64_t seed = 0;
  double decode_fraction = 0.0;
  std::int64_t decoded_variables = 0;
  double empirical_dof_per_slot = 0.0;
  double analytic_reference = 0.0;  // composite_achievable(M, N, p), unnormalized
  Allocation allocation;
  TopologyHistogram histogram{};
  int distinct_codes = 0;           // block kinds built and verified
  std::int64_t sampled_decodes = 0;
  double max_relative_error = 0.0;

  double relative_error() const;
};

/// One channel draw and one topology sequence from `seed`, scheduled with
/// schedule_codes. Each distinct block kind is built and verified once on the
/// sampled channels (the channels are fixed for the run, so every instance of
/// a kind has the same transfer matrix); on top of that every
/// round(1/decode_fraction)-th block is decoded again from a fresh random
/// input. Throws ErrorCode::kInvalidArgument for slots < 1 or a fraction
/// outside [0, 1], and ErrorCode::kInfeasible if any block fails to decode.
SimResult run_simulation(const SimConfig& config);

}  // namespace bxc
