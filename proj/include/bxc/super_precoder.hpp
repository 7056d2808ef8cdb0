#pragma once

// Block-grid view of a code over the five slots {z1, z2, z3, z4, f}: each
// transmitter has a grid of block-columns, one row per slot, and the overall
// precoder is diag(A, B). Cells hold building blocks (identity slices,
// pseudo-inverses, alignment blocks, null vectors) or nothing at all.

#include <array>
#include <string>
#include <vector>

#include "bxc/code_scheme.hpp"

namespace bxc {

inline constexpr int kSuperRows = 5;

struct BlockColumn {
  std::string name;
  std::vector<Variable> parts;  // sub-vectors carried by this column
  // Per row: one spec per part, or empty for a zero block.
  std::array<std::vector<BlockSpec>, kSuperRows> cells;
};

struct SuperPrecoder {
  std::string name;
  int m = 1;
  int n = 1;
  std::array<Topology, kSuperRows> rows{topo::kZ1, topo::kZ2, topo::kZ3, topo::kZ4, topo::kF};
  std::array<std::vector<BlockColumn>, 2> grid;  // [0] = A (Tx1), [1] = B (Tx2)
  std::vector<SicStep> schedule;

  int total_length() const;
  /// "zero" for an empty cell, else the tags of its parts joined by '|'.
  std::string cell_tag(int tx, int column, int row) const;
  CodeScheme to_code_scheme() const;
};

/// Block-level alignment code: four width-N block-columns per transmitter
/// built from identity slices and full pseudo-inverses; 8N variables.
/// Requires M >= N and 2N > M.
SuperPrecoder build_block_ia_precoder(const Dimensions& dims);

/// The pseudo-inverse columns of the block-level code split into alignment
/// blocks and null vectors; 6N + 2M variables. Requires M >= N and 3N > 2M.
SuperPrecoder build_refined_ia_precoder(const Dimensions& dims);

EffectiveChannel effective_channel(const ChannelSet& channels, const SuperPrecoder& sp);

VerifyResult verify_decodability(const ChannelSet& channels, const SuperPrecoder& sp, int trials,
                                 std::uint64_t seed = 0, double tol = linalg::kSolveTolerance);

}  // namespace bxc
