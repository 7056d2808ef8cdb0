#pragma once

// A multi-slot linear code over the bursty X channel, held as data: which
// variables each transmitter sends in each slot and through which precoder
// block, plus the order in which receivers peel them off. The same engine
// checks every construction in constructions.hpp and super_precoder.hpp.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "bxc/channel_model.hpp"
#include "bxc/linalg.hpp"

namespace bxc {

enum class BlockKind {
  kIdentity,        // columns [offset, offset+count) of I_M
  kPseudoInverse,   // columns of H_k^T (H_k H_k^T)^{-1}
  kAlignment,       // leading columns of the pseudo-inverse (the G_k blocks)
  kJointAlignment,  // G_k from the null space of [H_a, -H_b], k in {a, b}
  kNullSpace,       // columns of the orthonormal null basis of H_k
};

/// Symbolic precoder block; turned into numbers by materialize().
struct BlockSpec {
  BlockKind kind = BlockKind::kIdentity;
  int channel = 0;  // alias 1..4; unused for kIdentity
  int offset = 0;
  int count = 0;

  static BlockSpec identity(int offset, int count) {
    return {BlockKind::kIdentity, 0, offset, count};
  }
  static BlockSpec pinv(int channel, int count) {
    return {BlockKind::kPseudoInverse, channel, 0, count};
  }
  static BlockSpec align(int channel, int count) {
    return {BlockKind::kAlignment, channel, 0, count};
  }
  static BlockSpec joint(int channel, int count, int offset = 0) {
    return {BlockKind::kJointAlignment, channel, offset, count};
  }
  static BlockSpec null(int channel, int count, int offset = 0) {
    return {BlockKind::kNullSpace, channel, offset, count};
  }

  /// Symbolic family: "I-slice", "pinv", "align" or "null".
  std::string tag() const;
  /// Human-readable name such as "phi2", "G1", "H3^+" or "I[0:3]".
  std::string label() const;

  bool operator==(const BlockSpec&) const = default;
};

/// Channel alias that is aligned with `channel` in a joint-alignment pair.
constexpr int joint_partner(int channel) { return channel % 2 == 1 ? channel + 1 : channel - 1; }

Matrix materialize(const BlockSpec& spec, const ChannelSet& channels);

struct Variable {
  std::string id;
  int length = 0;
  int tx = 1;  // owning transmitter
};

struct PrecoderBlock {
  std::string variable;
  BlockSpec spec;
};

struct Slot {
  Topology topology;
  std::array<std::vector<PrecoderBlock>, 2> tx;  // index 0 = Tx1
};

/// Variables resolved only through one shared linear combination, e.g. a pair
/// whose images coincide at the receiver.
struct AlignedGroup {
  std::string name;
  std::vector<std::string> members;
};

/// One successive-interference-cancellation step at one receiver.
struct SicStep {
  int stage = 1;
  int rx = 1;
  std::vector<int> slots;                 // slot indices whose rows are stacked
  std::vector<std::string> solve;         // decoded and credited here
  std::vector<std::string> nuisance;      // resolved jointly, credited elsewhere
  std::vector<AlignedGroup> groups;       // resolved as combinations
  std::vector<std::string> cancel;        // variables known at this rx
  std::vector<std::string> cancel_groups; // combinations known at this rx
};

struct CodeScheme {
  std::string name;
  int m = 1;
  int n = 1;
  std::vector<Variable> variables;
  std::vector<Slot> slots;
  std::vector<SicStep> schedule;

  int total_length() const;
  const Variable* find(const std::string& id) const;
  int stage_count() const;
};

/// Throws ErrorCode::kMalformedScheme when the scheme breaks a structural rule
/// (unknown ids, variables solved twice, cancelling something not yet known at
/// that receiver, too many fresh streams on one transmitter in one slot, ...).
void validate(const CodeScheme& scheme);

/// Rebuild the scheme with transmitters and/or receivers exchanged. Topologies,
/// channel aliases, ownership and receiver indices are all mapped.
CodeScheme relabel(const CodeScheme& scheme, bool swap_tx, bool swap_rx, std::string name);

struct ColumnRange {
  std::string id;
  int offset = 0;
  int length = 0;
  int tx = 1;
};

/// Stacked transfer matrix from all variables to all (receiver, slot) outputs.
/// Rows are receiver-major: Rx1 slot 0, Rx1 slot 1, ..., Rx2 slot 0, ...
struct EffectiveChannel {
  Matrix h;
  int n = 0;
  int slot_count = 0;
  std::vector<ColumnRange> columns;

  int row_offset(int rx, int slot) const { return ((rx - 1) * slot_count + slot) * n; }
  const ColumnRange& column(const std::string& id) const;
  /// N x len block seen by (rx, slot) from variable `id`.
  Matrix block(int rx, int slot, const std::string& id) const;
};

EffectiveChannel effective_channel(const ChannelSet& channels, const CodeScheme& scheme);

/// Structural tolerance for "this block is zero" and "these images coincide".
inline constexpr double kStructureTolerance = 1e-9;

/// Noise-free SIC run: y = H_eff x_true is peeled step by step. Returns the
/// decoded vector in column order (every variable is credited by exactly one
/// step). Throws ErrorCode::kInfeasible when a step cannot be solved.
Vector sic_decode(const EffectiveChannel& eff, const std::vector<SicStep>& schedule,
                  const Vector& x_true, double tol = linalg::kSolveTolerance);

struct VerifyResult {
  int achieved_dof = 0;
  bool ok = false;
  double max_relative_error = 0.0;
  std::string failure;
};

/// Decodes `trials` random input vectors and reports the credited variable
/// count when every trial reconstructs within `tol`.
VerifyResult verify_decodability(const ChannelSet& channels, const CodeScheme& scheme, int trials,
                                 std::uint64_t seed = 0, double tol = linalg::kSolveTolerance);

}  // namespace bxc
