#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "bxc/linalg.hpp"

namespace bxc {

/// Antenna counts and link-on probability of the bursty two-user X channel.
struct Dimensions {
  int m = 1;       // antennas per transmitter
  int n = 1;       // antennas per receiver
  double p = 1.0;  // probability that a link is on in a slot

  double q() const { return 1.0 - p; }
  int min_antennas() const { return m < n ? m : n; }
  int max_antennas() const { return m < n ? n : m; }
  double r() const {
    return static_cast<double>(min_antennas()) / static_cast<double>(max_antennas());
  }
  Dimensions transposed() const { return {n, m, p}; }

  /// Throws ErrorCode::kInvalidArgument unless m, n >= 1 and 0 <= p <= 1.
  void validate() const;
};

/// On/off pattern of the four links in one slot.
///
/// Bit layout: bit 0 = link 11, bit 1 = link 12, bit 2 = link 21,
/// bit 3 = link 22, where link ji runs from Tx i to Rx j.
class Topology {
 public:
  constexpr Topology() = default;
  constexpr explicit Topology(std::uint8_t bits) : bits_(bits & 0x0F) {}

  static constexpr Topology from_links(bool s11, bool s12, bool s21, bool s22) {
    return Topology(static_cast<std::uint8_t>((s11 ? 1 : 0) | (s12 ? 2 : 0) |
                                              (s21 ? 4 : 0) | (s22 ? 8 : 0)));
  }
  static std::optional<Topology> from_name(std::string_view name);

  constexpr std::uint8_t bits() const { return bits_; }
  constexpr int index() const { return bits_; }
  constexpr bool on(int rx, int tx) const {
    return (bits_ >> ((rx - 1) * 2 + (tx - 1))) & 1U;
  }
  constexpr int on_count() const {
    return (bits_ & 1) + ((bits_ >> 1) & 1) + ((bits_ >> 2) & 1) + ((bits_ >> 3) & 1);
  }
  std::string_view name() const;

  constexpr bool operator==(const Topology&) const = default;

 private:
  std::uint8_t bits_ = 0;
};

namespace topo {
inline constexpr Topology kEmpty{0b0000};
inline constexpr Topology kS11{0b0001};
inline constexpr Topology kS12{0b0010};
inline constexpr Topology kS21{0b0100};
inline constexpr Topology kS22{0b1000};
inline constexpr Topology kMac1{0b0011};       // 11, 12 -> both Tx reach Rx1
inline constexpr Topology kMac2{0b1100};       // 21, 22
inline constexpr Topology kBc1{0b0101};        // 11, 21 -> Tx1 reaches both Rx
inline constexpr Topology kBc2{0b1010};        // 12, 22
inline constexpr Topology kParDirect{0b1001};  // 11, 22
inline constexpr Topology kParCross{0b0110};   // 12, 21
inline constexpr Topology kZ1{0b1011};         // all but 21
inline constexpr Topology kZ2{0b1110};         // all but 11
inline constexpr Topology kZ3{0b1101};         // all but 12
inline constexpr Topology kZ4{0b0111};         // all but 22
inline constexpr Topology kF{0b1111};

inline constexpr int kCount = 16;

/// All 16 topologies, ordered by index (bit pattern).
std::array<Topology, kCount> all();
}  // namespace topo

/// p^k (1-p)^(4-k) with k the number of active links.
double topology_probability(Topology t, double p);

using TopologyHistogram = std::array<std::int64_t, topo::kCount>;

/// The four fixed N x M link matrices. Alias k (1..4) is H11, H12, H21, H22.
class ChannelSet {
 public:
  ChannelSet(int m, int n, std::uint64_t seed, std::array<Matrix, 4> matrices);

  int m() const { return m_; }
  int n() const { return n_; }
  std::uint64_t seed() const { return seed_; }

  /// Channel from Tx `tx` to Rx `rx` (both 1-based).
  const Matrix& link(int rx, int tx) const { return h_[(rx - 1) * 2 + (tx - 1)]; }
  /// Alias H1..H4.
  const Matrix& alias(int k) const { return h_[k - 1]; }
  const std::array<Matrix, 4>& matrices() const { return h_; }

 private:
  int m_;
  int n_;
  std::uint64_t seed_;
  std::array<Matrix, 4> h_;
};

/// Four i.i.d. standard-normal N x M matrices, each redrawn until numerically
/// full rank. Deterministic in (dims.m, dims.n, seed).
ChannelSet sample_channels(const Dimensions& dims, std::uint64_t seed);

/// Counter-based link state: Bernoulli(p) draw for (seed, slot, link) with
/// link in 0..3 following the Topology bit layout.
bool link_state(std::uint64_t seed, std::uint64_t slot, int link, double p);

std::vector<Topology> sample_topology_sequence(double p, std::int64_t n, std::uint64_t seed);

TopologyHistogram count_topologies(const std::vector<Topology>& seq);

}  // namespace bxc
