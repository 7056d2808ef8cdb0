#include "bxc/channel_model.hpp"

#include <cmath>
#include <random>
#include <string>

#include "bxc/error.hpp"

namespace bxc {
namespace {

constexpr std::array<std::string_view, topo::kCount> kNames = {
    "empty", "s11",        "s12", "mac1",      "s21", "bc1", "par_cross", "z4",
    "s22",   "par_direct", "bc2", "z1",        "mac2", "z3", "z2",        "f"};

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

}  // namespace

void Dimensions::validate() const {
  if (m < 1 || n < 1) {
    throw Error(ErrorCode::kInvalidArgument, "antenna counts must be positive");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "p must lie in [0, 1]");
  }
}

std::string_view Topology::name() const { return kNames[bits_]; }

std::optional<Topology> Topology::from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return Topology(static_cast<std::uint8_t>(i));
  }
  return std::nullopt;
}

std::array<Topology, topo::kCount> topo::all() {
  std::array<Topology, kCount> out;
  for (int i = 0; i < kCount; ++i) out[i] = Topology(static_cast<std::uint8_t>(i));
  return out;
}

double topology_probability(Topology t, double p) {
  const int k = t.on_count();
  return std::pow(p, k) * std::pow(1.0 - p, 4 - k);
}

ChannelSet::ChannelSet(int m, int n, std::uint64_t seed, std::array<Matrix, 4> matrices)
    : m_(m), n_(n), seed_(seed), h_(std::move(matrices)) {
  for (const auto& h : h_) {
    if (h.rows() != n_ || h.cols() != m_) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "channel matrices must be " + std::to_string(n_) + "x" +
                      std::to_string(m_));
    }
  }
}

ChannelSet sample_channels(const Dimensions& dims, std::uint64_t seed) {
  dims.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int full = dims.min_antennas();
  std::array<Matrix, 4> h;
  for (auto& mat : h) {
    do {
      mat.resize(dims.n, dims.m);
      for (int i = 0; i < dims.n; ++i) {
        for (int j = 0; j < dims.m; ++j) mat(i, j) = normal(rng);
      }
    } while (linalg::rank(mat) < full);
  }
  return ChannelSet(dims.m, dims.n, seed, std::move(h));
}

bool link_state(std::uint64_t seed, std::uint64_t slot, int link, double p) {
  const std::uint64_t key = mix64(seed ^ 0x5EEDB0A7C0FFEE11ULL);
  const std::uint64_t draw = mix64(key + (slot * 4 + static_cast<std::uint64_t>(link)) * kGolden);
  const double u = static_cast<double>(draw >> 11) * 0x1.0p-53;
  return u < p;
}

std::vector<Topology> sample_topology_sequence(double p, std::int64_t n, std::uint64_t seed) {
  if (n < 0) throw Error(ErrorCode::kInvalidArgument, "slot count must be non-negative");
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "p must lie in [0, 1]");
  std::vector<Topology> seq;
  seq.reserve(static_cast<std::size_t>(n));
  for (std::int64_t s = 0; s < n; ++s) {
    const auto slot = static_cast<std::uint64_t>(s);
    seq.push_back(Topology::from_links(link_state(seed, slot, 0, p), link_state(seed, slot, 1, p),
                                       link_state(seed, slot, 2, p), link_state(seed, slot, 3, p)));
  }
  return seq;
}

TopologyHistogram count_topologies(const std::vector<Topology>& seq) {
  TopologyHistogram hist{};
  for (const auto t : seq) ++hist[t.index()];
  return hist;
}

}  // namespace bxc
