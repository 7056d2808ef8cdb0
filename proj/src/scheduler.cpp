#include "bxc/scheduler.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "bxc/code_scheme.hpp"
#include "bxc/constructions.hpp"
#include "bxc/dof_formulas.hpp"
#include "bxc/error.hpp"

namespace bxc {
namespace {

constexpr std::array<Topology, 4> kZs = {topo::kZ1, topo::kZ2, topo::kZ3, topo::kZ4};

// One built block kind and how many instances the allocation asks for.
struct Kind {
  CodeScheme scheme;
  std::int64_t count = 0;
};

// Codes for every block kind present in the allocation.
std::vector<Kind> build_kinds(const Allocation& a, const Dimensions& dims) {
  std::vector<Kind> kinds;
  if (a.zf_blocks > 0) kinds.push_back({build_zf_code(dims), a.zf_blocks});
  if (a.z12_blocks > 0) kinds.push_back({build_z1z2_code(dims, "z1z2"), a.z12_blocks});
  if (a.z34_blocks > 0) kinds.push_back({build_z1z2_code(dims, "z3z4"), a.z34_blocks});
  for (const Topology t : topo::all()) {
    if (a.singles[t.index()] > 0) kinds.push_back({build_fallback_code(t, dims), a.singles[t.index()]});
  }
  return kinds;
}

}  // namespace

TopologyHistogram Allocation::consumed() const {
  TopologyHistogram used = singles;
  for (const Topology z : kZs) used[z.index()] += zf_blocks;
  used[topo::kF.index()] += zf_blocks;
  used[topo::kZ1.index()] += z12_blocks;
  used[topo::kZ2.index()] += z12_blocks;
  used[topo::kZ3.index()] += z34_blocks;
  used[topo::kZ4.index()] += z34_blocks;
  return used;
}

std::int64_t Allocation::block_count() const {
  std::int64_t total = zf_blocks + z12_blocks + z34_blocks;
  for (const auto s : singles) total += s;
  return total;
}

Allocation schedule_codes(const TopologyHistogram& hist, const Dimensions& dims) {
  dims.validate();
  for (const auto c : hist) {
    if (c < 0) throw Error(ErrorCode::kInvalidArgument, "negative topology count");
  }
  const int lo = dims.min_antennas();
  const int hi = dims.max_antennas();
  TopologyHistogram left = hist;
  Allocation a;

  if (3 * lo > 2 * hi) {
    std::int64_t k = left[topo::kF.index()];
    for (const Topology z : kZs) k = std::min(k, left[z.index()]);
    a.zf_blocks = k;
    for (const Topology z : kZs) left[z.index()] -= k;
    left[topo::kF.index()] -= k;
  }
  if (2 * lo > hi) {
    a.z12_blocks = std::min(left[topo::kZ1.index()], left[topo::kZ2.index()]);
    a.z34_blocks = std::min(left[topo::kZ3.index()], left[topo::kZ4.index()]);
    left[topo::kZ1.index()] -= a.z12_blocks;
    left[topo::kZ2.index()] -= a.z12_blocks;
    left[topo::kZ3.index()] -= a.z34_blocks;
    left[topo::kZ4.index()] -= a.z34_blocks;
  }
  for (const Topology t : topo::all()) {
    if (t == topo::kEmpty) {
      a.leftover[t.index()] = left[t.index()];
    } else {
      a.singles[t.index()] = left[t.index()];
    }
  }
  return a;
}

std::int64_t allocated_variables(const Allocation& a, const Dimensions& dims) {
  std::int64_t total = 0;
  for (const Kind& k : build_kinds(a, dims)) total += k.scheme.total_length() * k.count;
  return total;
}

double SimResult::relative_error() const {
  if (analytic_reference == 0.0) return empirical_dof_per_slot == 0.0 ? 0.0 : INFINITY;
  return std::abs(empirical_dof_per_slot - analytic_reference) / analytic_reference;
}

SimResult run_simulation(const SimConfig& config) {
  const Dimensions& dims = config.dims;
  dims.validate();
  if (config.slots < 1) throw Error(ErrorCode::kInvalidArgument, "slot count must be at least 1");
  if (!(config.decode_fraction >= 0.0 && config.decode_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "decode fraction must lie in [0, 1]");
  }

  SimResult res;
  res.dims = dims;
  res.n = config.slots;
  res.seed = config.seed;
  res.decode_fraction = config.decode_fraction;
  res.analytic_reference = composite_achievable(dims.m, dims.n, dims.p);

  const ChannelSet channels = sample_channels(dims, config.seed);
  res.histogram = count_topologies(sample_topology_sequence(dims.p, config.slots, config.seed));
  res.allocation = schedule_codes(res.histogram, dims);
  const Allocation& a = res.allocation;

  const std::vector<Kind> kinds = build_kinds(a, dims);

  const std::int64_t stride =
      config.decode_fraction > 0.0
          ? std::max<std::int64_t>(1, std::llround(1.0 / config.decode_fraction))
          : 0;
  std::mt19937_64 rng(config.seed ^ 0x5EEDF00DULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::int64_t block_index = 0;

  for (const Kind& k : kinds) {
    const int len = k.scheme.total_length();
    if (len == 0) {
      block_index += k.count;
      continue;
    }
    const VerifyResult v = verify_decodability(channels, k.scheme, 1, config.seed);
    if (!v.ok) {
      throw Error(ErrorCode::kInfeasible, k.scheme.name + " failed to decode: " + v.failure);
    }
    res.max_relative_error = std::max(res.max_relative_error, v.max_relative_error);
    ++res.distinct_codes;

    if (stride > 0) {
      const EffectiveChannel eff = effective_channel(channels, k.scheme);
      // Blocks whose global index is a multiple of the stride.
      const std::int64_t first = (stride - block_index % stride) % stride;
      for (std::int64_t i = first; i < k.count; i += stride) {
        Vector x(eff.h.cols());
        for (Eigen::Index j = 0; j < x.size(); ++j) x(j) = normal(rng);
        const Vector xhat = sic_decode(eff, k.scheme.schedule, x);
        const double err = (xhat - x).norm() / std::max(x.norm(), 1e-300);
        if (err > linalg::kSolveTolerance) {
          throw Error(ErrorCode::kInfeasible,
                      k.scheme.name + " decoded with relative error " + std::to_string(err));
        }
        res.max_relative_error = std::max(res.max_relative_error, err);
        ++res.sampled_decodes;
      }
    }
    block_index += k.count;
    res.decoded_variables += static_cast<std::int64_t>(len) * k.count;
  }

  res.empirical_dof_per_slot =
      static_cast<double>(res.decoded_variables) / static_cast<double>(res.n);
  return res;
}

}  // namespace bxc
