#pragma once

#include <string>

#include "bxc/code_scheme.hpp"

namespace bxc {

/// One-slot code for topology `t`. Counts per topology, with m = min(M,N),
/// x = max(M,N): single link m; parallel pair 2m; mac min(2M,N); bc min(M,2N);
/// each z min(x, 2m); empty 0. The f code is only offered where r <= 1/2 or
/// M = N divisible by 3 and throws ErrorCode::kUnsupportedShape otherwise.
CodeScheme build_single_topology_code(Topology t, const Dimensions& dims);

/// Same as build_single_topology_code but accepts f at every shape, using a
/// mix of nulled, aligned and common streams for min(2m, floor(4x/3))
/// variables. Used where a scheduler needs something for a spare f slot.
CodeScheme build_fallback_code(Topology t, const Dimensions& dims);

/// Whether build_single_topology_code(f, dims) succeeds.
bool standalone_f_supported(const Dimensions& dims);

/// Two-slot code over {z1, z2} (pair "z1z2") or its transmitter-swapped copy
/// over {z3, z4} (pair "z3z4"); 2 min(M,N) + max(M,N) variables in two stages.
/// Requires 1/2 < r.
CodeScheme build_z1z2_code(const Dimensions& dims, const std::string& pair = "z1z2");

/// Five-slot code over {z1, z2, z3, z4, f} with 6 min(M,N) + 2 max(M,N)
/// variables in three stages. Requires r > 2/3.
CodeScheme build_zf_code(const Dimensions& dims);

}  // namespace bxc
