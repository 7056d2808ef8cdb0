#pragma once

#include <json.hpp>

#include "bxc/dof_formulas.hpp"
#include "bxc/scheduler.hpp"

namespace bxc {

nlohmann::json to_json(const DofProfile& d);
nlohmann::json to_json(const Allocation& a);
nlohmann::json to_json(const SimResult& r);

/// Reads {M, N, p, n, seed, decode_fraction}; decode_fraction is optional.
/// Throws ErrorCode::kInvalidArgument on missing keys or wrong types.
SimConfig sim_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SimConfig& c);

}  // namespace bxc
