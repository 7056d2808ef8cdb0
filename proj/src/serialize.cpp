#include "bxc/serialize.hpp"

#include <string>

#include "bxc/error.hpp"

namespace bxc {
namespace {

using nlohmann::json;

json histogram_json(const TopologyHistogram& h) {
  json out = json::object();
  for (const Topology t : topo::all()) {
    if (h[t.index()] != 0) out[std::string(t.name())] = h[t.index()];
  }
  return out;
}

template <class T>
T required(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::kInvalidArgument, std::string("missing key ") + key);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::kInvalidArgument, std::string("bad value for ") + key);
  }
}

}  // namespace

json to_json(const DofProfile& d) {
  json j = {
      {"M", d.m},
      {"N", d.n},
      {"r", d.r},
      {"p", d.p},
      {"regime", std::string(regime_tag(d.regime))},
      {"eta_ub1", d.eta_ub1},
      {"eta_ub2", d.eta_ub2},
      {"eta_lb", d.eta_lb},
      {"baseline", d.baseline},
      {"composite", d.composite},
      {"appendix_a", d.appendix_a},
      {"appendix_b", d.appendix_b},
  };
  j["thm1"] = d.thm1 ? json(*d.thm1) : json(nullptr);
  return j;
}

json to_json(const Allocation& a) {
  return {
      {"zf_blocks", a.zf_blocks},
      {"z12_blocks", a.z12_blocks},
      {"z34_blocks", a.z34_blocks},
      {"single_blocks", histogram_json(a.singles)},
      {"leftover", histogram_json(a.leftover)},
  };
}

json to_json(const SimResult& r) {
  return {
      {"M", r.dims.m},
      {"N", r.dims.n},
      {"p", r.dims.p},
      {"n", r.n},
      {"seed", r.seed},
      {"decode_fraction", r.decode_fraction},
      {"decoded_variables", r.decoded_variables},
      {"empirical_dof_per_slot", r.empirical_dof_per_slot},
      {"analytic_reference", r.analytic_reference},
      {"relative_error", r.relative_error()},
      {"allocation", to_json(r.allocation)},
      {"histogram", histogram_json(r.histogram)},
      {"distinct_codes", r.distinct_codes},
      {"sampled_decodes", r.sampled_decodes},
      {"max_relative_error", r.max_relative_error},
  };
}

SimConfig sim_config_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "config must be a JSON object");
  SimConfig c;
  c.dims.m = required<int>(j, "M");
  c.dims.n = required<int>(j, "N");
  c.dims.p = required<double>(j, "p");
  c.slots = required<std::int64_t>(j, "n");
  c.seed = required<std::uint64_t>(j, "seed");
  if (j.contains("decode_fraction")) c.decode_fraction = required<double>(j, "decode_fraction");
  c.dims.validate();
  return c;
}

json to_json(const SimConfig& c) {
  return {{"M", c.dims.m},   {"N", c.dims.n},   {"p", c.dims.p},
          {"n", c.slots},    {"seed", c.seed},  {"decode_fraction", c.decode_fraction}};
}

}  // namespace bxc
