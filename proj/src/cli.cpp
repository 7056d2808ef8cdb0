#include "bxc/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>

#include "bxc/constructions.hpp"
#include "bxc/dof_formulas.hpp"
#include "bxc/error.hpp"
#include "bxc/scheduler.hpp"
#include "bxc/serialize.hpp"
#include "bxc/super_precoder.hpp"

namespace bxc {
namespace {

constexpr const char* kAllSeries = "thm1,ub1,ub2,lb,baseline";
constexpr const char* kAllSchemes = "zf,z1z2,z3z4,block_ia,refined_ia,single";
constexpr const char* kDefaultShapes = "4x3,3x4,5x4,3x3,3x2,4x2";

std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(12) << v;
  return s.str();
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

Dimensions parse_shape(const std::string& s) {
  const auto x = s.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(s);
    std::size_t used_m = 0;
    std::size_t used_n = 0;
    const int m = std::stoi(s.substr(0, x), &used_m);
    const int n = std::stoi(s.substr(x + 1), &used_n);
    if (used_m != x || used_n != s.size() - x - 1) throw std::invalid_argument(s);
    Dimensions d{m, n, 0.5};
    d.validate();
    return d;
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::kInvalidArgument, "shape must look like 4x3, got '" + s + "'");
  }
}

// ---- table

struct TableOpts {
  int m = 0;
  int n = 0;
  double p = 0.0;
  bool json = false;
};

int cmd_table(const TableOpts& o, std::ostream& out) {
  const DofProfile d = dof_profile(o.m, o.n, o.p);
  if (o.json) {
    out << to_json(d).dump(2) << "\n";
    return kExitOk;
  }
  out << "M=" << d.m << " N=" << d.n << " r=" << num(d.r) << " p=" << num(d.p)
      << " regime=" << regime_tag(d.regime) << "\n";
  auto row = [&](const char* key, const std::string& v) {
    out << std::left << std::setw(12) << key << v << "\n";
  };
  row("thm1", d.thm1 ? num(*d.thm1) : "n/a");
  row("eta_ub1", num(d.eta_ub1));
  row("eta_ub2", num(d.eta_ub2));
  row("eta_lb", num(d.eta_lb));
  row("composite", num(d.composite));
  row("baseline", num(d.baseline));
  row("appendix_a", num(d.appendix_a));
  row("appendix_b", num(d.appendix_b));
  return kExitOk;
}

// ---- curves

struct CurveOpts {
  std::string sweep = "r";
  double p = 0.7;
  double r = 1.0;
  double step = 0.01;
  std::string series = kAllSeries;
  int antennas = 100;
  bool unnormalized = false;
  bool unscoped = false;
};

int cmd_curves(const CurveOpts& o, std::ostream& out) {
  if (!(o.step > 0.0 && o.step <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "step must lie in (0, 1]");
  const std::vector<std::string> series = split(o.series);
  for (const auto& s : series) {
    if (s != "thm1" && s != "ub1" && s != "ub2" && s != "lb" && s != "baseline") {
      throw Error(ErrorCode::kInvalidArgument, "unknown series '" + s + "'");
    }
  }
  if (!(o.p >= 0.0 && o.p <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "p must lie in [0, 1]");
  if (!(o.r > 0.0 && o.r <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "r must lie in (0, 1]");

  out << "x,series,value\n";
  const double scale = o.unnormalized ? o.antennas : 1.0;
  const int count = static_cast<int>(std::floor(1.0 / o.step + 1e-9));
  const int first = o.sweep == "r" ? 1 : 0;
  for (int i = first; i <= count; ++i) {
    const double x = i * o.step;
    const double r = o.sweep == "r" ? x : o.r;
    const double p = o.sweep == "r" ? o.p : x;
    const bool open = classify(r, p) == Regime::kOpen;
    for (const auto& s : series) {
      std::optional<double> v;
      if (s == "thm1") {
        if (!open) v = theorem1_dof(r, p);
      } else if (s == "baseline") {
        // Needs integer antenna counts: min = r K, max = K.
        const double lo = r * o.antennas;
        if (std::abs(lo - std::round(lo)) < 1e-6 && std::round(lo) >= 1) {
          const int m = static_cast<int>(std::round(lo));
          v = per_topology_baseline(m, o.antennas, p) / o.antennas;
        }
      } else if (open || o.unscoped) {
        v = s == "ub1" ? eta_ub1(r, p) : s == "ub2" ? eta_ub2(r, p) : eta_lb(r, p);
      }
      if (v) out << num(x) << "," << s << "," << num(*v * scale) << "\n";
    }
  }
  return kExitOk;
}

// ---- verify

struct VerifyOpts {
  std::uint64_t seed = 0;
  int seeds = 3;
  std::vector<std::string> shapes;
  std::vector<std::string> schemes;
  bool json = false;
};

// Named builders; each may throw kOutsideHypothesis / kUnsupportedShape.
using Builder = std::function<VerifyResult(const ChannelSet&, std::uint64_t)>;

std::vector<std::pair<std::string, Builder>> builders_for(const std::string& scheme, const Dimensions& d) {
  std::vector<std::pair<std::string, Builder>> out;
  auto wrap = [](CodeScheme s) {
    return [s = std::move(s)](const ChannelSet& c, std::uint64_t seed) {
      return verify_decodability(c, s, 1, seed);
    };
  };
  auto wrap_sp = [](SuperPrecoder sp) {
    return [sp = std::move(sp)](const ChannelSet& c, std::uint64_t seed) {
      return verify_decodability(c, sp, 1, seed);
    };
  };
  if (scheme == "zf") {
    out.emplace_back("zf", wrap(build_zf_code(d)));
  } else if (scheme == "z1z2" || scheme == "z3z4") {
    out.emplace_back(scheme, wrap(build_z1z2_code(d, scheme)));
  } else if (scheme == "block_ia") {
    out.emplace_back(scheme, wrap_sp(build_block_ia_precoder(d)));
  } else if (scheme == "refined_ia") {
    out.emplace_back(scheme, wrap_sp(build_refined_ia_precoder(d)));
  } else if (scheme == "single") {
    for (const Topology t : topo::all()) {
      if (t == topo::kEmpty) continue;
      out.emplace_back("single:" + std::string(t.name()), wrap(build_fallback_code(t, d)));
    }
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown scheme '" + scheme + "'");
  }
  return out;
}

int cmd_verify(const VerifyOpts& o, std::ostream& out, std::ostream& err) {
  if (o.seeds < 1) throw Error(ErrorCode::kInvalidArgument, "--seeds must be at least 1");
  std::vector<Dimensions> shapes;
  for (const auto& s : o.shapes) shapes.push_back(parse_shape(s));
  for (const auto& s : o.schemes) {
    if (s != "zf" && s != "z1z2" && s != "z3z4" && s != "block_ia" && s != "refined_ia" && s != "single") {
      throw Error(ErrorCode::kInvalidArgument, "unknown scheme '" + s + "'");
    }
  }

  nlohmann::json cases = nlohmann::json::array();
  int failures = 0;
  for (const auto& scheme : o.schemes) {
    for (const Dimensions& d : shapes) {
      const std::string shape = std::to_string(d.m) + "x" + std::to_string(d.n);
      std::vector<std::pair<std::string, Builder>> builders;
      try {
        builders = builders_for(scheme, d);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kOutsideHypothesis && e.code() != ErrorCode::kUnsupportedShape) throw;
        if (o.json) {
          cases.push_back({{"construction", scheme}, {"shape", shape}, {"status", "skipped"},
                           {"reason", e.what()}});
        } else {
          out << scheme << " " << shape << " skipped: " << e.what() << "\n";
        }
        continue;
      }
      for (std::uint64_t s = o.seed; s < o.seed + static_cast<std::uint64_t>(o.seeds); ++s) {
        const ChannelSet channels = sample_channels(d, s);
        for (const auto& [name, run] : builders) {
          const VerifyResult v = run(channels, s);
          if (!v.ok) {
            ++failures;
            err << "FAIL " << name << " " << shape << " seed=" << s << ": " << v.failure << "\n";
          }
          if (o.json) {
            nlohmann::json c = {{"construction", name}, {"shape", shape},        {"seed", s},
                                {"status", v.ok ? "ok" : "fail"}, {"achieved_dof", v.achieved_dof},
                                {"max_relative_error", v.max_relative_error}};
            if (!v.ok) c["reason"] = v.failure;
            cases.push_back(c);
          } else {
            out << name << " " << shape << " seed=" << s << " dof=" << v.achieved_dof << " "
                << (v.ok ? "ok" : "FAIL") << "\n";
          }
        }
      }
    }
  }
  if (o.json) out << nlohmann::json{{"cases", cases}, {"failures", failures}}.dump(2) << "\n";
  return failures == 0 ? kExitOk : kExitFailure;
}

// ---- simulate

struct SimulateOpts {
  std::optional<int> m, n;
  std::optional<double> p;
  std::optional<std::int64_t> slots;
  std::optional<std::uint64_t> seed;
  double decode_fraction = 0.01;
  std::string config;
  bool json = false;
};

int cmd_simulate(const SimulateOpts& o, std::ostream& out) {
  SimConfig cfg;
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot read " + o.config);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kInvalidArgument, std::string("config is not valid JSON: ") + e.what());
    }
    cfg = sim_config_from_json(j);
  } else {
    if (!o.m || !o.n || !o.p || !o.slots || !o.seed) {
      throw Error(ErrorCode::kInvalidArgument, "simulate needs --m, --n, --p, --slots and --seed (or --config)");
    }
    cfg = {{*o.m, *o.n, *o.p}, *o.slots, *o.seed, o.decode_fraction};
  }
  const SimResult r = run_simulation(cfg);
  if (o.json) {
    out << to_json(r).dump(2) << "\n";
    return kExitOk;
  }
  out << "M=" << r.dims.m << " N=" << r.dims.n << " p=" << num(r.dims.p) << " slots=" << r.n
      << " seed=" << r.seed << "\n";
  out << "blocks: zf=" << r.allocation.zf_blocks << " z12=" << r.allocation.z12_blocks
      << " z34=" << r.allocation.z34_blocks << " single=" << (r.allocation.block_count() -
                                                              r.allocation.zf_blocks -
                                                              r.allocation.z12_blocks -
                                                              r.allocation.z34_blocks)
      << "\n";
  out << "decoded variables " << r.decoded_variables << " (" << r.sampled_decodes
      << " sampled full decodes)\n";
  out << "empirical " << num(r.empirical_dof_per_slot) << " DoF/slot, analytic "
      << num(r.analytic_reference) << ", relative error " << num(r.relative_error()) << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sum-DoF tables, curves, code verification and Monte Carlo runs for the bursty MIMO X channel",
               "bxc"};
  app.require_subcommand(1);

  TableOpts table;
  auto* t = app.add_subcommand("table", "analytic values at one (M, N, p)");
  t->add_option("--m", table.m, "antennas per transmitter")->required()->check(CLI::PositiveNumber);
  t->add_option("--n", table.n, "antennas per receiver")->required()->check(CLI::PositiveNumber);
  t->add_option("--p", table.p, "link-on probability")->required()->check(CLI::Range(0.0, 1.0));
  t->add_flag("--json", table.json, "JSON output");

  CurveOpts curves;
  auto* c = app.add_subcommand("curves", "normalized DoF curves as CSV");
  c->add_option("--sweep", curves.sweep, "swept variable")->check(CLI::IsMember({"r", "p"}));
  c->add_option("--p", curves.p, "fixed p when sweeping r");
  c->add_option("--r", curves.r, "fixed r when sweeping p");
  c->add_option("--step", curves.step, "grid step");
  c->add_option("--series", curves.series, "comma-separated subset of " + std::string(kAllSeries));
  c->add_option("--antennas", curves.antennas, "max(M, N) used for the baseline and --unnormalized")
      ->check(CLI::PositiveNumber);
  c->add_flag("--unnormalized", curves.unnormalized, "multiply by --antennas");
  c->add_flag("--unscoped", curves.unscoped, "emit bounds outside the open regime too");

  VerifyOpts verify;
  std::string verify_shapes = kDefaultShapes;
  std::string verify_schemes = kAllSchemes;
  auto* v = app.add_subcommand("verify", "check decodability of the constructions");
  v->add_option("--seed", verify.seed, "first channel seed")->required();
  v->add_option("--seeds", verify.seeds, "number of consecutive seeds");
  v->add_option("--shapes", verify_shapes, "comma-separated MxN list");
  v->add_option("--schemes", verify_schemes, "comma-separated subset of " + std::string(kAllSchemes));
  v->add_flag("--json", verify.json, "JSON report");

  SimulateOpts sim;
  auto* s = app.add_subcommand("simulate", "Monte Carlo run of the topology scheduler");
  s->add_option("--m", sim.m, "antennas per transmitter");
  s->add_option("--n", sim.n, "antennas per receiver");
  s->add_option("--p", sim.p, "link-on probability");
  s->add_option("--slots", sim.slots, "number of slots")->check(CLI::PositiveNumber);
  s->add_option("--seed", sim.seed, "seed for channels and topologies");
  s->add_option("--decode-fraction", sim.decode_fraction, "share of blocks decoded in full")
      ->check(CLI::Range(0.0, 1.0));
  s->add_option("--config", sim.config, "JSON config {M, N, p, n, seed, decode_fraction}");
  s->add_flag("--json", sim.json, "JSON output");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (t->parsed()) return cmd_table(table, out);
    if (c->parsed()) return cmd_curves(curves, out);
    if (v->parsed()) {
      verify.shapes = split(verify_shapes);
      verify.schemes = split(verify_schemes);
      return cmd_verify(verify, out, err);
    }
    return cmd_simulate(sim, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kInvalidArgument ? kExitUsage : kExitFailure;
  }
}

}  // namespace bxc
