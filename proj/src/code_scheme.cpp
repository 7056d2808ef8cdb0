#include "bxc/code_scheme.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>

#include "bxc/error.hpp"

namespace bxc {
namespace {

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::kMalformedScheme, "malformed scheme: " + what);
}

int swap_alias_tx(int k) { return k % 2 == 1 ? k + 1 : k - 1; }  // 1<->2, 3<->4
int swap_alias_rx(int k) { return k <= 2 ? k + 2 : k - 2; }      // 1<->3, 2<->4

Topology swap_topology(Topology t, bool swap_tx, bool swap_rx) {
  bool s11 = t.on(1, 1), s12 = t.on(1, 2), s21 = t.on(2, 1), s22 = t.on(2, 2);
  if (swap_tx) {
    std::swap(s11, s12);
    std::swap(s21, s22);
  }
  if (swap_rx) {
    std::swap(s11, s21);
    std::swap(s12, s22);
  }
  return Topology::from_links(s11, s12, s21, s22);
}

}  // namespace

std::string BlockSpec::tag() const {
  switch (kind) {
    case BlockKind::kIdentity:
      return "I-slice";
    case BlockKind::kPseudoInverse:
      return "pinv";
    case BlockKind::kAlignment:
    case BlockKind::kJointAlignment:
      return "align";
    case BlockKind::kNullSpace:
      return "null";
  }
  return "?";
}

std::string BlockSpec::label() const {
  const std::string k = std::to_string(channel);
  switch (kind) {
    case BlockKind::kIdentity:
      return "I[" + std::to_string(offset) + ":" + std::to_string(offset + count) + "]";
    case BlockKind::kPseudoInverse:
      return "H" + k + "^+";
    case BlockKind::kAlignment:
    case BlockKind::kJointAlignment:
      return "G" + k;
    case BlockKind::kNullSpace:
      return "phi" + k;
  }
  return "?";
}

Matrix materialize(const BlockSpec& spec, const ChannelSet& channels) {
  const int m = channels.m();
  if (spec.count < 0 || spec.offset < 0) malformed("negative block extent");
  if (spec.kind != BlockKind::kIdentity && (spec.channel < 1 || spec.channel > 4)) {
    malformed("channel alias must be 1..4");
  }
  if (spec.count == 0) return Matrix(m, 0);
  switch (spec.kind) {
    case BlockKind::kIdentity:
      return linalg::identity_columns(m, spec.offset, spec.count);
    case BlockKind::kPseudoInverse: {
      const Matrix p = linalg::pseudo_inverse(channels.alias(spec.channel));
      if (spec.offset + spec.count > p.cols()) malformed("pseudo-inverse slice out of range");
      return p.middleCols(spec.offset, spec.count);
    }
    case BlockKind::kAlignment:
      return linalg::alignment_block(channels.alias(spec.channel), spec.offset + spec.count)
          .middleCols(spec.offset, spec.count);
    case BlockKind::kJointAlignment: {
      const int first = spec.channel % 2 == 1 ? spec.channel : spec.channel - 1;
      auto [ga, gb] = linalg::joint_alignment(channels.alias(first), channels.alias(first + 1),
                                              spec.offset + spec.count);
      const Matrix& g = spec.channel == first ? ga : gb;
      return g.middleCols(spec.offset, spec.count);
    }
    case BlockKind::kNullSpace: {
      const Matrix z = linalg::null_space_basis(channels.alias(spec.channel));
      if (spec.offset + spec.count > z.cols()) malformed("null-space slice out of range");
      return z.middleCols(spec.offset, spec.count);
    }
  }
  malformed("unknown block kind");
}

int CodeScheme::total_length() const {
  int total = 0;
  for (const auto& v : variables) total += v.length;
  return total;
}

const Variable* CodeScheme::find(const std::string& id) const {
  for (const auto& v : variables) {
    if (v.id == id) return &v;
  }
  return nullptr;
}

int CodeScheme::stage_count() const {
  std::set<int> stages;
  for (const auto& s : schedule) stages.insert(s.stage);
  return static_cast<int>(stages.size());
}

void validate(const CodeScheme& scheme) {
  if (scheme.m < 1 || scheme.n < 1) malformed("antenna counts must be positive");
  std::set<std::string> ids;
  for (const auto& v : scheme.variables) {
    if (v.length < 0) malformed("variable " + v.id + " has negative length");
    if (v.tx != 1 && v.tx != 2) malformed("variable " + v.id + " has no valid transmitter");
    if (!ids.insert(v.id).second) malformed("duplicate variable " + v.id);
  }

  // Where each variable is sent: count of (slot, tx) placements.
  std::map<std::string, int> placements;
  for (std::size_t t = 0; t < scheme.slots.size(); ++t) {
    for (int i = 0; i < 2; ++i) {
      std::set<std::string> here;
      for (const auto& b : scheme.slots[t].tx[i]) {
        const Variable* v = scheme.find(b.variable);
        if (v == nullptr) malformed("precoder references unknown variable " + b.variable);
        if (v->tx != i + 1) malformed("variable " + v->id + " sent by the wrong transmitter");
        if (b.spec.count != v->length) {
          malformed("block width of " + v->id + " differs from its length");
        }
        if (b.spec.kind == BlockKind::kIdentity && b.spec.offset + b.spec.count > scheme.m) {
          malformed("identity slice for " + v->id + " exceeds M");
        }
        if (here.insert(v->id).second) ++placements[v->id];
      }
    }
  }
  for (const auto& v : scheme.variables) {
    if (placements[v.id] == 0) malformed("variable " + v.id + " is never transmitted");
  }
  // Fresh signal dimensions per (slot, tx). A variable repeated over several
  // slots spends its dimensions once per slot but those are still counted;
  // only the sum of variables unique to this slot is bounded by M.
  for (const auto& slot : scheme.slots) {
    for (int i = 0; i < 2; ++i) {
      int fresh = 0;
      std::set<std::string> seen;
      for (const auto& b : slot.tx[i]) {
        if (!seen.insert(b.variable).second) continue;
        if (placements[b.variable] == 1) fresh += scheme.find(b.variable)->length;
      }
      if (fresh > scheme.m) malformed("more than M fresh streams on one transmitter in a slot");
    }
  }

  std::map<std::string, int> solved;
  std::array<std::set<std::string>, 2> known_vars;
  std::array<std::set<std::string>, 2> known_groups;
  int last_stage = 0;
  const auto require_var = [&](const std::string& id) {
    if (!ids.count(id)) malformed("schedule references unknown variable " + id);
  };
  for (const auto& step : scheme.schedule) {
    if (step.rx != 1 && step.rx != 2) malformed("receiver must be 1 or 2");
    if (step.stage < last_stage) malformed("stages must be nondecreasing");
    last_stage = step.stage;
    if (step.slots.empty()) malformed("step without slots");
    for (int t : step.slots) {
      if (t < 0 || t >= static_cast<int>(scheme.slots.size())) malformed("slot index out of range");
    }
    auto& kv = known_vars[step.rx - 1];
    auto& kg = known_groups[step.rx - 1];
    for (const auto& id : step.cancel) {
      require_var(id);
      if (!kv.count(id)) malformed("cancelled variable " + id + " not yet known at this receiver");
    }
    for (const auto& g : step.cancel_groups) {
      if (!kg.count(g)) malformed("cancelled group " + g + " not yet known at this receiver");
    }
    for (const auto& id : step.solve) {
      require_var(id);
      ++solved[id];
    }
    for (const auto& id : step.nuisance) require_var(id);
    for (const auto& g : step.groups) {
      if (g.members.size() < 2) malformed("aligned group " + g.name + " needs two members");
      for (const auto& id : g.members) require_var(id);
    }
    // Knowledge gained by this step becomes usable from the next one on.
    for (const auto& id : step.solve) kv.insert(id);
    for (const auto& id : step.nuisance) kv.insert(id);
    for (const auto& g : step.groups) {
      if (!kg.insert(g.name).second) malformed("group " + g.name + " formed twice");
    }
  }
  for (const auto& v : scheme.variables) {
    const int c = solved[v.id];
    if (c != 1) {
      malformed("variable " + v.id + " solved " + std::to_string(c) + " times");
    }
  }
}

CodeScheme relabel(const CodeScheme& scheme, bool swap_tx, bool swap_rx, std::string name) {
  CodeScheme out = scheme;
  out.name = std::move(name);
  const auto map_alias = [&](int k) {
    if (swap_tx) k = swap_alias_tx(k);
    if (swap_rx) k = swap_alias_rx(k);
    return k;
  };
  if (swap_tx) {
    for (auto& v : out.variables) v.tx = 3 - v.tx;
  }
  for (auto& slot : out.slots) {
    slot.topology = swap_topology(slot.topology, swap_tx, swap_rx);
    if (swap_tx) std::swap(slot.tx[0], slot.tx[1]);
    for (auto& blocks : slot.tx) {
      for (auto& b : blocks) {
        if (b.spec.kind != BlockKind::kIdentity) b.spec.channel = map_alias(b.spec.channel);
      }
    }
  }
  if (swap_rx) {
    for (auto& step : out.schedule) step.rx = 3 - step.rx;
  }
  return out;
}

const ColumnRange& EffectiveChannel::column(const std::string& id) const {
  for (const auto& c : columns) {
    if (c.id == id) return c;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown variable " + id);
}

Matrix EffectiveChannel::block(int rx, int slot, const std::string& id) const {
  const auto& c = column(id);
  return h.block(row_offset(rx, slot), c.offset, n, c.length);
}

EffectiveChannel effective_channel(const ChannelSet& channels, const CodeScheme& scheme) {
  if (channels.m() != scheme.m || channels.n() != scheme.n) {
    throw Error(ErrorCode::kDimensionMismatch, "scheme and channel dimensions differ");
  }
  EffectiveChannel eff;
  eff.n = scheme.n;
  eff.slot_count = static_cast<int>(scheme.slots.size());
  std::map<std::string, std::size_t> index;
  int offset = 0;
  for (const auto& v : scheme.variables) {
    index[v.id] = eff.columns.size();
    eff.columns.push_back({v.id, offset, v.length, v.tx});
    offset += v.length;
  }
  eff.h = Matrix::Zero(2 * eff.slot_count * eff.n, offset);

  for (int t = 0; t < eff.slot_count; ++t) {
    const auto& slot = scheme.slots[t];
    for (int i = 1; i <= 2; ++i) {
      Matrix x = Matrix::Zero(scheme.m, offset);
      for (const auto& b : slot.tx[i - 1]) {
        auto it = index.find(b.variable);
        if (it == index.end()) malformed("precoder references unknown variable " + b.variable);
        const auto& col = eff.columns[it->second];
        if (b.spec.count != col.length) malformed("block width of " + col.id + " differs from its length");
        if (col.length == 0) continue;
        x.middleCols(col.offset, col.length) += materialize(b.spec, channels);
      }
      for (int j = 1; j <= 2; ++j) {
        if (!slot.topology.on(j, i)) continue;
        eff.h.middleRows(eff.row_offset(j, t), eff.n) += channels.link(j, i) * x;
      }
    }
  }
  return eff;
}

Vector sic_decode(const EffectiveChannel& eff, const std::vector<SicStep>& schedule,
                  const Vector& x_true, double tol) {
  if (x_true.size() != eff.h.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "x_true length differs from column count");
  }
  const Vector y = eff.h * x_true;
  Vector decoded = Vector::Zero(eff.h.cols());

  struct GroupEstimate {
    std::vector<std::string> members;
    std::vector<Matrix> coupling;  // T_i with K_i = K_first T_i, i >= 1
    Vector value;                  // x_first + sum T_i x_i
  };
  std::array<std::map<std::string, Vector>, 2> known;
  std::array<std::map<std::string, GroupEstimate>, 2> groups;

  const auto infeasible = [](const std::string& detail) {
    throw Error(ErrorCode::kInfeasible,
                "scheme infeasible for this channel realization (" + detail + ")");
  };

  for (const auto& step : schedule) {
    std::vector<int> rows;
    for (int t : step.slots) {
      const int r0 = eff.row_offset(step.rx, t);
      for (int k = 0; k < eff.n; ++k) rows.push_back(r0 + k);
    }
    const Matrix hr = eff.h(rows, Eigen::all);
    Vector yr = y(rows);
    const double scale = std::max(1.0, hr.size() ? hr.cwiseAbs().maxCoeff() : 0.0);
    const auto cols = [&](const std::string& id) {
      const auto& c = eff.column(id);
      return hr.middleCols(c.offset, c.length);
    };
    auto& kv = known[step.rx - 1];
    auto& kg = groups[step.rx - 1];
    std::set<std::string> accounted;

    for (const auto& id : step.cancel) {
      auto it = kv.find(id);
      if (it == kv.end()) malformed("cancelled variable " + id + " unknown at receiver");
      yr -= cols(id) * it->second;
      accounted.insert(id);
    }
    for (const auto& name : step.cancel_groups) {
      auto it = kg.find(name);
      if (it == kg.end()) malformed("cancelled group " + name + " unknown at receiver");
      const auto& est = it->second;
      const Matrix k1 = cols(est.members[0]);
      for (std::size_t i = 1; i < est.members.size(); ++i) {
        if ((cols(est.members[i]) - k1 * est.coupling[i - 1]).norm() >
            kStructureTolerance * scale) {
          infeasible("group " + name + " is not aligned in these slots");
        }
      }
      yr -= k1 * est.value;
      for (const auto& id : est.members) accounted.insert(id);
    }

    // Unknown blocks: solved and nuisance variables, then one block per group.
    std::vector<Matrix> blocks;
    std::vector<std::pair<std::string, int>> layout;  // variable id (or group) and width
    for (const auto& list : {step.solve, step.nuisance}) {
      for (const auto& id : list) {
        blocks.push_back(cols(id));
        layout.emplace_back(id, static_cast<int>(blocks.back().cols()));
        accounted.insert(id);
      }
    }
    std::vector<GroupEstimate> formed;
    for (const auto& g : step.groups) {
      GroupEstimate est;
      est.members = g.members;
      const Matrix k1 = cols(g.members[0]);
      if (k1.cols() > 0 && linalg::rank(k1) < k1.cols()) infeasible("group " + g.name + " collapses");
      for (std::size_t i = 1; i < g.members.size(); ++i) {
        const Matrix ki = cols(g.members[i]);
        Matrix t = k1.cols() > 0 ? Matrix(k1.colPivHouseholderQr().solve(ki))
                                 : Matrix::Zero(0, ki.cols());
        if ((k1 * t - ki).norm() > kStructureTolerance * scale) {
          infeasible("group " + g.name + " is not aligned");
        }
        est.coupling.push_back(std::move(t));
      }
      blocks.push_back(k1);
      layout.emplace_back("#" + g.name, static_cast<int>(k1.cols()));
      for (const auto& id : g.members) accounted.insert(id);
      formed.push_back(std::move(est));
    }

    for (const auto& c : eff.columns) {
      if (accounted.count(c.id) || c.length == 0) continue;
      if (hr.middleCols(c.offset, c.length).norm() > kStructureTolerance * scale) {
        infeasible("unaccounted interference from " + c.id);
      }
    }

    int width = 0;
    for (const auto& b : blocks) width += static_cast<int>(b.cols());
    Matrix a(hr.rows(), width);
    int at = 0;
    for (const auto& b : blocks) {
      a.middleCols(at, b.cols()) = b;
      at += static_cast<int>(b.cols());
    }
    if (linalg::rank(a) < width) infeasible("rank deficient step at Rx" + std::to_string(step.rx));
    Vector sol;
    try {
      sol = linalg::solve_exact(a, yr, tol);
    } catch (const Error& e) {
      infeasible(e.what());
    }

    at = 0;
    std::size_t group_index = 0;
    const std::size_t solve_count = step.solve.size();
    for (std::size_t b = 0; b < layout.size(); ++b) {
      const auto& [id, w] = layout[b];
      const Vector part = sol.segment(at, w);
      at += w;
      if (id.front() == '#') {
        auto& est = formed[group_index];
        est.value = part;
        kg[step.groups[group_index].name] = std::move(est);
        ++group_index;
        continue;
      }
      kv[id] = part;
      if (b < solve_count) decoded.segment(eff.column(id).offset, w) = part;
    }
  }
  return decoded;
}

VerifyResult verify_decodability(const ChannelSet& channels, const CodeScheme& scheme, int trials,
                                 std::uint64_t seed, double tol) {
  VerifyResult result;
  if (trials < 1) {
    result.failure = "trials must be at least 1";
    return result;
  }
  try {
    validate(scheme);
    const EffectiveChannel eff = effective_channel(channels, scheme);
    std::mt19937_64 rng(seed ^ 0xD1CEB0A7ULL);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int trial = 0; trial < trials; ++trial) {
      Vector x(eff.h.cols());
      for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = normal(rng);
      const Vector xhat = sic_decode(eff, scheme.schedule, x, tol);
      const double ref = std::max(x.norm(), 1e-300);
      for (const auto& c : eff.columns) {
        if (c.length == 0) continue;
        const double err =
            (xhat.segment(c.offset, c.length) - x.segment(c.offset, c.length)).norm() / ref;
        result.max_relative_error = std::max(result.max_relative_error, err);
        if (err > tol) {
          result.failure = "variable " + c.id + " decoded with relative error " +
                           std::to_string(err);
          return result;
        }
      }
    }
  } catch (const std::exception& e) {
    result.failure = e.what();
    return result;
  }
  result.ok = true;
  result.achieved_dof = scheme.total_length();
  return result;
}

}  // namespace bxc
