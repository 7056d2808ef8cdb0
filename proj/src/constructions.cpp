#include "bxc/constructions.hpp"

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "bxc/error.hpp"

namespace bxc {
namespace {

// Small helper so the constructions below read like their layout tables.
class Builder {
 public:
  Builder(std::string name, const Dimensions& dims) {
    s_.name = std::move(name);
    s_.m = dims.m;
    s_.n = dims.n;
  }

  // Adds a variable; zero-length ones are kept unless `skip_empty` is set.
  bool var(const std::string& id, int length, int tx, bool skip_empty = false) {
    if (length == 0 && skip_empty) return false;
    s_.variables.push_back({id, length, tx});
    return true;
  }
  int slot(Topology t) {
    s_.slots.push_back({t, {}});
    return static_cast<int>(s_.slots.size()) - 1;
  }
  void send(int slot, const std::string& id, BlockSpec spec) {
    const Variable* v = s_.find(id);
    if (v == nullptr) return;  // skipped as empty
    spec.count = v->length;
    s_.slots[slot].tx[v->tx - 1].push_back({id, spec});
  }
  void step(SicStep st) {
    prune(st.solve);
    prune(st.nuisance);
    prune(st.cancel);
    std::vector<AlignedGroup> kept;
    for (auto& g : st.groups) {
      prune(g.members);
      if (g.members.size() >= 2) kept.push_back(std::move(g));
    }
    st.groups = std::move(kept);
    if (st.solve.empty() && st.nuisance.empty() && st.groups.empty()) return;
    s_.schedule.push_back(std::move(st));
  }
  CodeScheme done() { return std::move(s_); }

 private:
  void prune(std::vector<std::string>& ids) const {
    std::erase_if(ids, [&](const std::string& id) { return s_.find(id) == nullptr; });
  }
  CodeScheme s_;
};

bool at_most_half(const Dimensions& d) { return 2 * d.min_antennas() <= d.max_antennas(); }
bool above_two_thirds(const Dimensions& d) { return 3 * d.min_antennas() > 2 * d.max_antennas(); }

CodeScheme empty_code(const Dimensions& dims) {
  Builder b("empty", dims);
  b.slot(topo::kEmpty);
  return b.done();
}

CodeScheme s11_code(const Dimensions& dims) {
  Builder b("s11", dims);
  const int t = b.slot(topo::kS11);
  b.var("x", dims.min_antennas(), 1, true);
  b.send(t, "x", BlockSpec::identity(0, 0));
  b.step({.stage = 1, .rx = 1, .slots = {t}, .solve = {"x"}});
  return b.done();
}

CodeScheme par_direct_code(const Dimensions& dims) {
  Builder b("par_direct", dims);
  const int t = b.slot(topo::kParDirect);
  const int k = dims.min_antennas();
  b.var("x1", k, 1, true);
  b.var("x2", k, 2, true);
  b.send(t, "x1", BlockSpec::identity(0, 0));
  b.send(t, "x2", BlockSpec::identity(0, 0));
  b.step({.stage = 1, .rx = 1, .slots = {t}, .solve = {"x1"}});
  b.step({.stage = 1, .rx = 2, .slots = {t}, .solve = {"x2"}});
  return b.done();
}

// Both transmitters talk to Rx1.
CodeScheme mac1_code(const Dimensions& dims) {
  Builder b("mac1", dims);
  const int t = b.slot(topo::kMac1);
  const int k1 = std::min(dims.m, dims.n);
  const int k2 = std::min(dims.m, dims.n - k1);
  b.var("x1", k1, 1, true);
  b.var("x2", k2, 2, true);
  b.send(t, "x1", BlockSpec::identity(0, 0));
  b.send(t, "x2", BlockSpec::identity(0, 0));
  b.step({.stage = 1, .rx = 1, .slots = {t}, .solve = {"x1", "x2"}});
  return b.done();
}

// Tx1 talks to both receivers.
CodeScheme bc1_code(const Dimensions& dims) {
  Builder b("bc1", dims);
  const int t = b.slot(topo::kBc1);
  const int m = dims.m;
  const int n = dims.n;
  if (m <= n) {
    b.var("x", m, 1, true);
    b.send(t, "x", BlockSpec::identity(0, 0));
    b.step({.stage = 1, .rx = 1, .slots = {t}, .solve = {"x"}});
    return b.done();
  }
  const int s = std::min(m - n, n);
  b.var("u1", s, 1, true);     // hidden from Rx2
  b.var("u2", s, 1, true);     // hidden from Rx1
  b.var("c", n - s, 1, true);  // heard by both
  b.send(t, "u1", BlockSpec::null(3, 0));
  b.send(t, "u2", BlockSpec::null(1, 0));
  b.send(t, "c", BlockSpec::identity(0, 0));
  b.step({.stage = 1, .rx = 1, .slots = {t}, .solve = {"u1", "c"}});
  b.step({.stage = 1, .rx = 2, .slots = {t}, .solve = {"u2"}, .nuisance = {"c"}});
  return b.done();
}

// Link 21 off: Tx2 reaches both receivers, Tx1 only Rx1.
CodeScheme z1_code(const Dimensions& dims) {
  Builder b("z1", dims);
  const int t = b.slot(topo::kZ1);
  const int m = dims.m;
  const int n = dims.n;
  if (m >= n) {
    const int k = std::min(m - n, n);
    b.var("x", k, 1, true);      // Tx1 -> Rx1
    b.var("w", k, 2, true);      // Tx2 -> Rx2, nulled at Rx1
    b.var("v", n - k, 2, true);  // Tx2 -> Rx2, heard at Rx1
    b.send(t, "x", BlockSpec::identity(0, 0));
    b.send(t, "w", BlockSpec::null(2, 0));
    b.send(t, "v", BlockSpec::identity(0, 0));
    b.step({.stage = 1, .rx = 2, .slots = {t}, .solve = {"w", "v"}});
    b.step({.stage = 1, .rx = 1, .slots = {t}, .solve = {"x"}, .nuisance = {"v"}});
  } else {
    b.var("x", std::min(m, n - m), 1, true);
    b.var("v", m, 2, true);
    b.send(t, "x", BlockSpec::identity(0, 0));
    b.send(t, "v", BlockSpec::identity(0, 0));
    b.step({.stage = 1, .rx = 2, .slots = {t}, .solve = {"v"}});
    b.step({.stage = 1, .rx = 1, .slots = {t}, .solve = {"x"}, .nuisance = {"v"}});
  }
  return b.done();
}

struct FLayout {
  int nulled = 0;  // per receiver, split over the two transmitters
  int aligned = 0; // streams per message in the aligned part
  int common1 = 0;
  int common2 = 0;
  int total() const { return 2 * nulled + 4 * aligned + common1 + common2; }
};

FLayout f_layout(int m, int n) {
  FLayout best;
  if (m > n) {
    best.nulled = std::min(n, 2 * (m - n));
    const int rest = n - best.nulled;
    best.aligned = rest / 3;
    const int c = rest - 3 * best.aligned;
    best.common1 = (c + 1) / 2;
    best.common2 = c / 2;
    return best;
  }
  // No null space: pick the aligned width that leaves the most room.
  const int amax = std::max(0, std::min({2 * m - n, m / 2, n / 3}));
  for (int a = 0; a <= amax; ++a) {
    const int room = n - 3 * a;
    const int c1 = std::min(m - 2 * a, (room + 1) / 2);
    const int c2 = std::min(m - 2 * a, room - c1);
    FLayout cand{0, a, c1, c2};
    if (cand.total() > best.total()) best = cand;
  }
  return best;
}

CodeScheme f_code(const Dimensions& dims) {
  Builder b("f", dims);
  const int t = b.slot(topo::kF);
  const FLayout l = f_layout(dims.m, dims.n);
  const int hi = (l.nulled + 1) / 2;
  const int lo = l.nulled / 2;
  // n<rx><tx>: private streams nulled at the other receiver.
  b.var("n11", hi, 1, true);
  b.var("n12", lo, 2, true);
  b.var("n21", lo, 1, true);
  b.var("n22", hi, 2, true);
  // u: for Rx1, aligned at Rx2. w: for Rx2, aligned at Rx1.
  b.var("u1", l.aligned, 1, true);
  b.var("u2", l.aligned, 2, true);
  b.var("w1", l.aligned, 1, true);
  b.var("w2", l.aligned, 2, true);
  b.var("c1", l.common1, 1, true);
  b.var("c2", l.common2, 2, true);
  b.send(t, "n11", BlockSpec::null(3, 0));
  b.send(t, "n12", BlockSpec::null(4, 0));
  b.send(t, "n21", BlockSpec::null(1, 0));
  b.send(t, "n22", BlockSpec::null(2, 0));
  b.send(t, "u1", BlockSpec::joint(3, 0));
  b.send(t, "u2", BlockSpec::joint(4, 0));
  b.send(t, "w1", BlockSpec::joint(1, 0));
  b.send(t, "w2", BlockSpec::joint(2, 0));
  b.send(t, "c1", BlockSpec::identity(0, 0));
  b.send(t, "c2", BlockSpec::identity(0, 0));
  b.step({.stage = 1,
          .rx = 1,
          .slots = {t},
          .solve = {"n11", "n12", "u1", "u2", "c1", "c2"},
          .groups = {{"L(w1,w2)", {"w1", "w2"}}}});
  b.step({.stage = 1,
          .rx = 2,
          .slots = {t},
          .solve = {"n21", "n22", "w1", "w2"},
          .nuisance = {"c1", "c2"},
          .groups = {{"L(u1,u2)", {"u1", "u2"}}}});
  return b.done();
}

CodeScheme named(CodeScheme s, std::string_view name) {
  s.name = std::string(name);
  return s;
}

CodeScheme single_code(Topology t, const Dimensions& dims) {
  dims.validate();
  // Build one representative per relabeling class and map it onto `t`.
  struct Base {
    Topology topology;
    CodeScheme (*build)(const Dimensions&);
  };
  static const Base bases[] = {
      {topo::kEmpty, empty_code},      {topo::kS11, s11_code}, {topo::kParDirect, par_direct_code},
      {topo::kMac1, mac1_code},        {topo::kBc1, bc1_code}, {topo::kZ1, z1_code},
      {topo::kF, f_code},
  };
  for (const auto& base : bases) {
    for (int swap = 0; swap < 4; ++swap) {
      const bool stx = swap & 1;
      const bool srx = swap & 2;
      CodeScheme s = base.build(dims);
      if (stx || srx) s = relabel(s, stx, srx, s.name);
      if (s.slots[0].topology == t) return named(std::move(s), t.name());
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown topology");
}

}  // namespace

bool standalone_f_supported(const Dimensions& dims) {
  return at_most_half(dims) || (dims.m == dims.n && dims.m % 3 == 0);
}

CodeScheme build_single_topology_code(Topology t, const Dimensions& dims) {
  dims.validate();
  if (t == topo::kF && !standalone_f_supported(dims)) {
    throw Error(ErrorCode::kUnsupportedShape, "standalone f-code unsupported for this shape");
  }
  return single_code(t, dims);
}

CodeScheme build_fallback_code(Topology t, const Dimensions& dims) {
  CodeScheme s = single_code(t, dims);
  if (t == topo::kF && !standalone_f_supported(dims)) s.name = "f_fallback";
  return s;
}

CodeScheme build_z1z2_code(const Dimensions& dims, const std::string& pair) {
  dims.validate();
  if (pair != "z1z2" && pair != "z3z4") {
    throw Error(ErrorCode::kInvalidArgument, "pair must be z1z2 or z3z4");
  }
  if (at_most_half(dims)) {
    throw Error(ErrorCode::kOutsideHypothesis, "shape outside lemma hypothesis");
  }
  const int m = dims.m;
  const int n = dims.n;
  Builder b("z1z2", dims);
  const int t1 = b.slot(topo::kZ1);
  const int t2 = b.slot(topo::kZ2);
  if (m >= n) {
    b.var("a", n, 1);
    b.var("b", m - n, 2);
    b.var("c", 2 * n - m, 2);
    b.var("d", n, 1);
    b.var("e", m - n, 2);
    b.send(t1, "a", BlockSpec::identity(0, n));
    b.send(t1, "b", BlockSpec::null(2, m - n));
    b.send(t1, "c", BlockSpec::identity(0, 2 * n - m));
    b.send(t2, "d", BlockSpec::identity(0, n));
    b.send(t2, "e", BlockSpec::null(4, m - n));
    b.send(t2, "c", BlockSpec::identity(0, 2 * n - m));
    b.step({.stage = 1, .rx = 2, .slots = {t1}, .solve = {"b", "c"}});
    b.step({.stage = 1, .rx = 1, .slots = {t2}, .solve = {"e"}, .nuisance = {"c"}});
    b.step({.stage = 2, .rx = 1, .slots = {t1}, .solve = {"a"}, .cancel = {"c"}});
    b.step({.stage = 2, .rx = 2, .slots = {t2}, .solve = {"d"}, .cancel = {"c"}});
  } else {
    b.var("a", m, 1);
    b.var("b", n - m, 2);
    b.var("c", 2 * m - n, 2);
    b.var("d", m, 1);
    b.var("e", n - m, 2);
    b.send(t1, "a", BlockSpec::identity(0, m));
    b.send(t1, "b", BlockSpec::identity(0, n - m));
    b.send(t1, "c", BlockSpec::identity(n - m, 2 * m - n));
    b.send(t2, "d", BlockSpec::identity(0, m));
    b.send(t2, "e", BlockSpec::identity(0, n - m));
    b.send(t2, "c", BlockSpec::identity(n - m, 2 * m - n));
    b.step({.stage = 1, .rx = 2, .slots = {t1}, .solve = {"b", "c"}});
    b.step({.stage = 1, .rx = 1, .slots = {t2}, .solve = {"e"}, .nuisance = {"c"}});
    b.step({.stage = 2, .rx = 1, .slots = {t1}, .solve = {"a"}, .nuisance = {"b"}, .cancel = {"c"}});
    b.step({.stage = 2, .rx = 2, .slots = {t2}, .solve = {"d"}, .nuisance = {"e"}, .cancel = {"c"}});
  }
  CodeScheme s = b.done();
  if (pair == "z3z4") return relabel(s, true, false, "z3z4");
  return s;
}

CodeScheme build_zf_code(const Dimensions& dims) {
  dims.validate();
  if (!above_two_thirds(dims)) {
    throw Error(ErrorCode::kOutsideHypothesis, "shape outside lemma hypothesis");
  }
  const int m = dims.m;
  const int n = dims.n;
  const bool wide = m >= n;
  const int full = wide ? n : m;             // a, b, h, i
  const int shared = wide ? 2 * n - m : 2 * m - n;  // c, d, j, k
  const int spare = wide ? m - n : n - m;    // e, f, g, l, m, n

  // Aligned blocks: leading pseudo-inverse columns for wide transmitters,
  // joint null-space blocks otherwise.
  const auto g = [&](int k) {
    return wide ? BlockSpec::align(k, shared) : BlockSpec::joint(k, shared);
  };
  // Extra streams: nulled at the cross receiver for wide transmitters,
  // leading antennas otherwise.
  const auto x = [&](int k) {
    return wide ? BlockSpec::null(k, spare) : BlockSpec::identity(0, spare);
  };

  Builder b("zf", dims);
  const int z1 = b.slot(topo::kZ1);
  const int z2 = b.slot(topo::kZ2);
  const int z3 = b.slot(topo::kZ3);
  const int z4 = b.slot(topo::kZ4);
  const int f = b.slot(topo::kF);
  for (const char* id : {"a", "b"}) b.var(id, full, 1);
  for (const char* id : {"c", "d"}) b.var(id, shared, 1);
  for (const char* id : {"e", "f", "g"}) b.var(id, spare, 1);
  for (const char* id : {"h", "i"}) b.var(id, full, 2);
  for (const char* id : {"j", "k"}) b.var(id, shared, 2);
  for (const char* id : {"l", "m", "n"}) b.var(id, spare, 2);

  b.send(z1, "a", BlockSpec::identity(0, full));
  b.send(z1, "c", g(1));
  b.send(z1, "j", g(2));
  b.send(z1, "l", x(2));

  b.send(z2, "b", BlockSpec::identity(0, full));
  b.send(z2, "d", g(3));
  b.send(z2, "k", g(4));
  b.send(z2, "m", x(4));

  b.send(z3, "d", g(3));
  b.send(z3, "f", x(3));
  b.send(z3, "i", BlockSpec::identity(0, full));
  b.send(z3, "k", g(4));

  b.send(z4, "c", g(1));
  b.send(z4, "e", x(1));
  b.send(z4, "h", BlockSpec::identity(0, full));
  b.send(z4, "j", g(2));

  b.send(f, "c", g(1));
  b.send(f, "d", g(3));
  b.send(f, "g", x(3));
  b.send(f, "j", g(2));
  b.send(f, "k", g(4));
  b.send(f, "n", x(2));

  using V = std::vector<std::string>;
  const auto when_tall = [&](V ids) { return wide ? V{} : ids; };

  b.step({.stage = 1, .rx = 2, .slots = {z1}, .solve = {"j", "l"}});
  b.step({.stage = 1, .rx = 1, .slots = {z2}, .solve = {"k", "m"}});
  b.step({.stage = 1, .rx = 1, .slots = {z3}, .solve = {"d", "f"}});
  b.step({.stage = 1, .rx = 2, .slots = {z4}, .solve = {"c", "e"}});

  b.step({.stage = 2,
          .rx = 1,
          .slots = {f},
          .solve = {"g"},
          .nuisance = when_tall({"n"}),
          .groups = {{"L(c,j)", {"c", "j"}}},
          .cancel = {"d", "k"}});
  b.step({.stage = 2,
          .rx = 2,
          .slots = {f},
          .solve = {"n"},
          .nuisance = when_tall({"g"}),
          .groups = {{"L(d,k)", {"d", "k"}}},
          .cancel = {"c", "j"}});

  b.step({.stage = 3, .rx = 1, .slots = {z1}, .solve = {"a"}, .nuisance = when_tall({"l"}),
          .cancel_groups = {"L(c,j)"}});
  b.step({.stage = 3, .rx = 2, .slots = {z2}, .solve = {"b"}, .nuisance = when_tall({"m"}),
          .cancel_groups = {"L(d,k)"}});
  b.step({.stage = 3, .rx = 2, .slots = {z3}, .solve = {"i"}, .nuisance = when_tall({"f"}),
          .cancel_groups = {"L(d,k)"}});
  b.step({.stage = 3, .rx = 1, .slots = {z4}, .solve = {"h"}, .nuisance = when_tall({"e"}),
          .cancel_groups = {"L(c,j)"}});
  return b.done();
}

}  // namespace bxc
