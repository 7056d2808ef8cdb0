#include "bxc/super_precoder.hpp"

#include <string>

#include "bxc/error.hpp"

namespace bxc {
namespace {

enum Row { kRowZ1 = 0, kRowZ2 = 1, kRowZ3 = 2, kRowZ4 = 3, kRowF = 4 };

BlockColumn column(std::string name, std::vector<Variable> parts, std::vector<BlockSpec> specs,
                   std::initializer_list<int> rows) {
  BlockColumn c{std::move(name), std::move(parts), {}};
  for (std::size_t i = 0; i < specs.size(); ++i) specs[i].count = c.parts[i].length;
  for (int r : rows) c.cells[r] = specs;
  return c;
}

void require_wide(const Dimensions& dims) {
  dims.validate();
  if (dims.m < dims.n) {
    throw Error(ErrorCode::kOutsideHypothesis, "shape outside lemma hypothesis (needs M >= N)");
  }
}

SicStep all_rows(int rx, std::vector<std::string> solve, AlignedGroup group) {
  SicStep s;
  s.stage = 1;
  s.rx = rx;
  s.slots = {0, 1, 2, 3, 4};
  s.solve = std::move(solve);
  s.groups = {std::move(group)};
  return s;
}

}  // namespace

int SuperPrecoder::total_length() const {
  int total = 0;
  for (const auto& side : grid) {
    for (const auto& col : side) {
      for (const auto& p : col.parts) total += p.length;
    }
  }
  return total;
}

std::string SuperPrecoder::cell_tag(int tx, int col, int row) const {
  const auto& cell = grid.at(tx - 1).at(col).cells.at(row);
  if (cell.empty()) return "zero";
  std::string out;
  for (const auto& spec : cell) {
    if (!out.empty()) out += "|";
    out += spec.tag();
  }
  return out;
}

CodeScheme SuperPrecoder::to_code_scheme() const {
  CodeScheme s;
  s.name = name;
  s.m = m;
  s.n = n;
  for (const auto& side : grid) {
    for (const auto& col : side) {
      for (const auto& p : col.parts) s.variables.push_back(p);
    }
  }
  for (int r = 0; r < kSuperRows; ++r) {
    Slot slot{rows[r], {}};
    for (int i = 0; i < 2; ++i) {
      for (const auto& col : grid[i]) {
        const auto& cell = col.cells[r];
        if (cell.empty()) continue;
        if (cell.size() != col.parts.size()) {
          throw Error(ErrorCode::kMalformedScheme, "cell arity differs from column parts");
        }
        for (std::size_t k = 0; k < cell.size(); ++k) {
          slot.tx[i].push_back({col.parts[k].id, cell[k]});
        }
      }
    }
    s.slots.push_back(std::move(slot));
  }
  s.schedule = schedule;
  return s;
}

SuperPrecoder build_block_ia_precoder(const Dimensions& dims) {
  require_wide(dims);
  if (2 * dims.n <= dims.m) {
    throw Error(ErrorCode::kOutsideHypothesis, "shape outside lemma hypothesis (needs 2N > M)");
  }
  const int n = dims.n;
  SuperPrecoder sp;
  sp.name = "block_ia";
  sp.m = dims.m;
  sp.n = dims.n;
  const auto I = BlockSpec::identity(0, n);
  auto& a = sp.grid[0];
  a.push_back(column("a1", {{"a1", n, 1}}, {I}, {kRowZ2}));
  a.push_back(column("a2", {{"a2", n, 1}}, {BlockSpec::pinv(1, n)}, {kRowZ1, kRowZ4, kRowF}));
  a.push_back(column("a3", {{"a3", n, 1}}, {I}, {kRowZ1}));
  a.push_back(column("a4", {{"a4", n, 1}}, {BlockSpec::pinv(3, n)}, {kRowZ2, kRowZ3, kRowF}));
  auto& b = sp.grid[1];
  b.push_back(column("b1", {{"b1", n, 2}}, {I}, {kRowZ3}));
  b.push_back(column("b2", {{"b2", n, 2}}, {BlockSpec::pinv(2, n)}, {kRowZ1, kRowZ4, kRowF}));
  b.push_back(column("b3", {{"b3", n, 2}}, {I}, {kRowZ4}));
  b.push_back(column("b4", {{"b4", n, 2}}, {BlockSpec::pinv(4, n)}, {kRowZ2, kRowZ3, kRowF}));

  // Rx1 never hears a1 or b1; a2 and b2 land on the same image there.
  sp.schedule.push_back(all_rows(1, {"a3", "a4", "b3", "b4"}, {"L(a2,b2)", {"a2", "b2"}}));
  sp.schedule.push_back(all_rows(2, {"a1", "a2", "b1", "b2"}, {"L(a4,b4)", {"a4", "b4"}}));
  return sp;
}

SuperPrecoder build_refined_ia_precoder(const Dimensions& dims) {
  require_wide(dims);
  if (3 * dims.n <= 2 * dims.m) {
    throw Error(ErrorCode::kOutsideHypothesis, "shape outside lemma hypothesis (needs 3N > 2M)");
  }
  const int n = dims.n;
  const int g = 2 * dims.n - dims.m;
  const int e = dims.m - dims.n;
  SuperPrecoder sp;
  sp.name = "refined_ia";
  sp.m = dims.m;
  sp.n = dims.n;
  const auto I = BlockSpec::identity(0, n);
  const auto G = [](int k) { return BlockSpec::align(k, 0); };
  const auto phi = [](int k) { return BlockSpec::null(k, 0); };

  auto& a = sp.grid[0];
  a.push_back(column("a1", {{"a1", n, 1}}, {I}, {kRowZ2}));
  a.push_back(column("a2", {{"a2g", g, 1}, {"a2n", e, 1}, {"a2m", e, 1}}, {G(1), phi(1), phi(3)},
                     {kRowZ1, kRowZ4, kRowF}));
  a.push_back(column("a3", {{"a3", n, 1}}, {I}, {kRowZ1}));
  a.push_back(column("a4", {{"a4g", g, 1}, {"a4n", e, 1}}, {G(3), phi(3)},
                     {kRowZ2, kRowZ3, kRowF}));
  auto& b = sp.grid[1];
  b.push_back(column("b1", {{"b1", n, 2}}, {I}, {kRowZ3}));
  b.push_back(column("b2", {{"b2g", g, 2}, {"b2n", e, 2}}, {G(2), phi(2)},
                     {kRowZ1, kRowZ4, kRowF}));
  b.push_back(column("b3", {{"b3", n, 2}}, {I}, {kRowZ4}));
  b.push_back(column("b4", {{"b4g", g, 2}, {"b4n", e, 2}, {"b4m", e, 2}}, {G(4), phi(4), phi(2)},
                     {kRowZ2, kRowZ3, kRowF}));

  sp.schedule.push_back(all_rows(1, {"a2m", "a3", "a4g", "a4n", "b3", "b4g", "b4n"},
                                 {"L(a2g,b2g)", {"a2g", "b2g"}}));
  sp.schedule.push_back(all_rows(2, {"a1", "a2g", "a2n", "b1", "b2g", "b2n", "b4m"},
                                 {"L(a4g,b4g)", {"a4g", "b4g"}}));
  return sp;
}

EffectiveChannel effective_channel(const ChannelSet& channels, const SuperPrecoder& sp) {
  return effective_channel(channels, sp.to_code_scheme());
}

VerifyResult verify_decodability(const ChannelSet& channels, const SuperPrecoder& sp, int trials,
                                 std::uint64_t seed, double tol) {
  return verify_decodability(channels, sp.to_code_scheme(), trials, seed, tol);
}

}  // namespace bxc
