#include "bxc/dof_formulas.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include "bxc/constructions.hpp"
#include "bxc/error.hpp"

namespace bxc {
namespace {

constexpr double kSlack = 1e-12;

void check_rp(double r, double p) {
  if (!(r > 0.0 && r <= 1.0 + kSlack)) throw Error(ErrorCode::kInvalidArgument, "r must lie in (0, 1]");
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "p must lie in [0, 1]");
}

void check_mnp(int m, int n, double p) { Dimensions{m, n, p}.validate(); }

double sq(double x) { return x * x; }

}  // namespace

std::string_view regime_tag(Regime r) {
  switch (r) {
    case Regime::kHalf:
      return "r<=1/2";
    case Regime::kMid:
      return "mid";
    case Regime::kOpen:
      return "open";
  }
  return "?";
}

Regime classify(double r, double p) {
  check_rp(r, p);
  if (r <= 0.5 + kSlack) return Regime::kHalf;
  if (r <= 2.0 / 3.0 + kSlack || p <= 0.5 + kSlack) return Regime::kMid;
  return Regime::kOpen;
}

Regime classify(int m, int n, double p) {
  check_mnp(m, n, p);
  const int lo = std::min(m, n);
  const int hi = std::max(m, n);
  if (2 * lo <= hi) return Regime::kHalf;
  if (3 * lo <= 2 * hi || p <= 0.5) return Regime::kMid;
  return Regime::kOpen;
}

double theorem1_dof(double r, double p) {
  const Regime regime = classify(r, p);
  const double q = 1.0 - p;
  if (regime == Regime::kHalf) return 2 * r * p * (1 + q);
  if (regime == Regime::kOpen) {
    throw Error(ErrorCode::kOutsideRegime, "outside characterized regime");
  }
  return 2 * r * (p * p + 2 * p * q * q) + 2 * p * p * q;
}

double eta_ub1(double r, double p) {
  check_rp(r, p);
  const double q = 1.0 - p;
  return 2 * r * (p * p + 2 * p * q * q) + 2 * p * p * q;
}

double eta_ub2(double r, double p) {
  check_rp(r, p);
  const double q = 1.0 - p;
  return 4 * r * p * q + (4.0 / 3.0) * p * p;
}

double eta_lb(double r, double p) {
  check_rp(r, p);
  const double q = 1.0 - p;
  return r * p * q * (4 * q * q + 6 * p) + 2 * p * p * q +
         (4.0 / 3.0) * (std::pow(p, 4) - std::pow(p, 3) * q);
}

double bound_gap(double r, double p) {
  const double ub = std::min(eta_ub1(r, p), eta_ub2(r, p));
  if (ub <= 0.0) return 0.0;
  return 1.0 - eta_lb(r, p) / ub;
}

CompositeBranch composite_branch(int m, int n, double p) {
  check_mnp(m, n, p);
  const int big = std::max(m, n);
  const int small = std::min(m, n);
  if (2 * small <= big) return CompositeBranch::kNullOnly;
  if (3 * small <= 2 * big) return CompositeBranch::kPairs;
  if (p <= 0.5) return CompositeBranch::kFiveSlotSparse;
  return CompositeBranch::kFiveSlotDense;
}

double composite_achievable(int m, int n, double p) {
  const CompositeBranch branch = composite_branch(m, n, p);
  const double big = std::max(m, n);
  const double small = std::min(m, n);
  const double q = 1.0 - p;
  switch (branch) {
    case CompositeBranch::kNullOnly:
      return 2 * small * p * (1 + q);
    case CompositeBranch::kPairs:
    case CompositeBranch::kFiveSlotSparse:
      return 2 * small * (p * p + 2 * p * q * q) + 2 * big * p * p * q;
    case CompositeBranch::kFiveSlotDense:
      return 4 * small * p * std::pow(q, 3) + p * p * q * (6 * small + 2 * big) +
             (std::pow(p, 4) - std::pow(p, 3) * q) * (4.0 / 3.0) * big;
  }
  return 0.0;
}

double appendix_a_bound(int m, int n, double p) {
  check_mnp(m, n, p);
  const double q = 1.0 - p;
  const double dm = m;
  const double dn = n;
  if (n <= m) {
    if (2 * n <= m) return dn * p * (1 + q);
    return dn * (p * p + 2 * p * q * q) + dm * p * p * q;
  }
  if (2 * m <= n) return dm * p * (1 + q);
  return dm * (p * p + 2 * p * q * q) + dn * p * p * q;
}

double appendix_b_bound(int m, int n, double p) {
  check_mnp(m, n, p);
  const double q = 1.0 - p;
  if (n <= m) return sq(p) * m + 3 * p * q * n;
  return sq(p) * n + 3 * p * q * m;
}

double per_topology_baseline(int m, int n, double p) {
  check_mnp(m, n, p);
  // Variable counts depend only on (m, n); remember them across calls.
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::array<int, topo::kCount>> cache;
  std::array<int, topo::kCount> counts{};
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({m, n});
    if (it == cache.end()) {
      for (const auto t : topo::all()) {
        counts[t.index()] = build_fallback_code(t, {m, n, p}).total_length();
      }
      cache.emplace(std::pair{m, n}, counts);
    } else {
      counts = it->second;
    }
  }
  double total = 0.0;
  for (const auto t : topo::all()) total += topology_probability(t, p) * counts[t.index()];
  return total;
}

GapResult max_gap_search(double step) {
  if (!(step > 0.0 && step <= 0.01)) {
    throw Error(ErrorCode::kInvalidArgument, "grid step must lie in (0, 0.01]");
  }
  GapResult best{1.0, 1.0, -1.0};
  for (int i = 0;; ++i) {
    const double r = 1.0 - i * step;
    if (r <= 2.0 / 3.0) break;
    for (int j = 0;; ++j) {
      const double p = 1.0 - j * step;
      if (p <= 0.5) break;
      const double g = bound_gap(r, p);
      if (g > best.gap) best = {r, p, g};
    }
  }
  return best;
}

DofProfile dof_profile(int m, int n, double p) {
  check_mnp(m, n, p);
  DofProfile d;
  d.m = m;
  d.n = n;
  d.p = p;
  const double big = std::max(m, n);
  d.r = std::min(m, n) / big;
  d.regime = classify(m, n, p);
  if (d.regime != Regime::kOpen) {
    const double q = 1.0 - p;
    d.thm1 = d.regime == Regime::kHalf ? 2 * d.r * p * (1 + q)
                                       : 2 * d.r * (p * p + 2 * p * q * q) + 2 * p * p * q;
  }
  d.eta_ub1 = eta_ub1(d.r, p);
  d.eta_ub2 = eta_ub2(d.r, p);
  d.eta_lb = eta_lb(d.r, p);
  d.baseline = per_topology_baseline(m, n, p) / big;
  d.composite = composite_achievable(m, n, p) / big;
  d.appendix_a = appendix_a_bound(m, n, p);
  d.appendix_b = appendix_b_bound(m, n, p);
  return d;
}

}  // namespace bxc
