#pragma once

// Closed-form sum-DoF expressions for the bursty X channel. Functions taking
// (r, p) return values normalized by max(M, N); functions taking (M, N, p)
// return unnormalized sums.

#include <optional>
#include <string_view>

namespace bxc {

enum class Regime {
  kHalf,  // r <= 1/2
  kMid,   // r > 1/2 and (r <= 2/3 or p <= 1/2)
  kOpen,  // r > 2/3 and p > 1/2: only bounds are known
};

std::string_view regime_tag(Regime r);

/// Boundaries are closed on the lower branch; a 1e-12 slack absorbs
/// rounding in r computed from integers.
Regime classify(double r, double p);
/// Exact version using integer antenna counts.
Regime classify(int m, int n, double p);

/// 2rp(1+q) for r <= 1/2, else 2r(p^2+2pq^2)+2p^2q. Throws
/// ErrorCode::kOutsideRegime ("outside characterized regime") in the open regime.
double theorem1_dof(double r, double p);

double eta_ub1(double r, double p);
double eta_ub2(double r, double p);
double eta_lb(double r, double p);

/// 1 - eta_lb / min(eta_ub1, eta_ub2).
double bound_gap(double r, double p);

enum class CompositeBranch { kNullOnly, kPairs, kFiveSlotSparse, kFiveSlotDense };

/// Which achievability expression applies at (M, N, p), after orienting so
/// the larger side plays M.
CompositeBranch composite_branch(int m, int n, double p);

/// Achievable sum DoF of the topology-scheduling schemes:
///   2N <= M          : 2Np(1+q)
///   3N <= 2M         : 2N(p^2+2pq^2) + 2Mp^2q
///   3N > 2M, p <= 1/2: same expression
///   3N > 2M, p > 1/2 : 4Npq^3 + p^2q(6N+2M) + (p^4-p^3q)(4/3)M
/// with M >= N; for M < N the two are exchanged.
double composite_achievable(int m, int n, double p);

/// Pairwise-rate outer bound: Np(1+q), N(p^2+2pq^2)+Mp^2q, Mp(1+q) or
/// M(p^2+2pq^2)+Np^2q depending on the antenna case.
double appendix_a_bound(int m, int n, double p);

/// Three-rate outer bound: p^2 M + 3pqN for N <= M, p^2 N + 3pqM otherwise.
double appendix_b_bound(int m, int n, double p);

/// Sum over the 16 topologies of probability times the variable count of a
/// one-slot code (constructive, not claimed optimal for r > 1/2).
double per_topology_baseline(int m, int n, double p);

struct GapResult {
  double r = 0.0;
  double p = 0.0;
  double gap = 0.0;
};

/// Grid search of bound_gap over r in (2/3, 1], p in (1/2, 1]. The grid runs
/// down from 1 in steps of `step`; the first maximum found wins.
GapResult max_gap_search(double step);

struct DofProfile {
  int m = 0;
  int n = 0;
  double r = 0.0;
  double p = 0.0;
  Regime regime = Regime::kHalf;
  std::optional<double> thm1;  // normalized; absent in the open regime
  double eta_ub1 = 0.0;
  double eta_ub2 = 0.0;
  double eta_lb = 0.0;
  double baseline = 0.0;       // normalized per-topology baseline
  double composite = 0.0;      // normalized composite_achievable
  double appendix_a = 0.0;     // unnormalized
  double appendix_b = 0.0;     // unnormalized
};

DofProfile dof_profile(int m, int n, double p);

}  // namespace bxc
