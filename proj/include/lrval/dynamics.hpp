#pragma once
// Dynamics layer: Ordering-Lemma deformation sweeps with exact breakpoints,
// the stability corollaries, the matrix-level right<->left filling bijection,
// and scalar diagonal shifts.
//
// A sweep deforms the last tracked part on one side, say nu_s, from its
// value down to 0 and records how the s-strip of the corresponding filling
// decays.  With the deforming part in position s and zeros beyond, the
// breakpoints are read off a mu-generic upper-triangular form (entries
// a_{ij}) of the truncated configuration:
//   beta_0 = initial value, j_0 = s,
//   beta_i = max_{j > j_{i-1}} ( ||a_{jj}|| - ||a_{s,j}|| ),  j_i = the
//   largest maximizer, while beta_i > 0.
// The MU side reduces to the NU side of the mirrored configuration
// (Pi W^T Pi), which swaps the roles of the two partitions and replaces L by
// Pi L^T Pi; invariant partitions are unchanged by that mirror.

#include <optional>
#include <stdexcept>
#include <vector>

#include "extract.hpp"

namespace lrval {

enum class SweepSide { Mu, Nu };

struct Breakpoint {
  Rat beta;
  int j = 0;  // row in which the invariant partition changes next
};

struct SweepSegment {
  Rat beta_hi;       // shape holds for beta in (beta_lo, beta_hi]
  Rat beta_lo;
  StripShape shape;  // deformed strip at a representative parameter
};

struct DeformationTrace {
  SweepSide side = SweepSide::Nu;
  int strip_index = 0;
  std::vector<Breakpoint> breakpoints;  // starts with (initial value, s)
  std::vector<SweepSegment> segments;
  LRFilling at_initial;
  LRFilling at_zero;
  // the configuration needed to evaluate shapes at arbitrary parameters
  RPartition base_partition;  // partition of the fixed side, truncated to s-1 parts + zeros
  ValMatrix deform_target;    // H with deformed product D_{rho(s;beta)} H
};

struct SweepError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// strip shape of inv(D_{rho(s;beta)} H) over inv(D_{rho(s;0)} H); exact.
inline StripShape sweep_shape_at(const RPartition& rho_prefix_s, const ValMatrix& H, int s,
                                 const Rat& beta) {
  const int r = H.r();
  std::vector<Rat> lo_parts(r, Rat(0)), hi_parts(r, Rat(0));
  for (int i = 0; i < s - 1; ++i) lo_parts[i] = hi_parts[i] = rho_prefix_s[i];
  hi_parts[s - 1] = beta;
  const RPartition base = invariant_partition(
      mat_mul(diag_from_partition(RPartition(lo_parts)), H));
  const RPartition deformed = invariant_partition(
      mat_mul(diag_from_partition(RPartition(hi_parts)), H));
  StripShape shape;
  shape.strip_index = s;
  for (int j = 0; j < r; ++j) {
    shape.start.push_back(base[j]);
    shape.len.push_back(deformed[j] - base[j]);
  }
  return shape;
}

}  // namespace detail

// Evaluate the deformed strip of a trace at an arbitrary parameter in
// [0, beta_0]; used by the sampling cross-checks.
inline StripShape sweep_shape(const DeformationTrace& trace, const Rat& beta) {
  return detail::sweep_shape_at(trace.base_partition, trace.deform_target,
                                trace.strip_index, beta);
}

inline DeformationTrace sweep(const GenericForm& L_form, SweepSide side, int strip_index) {
  if (L_form.kind != FormKind::MuNuhatGeneric || !L_form.nu)
    throw std::invalid_argument("sweep: need a mu-nuhat-generic form");
  const int r = L_form.matrix.r();
  const int s = strip_index;
  if (s < 1 || s > r) throw std::invalid_argument("sweep: strip index out of range");

  // Lemma hypothesis: both fillings of the pair have nonnegative parts.
  {
    if (L_form.mu[r - 1] < 0 || (*L_form.nu)[r - 1] < 0)
      throw SweepError("sweep: negative partition parts; normalize with scalar_shift_pair");
    const LRFilling right = right_filling_of_form(L_form);
    const LRFilling left = left_filling_of_form(L_form);
    for (const LRFilling* F : {&right, &left})
      for (int i = 1; i <= r; ++i)
        for (int j = i; j <= r; ++j)
          if (F->part(i, j) < 0)
            throw SweepError("sweep: negative filling parts; normalize with scalar_shift_pair");
  }

  // Reduce both sides to the NU case: rho = deforming-side partition,
  // H = the fixed factor of the deformed product D_{rho(s;beta)} H.
  RPartition rho;
  ValMatrix H;
  if (side == SweepSide::Nu) {
    // Pi (D_mu L D_nuhat(s;beta))^T Pi = D_{nu(s;beta)} (Pi L^T Pi) D_muhat
    rho = *L_form.nu;
    H = mat_mul(mat_mul(reversal_permutation(r), mat_mul(transpose(L_form.matrix),
                                                         reversal_permutation(r))),
                diag_from_partition_hat(L_form.mu));
  } else {
    rho = L_form.mu;
    H = mat_mul(L_form.matrix, diag_from_partition_hat(*L_form.nu));
  }

  DeformationTrace trace;
  trace.side = side;
  trace.strip_index = s;
  trace.base_partition = rho;
  trace.deform_target = H;

  const Rat beta0 = rho[s - 1];
  if (beta0 == 0) return trace;  // strip of length 0: empty trace
  if (beta0 < 0) throw SweepError("sweep: deforming part is negative");

  // mu-generic data of the truncated configuration (zeros beyond position s)
  std::vector<Rat> trunc(r, Rat(0));
  for (int i = 0; i < s; ++i) trunc[i] = rho[i];
  const RPartition rho_trunc(trunc);
  const GenericForm NG = to_mu_generic(diag_from_partition(rho_trunc), H, L_form.seed);
  std::vector<Valuation> diag_vals(r + 1), row_vals(r + 1);
  for (int j = 1; j <= r; ++j) {
    diag_vals[j] = valuation(NG.matrix.at(j - 1, j - 1));
    row_vals[j] = valuation(NG.matrix.at(s - 1, j - 1));
  }

  // breakpoints per the beta_i / j_i formulas
  trace.breakpoints.push_back({beta0, s});
  int j_prev = s;
  Rat beta_prev = beta0;
  while (true) {
    bool found = false;
    Rat best(0);
    int best_j = 0;
    for (int j = j_prev + 1; j <= r; ++j) {
      if (diag_vals[j].infinite || row_vals[j].infinite) continue;
      const Rat cand = diag_vals[j].value - row_vals[j].value;
      if (!found || cand > best || (cand == best)) {
        // ties resolve to the largest j: strictly-later j with equal value wins
        if (!found || cand >= best) {
          best = cand;
          best_j = j;
          found = true;
        }
      }
    }
    if (!found || best <= 0) break;
    if (best > beta_prev)
      throw InternalInconsistencyError("sweep: breakpoint sequence not decreasing");
    trace.breakpoints.push_back({best, best_j});
    beta_prev = best;
    j_prev = best_j;
  }

  // per-interval shapes at representative parameters (interval midpoints)
  for (size_t k = 0; k < trace.breakpoints.size(); ++k) {
    const Rat hi = trace.breakpoints[k].beta;
    const Rat lo = (k + 1 < trace.breakpoints.size()) ? trace.breakpoints[k + 1].beta : Rat(0);
    SweepSegment seg;
    seg.beta_hi = hi;
    seg.beta_lo = lo;
    seg.shape = detail::sweep_shape_at(rho, H, s, (hi + lo) / 2);
    trace.segments.push_back(std::move(seg));
  }

  // endpoint fillings: the filling of the truncated configuration with the
  // deforming part at beta0 resp. 0 (tail strips zero)
  auto endpoint_filling = [&](const Rat& beta) {
    std::vector<RPartition> seq;
    for (int m = 0; m <= r; ++m) {
      std::vector<Rat> parts(r, Rat(0));
      const int n = std::min(m, s);
      for (int i = 0; i < n; ++i) parts[i] = rho[i];
      if (m >= s) parts[s - 1] = beta;
      seq.push_back(invariant_partition(
          mat_mul(diag_from_partition(RPartition(parts)), H)));
    }
    return filling_from_sequence(seq);
  };
  trace.at_initial = endpoint_filling(beta0);
  trace.at_zero = endpoint_filling(Rat(0));
  return trace;
}

// ---------------------------------------------------------------------------
// Stability corollaries
// ---------------------------------------------------------------------------

// Cor same-same: truncating nu after position sigma and replacing the next
// part by alpha (0 < alpha <= nu_{sigma+1}) leaves strips 1..sigma of the
// right filling unchanged.
inline bool stability_check_same(const GenericForm& L_form, int sigma, const Rat& alpha) {
  if (L_form.kind != FormKind::MuNuhatGeneric || !L_form.nu)
    throw std::invalid_argument("stability_check_same: need a mu-nuhat-generic form");
  const int r = L_form.matrix.r();
  const RPartition& nu = *L_form.nu;
  if (sigma < 0 || sigma >= r) throw std::invalid_argument("stability_check_same: bad sigma");
  if (!(alpha > 0 && alpha <= nu[sigma]))
    throw std::invalid_argument("stability_check_same: need 0 < alpha <= nu_{sigma+1}");

  const LRFilling F1 = right_filling_of_form(L_form);

  std::vector<Rat> star(r, Rat(0));
  for (int i = 0; i < sigma; ++i) star[i] = nu[i];
  star[sigma] = alpha;
  const ValMatrix Nstar =
      mat_mul(L_form.matrix, diag_from_partition_hat(RPartition(star)));
  const LRFilling F2 =
      right_filling(diag_from_partition(L_form.mu), Nstar, L_form.seed + 1);

  for (int i = 1; i <= sigma; ++i)
    for (int j = i; j <= r; ++j)
      if (F1.part(i, j) != F2.part(i, j)) return false;
  return true;
}

// Cor don't-move: reducing mu_{l+1} to beta changes the invariant shape only
// in rows l+1..kappa (kappa read off the MU-side sweep trace); the nu-filling
// parts strictly below row kappa are unchanged, in the same locations.
inline bool stability_check_below(const GenericForm& L_form, int l, const Rat& beta) {
  if (L_form.kind != FormKind::MuNuhatGeneric || !L_form.nu)
    throw std::invalid_argument("stability_check_below: need a mu-nuhat-generic form");
  const int r = L_form.matrix.r();
  const int s = l + 1;
  const RPartition& mu = L_form.mu;
  if (s < 1 || s > r) throw std::invalid_argument("stability_check_below: bad l");

  const DeformationTrace trace = sweep(L_form, SweepSide::Mu, s);
  if (trace.breakpoints.empty() || !(beta > 0 && beta <= mu[s - 1]))
    throw SweepError("stability_check_below: beta outside the trace's valid interval");
  // kappa = the row receiving boxes at beta: breakpoint k marks where row
  // bp[k].j stops receiving, so within (bp[k+1].beta, bp[k].beta] the front
  // sits at bp[k+1].j; below the last breakpoint it stays at the final row.
  int kappa = trace.breakpoints.back().j;
  for (const auto& bp : trace.breakpoints)
    if (bp.beta < beta) {
      kappa = bp.j;
      break;
    }

  const LRFilling F1 = right_filling_of_form(L_form);

  std::vector<Rat> mustar = mu.parts;
  mustar[s - 1] = beta;
  const LRFilling F2 = right_filling(diag_from_partition(RPartition(mustar)),
                                     mat_mul(L_form.matrix, diag_from_partition_hat(*L_form.nu)),
                                     L_form.seed + 1);

  // compare parts and positions in rows strictly below kappa
  for (int i = 1; i <= r; ++i) {
    const StripShape s1 = strip(F1, i), s2 = strip(F2, i);
    for (int j = kappa + 1; j <= r; ++j) {
      if (s1.len[j - 1] != s2.len[j - 1]) return false;
      if (s1.len[j - 1] != 0 && s1.start[j - 1] != s2.start[j - 1]) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Bijection and scalar shifts
// ---------------------------------------------------------------------------

struct TheoremViolationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Builds `trials` distinct matrix realizations of F (the canonical pair
// composed with random orbit moves), computes each left filling, and asserts
// they agree.  The mirror direction is the same computation with the roles of
// the partitions swapped, so composing twice returns the original filling.
inline LRFilling bijection_right_to_left(const LRFilling& F, int trials,
                                         std::uint64_t seed = 0x462a8b9d) {
  if (trials < 1) throw std::invalid_argument("bijection_right_to_left: trials >= 1");
  const FillingRealization base = matrices_from_filling(F);
  std::vector<LRFilling> results;
  for (int t = 0; t < trials; ++t) {
    ValMatrix M = base.M, N = base.N;
    if (t > 0) {
      std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ull * t);
      const InvertiblePair P = random_glr(F.r(), rng);
      const InvertiblePair Q = random_glr(F.r(), rng);
      const InvertiblePair T = random_glr(F.r(), rng);
      M = mat_mul(mat_mul(P.m, M), Q.inv);
      N = mat_mul(mat_mul(Q.m, N), T.inv);
    }
    results.push_back(left_filling(M, N, seed + 17 * t));
    if (results.back() != results.front())
      throw TheoremViolationError(
          "bijection_right_to_left: realizations disagree (build bug per uniqueness theorem)");
  }
  return results.front();
}

inline LRFilling bijection_left_to_right(const LRFilling& G, int trials,
                                         std::uint64_t seed = 0x5b1dc3e7) {
  return bijection_right_to_left(G, trials, seed);
}

// Case analysis of the switching region from the uniqueness theorem's
// induction step.  With sigma+1 the index of the last nonzero content part and
// l+1 the index of the last nonzero base part, the region is bounded below by
// the last strip of the left filling of the base over the truncated content
// (blocks Q_j) and above by strip sigma+1 of the right filling (blocks P_i,
// P_1 bottommost).  Case 1: P_1 does not sit directly beneath any Q_j;
// Case 2: it does (its left edge is covered by the Q block one row up).
// Returns nullopt when either partition is zero, so no region exists.
inline std::optional<int> switching_case(const LRFilling& F,
                                         std::uint64_t seed = 0x737763) {
  const int r = F.r();
  const RPartition nu = F.nu();
  int sig1 = 0, l1 = 0;  // sigma+1 and l+1, 1-based
  for (int i = 1; i <= r; ++i) {
    if (nu[i - 1] > 0) sig1 = i;
    if (F.mu[i - 1] > 0) l1 = i;
  }
  if (sig1 == 0 || l1 == 0) return std::nullopt;
  int jstar = 0;  // row of the bottom block of the nu_{sigma+1}-strip
  for (int j = sig1; j <= r; ++j)
    if (F.part(sig1, j) > 0) jstar = j;
  if (jstar <= 1 || jstar - 1 < l1) return 1;  // no Q block can sit above P_1
  const std::vector<RPartition> seq = sequence_from_filling(F);
  const Rat p_start = seq[sig1 - 1][jstar - 1];
  std::vector<RPartition> trunc(seq.begin(), seq.begin() + sig1);
  while (static_cast<int>(trunc.size()) < r + 1) trunc.push_back(trunc.back());
  const LRFilling G = bijection_right_to_left(filling_from_sequence(trunc), 1, seed);
  if (G.part(l1, jstar - 1) <= 0) return 1;
  const std::vector<RPartition> kappa = sequence_from_filling(G);
  const Rat q_start = kappa[l1 - 1][jstar - 2];
  const Rat q_end = kappa[l1][jstar - 2];
  return (q_start <= p_start && p_start < q_end) ? 2 : 1;
}

// (D(t^beta) M, N D(t^alpha)): shifts the right filling's edge parts by alpha
// and the left filling's edge parts by beta, leaving interior parts fixed.
inline std::pair<ValMatrix, ValMatrix> scalar_shift_pair(const ValMatrix& M,
                                                         const ValMatrix& N,
                                                         const Rat& alpha, const Rat& beta) {
  const int r = M.r();
  ValMatrix M2(r), N2(r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      M2.at(i, j) = mul(monomial(beta, 1), M.at(i, j));
      N2.at(i, j) = mul(N.at(i, j), monomial(alpha, 1));
    }
  return {M2, N2};
}

// Minimal (alpha, beta) on the half-integer grid making all parts of both
// fillings of (D(t^beta) M, N D(t^alpha)) nonnegative.
inline std::pair<Rat, Rat> minimal_nonneg_shift(const ValMatrix& M, const ValMatrix& N,
                                                std::uint64_t seed) {
  const GenericForm G = to_mu_nuhat_generic(M, N, seed);
  const LRFilling right = right_filling_of_form(G);
  const LRFilling left = left_filling_of_form(G);
  auto min_edge = [](const LRFilling& F) {
    Rat m(0);
    for (int i = 1; i <= F.r(); ++i)
      if (F.part(i, i) < m) m = F.part(i, i);
    return m;
  };
  auto ceil_half = [](const Rat& x) -> Rat { return rat_ceil(x * 2) / 2; };
  const Rat alpha = ceil_half(-min_edge(right));
  const Rat beta = ceil_half(-min_edge(left));
  return {alpha, beta};
}

}  // namespace lrval
