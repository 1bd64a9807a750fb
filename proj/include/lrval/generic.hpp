#pragma once
// Genericity layer: admissibility predicates, seeded-random transforms with
// exactly invertible factors, reduction of a matrix pair (M, N) to the forms
// (D_mu, N*) with N* upper-triangular (mu-generic) and (D_mu, L D_nuhat) with
// L lower-triangular (mu-nuhat-generic), and post-hoc certification of the
// genericity inequality families.
//
// Elimination multipliers are quotients of series and therefore infinite in
// general; the reduction works at an explicit truncation bound and the whole
// pipeline is re-run at twice the bound until the extraction-relevant minor
// valuations (the corner signature) agree, which makes the reported
// valuations exact.  Certification then converts "almost surely generic"
// random choices into a hard postcondition, retrying with a fresh seed up to
// a bounded number of attempts (default 8, override via LRVAL_MAX_RETRIES).

#include <cstdio>
#include <cstdlib>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "matrix.hpp"

namespace lrval {

// ---------------------------------------------------------------------------
// Admissibility
// ---------------------------------------------------------------------------

// Q is mu-admissible iff D_mu Q D_mu^{-1} in GL_r(R), i.e. ||q_ij|| >= mu_j - mu_i.
inline bool is_mu_admissible(const ValMatrix& Q, const RPartition& mu) {
  if (!in_glr(Q)) throw std::invalid_argument("is_mu_admissible: Q not in GL_r(R)");
  for (int i = 0; i < Q.r(); ++i)
    for (int j = 0; j < Q.r(); ++j) {
      const Valuation v = valuation(Q.at(i, j));
      if (!v.infinite && v.value < mu[j] - mu[i]) return false;
    }
  return true;
}

// T is nuhat-admissible iff D_nuhat^{-1} T D_nuhat in GL_r(R),
// i.e. ||t_ij|| >= nu_{r-i+1} - nu_{r-j+1}.
inline bool is_nuhat_admissible(const ValMatrix& T, const RPartition& nu) {
  if (!in_glr(T)) throw std::invalid_argument("is_nuhat_admissible: T not in GL_r(R)");
  const int r = T.r();
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      const Valuation v = valuation(T.at(i, j));
      if (!v.infinite && v.value < nu[r - 1 - i] - nu[r - 1 - j]) return false;
    }
  return true;
}

// ---------------------------------------------------------------------------
// Random transforms with exact inverses
// ---------------------------------------------------------------------------

struct InvertiblePair {
  ValMatrix m;
  ValMatrix inv;
};

// Exact inverse of a triangular matrix whose diagonal entries are nonzero
// constants (valuation-0 monomials); only constant division occurs.
inline ValMatrix triangular_inverse(const ValMatrix& X, bool lower) {
  const int r = X.r();
  for (int i = 0; i < r; ++i) {
    const auto& d = X.at(i, i);
    if (d.terms().size() != 1 || d.terms()[0].exp != 0)
      throw std::invalid_argument("triangular_inverse: diagonal must be nonzero constants");
  }
  ValMatrix Y(r);
  for (int j = 0; j < r; ++j) {
    // solve X y = e_j by substitution
    std::vector<FieldElement> y(r);
    y[j] = monomial(0, Rat(1) / X.at(j, j).terms()[0].coeff);
    if (lower) {
      for (int i = j + 1; i < r; ++i) {
        FieldElement s;
        for (int k = j; k < i; ++k) s = add(s, mul(X.at(i, k), y[k]));
        y[i] = scale(neg(s), Rat(1) / X.at(i, i).terms()[0].coeff);
      }
    } else {
      for (int i = j - 1; i >= 0; --i) {
        FieldElement s;
        for (int k = i + 1; k <= j; ++k) s = add(s, mul(X.at(i, k), y[k]));
        y[i] = scale(neg(s), Rat(1) / X.at(i, i).terms()[0].coeff);
      }
    }
    for (int i = 0; i < r; ++i) Y.at(i, j) = y[i];
  }
  return Y;
}

// Random element of GL_r(R) built as (unit lower-triangular) x (unit
// upper-triangular); the factorization keeps the exact inverse polynomial.
inline InvertiblePair random_glr(int r, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> expo(0, 2);
  auto tri = [&](bool lower) {
    ValMatrix X(r);
    for (int i = 0; i < r; ++i) X.at(i, i) = monomial(0, random_coefficient(rng));
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) {
        if ((lower && i > j) || (!lower && i < j))
          X.at(i, j) = monomial(expo(rng), random_coefficient(rng));
      }
    return X;
  };
  ValMatrix L = tri(true), U = tri(false);
  InvertiblePair p;
  p.m = mat_mul(L, U);
  p.inv = mat_mul(triangular_inverse(U, false), triangular_inverse(L, true));
  return p;
}

// Random mu-admissible matrix in GL_r(R): entry (i,j) is a random unit times
// t^{max(0, mu_j - mu_i)}.  Resamples until the determinant is a unit.
inline ValMatrix random_mu_admissible(const RPartition& mu, std::mt19937_64& rng) {
  const int r = mu.length();
  for (int attempt = 0; attempt < 32; ++attempt) {
    ValMatrix Q(r);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) {
        Rat gap = mu[j] - mu[i];
        if (gap < 0) gap = 0;
        Q.at(i, j) = monomial(gap, random_coefficient(rng));
      }
    if (in_glr(Q) && is_mu_admissible(Q, mu)) return Q;
  }
  throw std::runtime_error("random_mu_admissible: failed to produce a unit determinant");
}

// ---------------------------------------------------------------------------
// GenericForm
// ---------------------------------------------------------------------------

enum class FormKind { MuGeneric, MuNuhatGeneric };

struct GenericForm {
  FormKind kind = FormKind::MuGeneric;
  ValMatrix matrix;  // N* (upper-triangular) or L (lower-triangular)
  RPartition mu;
  std::optional<RPartition> nu;  // absent for MuGeneric
  std::uint64_t seed = 0;
  bool verified = false;
  // truncation bound the form was certified at; minor valuations >= this are
  // truncation residue of exact cancellations and must be read as INFINITY
  std::optional<Rat> precision;
};

struct GenericityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// a failure that a fresh orbit randomization can fix but more precision
// cannot; subtyped so escalation loops skip straight to the next attempt
struct RandomizationError : PrecisionError {
  using PrecisionError::PrecisionError;
};

inline bool trace_enabled() {
  static const bool on = std::getenv("LRVAL_TRACE") != nullptr;
  return on;
}

inline int max_genericity_retries() {
  if (const char* env = std::getenv("LRVAL_MAX_RETRIES")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 8;
}

// ---------------------------------------------------------------------------
// Genericity certification
// ---------------------------------------------------------------------------

namespace detail {

// all triples I <= H <= J (componentwise) of equal-size index sets
template <typename Fn>
inline void for_each_chain_triple(int r, int budget, std::uint64_t seed, Fn&& fn) {
  if (r <= 5) {
    for (int k = 1; k <= r; ++k) {
      std::vector<std::uint32_t> subs;
      subsets_of_size(r, k, subs);
      auto expand = [&](std::uint32_t m) {
        std::vector<int> v;
        for (int b = 0; b < r; ++b)
          if (m & (1u << b)) v.push_back(b + 1);
        return v;
      };
      auto leq = [](const std::vector<int>& a, const std::vector<int>& b) {
        for (size_t s = 0; s < a.size(); ++s)
          if (a[s] > b[s]) return false;
        return true;
      };
      for (auto mi : subs) {
        auto I = expand(mi);
        for (auto mh : subs) {
          auto H = expand(mh);
          if (!leq(I, H)) continue;
          for (auto mj : subs) {
            auto J = expand(mj);
            if (!leq(H, J)) continue;
            fn(IndexSet(r, I), IndexSet(r, H), IndexSet(r, J));
          }
        }
      }
    }
    return;
  }
  // budgeted sampling for r > 5
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_int_distribution<int> ksize(1, r);
  for (int n = 0; n < budget; ++n) {
    const int k = ksize(rng);
    auto random_subset = [&](int lo_bound_from, const std::vector<int>* upper) {
      std::vector<int> v(k);
      for (int s = k - 1; s >= 0; --s) {
        const int hi = (upper ? (*upper)[s] : r) - (k - 1 - s);
        const int lo = s + 1;
        std::uniform_int_distribution<int> d(lo, std::max(lo, hi));
        v[s] = d(rng);
      }
      // repair monotonicity
      for (int s = 1; s < k; ++s)
        if (v[s] <= v[s - 1]) v[s] = v[s - 1] + 1;
      for (int s = k - 1; s >= 0; --s)
        if (v[s] > r - (k - 1 - s)) v[s] = r - (k - 1 - s);
      for (int s = 1; s < k; ++s)
        if (v[s] <= v[s - 1]) v[s] = v[s - 1] + 1;
      (void)lo_bound_from;
      return v;
    };
    std::vector<int> J = random_subset(0, nullptr);
    std::vector<int> H = random_subset(0, &J);
    std::vector<int> I = random_subset(0, &H);
    fn(IndexSet(r, I), IndexSet(r, H), IndexSet(r, J));
  }
}

// ineq LHS <= RHS + gap with INFINITY semantics; instances whose minors are
// structurally zero (pattern zeros of a triangular form) are skipped, while a
// cancellation zero participates as INFINITY and can flag a violation.
inline bool val_leq(const Valuation& lhs, const Valuation& rhs, const Rat& gap) {
  if (lhs.infinite) return rhs.infinite;
  if (rhs.infinite) return true;
  return lhs.value <= rhs.value + gap;
}

}  // namespace detail

// Verifies the applicable inequality families on the form's matrix for all
// index-set triples I <= H <= J (exhaustive for r <= 5, sampled above).
inline bool genericity_check(const GenericForm& G, int sample_budget = 500) {
  const ValMatrix& A = G.matrix;
  const int r = A.r();
  MinorCache cache = G.precision ? MinorCache(A, *G.precision) : MinorCache(A);
  bool ok = true;

  RPartition nuhat_sums;  // |nuhat_X| needs nuhat_j = nu_{r-j+1}
  if (G.nu) {
    std::vector<Rat> nh(r);
    for (int j = 0; j < r; ++j) nh[j] = (*G.nu)[r - 1 - j];
    nuhat_sums = RPartition(std::move(nh));
  }

  detail::for_each_chain_triple(r, sample_budget, G.seed, [&](const IndexSet& I,
                                                              const IndexSet& H,
                                                              const IndexSet& J) {
    if (!ok) return;
    auto structural = [&](const IndexSet& R_, const IndexSet& C_) {
      return minor_structurally_nonzero(A, R_, C_);
    };
    auto v = [&](const IndexSet& R_, const IndexSet& C_) {
      Valuation val = valuation(cache.minor(R_, C_));
      if (G.precision && !val.infinite && val.value >= *G.precision)
        val = Valuation::inf();  // truncation residue of an exact zero
      return val;
    };
    // (row):     ||A_IJ|| <= ||A_HJ||
    if (structural(I, J) && structural(H, J)) {
      if (!detail::val_leq(v(I, J), v(H, J), Rat(0))) ok = false;
      // (mu-gap): ||A_HJ|| <= ||A_IJ|| + |mu_I| - |mu_H|
      if (!detail::val_leq(v(H, J), v(I, J), part_sum(G.mu, I) - part_sum(G.mu, H)))
        ok = false;
    }
    // (col):     ||A_IJ|| <= ||A_IH||
    if (structural(I, J) && structural(I, H)) {
      if (!detail::val_leq(v(I, J), v(I, H), Rat(0))) ok = false;
      // (nu-gap): ||A_IH|| <= ||A_IJ|| + |nuhat_J| - |nuhat_H|
      if (G.nu &&
          !detail::val_leq(v(I, H), v(I, J), part_sum(nuhat_sums, J) - part_sum(nuhat_sums, H)))
        ok = false;
    }
  });
  return ok;
}

// ---------------------------------------------------------------------------
// Truncated orbit reduction
// ---------------------------------------------------------------------------

namespace detail {

// Rescales a whole row or column by the rational unit that clears
// denominators and common numerator factors.  Unit scaling of a full row or
// column preserves the pair class (the companion factors are diagonal
// monomial matrices, which absorb unit diagonals) and every minor valuation;
// without it the coefficients compound through chained long divisions until
// exact arithmetic dominates the running time.
inline void rescale_content(const std::vector<FieldElement*>& elems) {
  mpz_class g(0), l(1);
  for (const FieldElement* e : elems)
    for (const Term& t : e->terms()) {
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.coeff.get_num().get_mpz_t());
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.coeff.get_den().get_mpz_t());
    }
  if (g == 0) return;
  Rat c(l, g);
  c.canonicalize();
  if (c == 1) return;
  const FieldElement m = monomial(0, c);
  for (FieldElement* e : elems) *e = mul(*e, m);
}

// Diagonalize A (a copy of M) by truncated row/column elimination, mirroring
// every column operation on A with the inverse row operation on B so that the
// pair class of (A, B) is preserved up to terms of exponent >= precision.
// Returns B' with (D_mu, B') equivalent to (M, N) below the bound.
inline ValMatrix reduce_left_to_diag(const ValMatrix& M, const ValMatrix& N,
                                     const RPartition& mu, const Rat& precision) {
  const int r = M.r();
  std::vector<std::vector<FieldElement>> a(r, std::vector<FieldElement>(r));
  std::vector<std::vector<FieldElement>> b(r, std::vector<FieldElement>(r));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      a[i][j] = truncate(M.at(i, j), precision);
      b[i][j] = N.at(i, j);
    }

  std::vector<Rat> exps(r);
  for (int k = 0; k < r; ++k) {
    int pi = -1, pj = -1;
    Valuation best = Valuation::inf();
    for (int i = k; i < r; ++i)
      for (int j = k; j < r; ++j) {
        const Valuation v = valuation(a[i][j]);
        if (v < best) {
          best = v;
          pi = i;
          pj = j;
        }
      }
    if (best.infinite) throw RankError("reduce_left_to_diag: rank-deficient left matrix");
    if (best.value >= precision)
      throw PrecisionError("reduce_left_to_diag: pivot reached precision bound");
    std::swap(a[pi], a[k]);                               // row swap on A: free
    if (pj != k) {
      for (int i = 0; i < r; ++i) std::swap(a[i][pj], a[i][k]);  // col swap on A
      std::swap(b[pj], b[k]);                                    // row swap on B
    }
    for (int i = k + 1; i < r; ++i) {
      if (a[i][k].is_zero()) continue;
      FieldElement mlt = divide_trunc(a[i][k], a[k][k], precision);
      for (int j = k; j < r; ++j)
        a[i][j] = truncate(sub(a[i][j], mul(mlt, a[k][j])), precision);
      std::vector<FieldElement*> row;
      for (int j = 0; j < r; ++j) row.push_back(&a[i][j]);
      rescale_content(row);
    }
    for (int j = k + 1; j < r; ++j) {
      if (a[k][j].is_zero()) continue;
      FieldElement mlt = divide_trunc(a[k][j], a[k][k], precision);
      // column shear on A ...
      for (int i = k; i < r; ++i)
        a[i][j] = truncate(sub(a[i][j], mul(mlt, a[i][k])), precision);
      std::vector<FieldElement*> col;
      for (int i = 0; i < r; ++i) col.push_back(&a[i][j]);
      rescale_content(col);
      // ... paired with the inverse row operation on B
      for (int j2 = 0; j2 < r; ++j2)
        b[k][j2] = truncate(add(b[k][j2], mul(mlt, b[j][j2])), precision);
    }
    {
      std::vector<FieldElement*> row;
      for (int j2 = 0; j2 < r; ++j2) row.push_back(&b[k][j2]);
      rescale_content(row);
    }
    exps[k] = valuation(a[k][k]).value;
  }

  // sort the diagonal into weakly decreasing order (column permutation on A
  // mirrored by a row permutation on B)
  std::vector<int> order(r);
  for (int i = 0; i < r; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return exps[x] > exps[y]; });
  for (int k = 0; k < r; ++k) {
    if (exps[order[k]] != mu[k])
      throw PrecisionError("reduce_left_to_diag: diagonal exponents disagree with inv(M)");
  }

  // (diag(t^mu_k u_k), B) ~ (D_mu, diag(u_k) B) with u_k the truncated unit
  // part of the k-th pivot; diag(u_k) lies in GL_r(R) exactly.
  ValMatrix out(N.r());
  for (int k = 0; k < r; ++k) {
    const int src = order[k];
    FieldElement u = mul(a[src][src], monomial(-exps[src], 1));
    for (int j = 0; j < r; ++j) out.at(k, j) = truncate(mul(u, b[src][j]), precision);
    std::vector<FieldElement*> row;
    for (int j = 0; j < r; ++j) row.push_back(&out.at(k, j));
    rescale_content(row);
  }
  return out;
}

// Column-equivalent upper-triangular form of B (right multiplication by an
// element of GL_r(R)), processing rows bottom-up and pivoting on the
// minimal-valuation entry so multipliers stay in R.
inline ValMatrix upper_triangularize_columns(ValMatrix B, const Rat& precision) {
  const int r = B.r();
  for (int i = r - 1; i >= 0; --i) {
    int p = -1;
    Valuation best = Valuation::inf();
    for (int j = i; j >= 0; --j) {  // prefer the rightmost column on ties
      const Valuation v = valuation(B.at(i, j));
      if (v < best) {
        best = v;
        p = j;
      }
    }
    // a pivot at or beyond the truncation bound may be pure residue of an
    // exactly nonzero entry; deciding on it would make runs at different
    // precisions structurally diverge, so demand a higher bound instead
    if (best.infinite || best.value >= precision)
      throw PrecisionError("upper_triangularize_columns: pivot reached precision bound");
    if (p != i)
      for (int q = 0; q < r; ++q) {
        FieldElement tmp = B.at(q, p);
        B.at(q, p) = B.at(q, i);
        B.at(q, i) = tmp;
      }
    for (int j = 0; j < i; ++j) {
      if (B.at(i, j).is_zero()) continue;
      FieldElement mlt = divide_trunc(B.at(i, j), B.at(i, i), precision);
      for (int q = 0; q <= i; ++q)
        B.at(q, j) = truncate(sub(B.at(q, j), mul(mlt, B.at(q, i))), precision);
      B.at(i, j) = FieldElement();  // exact zero by construction
      std::vector<FieldElement*> col;
      for (int q = 0; q < r; ++q) col.push_back(&B.at(q, j));
      rescale_content(col);
    }
  }
  return B;
}

// Valuations of every minor of A.  Multiplying by diagonal monomial matrices
// shifts the valuation of each minor by an exactly known amount, so this
// signature determines all downstream invariant partitions and extraction
// formulas; two truncated pipeline runs with equal signatures are
// interchangeable for every exact computation that follows.
//
// Minors that cancel exactly to zero leave truncation residue with valuation
// >= the truncation bound (entries lie in R, so every error term does); such
// valuations are clamped to INFINITY so that cancellation zeros compare equal
// across precisions instead of blocking stabilization forever.
inline std::vector<Valuation> minor_signature(const ValMatrix& A, const Rat& clamp_at) {
  const int r = A.r();
  // terms at or above the clamp can never influence a sub-clamp valuation,
  // so drop them up front; runs at high precision carry huge tails otherwise
  ValMatrix T(r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) T.at(i, j) = truncate(A.at(i, j), clamp_at);
  MinorCache cache(T, clamp_at);
  std::vector<Valuation> sig;
  for (std::uint32_t rows = 1; rows < (1u << r); ++rows) {
    const int k = __builtin_popcount(rows);
    std::vector<std::uint32_t> cols;
    subsets_of_size(r, k, cols);
    for (std::uint32_t c : cols) {
      Valuation v = valuation(cache.det(rows, c));
      if (!v.infinite && v.value >= clamp_at) v = Valuation::inf();
      sig.push_back(v);
    }
  }
  return sig;
}

inline Rat initial_precision(const ValMatrix& M, const ValMatrix& N) {
  // every extraction-relevant minor valuation is bounded by the sum of
  // row-maximal absolute entry valuations of the two factors; start a little
  // above that (the escalation loop recovers if a pathological case needs more)
  Rat s(17);
  for (const ValMatrix* X : {&M, &N})
    for (int i = 0; i < X->r(); ++i) {
      Rat row(0);
      for (int j = 0; j < X->r(); ++j) {
        const Valuation v = valuation(X->at(i, j));
        if (v.infinite) continue;
        const Rat a = v.value < 0 ? -v.value : v.value;
        if (a > row) row = a;
      }
      s += row;
    }
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// to_mu_generic / to_mu_nuhat_generic
// ---------------------------------------------------------------------------

namespace detail {

// One attempt at the mu-generic form at a fixed truncation bound.
inline ValMatrix mu_generic_attempt(const ValMatrix& M, const ValMatrix& N,
                                    const RPartition& mu, std::uint64_t seed, int attempt,
                                    const Rat& precision) {
  ValMatrix Np = reduce_left_to_diag(M, N, mu, precision);
  if (attempt > 0) {
    // randomize within the orbit: mu-admissible on the left, GL_r(R) on the right
    std::mt19937_64 rng(seed + 0x517cc1b727220a95ull * attempt);
    ValMatrix Q = random_mu_admissible(mu, rng);
    InvertiblePair T = random_glr(M.r(), rng);
    Np = mat_mul(mat_mul(Q, Np), T.m);
    for (int i = 0; i < Np.r(); ++i)
      for (int j = 0; j < Np.r(); ++j) Np.at(i, j) = truncate(Np.at(i, j), precision);
  }
  return upper_triangularize_columns(std::move(Np), precision);
}

}  // namespace detail

inline GenericForm to_mu_generic(const ValMatrix& M, const ValMatrix& N,
                                 std::uint64_t seed) {
  const RPartition mu = invariant_partition(M);
  const RPartition nu = invariant_partition(N);
  const RPartition lambda = invariant_partition(mat_mul(M, N));
  const Rat P0 = detail::initial_precision(M, N);
  const int retries = max_genericity_retries();
  std::string diag;

  for (int attempt = 0; attempt < retries; ++attempt) {
    try {
      // a pivot hitting the truncation bound means the bound was too small,
      // not that the randomization was unlucky: raise it and rebuild
      Rat precision = P0;
      ValMatrix U(M.r());
      for (int grow = 0;; ++grow) {
        try {
          U = detail::mu_generic_attempt(M, N, mu, seed, attempt, precision);
          break;
        } catch (const RandomizationError&) {
          throw;
        } catch (const PrecisionError&) {
          if (grow >= 12) throw;
          precision *= 2;
        }
      }
      // escalate until the extraction-relevant minor valuations stabilize;
      // the clamp stays at P0 (every relevant valuation lies below it) so the
      // comparison window is fixed while run-to-run divergence retreats past it
      for (int esc = 0; esc < 12; ++esc) {
        const Rat p2 = precision * 3 / 2;
        ValMatrix U2 = detail::mu_generic_attempt(M, N, mu, seed, attempt, p2);
        if (detail::minor_signature(U, P0) == detail::minor_signature(U2, P0))
          break;
        if (trace_enabled())
          std::fprintf(stderr, "[lrval] mu-generic attempt %d: escalate to %s\n", attempt,
                       rat_str(p2).c_str());
        U = std::move(U2);
        precision = p2;
        if (esc == 11) throw PrecisionError("to_mu_generic: failed to stabilize");
      }
      GenericForm G;
      G.kind = FormKind::MuGeneric;
      G.matrix = std::move(U);
      G.mu = mu;
      G.seed = seed;
      G.precision = P0;
      // hard postconditions: the form reproduces the exact pair invariants
      if (invariant_partition(G.matrix) != nu) {
        diag += "attempt " + std::to_string(attempt) + ": inv(N*) != inv(N); ";
        continue;
      }
      if (invariant_partition(mat_mul(diag_from_partition(mu), G.matrix)) != lambda) {
        diag += "attempt " + std::to_string(attempt) + ": inv(D_mu N*) != inv(MN); ";
        continue;
      }
      if (!genericity_check(G)) {
        diag += "attempt " + std::to_string(attempt) + ": inequality family violated; ";
        continue;
      }
      G.verified = true;
      return G;
    } catch (const PrecisionError& e) {
      if (trace_enabled())
        std::fprintf(stderr, "[lrval] attempt %d failed: %s\n", attempt, e.what());
      diag += std::string("attempt ") + std::to_string(attempt) + ": " + e.what() + "; ";
    }
  }
  throw GenericityError("to_mu_generic: retries exhausted [" + diag + "]");
}

namespace detail {

// From an upper-triangular N*, zero out each row left of its antidiagonal
// position by column operations (multiples of the antidiagonal column), then
// reverse the columns: the result Lambda = N* C Pi_r is lower-triangular and
// equals L D_nuhat.
inline ValMatrix anti_triangularize(const ValMatrix& U, const Rat& precision) {
  const int r = U.r();
  ValMatrix W = U;
  for (int i = 0; i < r - 1; ++i) {
    const int p = r - 1 - i;  // antidiagonal column for row i
    // an (effectively) vanishing antidiagonal pivot is almost always an exact
    // structural zero of the unrandomized form: re-randomize, don't escalate
    if (W.at(i, p).is_zero() || valuation(W.at(i, p)) >= Valuation::fin(precision))
      throw RandomizationError("anti_triangularize: vanishing antidiagonal pivot");
    for (int j = 0; j < p; ++j) {
      if (W.at(i, j).is_zero()) continue;
      FieldElement mlt = divide_trunc(W.at(i, j), W.at(i, p), precision);
      if (valuation(mlt) < Valuation::fin(0))
        throw RandomizationError("anti_triangularize: multiplier escapes R");
      for (int q = 0; q < r; ++q)
        W.at(q, j) = truncate(sub(W.at(q, j), mul(mlt, W.at(q, p))), precision);
      W.at(i, j) = FieldElement();
      std::vector<FieldElement*> col;
      for (int q = 0; q < r; ++q) col.push_back(&W.at(q, j));
      rescale_content(col);
    }
  }
  // reverse column order
  ValMatrix out(r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) out.at(i, j) = W.at(i, r - 1 - j);
  return out;
}

inline ValMatrix mu_nuhat_attempt(const ValMatrix& M, const ValMatrix& N,
                                  const RPartition& mu, std::uint64_t seed, int attempt,
                                  const Rat& precision) {
  ValMatrix U = mu_generic_attempt(M, N, mu, seed, attempt, precision);
  return anti_triangularize(U, precision);
}

}  // namespace detail

inline GenericForm to_mu_nuhat_generic(const ValMatrix& M, const ValMatrix& N,
                                       std::uint64_t seed) {
  const RPartition mu = invariant_partition(M);
  const RPartition nu = invariant_partition(N);
  const RPartition lambda = invariant_partition(mat_mul(M, N));
  const int r = M.r();
  const Rat P0 = detail::initial_precision(M, N);
  const int retries = max_genericity_retries();
  std::string diag;

  for (int attempt = 0; attempt < retries; ++attempt) {
    try {
      Rat precision = P0;
      ValMatrix Lam(r);
      for (int grow = 0;; ++grow) {
        try {
          Lam = detail::mu_nuhat_attempt(M, N, mu, seed, attempt, precision);
          break;
        } catch (const RandomizationError&) {
          throw;
        } catch (const PrecisionError&) {
          if (grow >= 12) throw;
          precision *= 2;
        }
      }
      for (int esc = 0; esc < 12; ++esc) {
        const Rat p2 = precision * 3 / 2;
        ValMatrix Lam2 = detail::mu_nuhat_attempt(M, N, mu, seed, attempt, p2);
        if (detail::minor_signature(Lam, P0) == detail::minor_signature(Lam2, P0))
          break;
        if (trace_enabled())
          std::fprintf(stderr, "[lrval] mu-nuhat attempt %d: escalate to %s\n", attempt,
                       rat_str(p2).c_str());
        Lam = std::move(Lam2);
        precision = p2;
        if (esc == 11) throw PrecisionError("to_mu_nuhat_generic: failed to stabilize");
      }

      // factor Lambda = L D_nuhat: divide column j by t^{nuhat_j} and
      // normalize each column's leading diagonal coefficient to 1
      ValMatrix L(r);
      bool factor_ok = true;
      for (int j = 0; j < r && factor_ok; ++j) {
        const Rat nuhat_j = nu[r - 1 - j];
        const auto& d = Lam.at(j, j);
        if (d.is_zero() || valuation(d) != Valuation::fin(nuhat_j)) {
          factor_ok = false;
          break;
        }
        const Rat lead = d.terms().front().coeff;
        for (int i = 0; i < r; ++i)
          L.at(i, j) = scale(mul(Lam.at(i, j), monomial(-nuhat_j, 1)), Rat(1) / lead);
      }
      if (!factor_ok) {
        diag += "attempt " + std::to_string(attempt) + ": diagonal order != nuhat; ";
        continue;
      }
      if (!in_glr(L)) {
        diag += "attempt " + std::to_string(attempt) + ": L not in GL_r(R); ";
        continue;
      }

      GenericForm G;
      G.kind = FormKind::MuNuhatGeneric;
      G.matrix = std::move(L);
      G.mu = mu;
      G.nu = nu;
      G.seed = seed;
      G.precision = P0;
      const ValMatrix LDnu = mat_mul(G.matrix, diag_from_partition_hat(nu));
      if (invariant_partition(LDnu) != nu) {
        diag += "attempt " + std::to_string(attempt) + ": inv(L D_nuhat) != nu; ";
        continue;
      }
      if (invariant_partition(mat_mul(diag_from_partition(mu), LDnu)) != lambda) {
        diag += "attempt " + std::to_string(attempt) + ": inv(D_mu L D_nuhat) != lambda; ";
        continue;
      }
      if (!genericity_check(G)) {
        diag += "attempt " + std::to_string(attempt) + ": inequality family violated; ";
        continue;
      }
      G.verified = true;
      return G;
    } catch (const PrecisionError& e) {
      if (trace_enabled())
        std::fprintf(stderr, "[lrval] attempt %d failed: %s\n", attempt, e.what());
      diag += std::string("attempt ") + std::to_string(attempt) + ": " + e.what() + "; ";
    } catch (const RankError& e) {
      diag += std::string("attempt ") + std::to_string(attempt) + ": " + e.what() + "; ";
    }
  }
  throw GenericityError("to_mu_nuhat_generic: retries exhausted [" + diag + "]");
}

}  // namespace lrval
