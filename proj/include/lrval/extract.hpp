#pragma once
// Extraction layer: right and left fillings of a matrix pair by (a) the
// determinantal omitted-minor formulas on a mu-generic form and (b) the
// invariant-sequence method on a mu-nuhat-generic form; plus the reverse
// construction realizing any valid filling as a matrix pair.

#include <stdexcept>
#include <string>
#include <vector>

#include "filling.hpp"
#include "generic.hpp"

namespace lrval {

struct InternalInconsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Omitted-minor valuations
// ---------------------------------------------------------------------------

enum class ColumnSide { Rightmost, Leftmost };

struct OmittedSpec {
  IndexSet omitted;  // possibly empty; empty means "use all rows"
  ColumnSide column_side = ColumnSide::Rightmost;
};

// ||(i_1, ..., i_k)^| with hats: the minor on all rows except the omitted
// ones and the rightmost (or leftmost) columns of matching size; an empty
// omission list selects the full determinant.
inline Valuation omitted_minor_valuation(const ValMatrix& N, const OmittedSpec& spec) {
  const int r = N.r();
  if (spec.omitted.size() >= r && r > 0)
    throw std::invalid_argument("omitted_minor_valuation: cannot omit all rows");
  IndexSet rows = spec.omitted.size() == 0
                      ? index_range(r, 1, r)
                      : IndexSet(r, spec.omitted.idx).complement();
  const int k = rows.size();
  IndexSet cols = spec.column_side == ColumnSide::Rightmost ? index_range(r, r - k + 1, r)
                                                            : index_range(r, 1, k);
  return valuation(minor(N, rows, cols));
}

namespace detail {

// ||(p)^, ..., (q)^|| with the conventions: a formal omission index 0 is
// dropped, and p > q denotes the full determinant ||1, 2, ..., r||.
inline Valuation omit_range_valuation(MinorCache& cache, int r, int p, int q,
                                      ColumnSide side) {
  if (p < 1) p = 1;  // drop the formal index 0
  std::uint32_t rows;
  if (p > q) {
    rows = (1u << r) - 1;
  } else {
    rows = 0;
    for (int i = 1; i <= r; ++i)
      if (i < p || i > q) rows |= (1u << (i - 1));
  }
  const int k = __builtin_popcount(rows);
  const std::uint32_t cols = side == ColumnSide::Rightmost ? (((1u << k) - 1) << (r - k))
                                                           : ((1u << k) - 1);
  return valuation(cache.det(rows, cols));
}

// ||(1, (i+1), ..., r)|| without hats: rows as listed, rightmost/leftmost cols
inline Valuation rows_valuation(MinorCache& cache, int r, const std::vector<int>& rows1b,
                                ColumnSide side) {
  std::uint32_t rows = 0;
  for (int i : rows1b) rows |= (1u << (i - 1));
  const int k = __builtin_popcount(rows);
  const std::uint32_t cols = side == ColumnSide::Rightmost ? (((1u << k) - 1) << (r - k))
                                                           : ((1u << k) - 1);
  return valuation(cache.det(rows, cols));
}

inline Rat finite_or_throw(const Valuation& v, const char* what) {
  if (v.infinite)
    throw InternalInconsistencyError(std::string(what) +
                                     ": required minor vanished (genericity failure)");
  return v.value;
}

// partial sum k_{1j} + ... + k_{ij} per the determinantal formula
inline Rat partial_column_sum(MinorCache& cache, int r, int i, int j, ColumnSide side) {
  const Valuation a = omit_range_valuation(cache, r, j - i, j - 1, side);
  const Valuation b = omit_range_valuation(cache, r, j - i + 1, j, side);
  return finite_or_throw(a, "partial_column_sum") - finite_or_throw(b, "partial_column_sum");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Determinantal extraction
// ---------------------------------------------------------------------------

// Right filling from a verified generic form: on a mu-generic N* the omitted
// minors use the rightmost columns; on a mu-nuhat-generic L they use the
// leftmost columns of L D_nuhat, which carry the same valuations.
inline LRFilling right_filling_determinantal(const GenericForm& G, const RPartition& mu) {
  if (!G.verified)
    throw std::invalid_argument("right_filling_determinantal: form not verified");
  ColumnSide side = ColumnSide::Rightmost;
  ValMatrix work = G.matrix;
  if (G.kind == FormKind::MuNuhatGeneric) {
    side = ColumnSide::Leftmost;
    work = mat_mul(G.matrix, diag_from_partition_hat(*G.nu));
  }
  const int r = work.r();
  MinorCache cache(work);

  std::vector<std::vector<Rat>> k(r);
  for (int j = 1; j <= r; ++j) {
    Rat prev(0);
    for (int i = 1; i <= j; ++i) {
      const Rat cur = detail::partial_column_sum(cache, r, i, j, side);
      k[i - 1].push_back(cur - prev);
      prev = cur;
    }
  }
  LRFilling F(mu, std::move(k));
  const auto violations = validate_filling(F);
  if (!violations.empty())
    throw InternalInconsistencyError(
        "right_filling_determinantal: extracted array violates " + violations[0].condition +
        " (genericity certification bug)");
  return F;
}

// Cor word-lem identities, verified for all admissible (i, j, l).
inline bool word_partial_sums_check(const GenericForm& G, const LRFilling& F) {
  ColumnSide side = ColumnSide::Rightmost;
  ValMatrix work = G.matrix;
  if (G.kind == FormKind::MuNuhatGeneric) {
    side = ColumnSide::Leftmost;
    work = mat_mul(G.matrix, diag_from_partition_hat(*G.nu));
  }
  const int r = work.r();
  MinorCache cache(work);

  // (1) sum_{b=j}^{l} (k_{1b} + ... + k_{ib})
  //       = ||(j-i)^..(j-1)^|| - ||(l-i+1)^..(l)^||
  for (int i = 1; i <= r; ++i)
    for (int j = i; j <= r; ++j)
      for (int l = j; l <= r; ++l) {
        Rat lhs(0);
        for (int b = j; b <= l; ++b)
          for (int s = 1; s <= i && s <= b; ++s) lhs += F.part(s, b);
        const Valuation a = detail::omit_range_valuation(cache, r, j - i, j - 1, side);
        const Valuation b2 = detail::omit_range_valuation(cache, r, l - i + 1, l, side);
        if (a.infinite || b2.infinite) return false;
        if (lhs != a.value - b2.value) return false;
      }
  // (2) k_{ii} + ... + k_{ij} = ||(j-i+2)^..(j)^|| - ||(j-i+1)^..(j)^||
  for (int i = 1; i <= r; ++i)
    for (int j = i; j <= r; ++j) {
      Rat lhs(0);
      for (int s = i; s <= j; ++s) lhs += F.part(i, s);
      const Valuation a = detail::omit_range_valuation(cache, r, j - i + 2, j, side);
      const Valuation b2 = detail::omit_range_valuation(cache, r, j - i + 1, j, side);
      if (a.infinite || b2.infinite) return false;
      if (lhs != a.value - b2.value) return false;
    }
  return true;
}

// ---------------------------------------------------------------------------
// Invariant sequences
// ---------------------------------------------------------------------------

// diag(t^{mu_1},...,t^{mu_i},1,...,1) * H * diag(1,...,1,t^{nu_j},...,t^{nu_1})
inline ValMatrix partial_diag_product(const std::vector<Rat>& mu_prefix, const ValMatrix& H,
                                      const std::vector<Rat>& nu_prefix) {
  const int r = H.r();
  if (static_cast<int>(mu_prefix.size()) > r || static_cast<int>(nu_prefix.size()) > r)
    throw std::invalid_argument("partial_diag_product: prefix longer than r");
  ValMatrix out = H;
  for (size_t i = 0; i < mu_prefix.size(); ++i)
    for (int j = 0; j < r; ++j)
      out.at(static_cast<int>(i), j) = mul(monomial(mu_prefix[i], 1), out.at(static_cast<int>(i), j));
  for (size_t j = 0; j < nu_prefix.size(); ++j) {
    const int col = r - 1 - static_cast<int>(j);  // nu_1 lands in the last column
    for (int i = 0; i < r; ++i) out.at(i, col) = mul(out.at(i, col), monomial(nu_prefix[j], 1));
  }
  return out;
}

namespace detail {

inline std::vector<Rat> prefix(const RPartition& p, int n) {
  return std::vector<Rat>(p.parts.begin(), p.parts.begin() + n);
}

inline void check_chain(const std::vector<RPartition>& seq, const char* what) {
  // step i may only change rows >= i, and rows > i may only grow (edge parts
  // k_ii can be negative, so full containment is not required)
  for (size_t i = 1; i < seq.size(); ++i)
    for (int j = 1; j <= seq[i].length(); ++j) {
      if (j < static_cast<int>(i) && seq[i][j - 1] != seq[i - 1][j - 1])
        throw InternalInconsistencyError(std::string(what) +
                                         ": above-triangle change at step " + std::to_string(i));
      if (j > static_cast<int>(i) && seq[i][j - 1] < seq[i - 1][j - 1])
        throw InternalInconsistencyError(std::string(what) +
                                         ": interior shrinks at step " + std::to_string(i));
    }
}

}  // namespace detail

// [inv(mu L), inv(mu L nu_1), ..., inv(mu L nu_1...nu_r)]
inline std::vector<RPartition> invariant_sequence_right(const GenericForm& L_form) {
  if (L_form.kind != FormKind::MuNuhatGeneric || !L_form.nu)
    throw std::invalid_argument("invariant_sequence_right: need a mu-nuhat-generic form");
  const int r = L_form.matrix.r();
  std::vector<RPartition> seq;
  for (int m = 0; m <= r; ++m) {
    const ValMatrix prod = partial_diag_product(detail::prefix(L_form.mu, r), L_form.matrix,
                                                detail::prefix(*L_form.nu, m));
    seq.push_back(invariant_partition(prod));
  }
  detail::check_chain(seq, "invariant_sequence_right");
  return seq;
}

// [inv(L nu), inv(mu_1 L nu), ..., inv(mu_r ... mu_1 L nu)]
inline std::vector<RPartition> invariant_sequence_left(const GenericForm& L_form) {
  if (L_form.kind != FormKind::MuNuhatGeneric || !L_form.nu)
    throw std::invalid_argument("invariant_sequence_left: need a mu-nuhat-generic form");
  const int r = L_form.matrix.r();
  std::vector<RPartition> seq;
  for (int m = 0; m <= r; ++m) {
    const ValMatrix prod = partial_diag_product(detail::prefix(L_form.mu, m), L_form.matrix,
                                                detail::prefix(*L_form.nu, r));
    seq.push_back(invariant_partition(prod));
  }
  detail::check_chain(seq, "invariant_sequence_left");
  return seq;
}

// ---------------------------------------------------------------------------
// Whole-pair extraction entry points
// ---------------------------------------------------------------------------

namespace detail {

// Partial products only see the sum of the exponents applied so far, so a
// strip with a negative edge part is invisible to them (e.g. nu_i = 0 with
// strip (-1, 1) leaves the product matrix unchanged).  Normalize: shift both
// partitions of the form up by a bound large enough to make every filling
// part nonnegative, extract there, and undo the shift on the result.  The
// same matrix L stays generic because the gap inequalities only compare
// index sets of equal size, so a uniform shift cancels.
inline Rat normalizing_shift(const GenericForm& G) {
  Rat s(1);
  for (const Rat& v : G.mu.parts) s += abs(v);
  for (const Rat& v : G.nu->parts) s += abs(v);
  return s;
}

template <typename Seq>
inline LRFilling filling_of_form(const GenericForm& G, Seq&& sequence_of) {
  const int r = G.matrix.r();
  if (G.mu[r - 1] >= 0 && (*G.nu)[r - 1] >= 0)
    return filling_from_sequence(sequence_of(G));
  const Rat s = normalizing_shift(G);
  GenericForm H = G;
  for (Rat& v : H.mu.parts) v += s;
  for (Rat& v : H.nu->parts) v += s;
  LRFilling F = filling_from_sequence(sequence_of(H));
  F = shift_filling(F, -s, Side::Right);  // undo the shift on the edge parts
  F = shift_filling(F, -s, Side::Left);   // undo the shift on the base
  return F;
}

}  // namespace detail

// Filling of lambda/mu with content nu, from the right invariant sequence of
// a certified mu-nuhat-generic form.
inline LRFilling right_filling_of_form(const GenericForm& G) {
  return detail::filling_of_form(G, [](const GenericForm& H) {
    return invariant_sequence_right(H);
  });
}

// Filling of lambda/nu with content mu, from the left invariant sequence.
inline LRFilling left_filling_of_form(const GenericForm& G) {
  return detail::filling_of_form(G, [](const GenericForm& H) {
    return invariant_sequence_left(H);
  });
}

inline LRFilling right_filling(const ValMatrix& M, const ValMatrix& N, std::uint64_t seed) {
  return right_filling_of_form(to_mu_nuhat_generic(M, N, seed));
}

inline LRFilling left_filling(const ValMatrix& M, const ValMatrix& N, std::uint64_t seed) {
  return left_filling_of_form(to_mu_nuhat_generic(M, N, seed));
}

// ---------------------------------------------------------------------------
// Matrices from a filling
// ---------------------------------------------------------------------------

struct FillingRealization {
  ValMatrix M;                    // D_mu
  std::vector<ValMatrix> factors; // N_1, ..., N_r
  ValMatrix N;                    // N_1 N_2 ... N_r
};

// M = D_mu; N_i is the block matrix diag(1_{i-1}, T_i) with T_i bidiagonal:
// diagonal t^{k_{i,i}}, ..., t^{k_{i,r}}, superdiagonal 1s.  The default
// emits factors in decreasing-invariant convention; the flag mirrors the
// construction through the reversal permutation for increasing-order
// cross-checks.
inline FillingRealization matrices_from_filling(const LRFilling& F,
                                                bool increasing_convention = false) {
  const auto violations = validate_filling(F);
  if (!violations.empty()) {
    std::string msg = "matrices_from_filling: invalid filling:";
    for (const auto& v : violations)
      msg += " " + v.condition + "(" + std::to_string(v.i) + "," + std::to_string(v.j) + ")";
    throw std::invalid_argument(msg);
  }
  const int r = F.r();
  FillingRealization out;
  out.M = diag_from_partition(F.mu);
  out.N = identity_matrix(r);
  for (int i = 1; i <= r; ++i) {
    ValMatrix Ni = identity_matrix(r);
    for (int j = i; j <= r; ++j) {
      Ni.at(j - 1, j - 1) = monomial(F.part(i, j), 1);
      if (j < r) Ni.at(j - 1, j) = fe_one();
    }
    out.factors.push_back(Ni);
    out.N = mat_mul(out.N, Ni);
  }
  if (increasing_convention) {
    const ValMatrix Pi = reversal_permutation(r);
    out.M = mat_mul(Pi, mat_mul(out.M, Pi));
    out.N = mat_mul(Pi, mat_mul(out.N, Pi));
    for (auto& f : out.factors) f = mat_mul(Pi, mat_mul(f, Pi));
  }
  return out;
}

}  // namespace lrval
