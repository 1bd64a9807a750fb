#pragma once
// Matrix layer: square matrices over the series field, index sets,
// R-partitions, exact minors with memoization, determinantal divisors,
// invariant partitions, a Smith-style truncating reduction oracle, and
// interlacing checks.

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "field.hpp"

namespace lrval {

// ---------------------------------------------------------------------------
// RPartition: weakly decreasing list of exact rationals (parts may be negative)
// ---------------------------------------------------------------------------

struct RPartition {
  std::vector<Rat> parts;

  RPartition() = default;
  explicit RPartition(std::vector<Rat> p) : parts(std::move(p)) {}
  RPartition(std::initializer_list<Rat> p) : parts(p) {}

  int length() const { return static_cast<int>(parts.size()); }
  const Rat& operator[](int i) const { return parts.at(i); }  // 0-based
  Rat& operator[](int i) { return parts.at(i); }

  bool weakly_decreasing() const {
    for (size_t i = 1; i < parts.size(); ++i)
      if (parts[i - 1] < parts[i]) return false;
    return true;
  }

  Rat sum() const {
    Rat s(0);
    for (const auto& p : parts) s += p;
    return s;
  }

  // componentwise containment (equal lengths assumed; pad with trailing
  // copies of the last comparison if lengths differ is NOT done here)
  bool contains(const RPartition& inner) const {
    if (inner.parts.size() != parts.size()) return false;
    for (size_t i = 0; i < parts.size(); ++i)
      if (parts[i] < inner.parts[i]) return false;
    return true;
  }

  // mu + (alpha): add alpha to every part
  RPartition shifted(const Rat& alpha) const {
    RPartition out = *this;
    for (auto& p : out.parts) p += alpha;
    return out;
  }

  bool operator==(const RPartition& o) const { return parts == o.parts; }
  bool operator!=(const RPartition& o) const { return !(*this == o); }

  std::string str() const {
    std::string s = "(";
    for (size_t i = 0; i < parts.size(); ++i) {
      if (i) s += ",";
      s += rat_str(parts[i]);
    }
    return s + ")";
  }
};

inline RPartition partition_parse(const std::string& s) {
  // comma- or space-separated rational tokens
  std::vector<Rat> parts;
  std::string tok;
  for (char c : s + ",") {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!tok.empty()) {
        parts.push_back(rat_parse(tok));
        tok.clear();
      }
    } else {
      tok += c;
    }
  }
  return RPartition(std::move(parts));
}

// ---------------------------------------------------------------------------
// IndexSet: strictly increasing 1-based indices within 1..r
// ---------------------------------------------------------------------------

struct IndexSet {
  int r = 0;
  std::vector<int> idx;  // strictly increasing, within 1..r

  IndexSet() = default;
  IndexSet(int ambient, std::vector<int> indices) : r(ambient), idx(std::move(indices)) {
    for (size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] < 1 || idx[i] > r || (i && idx[i] <= idx[i - 1]))
        throw std::invalid_argument("IndexSet: indices must be strictly increasing within 1..r");
    }
  }

  int size() const { return static_cast<int>(idx.size()); }

  IndexSet complement() const {
    std::vector<int> out;
    size_t k = 0;
    for (int v = 1; v <= r; ++v) {
      if (k < idx.size() && idx[k] == v) {
        ++k;
      } else {
        out.push_back(v);
      }
    }
    return IndexSet(r, std::move(out));
  }

  // U-hat: (r - u_k + 1, ..., r - u_1 + 1)
  IndexSet hat() const {
    std::vector<int> out;
    for (auto it = idx.rbegin(); it != idx.rend(); ++it) out.push_back(r - *it + 1);
    return IndexSet(r, std::move(out));
  }

  std::uint32_t mask() const {
    std::uint32_t m = 0;
    for (int v : idx) m |= (1u << (v - 1));
    return m;
  }

  bool operator==(const IndexSet& o) const { return r == o.r && idx == o.idx; }
};

inline IndexSet index_range(int r, int lo, int hi) {  // (lo, lo+1, ..., hi)
  std::vector<int> v;
  for (int i = lo; i <= hi; ++i) v.push_back(i);
  return IndexSet(r, std::move(v));
}

// |mu_I| = sum of the parts of mu selected by I
inline Rat part_sum(const RPartition& mu, const IndexSet& I) {
  Rat s(0);
  for (int i : I.idx) s += mu[i - 1];
  return s;
}

// ---------------------------------------------------------------------------
// ValMatrix
// ---------------------------------------------------------------------------

class ValMatrix {
 public:
  ValMatrix() = default;
  explicit ValMatrix(int r) : r_(r), e_(static_cast<size_t>(r) * r) {}

  int r() const { return r_; }
  FieldElement& at(int i, int j) { return e_[static_cast<size_t>(i) * r_ + j]; }  // 0-based
  const FieldElement& at(int i, int j) const { return e_[static_cast<size_t>(i) * r_ + j]; }

  bool operator==(const ValMatrix& o) const { return r_ == o.r_ && e_ == o.e_; }

 private:
  int r_ = 0;
  std::vector<FieldElement> e_;
};

inline ValMatrix identity_matrix(int r) {
  ValMatrix m(r);
  for (int i = 0; i < r; ++i) m.at(i, i) = fe_one();
  return m;
}

inline ValMatrix mat_mul(const ValMatrix& a, const ValMatrix& b) {
  if (a.r() != b.r()) throw std::invalid_argument("mat_mul: size mismatch");
  const int r = a.r();
  ValMatrix c(r);
  for (int i = 0; i < r; ++i)
    for (int k = 0; k < r; ++k) {
      if (a.at(i, k).is_zero()) continue;
      for (int j = 0; j < r; ++j) {
        if (b.at(k, j).is_zero()) continue;
        c.at(i, j) = add(c.at(i, j), mul(a.at(i, k), b.at(k, j)));
      }
    }
  return c;
}

inline ValMatrix transpose(const ValMatrix& a) {
  ValMatrix c(a.r());
  for (int i = 0; i < a.r(); ++i)
    for (int j = 0; j < a.r(); ++j) c.at(j, i) = a.at(i, j);
  return c;
}

// D_mu = diag(t^{mu_1}, ..., t^{mu_r})
inline ValMatrix diag_from_partition(const RPartition& mu) {
  ValMatrix m(mu.length());
  for (int i = 0; i < mu.length(); ++i) m.at(i, i) = monomial(mu[i], 1);
  return m;
}

// D_nuhat = diag(t^{nu_r}, ..., t^{nu_1})
inline ValMatrix diag_from_partition_hat(const RPartition& nu) {
  const int r = nu.length();
  ValMatrix m(r);
  for (int i = 0; i < r; ++i) m.at(i, i) = monomial(nu[r - 1 - i], 1);
  return m;
}

// Pi_r: the permutation taking e_i to e_{r-i+1} (antidiagonal reversal)
inline ValMatrix reversal_permutation(int r) {
  ValMatrix m(r);
  for (int i = 0; i < r; ++i) m.at(i, r - 1 - i) = fe_one();
  return m;
}

// ---------------------------------------------------------------------------
// Minors: Laplace expansion memoized over (row-subset, column-subset)
// ---------------------------------------------------------------------------

class MinorCache {
 public:
  explicit MinorCache(const ValMatrix& m) : m_(m) {}

  // With a bound, every cached minor is truncated at it.  Terms of exponent
  // >= bound never influence terms < bound of any later product (entry
  // valuations are added), so all minor valuations below the bound stay
  // exact; only use this when valuations >= bound are clamped anyway.
  MinorCache(const ValMatrix& m, const Rat& truncate_at)
      : m_(m), bound_(truncate_at) {}

  const ValMatrix& matrix() const { return m_; }

  // determinant of the submatrix on the 0-based bitmask row/column subsets
  const FieldElement& det(std::uint32_t rows, std::uint32_t cols) {
    const std::uint64_t key = (static_cast<std::uint64_t>(rows) << 32) | cols;
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;

    FieldElement result;
    const int nr = __builtin_popcount(rows);
    if (nr != __builtin_popcount(cols)) throw std::invalid_argument("minor: size mismatch");
    if (nr == 0) {
      result = fe_one();
    } else {
      // expand along the first selected row
      const int i = __builtin_ctz(rows);
      const std::uint32_t rows_rest = rows & (rows - 1);
      int sign = 1;
      std::uint32_t cc = cols;
      while (cc) {
        const int j = __builtin_ctz(cc);
        cc &= cc - 1;
        if (!m_.at(i, j).is_zero()) {
          FieldElement contrib = mul(m_.at(i, j), det(rows_rest, cols & ~(1u << j)));
          result = add(result, sign > 0 ? contrib : neg(contrib));
        }
        sign = -sign;
      }
    }
    if (bound_) result = truncate(result, *bound_);
    return memo_.emplace(key, std::move(result)).first->second;
  }

  const FieldElement& minor(const IndexSet& I, const IndexSet& J) {
    if (I.size() != J.size()) throw std::invalid_argument("minor: |I| != |J|");
    return det(I.mask(), J.mask());
  }

 private:
  const ValMatrix& m_;
  std::optional<Rat> bound_;
  std::unordered_map<std::uint64_t, FieldElement> memo_;
};

inline FieldElement minor(const ValMatrix& m, const IndexSet& I, const IndexSet& J) {
  MinorCache cache(m);
  return cache.minor(I, J);
}

// True iff some permutation hits only nonzero entries; distinguishes
// pattern zeros of triangular matrices from zeros caused by cancellation.
inline bool minor_structurally_nonzero(const ValMatrix& m, const IndexSet& I,
                                       const IndexSet& J) {
  const int k = I.size();
  if (k != J.size()) throw std::invalid_argument("minor: |I| != |J|");
  // bitmask DP over columns assigned to the first p rows
  std::vector<char> reach(1u << k, 0);
  reach[0] = 1;
  for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
    if (!reach[mask]) continue;
    const int p = __builtin_popcount(mask);
    if (p == k) continue;
    for (int c = 0; c < k; ++c) {
      if (mask & (1u << c)) continue;
      if (!m.at(I.idx[p] - 1, J.idx[c] - 1).is_zero()) reach[mask | (1u << c)] = 1;
    }
  }
  return reach[(1u << k) - 1];
}

// ---------------------------------------------------------------------------
// Determinantal divisors and the invariant partition
// ---------------------------------------------------------------------------

namespace detail {

inline void subsets_of_size(int r, int k, std::vector<std::uint32_t>& out) {
  // all k-subsets of {0..r-1} as bitmasks
  std::uint32_t mask = (k == 0) ? 0 : (1u << k) - 1;
  if (k == 0) {
    out.push_back(0);
    return;
  }
  while (mask < (1u << r)) {
    out.push_back(mask);
    // next subset with same popcount (Gosper's hack)
    const std::uint32_t c = mask & -mask;
    const std::uint32_t rr = mask + c;
    mask = (((rr ^ mask) >> 2) / c) | rr;
  }
}

inline Valuation det_divisor(MinorCache& cache, int k) {
  const int r = cache.matrix().r();
  if (k < 1 || k > r) throw std::invalid_argument("det_divisor: k out of range");
  std::vector<std::uint32_t> subsets;
  subsets_of_size(r, k, subsets);
  Valuation best = Valuation::inf();
  for (std::uint32_t rows : subsets)
    for (std::uint32_t cols : subsets)
      best = val_min(best, valuation(cache.det(rows, cols)));
  return best;
}

}  // namespace detail

// d_k = min over all k x k minors of the valuation
inline Valuation det_divisor(const ValMatrix& m, int k) {
  MinorCache cache(m);
  return detail::det_divisor(cache, k);
}

struct RankError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// inv(M): mu_{r-k+1} = d_k - d_{k-1}; requires full rank
inline RPartition invariant_partition(const ValMatrix& m) {
  const int r = m.r();
  MinorCache cache(m);
  std::vector<Valuation> d(r + 1);
  d[0] = Valuation::fin(0);
  for (int k = 1; k <= r; ++k) {
    d[k] = detail::det_divisor(cache, k);
    if (d[k].infinite) throw RankError("invariant_partition: matrix is rank-deficient");
  }
  std::vector<Rat> mu(r);
  for (int k = 1; k <= r; ++k) mu[r - k] = d[k].value - d[k - 1].value;
  RPartition out(std::move(mu));
  if (!out.weakly_decreasing())
    throw std::logic_error("invariant_partition: determinantal divisors not concave");
  return out;
}

inline bool full_rank(const ValMatrix& m) {
  std::vector<int> all;
  for (int i = 1; i <= m.r(); ++i) all.push_back(i);
  IndexSet I(m.r(), all);
  return !minor(m, I, I).is_zero();
}

// Membership in GL_r(R): entries in R and unit determinant.
inline bool in_glr(const ValMatrix& m) {
  for (int i = 0; i < m.r(); ++i)
    for (int j = 0; j < m.r(); ++j) {
      const Valuation v = valuation(m.at(i, j));
      if (!v.infinite && v.value < 0) return false;
    }
  std::vector<int> all;
  for (int i = 1; i <= m.r(); ++i) all.push_back(i);
  IndexSet I(m.r(), all);
  return valuation(minor(m, I, I)) == Valuation::fin(0);
}

// ---------------------------------------------------------------------------
// Smith-style reduction oracle (truncating; independent of det_divisor)
// ---------------------------------------------------------------------------

struct PrecisionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Pivot on minimal-valuation entries with row/column elimination, truncating
// every series at exponent >= precision.  Refuses when a pivot's valuation
// reaches the precision bound, which signals that the bound was too small.
inline RPartition smith_reduce(const ValMatrix& m, const Rat& precision) {
  const int r = m.r();
  std::vector<std::vector<FieldElement>> a(r, std::vector<FieldElement>(r));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) a[i][j] = truncate(m.at(i, j), precision);

  std::vector<Rat> exps;
  for (int k = 0; k < r; ++k) {
    // locate the minimal-valuation pivot in the trailing block
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
    if (best.infinite || best.value >= precision)
      throw PrecisionError("smith_reduce: pivot valuation reached precision bound");
    std::swap(a[pi], a[k]);
    for (int i = 0; i < r; ++i) std::swap(a[i][pj], a[i][k]);

    for (int i = k + 1; i < r; ++i) {
      if (a[i][k].is_zero()) continue;
      FieldElement mlt = divide_trunc(a[i][k], a[k][k], precision);
      for (int j = k; j < r; ++j)
        a[i][j] = truncate(sub(a[i][j], mul(mlt, a[k][j])), precision);
    }
    for (int j = k + 1; j < r; ++j) {
      if (a[k][j].is_zero()) continue;
      FieldElement mlt = divide_trunc(a[k][j], a[k][k], precision);
      for (int i = k; i < r; ++i)
        a[i][j] = truncate(sub(a[i][j], mul(mlt, a[i][k])), precision);
    }
    exps.push_back(best.value);
  }
  std::sort(exps.begin(), exps.end(), [](const Rat& x, const Rat& y) { return x > y; });
  return RPartition(std::move(exps));
}

// Escalating wrapper: double the precision until two consecutive runs agree.
inline RPartition smith_invariants(const ValMatrix& m) {
  Rat precision(64);
  std::optional<RPartition> prev;
  for (int attempt = 0; attempt < 24; ++attempt) {
    try {
      RPartition cur = smith_reduce(m, precision);
      if (prev && *prev == cur) return cur;
      prev = cur;
    } catch (const PrecisionError&) {
      prev.reset();
    }
    precision *= 2;
  }
  throw PrecisionError("smith_invariants: failed to stabilize");
}

// ---------------------------------------------------------------------------
// Interlacing
// ---------------------------------------------------------------------------

// For sigma = inv(submatrix on H_rows x H_cols) of size s:
// true iff mu_i >= sigma_i >= mu_{i+r-s} for all i.  A singular submatrix is
// a skip-signal (nullopt), not a violation.
inline std::optional<bool> interlace_check(const ValMatrix& m, const IndexSet& H_rows,
                                           const IndexSet& H_cols) {
  if (H_rows.size() != H_cols.size())
    throw std::invalid_argument("interlace_check: |H_rows| != |H_cols|");
  const int r = m.r();
  const int s = H_rows.size();
  const RPartition mu = invariant_partition(m);
  ValMatrix sub(s);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j)
      sub.at(i, j) = m.at(H_rows.idx[i] - 1, H_cols.idx[j] - 1);
  if (!full_rank(sub)) return std::nullopt;
  const RPartition sigma = invariant_partition(sub);
  for (int i = 0; i < s; ++i) {
    if (mu[i] < sigma[i]) return false;
    if (sigma[i] < mu[i + r - s]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Matrix text format: "r=<n>" then r lines of r semicolon-separated elements
// ---------------------------------------------------------------------------

inline std::string matrix_to_string(const ValMatrix& m) {
  std::ostringstream os;
  os << "r=" << m.r() << "\n";
  for (int i = 0; i < m.r(); ++i) {
    for (int j = 0; j < m.r(); ++j) {
      if (j) os << "; ";
      os << fe_str(m.at(i, j));
    }
    os << "\n";
  }
  return os.str();
}

struct ParseError : std::runtime_error {
  int line;
  int column;
  ParseError(const std::string& what, int ln, int col)
      : std::runtime_error(what + " (line " + std::to_string(ln) + ", column " +
                           std::to_string(col) + ")"),
        line(ln),
        column(col) {}
};

inline ValMatrix matrix_parse(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  // header
  do {
    if (!std::getline(is, line)) throw ParseError("missing matrix header", lineno + 1, 1);
    ++lineno;
  } while (line.find_first_not_of(" \t\r") == std::string::npos);
  if (line.rfind("r=", 0) != 0) throw ParseError("expected 'r=<n>' header", lineno, 1);
  int r = 0;
  try {
    r = std::stoi(line.substr(2));
  } catch (...) {
    throw ParseError("bad matrix size", lineno, 3);
  }
  if (r < 1 || r > 64) throw ParseError("matrix size out of range", lineno, 3);

  ValMatrix m(r);
  for (int i = 0; i < r; ++i) {
    do {
      if (!std::getline(is, line)) throw ParseError("missing matrix row", lineno + 1, 1);
      ++lineno;
    } while (line.find_first_not_of(" \t\r") == std::string::npos);
    std::vector<std::string> cells;
    std::string cell;
    for (char c : line + ";") {
      if (c == ';') {
        cells.push_back(cell);
        cell.clear();
      } else {
        cell += c;
      }
    }
    if (static_cast<int>(cells.size()) != r)
      throw ParseError("expected " + std::to_string(r) + " entries", lineno, 1);
    for (int j = 0; j < r; ++j) {
      try {
        m.at(i, j) = fe_parse(cells[j]);
      } catch (const std::exception& ex) {
        throw ParseError(std::string("bad field element: ") + ex.what(), lineno, j + 1);
      }
    }
  }
  return m;
}

}  // namespace lrval
