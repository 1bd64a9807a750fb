#pragma once
// Combinatorics layer: LR fillings with real (here: exact rational) parts,
// validation of the four defining conditions, conversion to/from partition
// sequences, strips, scalar shifts, and a brute-force integer enumeration
// oracle.
//
// A filling is the triangular array k_{ij} (1 <= i <= r, i <= j <= r) over a
// base partition mu.  nu (row sums) and lambda (mu + column sums) are always
// derived, never stored, so |mu| + |nu| = |lambda| cannot drift.

#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "matrix.hpp"
#include <json.hpp>

namespace lrval {

struct LRFilling {
  RPartition mu;                    // length r
  std::vector<std::vector<Rat>> k;  // k[i] holds k_{i+1,j} for j = i+1..r (0-based row i)

  int r() const { return mu.length(); }

  LRFilling() = default;
  LRFilling(RPartition base, std::vector<std::vector<Rat>> parts)
      : mu(std::move(base)), k(std::move(parts)) {
    const int n = mu.length();
    if (static_cast<int>(k.size()) != n)
      throw std::invalid_argument("LRFilling: wrong number of rows");
    for (int i = 0; i < n; ++i)
      if (static_cast<int>(k[i].size()) != n - i)
        throw std::invalid_argument("LRFilling: row " + std::to_string(i + 1) +
                                    " must have " + std::to_string(n - i) + " parts");
  }

  // 1-based accessors, i <= j
  const Rat& part(int i, int j) const { return k.at(i - 1).at(j - i); }
  Rat& part(int i, int j) { return k.at(i - 1).at(j - i); }

  // nu_i = sum over row i (LR1)
  RPartition nu() const {
    std::vector<Rat> out(r());
    for (int i = 1; i <= r(); ++i) {
      Rat s(0);
      for (int j = i; j <= r(); ++j) s += part(i, j);
      out[i - 1] = s;
    }
    return RPartition(std::move(out));
  }

  // lambda_j = mu_j + column-j sum (LR1)
  RPartition lambda() const {
    std::vector<Rat> out(r());
    for (int j = 1; j <= r(); ++j) {
      Rat s = mu[j - 1];
      for (int i = 1; i <= j; ++i) s += part(i, j);
      out[j - 1] = s;
    }
    return RPartition(std::move(out));
  }

  bool operator==(const LRFilling& o) const { return mu == o.mu && k == o.k; }
  bool operator!=(const LRFilling& o) const { return !(*this == o); }
};

inline LRFilling zero_filling(const RPartition& mu) {
  std::vector<std::vector<Rat>> k;
  for (int i = 0; i < mu.length(); ++i) k.emplace_back(mu.length() - i, Rat(0));
  return LRFilling(mu, std::move(k));
}

// ---------------------------------------------------------------------------
// Validation: violations are data, not exceptions
// ---------------------------------------------------------------------------

struct Violation {
  std::string condition;  // "LR1", "LR2", "LR3", "LR4", "MU"
  int i = 0, j = 0;
  std::string detail;
};

inline std::vector<Violation> validate_filling(const LRFilling& F) {
  std::vector<Violation> out;
  const int r = F.r();

  if (!F.mu.weakly_decreasing())
    out.push_back({"MU", 0, 0, "base partition is not weakly decreasing"});

  // LR1: the derived row sums and column sums must themselves be R-partitions
  const RPartition nu = F.nu();
  const RPartition lambda = F.lambda();
  for (int i = 1; i < r; ++i)
    if (nu[i - 1] < nu[i])
      out.push_back({"LR1", i, i + 1, "row sums nu not weakly decreasing"});
  for (int j = 1; j < r; ++j)
    if (lambda[j - 1] < lambda[j])
      out.push_back({"LR1", j, j + 1, "column sums lambda not weakly decreasing"});

  // LR2: interior parts nonnegative (edge parts k_ii unconstrained)
  for (int i = 1; i <= r; ++i)
    for (int j = i + 1; j <= r; ++j)
      if (F.part(i, j) < 0)
        out.push_back({"LR2", i, j, "interior part is negative"});

  // LR3 (column strictness):
  // mu_j + k_{1j}+...+k_{ij} <= mu_{j-1} + k_{1,j-1}+...+k_{i-1,j-1}
  // (at i = 1 the right side is the bare mu_{j-1})
  for (int j = 2; j <= r; ++j) {
    Rat lhs = F.mu[j - 1];
    Rat rhs = F.mu[j - 2];
    for (int i = 1; i <= j; ++i) {
      lhs += F.part(i, j);
      if (lhs > rhs) out.push_back({"LR3", i, j, "column strictness fails"});
      if (i <= j - 1) rhs += F.part(i, j - 1);
    }
  }

  // LR4 (word condition): sum_{s=i+1}^{j+1} k_{i+1,s} <= sum_{s=i}^{j} k_{is}
  for (int i = 1; i < r; ++i) {
    Rat upper(0), lower(0);
    for (int j = i; j <= r; ++j) {
      upper += F.part(i, j);
      if (j + 1 <= r) {
        lower += F.part(i + 1, j + 1);
        if (lower > upper) out.push_back({"LR4", i, j, "word condition fails"});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Partition sequences lambda^{(0)} <= ... <= lambda^{(r)}
// ---------------------------------------------------------------------------

inline LRFilling filling_from_sequence(const std::vector<RPartition>& seq) {
  if (seq.empty()) throw std::invalid_argument("filling_from_sequence: empty sequence");
  const int r = static_cast<int>(seq.size()) - 1;
  if (seq[0].length() != r)
    throw std::invalid_argument("filling_from_sequence: need r+1 partitions of length r");
  for (int i = 1; i <= r; ++i) {
    if (seq[i].length() != r)
      throw std::invalid_argument("filling_from_sequence: length mismatch at step " +
                                  std::to_string(i));
    // interior parts must be nonnegative (edge parts k_ii may shrink, so the
    // sequence need not be a containment chain for negative configurations)
    for (int j = i + 1; j <= r; ++j)
      if (seq[i][j - 1] < seq[i - 1][j - 1])
        throw std::invalid_argument("filling_from_sequence: interior shrinks at step " +
                                    std::to_string(i));
  }
  std::vector<std::vector<Rat>> k(r);
  for (int i = 1; i <= r; ++i)
    for (int j = i; j <= r; ++j)
      k[i - 1].push_back(seq[i][j - 1] - seq[i - 1][j - 1]);
  // parts above the triangle (j < i) must vanish for a triangular array
  for (int i = 1; i <= r; ++i)
    for (int j = 1; j < i; ++j)
      if (seq[i][j - 1] != seq[i - 1][j - 1])
        throw std::invalid_argument(
            "filling_from_sequence: strip " + std::to_string(i) +
            " adds to row " + std::to_string(j) + " above the triangle");
  return LRFilling(seq[0], std::move(k));
}

inline std::vector<RPartition> sequence_from_filling(const LRFilling& F) {
  const int r = F.r();
  std::vector<RPartition> seq;
  seq.push_back(F.mu);
  for (int i = 1; i <= r; ++i) {
    RPartition next = seq.back();
    for (int j = i; j <= r; ++j) next[j - 1] += F.part(i, j);
    seq.push_back(std::move(next));
  }
  return seq;
}

// ---------------------------------------------------------------------------
// Scalar shift
// ---------------------------------------------------------------------------

enum class Side { Left, Right };

// Right: every edge part k_ii += alpha (so nu and lambda shift by +alpha).
// Left: the base partition mu shifts by +alpha (so lambda shifts by +alpha).
inline LRFilling shift_filling(const LRFilling& F, const Rat& alpha, Side side) {
  LRFilling out = F;
  if (side == Side::Right) {
    for (int i = 1; i <= F.r(); ++i) out.part(i, i) += alpha;
  } else {
    out.mu = out.mu.shifted(alpha);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Strips and initial segments
// ---------------------------------------------------------------------------

// The i-strip: the skew shape lambda^{(i)}/lambda^{(i-1)}.  len[j-1] = k_{ij}
// (zero for j < i); start[j-1] = lambda^{(i-1)}_j, the row offset at which the
// strip's row-j part begins.
struct StripShape {
  int strip_index = 0;
  std::vector<Rat> len;
  std::vector<Rat> start;

  int rows() const { return static_cast<int>(len.size()); }
  bool empty() const {
    for (const auto& v : len)
      if (v != 0) return false;
    return true;
  }
  bool operator==(const StripShape& o) const { return len == o.len && start == o.start; }
};

inline StripShape strip(const LRFilling& F, int i) {
  if (i < 1 || i > F.r()) throw std::invalid_argument("strip: index out of range");
  const auto seq = sequence_from_filling(F);
  StripShape s;
  s.strip_index = i;
  for (int j = 1; j <= F.r(); ++j) {
    s.start.push_back(seq[i - 1][j - 1]);
    s.len.push_back(seq[i][j - 1] - seq[i - 1][j - 1]);
  }
  return s;
}

// S1 is an initial segment of S2: the parts agree in all rows below some row
// j, S1 is empty above row j, and S1's row-j part is <= S2's.  Only defined
// for nonnegative strips.
inline bool initial_segment(const StripShape& S1, const StripShape& S2) {
  if (S1.rows() != S2.rows())
    throw std::invalid_argument("initial_segment: row count mismatch");
  for (const auto& v : S1.len)
    if (v < 0) throw std::invalid_argument("initial_segment: negative parts");
  for (const auto& v : S2.len)
    if (v < 0) throw std::invalid_argument("initial_segment: negative parts");

  int j = S1.rows();  // scan upward from the bottom row
  while (j >= 1 && S1.len[j - 1] == S2.len[j - 1]) --j;
  if (j == 0) return true;  // identical strips
  if (S1.len[j - 1] > S2.len[j - 1]) return false;
  for (int a = 1; a < j; ++a)
    if (S1.len[a - 1] != 0) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Brute-force integer enumeration oracle (counts c^lambda_{mu nu})
// ---------------------------------------------------------------------------

struct EnumerationResult {
  long count = 0;
  std::vector<LRFilling> fillings;
};

struct ScaleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline bool is_nonneg_integer_partition(const RPartition& p) {
  if (!p.weakly_decreasing()) return false;
  for (const auto& v : p.parts)
    if (v < 0 || v.get_den() != 1) return false;
  return true;
}

}  // namespace detail

// Exhaustive backtracking over integer k_{ij} >= 0 in lexicographic (i,j)
// order with incremental LR1/LR3/LR4 pruning.
inline EnumerationResult enumerate_integer_fillings(const RPartition& mu,
                                                    const RPartition& nu,
                                                    const RPartition& lambda) {
  const int r = mu.length();
  if (nu.length() != r || lambda.length() != r)
    throw std::invalid_argument("enumerate_integer_fillings: length mismatch");
  if (!detail::is_nonneg_integer_partition(mu) || !detail::is_nonneg_integer_partition(nu) ||
      !detail::is_nonneg_integer_partition(lambda))
    throw std::invalid_argument("enumerate_integer_fillings: nonnegative integer partitions required");
  if (r > 5 || lambda.sum() > 40)
    throw ScaleError("enumerate_integer_fillings: desk scale is r <= 5, |lambda| <= 40");

  EnumerationResult result;
  if (mu.sum() + nu.sum() != lambda.sum()) return result;

  LRFilling F = zero_filling(mu);
  // colsum[j-1]: mu_j + parts placed so far in column j
  std::vector<Rat> colsum(r);
  for (int j = 0; j < r; ++j) colsum[j] = mu[j];

  // recursive placement at (i, j), 1-based, j from i to r
  std::function<void(int, int, Rat)> place = [&](int i, int j, Rat row_remaining) {
    if (j > r) {
      if (row_remaining != 0) return;  // LR1 row sum must hit nu_i exactly
      if (i == r) {
        if (validate_filling(F).empty() && F.lambda() == lambda) {
          ++result.count;
          result.fillings.push_back(F);
        }
        return;
      }
      place(i + 1, i + 1, nu[i]);
      return;
    }

    // upper bounds on k_{ij}
    Rat hi = row_remaining;
    // LR3: mu_j + sum_{s<=i} k_{sj} <= mu_{j-1} + sum_{s<=i-1} k_{s,j-1}
    if (j >= 2) {
      Rat rhs = mu[j - 2];
      for (int s = 1; s <= i - 1; ++s) rhs += F.part(s, j - 1);
      Rat room = rhs - colsum[j - 1];
      if (room < hi) hi = room;
    }
    // LR4 against row i-1: prefix_{i}(j) <= prefix_{i-1}(j-1)
    if (i >= 2) {
      Rat above(0);
      for (int s = i - 1; s <= j - 1; ++s) above += F.part(i - 1, s);
      Rat placed(0);
      for (int s = i; s <= j - 1; ++s) placed += F.part(i, s);
      Rat room = above - placed;
      if (room < hi) hi = room;
    }
    // column completes at row j: the total must equal lambda_j exactly
    if (hi < 0) return;
    long lo = 0;
    if (i == j) {
      Rat need = lambda[j - 1] - colsum[j - 1];
      if (need < 0 || need > hi || need.get_den() != 1) return;
      lo = need.get_num().get_si();
      hi = need;
    }
    const long hi_l = rat_floor(hi).get_num().get_si();
    for (long v = lo; v <= hi_l; ++v) {
      F.part(i, j) = v;
      colsum[j - 1] += v;
      place(i, j + 1, row_remaining - v);
      colsum[j - 1] -= v;
      F.part(i, j) = 0;
    }
  };
  place(1, 1, nu[0]);
  return result;
}

// ---------------------------------------------------------------------------
// Text and JSON formats
// ---------------------------------------------------------------------------

inline std::string filling_to_string(const LRFilling& F) {
  std::ostringstream os;
  os << "mu:";
  for (int j = 0; j < F.r(); ++j) os << " " << rat_str(F.mu[j]);
  os << "\n";
  for (int i = 1; i <= F.r(); ++i) {
    os << "row " << i << ":";
    for (int j = i; j <= F.r(); ++j) os << " " << rat_str(F.part(i, j));
    os << "\n";
  }
  return os.str();
}

inline LRFilling filling_parse(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  std::optional<RPartition> mu;
  std::vector<std::vector<Rat>> rows;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw ParseError("expected 'name: values'", lineno, 1);
    const std::string name = line.substr(0, colon);
    const std::string values = line.substr(colon + 1);
    if (name == "mu") {
      mu = partition_parse(values);
    } else if (name.rfind("row ", 0) == 0) {
      const int i = std::stoi(name.substr(4));
      if (i != static_cast<int>(rows.size()) + 1)
        throw ParseError("rows out of order", lineno, 1);
      rows.push_back(partition_parse(values).parts);
    } else {
      throw ParseError("unknown line '" + name + "'", lineno, 1);
    }
  }
  if (!mu) throw ParseError("missing 'mu:' line", lineno, 1);
  try {
    return LRFilling(*mu, std::move(rows));
  } catch (const std::exception& ex) {
    throw ParseError(ex.what(), lineno, 1);
  }
}

inline nlohmann::json partition_to_json(const RPartition& p) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& v : p.parts) arr.push_back(rat_str(v));
  return arr;
}

inline RPartition partition_from_json(const nlohmann::json& arr) {
  std::vector<Rat> parts;
  for (const auto& v : arr) parts.push_back(rat_parse(v.get<std::string>()));
  return RPartition(std::move(parts));
}

inline nlohmann::json filling_to_json(const LRFilling& F) {
  nlohmann::json j;
  j["mu"] = partition_to_json(F.mu);
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 1; i <= F.r(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int jj = i; jj <= F.r(); ++jj) row.push_back(rat_str(F.part(i, jj)));
    rows.push_back(row);
  }
  j["rows"] = rows;
  return j;
}

inline LRFilling filling_from_json(const nlohmann::json& j) {
  RPartition mu = partition_from_json(j.at("mu"));
  std::vector<std::vector<Rat>> rows;
  for (const auto& row : j.at("rows")) {
    std::vector<Rat> parts;
    for (const auto& v : row) parts.push_back(rat_parse(v.get<std::string>()));
    rows.push_back(std::move(parts));
  }
  return LRFilling(std::move(mu), std::move(rows));
}

}  // namespace lrval
