// Acceptance gate: one pass/fail line per criterion, exit 0 iff all pass.

#include <lrval/lrval.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <random>
#include <string>
#include <vector>

using namespace lrval;

namespace {

int g_failures = 0;

void report(int criterion, bool ok, const std::string& detail) {
  std::printf("Criterion %d: %s — %s\n", criterion, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

template <typename Fn>
void guarded(int criterion, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    report(criterion, false, std::string("exception: ") + e.what());
  }
}

RPartition partition(std::initializer_list<long> parts) {
  std::vector<Rat> p;
  for (long v : parts) p.emplace_back(v);
  return RPartition(std::move(p));
}

// --- shared random generators -----------------------------------------------

RPartition random_integer_partition(std::mt19937_64& rng, int r, int max_part) {
  std::uniform_int_distribution<int> dist(0, max_part);
  std::vector<Rat> parts;
  for (int i = 0; i < r; ++i) parts.emplace_back(dist(rng));
  std::sort(parts.begin(), parts.end(), [](const Rat& a, const Rat& b) { return a > b; });
  return RPartition(std::move(parts));
}

// Valid nonnegative integer filling: parts are drawn in lexicographic (i, j)
// order inside the exact column-strictness and word-condition bounds, so the
// result is valid by construction (and re-checked).
LRFilling random_integer_filling(std::mt19937_64& rng, int r, int max_mu, int max_part) {
  LRFilling F = zero_filling(random_integer_partition(rng, r, max_mu));
  for (int i = 1; i <= r; ++i)
    for (int j = i; j <= r; ++j) {
      Rat bound(max_part);
      if (j > 1) {  // LR3: column j may not outgrow column j-1 through row i
        Rat left = F.mu[j - 2], here = F.mu[j - 1];
        for (int s = 1; s < i && s <= j - 1; ++s) left += F.part(s, j - 1);
        for (int s = 1; s < i; ++s) here += F.part(s, j);
        if (left - here < bound) bound = left - here;
      }
      if (i > 1) {  // LR4: row-i prefix sums stay below row-(i-1) prefix sums
        Rat upper(0), lower(0);
        for (int s = i - 1; s <= j - 1; ++s) upper += F.part(i - 1, s);
        for (int s = i; s <= j - 1; ++s) lower += F.part(i, s);
        if (upper - lower < bound) bound = upper - lower;
      }
      if (bound < 0) bound = 0;
      std::uniform_int_distribution<long> dist(0, bound.get_num().get_si());
      F.part(i, j) = Rat(dist(rng));
    }
  if (!validate_filling(F).empty())
    throw std::logic_error("random_integer_filling: generator produced an invalid filling");
  return F;
}

// Full-rank matrix of monomial entries t^e with e a half-integer in [0, 10].
ValMatrix random_monomial_matrix(std::mt19937_64& rng, int r) {
  std::uniform_int_distribution<int> twice_exp(0, 20);
  std::uniform_int_distribution<int> coeff(1, 9);
  for (int tries = 0; tries < 200; ++tries) {
    ValMatrix m(r);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j)
        m.at(i, j) = monomial(Rat(twice_exp(rng), 2), coeff(rng));
    if (full_rank(m)) return m;
  }
  throw std::logic_error("random_monomial_matrix: no full-rank draw in 200 tries");
}

std::string partition_str(const RPartition& p) {
  std::string s = "(";
  for (int i = 0; i < p.length(); ++i) {
    if (i) s += ",";
    s += rat_str(p[i]);
  }
  return s + ")";
}

// --- golden pair from the worked example ------------------------------------

ValMatrix golden_M() { return diag_from_partition(partition({9, 5, 2, 1})); }

ValMatrix golden_N() {
  return matrix_parse(
      "r=4\n"
      "1*t^(6/1); 1*t^(3/1); 1*t^(2/1); 1*t^(2/1)\n"
      "0; 1*t^(5/1); 2*t^(4/1); 2*t^(4/1) + 1*t^(3/1)\n"
      "0; 0; 1*t^(6/1); 1*t^(6/1) + 1*t^(5/1) + 1*t^(4/1)\n"
      "0; 0; 0; 1*t^(5/1)\n");
}

LRFilling golden_right_filling() {
  return LRFilling(partition({9, 5, 2, 1}),
                   {{Rat(6), Rat(2), Rat(2), Rat(1)},
                    {Rat(3), Rat(2), Rat(1)},
                    {Rat(2), Rat(1)},
                    {Rat(2)}});
}

// --- criteria ----------------------------------------------------------------

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const ValMatrix M = golden_M(), N = golden_N();
  bool ok = invariant_partition(M) == partition({9, 5, 2, 1}) &&
            invariant_partition(N) == partition({11, 6, 3, 2}) &&
            invariant_partition(mat_mul(M, N)) == partition({15, 10, 8, 6});

  const GenericForm G = to_mu_nuhat_generic(M, N, 1);
  const auto right_seq = invariant_sequence_right(G);
  const auto left_seq = invariant_sequence_left(G);
  const std::vector<RPartition> want_right = {
      partition({9, 5, 2, 1}), partition({15, 7, 4, 2}), partition({15, 10, 6, 3}),
      partition({15, 10, 8, 4}), partition({15, 10, 8, 6})};
  const std::vector<RPartition> want_left = {
      partition({11, 6, 3, 2}), partition({15, 8, 5, 3}), partition({15, 10, 7, 4}),
      partition({15, 10, 8, 5}), partition({15, 10, 8, 6})};
  ok = ok && right_seq == want_right && left_seq == want_left;
  ok = ok && filling_from_sequence(right_seq) == golden_right_filling();

  const auto t1 = std::chrono::steady_clock::now();
  const double secs = std::chrono::duration<double>(t1 - t0).count();
  ok = ok && secs < 10.0;
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "golden worked example reproduced exactly in %.2f s (< 10 s)", secs);
  report(1, ok, buf);
}

void criterion2() {
  std::mt19937_64 rng(0xACC2);
  int pass = 0;
  const int total = 200;
  for (int t = 0; t < total; ++t) {
    const int r = 1 + static_cast<int>(rng() % 4);
    const LRFilling F = random_integer_filling(rng, r, 12, 4);
    const FillingRealization R = matrices_from_filling(F);
    if (right_filling(R.M, R.N, 0xACC2 + t) == F) ++pass;
  }
  report(2, pass == total,
         "round-trip matrices_from_filling -> extraction on " + std::to_string(total) +
             " random fillings (r <= 4, parts <= 12): " + std::to_string(pass) + "/" +
             std::to_string(total));
}

void criterion3() {
  std::mt19937_64 rng(0xACC3);
  int pass = 0;
  const int total = 100;
  for (int t = 0; t < total; ++t) {
    const int r = 2 + static_cast<int>(rng() % 3);
    const ValMatrix M = random_monomial_matrix(rng, r);
    const ValMatrix N = random_monomial_matrix(rng, r);
    const GenericForm GU = to_mu_generic(M, N, 0xACC3 + t);
    const LRFilling F_det = right_filling_determinantal(GU, invariant_partition(M));
    const GenericForm GL = to_mu_nuhat_generic(M, N, 0xACC3 + t);
    const LRFilling F_seq = filling_from_sequence(invariant_sequence_right(GL));
    if (F_det == F_seq) ++pass;
  }
  report(3, pass == total,
         "determinantal vs invariant-sequence extraction on " + std::to_string(total) +
             " monomial pairs: " + std::to_string(pass) + "/" + std::to_string(total));
}

void criterion4() {
  std::mt19937_64 rng(0xACC4);
  int pass = 0;
  const int pairs = 20, moves = 20;
  for (int t = 0; t < pairs; ++t) {
    const int r = 2 + static_cast<int>(rng() % 3);
    const ValMatrix M = random_monomial_matrix(rng, r);
    const ValMatrix N = random_monomial_matrix(rng, r);
    const LRFilling base = right_filling(M, N, 0xACC4 + t);
    bool all = true;
    for (int m = 0; m < moves; ++m) {
      const InvertiblePair P = random_glr(r, rng);
      const InvertiblePair Q = random_glr(r, rng);
      const InvertiblePair T = random_glr(r, rng);
      const ValMatrix M2 = mat_mul(mat_mul(P.m, M), Q.inv);
      const ValMatrix N2 = mat_mul(mat_mul(Q.m, N), T.inv);
      if (right_filling(M2, N2, 0xACC4 + 1000 * t + m) != base) all = false;
    }
    if (all) ++pass;
  }
  report(4, pass == pairs,
         "extracted filling invariant under " + std::to_string(moves) +
             " GL^3 orbit moves on " + std::to_string(pairs) + " pairs: " +
             std::to_string(pass) + "/" + std::to_string(pairs));
}

void criterion5() {
  std::mt19937_64 rng(0xACC5);
  int checked = 0, skipped = 0;
  bool ok = true;
  for (int t = 0; t < 200; ++t) {
    const ValMatrix m = random_monomial_matrix(rng, 4);
    std::vector<IndexSet> subs;
    for (int omit = 1; omit <= 4; ++omit) subs.push_back(IndexSet(4, {omit}).complement());
    for (const auto& rows : subs)
      for (const auto& cols : subs) {
        const std::optional<bool> v = interlace_check(m, rows, cols);
        if (!v) {
          ++skipped;
          continue;
        }
        ++checked;
        if (!*v) ok = false;
      }
  }
  report(5, ok && checked > 0,
         "all 3x3 submatrix partitions interlace on 200 random 4x4 matrices (" +
             std::to_string(checked) + " checked, " + std::to_string(skipped) +
             " singular skips)");
}

// Binary-search the sampled first-difference location bracketing an exact
// breakpoint, down to resolution 1/1024, and a 50-sample segment sweep.
bool check_one_sweep(const GenericForm& G, SweepSide side, int s, std::mt19937_64& rng) {
  const DeformationTrace trace = sweep(G, side, s);
  if (trace.breakpoints.empty()) return true;  // zero-length strip
  const Rat beta0 = trace.breakpoints.front().beta;
  const Rat res(1, 1024);

  // 50 sampled parameters: segment-shape agreement + monotone initial segments
  std::vector<Rat> samples;
  std::uniform_int_distribution<long> grid(0, 1024);
  for (int i = 0; i < 50; ++i) {
    Rat q(grid(rng), 1024);
    q.canonicalize();  // two-argument mpq_class does not reduce
    samples.push_back(beta0 * q);
  }
  std::sort(samples.begin(), samples.end());
  StripShape prev;
  bool have_prev = false;
  for (const Rat& b : samples) {
    const StripShape shape = sweep_shape(trace, b);
    if (b > 0) {
      bool matched = false;
      for (const auto& seg : trace.segments)
        if (seg.beta_lo < b && b <= seg.beta_hi && shape == seg.shape) matched = true;
      if (!matched) return false;
    }
    if (have_prev && !initial_segment(prev, shape)) return false;
    prev = shape;
    have_prev = true;
  }

  // each exact breakpoint (after the initial one) must match the sampled
  // first-difference location to within 1/1024
  for (size_t k = 1; k < trace.breakpoints.size(); ++k) {
    const Rat bk = trace.breakpoints[k].beta;
    const Rat above = trace.breakpoints[k - 1].beta;
    const Rat below = (k + 1 < trace.breakpoints.size()) ? trace.breakpoints[k + 1].beta : Rat(0);
    Rat lo = (bk + below) / 2, hi = (bk + above) / 2;
    const StripShape lo_shape = sweep_shape(trace, lo);
    if (sweep_shape(trace, hi) == lo_shape) return false;  // no difference to locate
    while (hi - lo > res) {
      const Rat mid = (lo + hi) / 2;
      (sweep_shape(trace, mid) == lo_shape ? lo : hi) = mid;
    }
    if (bk < lo - res || bk > hi + res) return false;
  }
  return true;
}

// The section-4 nu_2 sweep of the golden pair, sampled at the displayed values.
bool check_golden_sweep() {
  const GenericForm G = to_mu_nuhat_generic(golden_M(), golden_N(), 6);
  const DeformationTrace trace = sweep(G, SweepSide::Nu, 2);
  auto lens = [&](const Rat& beta) { return sweep_shape(trace, beta).len; };
  const std::vector<Rat> zero32 = {Rat(0), Rat(16, 5), Rat(2), Rat(1)};
  return lens(Rat(6)) == std::vector<Rat>{Rat(0), Rat(3), Rat(2), Rat(1)} &&
         lens(Rat(5)) == std::vector<Rat>{Rat(0), Rat(2), Rat(2), Rat(1)} &&
         lens(Rat(9, 2)) == std::vector<Rat>{Rat(0), Rat(3, 2), Rat(2), Rat(1)} &&
         lens(Rat(16, 5)) == std::vector<Rat>{Rat(0), Rat(1, 5), Rat(2), Rat(1)} &&
         lens(Rat(17, 10)) == std::vector<Rat>{Rat(0), Rat(0), Rat(7, 10), Rat(1)};
}

void criterion6() {
  std::mt19937_64 rng(0xACC6);
  bool ok = check_golden_sweep();
  std::string note = ok ? "sec. 4 nu_2-sweep shapes reproduced; "
                        : "sec. 4 nu_2-sweep shapes WRONG; ";
  int pass = 0;
  const int total = 50;
  for (int t = 0; t < total; ++t) {
    const int r = 2 + static_cast<int>(rng() % 3);
    const LRFilling F = random_integer_filling(rng, r, 8, 3);
    if (F.nu()[0] == 0) {  // content-free pair sweeps are vacuous; redraw
      --t;
      continue;
    }
    const FillingRealization R = matrices_from_filling(F);
    const GenericForm G = to_mu_nuhat_generic(R.M, R.N, 0xACC6 + t);
    bool all = true;
    for (SweepSide side : {SweepSide::Nu, SweepSide::Mu}) {
      const RPartition& rho = side == SweepSide::Nu ? *G.nu : G.mu;
      std::vector<int> candidates;
      for (int s = 1; s <= r; ++s)
        if (rho[s - 1] > 0) candidates.push_back(s);
      if (candidates.empty()) continue;
      const int s = candidates[rng() % candidates.size()];
      if (!check_one_sweep(G, side, s, rng)) all = false;
    }
    if (all) ++pass;
  }
  ok = ok && pass == total;
  report(6, ok,
         note + "sampled monotonicity and breakpoint locations on " + std::to_string(total) +
             " pairs: " + std::to_string(pass) + "/" + std::to_string(total));
}

void criterion7() {
  std::mt19937_64 rng(0xACC7);
  int pass = 0;
  const int total = 30;
  auto shifted = [](const RPartition& p, const Rat& a) {
    RPartition q = p;
    for (auto& v : q.parts) v += a;
    return q;
  };
  for (int t = 0; t < total; ++t) {
    const int r = 2 + static_cast<int>(rng() % 3);
    LRFilling F = random_integer_filling(rng, r, 4, 2);
    if (F.lambda().sum() + 2 * r > 40) {  // keep the shifted triple at desk scale
      --t;
      continue;
    }
    const RPartition mu = F.mu, nu = F.nu(), lambda = F.lambda();
    const Rat alpha(1 + static_cast<int>(rng() % 2));
    const long base = enumerate_integer_fillings(mu, nu, lambda).count;
    const long right = enumerate_integer_fillings(mu, shifted(nu, alpha),
                                                  shifted(lambda, alpha)).count;
    const long left = enumerate_integer_fillings(shifted(mu, alpha), nu,
                                                 shifted(lambda, alpha)).count;
    if (base >= 1 && base == right && base == left) ++pass;
  }
  report(7, pass == total,
         "scalar-shift count identities c = c(right alpha-shift) = c(left alpha-shift) on " +
             std::to_string(total) + " triples: " + std::to_string(pass) + "/" +
             std::to_string(total));
}

void criterion8() {
  std::mt19937_64 rng(0xACC8);
  int pass = 0, case1 = 0, case2 = 0;
  const int total = 100;
  for (int t = 0; t < total; ++t) {
    const int r = 2 + static_cast<int>(rng() % 3);
    const LRFilling F = random_integer_filling(rng, r, 6, 3);
    if (F.nu()[0] == 0 || F.mu[0] == 0) {
      --t;
      continue;
    }
    const LRFilling G = bijection_right_to_left(F, 5, 0xACC8 + t);
    const LRFilling back = bijection_left_to_right(G, 1, 0xACC8 + 7 * t);
    if (back == F) ++pass;
    const std::optional<int> c = switching_case(F, 0xACC8 + 13 * t);
    if (c == 1) ++case1;
    if (c == 2) ++case2;
  }
  report(8, pass == total && case1 > 0 && case2 > 0,
         "5-realization left fillings agree and mirror returns the original on " +
             std::to_string(total) + " fillings: " + std::to_string(pass) + "/" +
             std::to_string(total) + "; switching-region Case 1 x" + std::to_string(case1) +
             ", Case 2 x" + std::to_string(case2));
}

void criterion9() {
  std::mt19937_64 rng(0xACC9);
  int pass = 0;
  const int total = 100;
  for (int t = 0; t < total; ++t) {
    const int r = 1 + static_cast<int>(rng() % 4);
    ValMatrix m(r);
    if (t % 2 == 0) {
      m = random_monomial_matrix(rng, r);
    } else {
      const FillingRealization R = matrices_from_filling(random_integer_filling(rng, r, 8, 3));
      m = mat_mul(R.M, R.N);
    }
    if (smith_invariants(m) == invariant_partition(m)) ++pass;
  }
  report(9, pass == total,
         "smith_reduce agrees with invariant_partition on " + std::to_string(total) +
             " instances: " + std::to_string(pass) + "/" + std::to_string(total));
}

}  // namespace

int main() {
  guarded(1, criterion1);
  guarded(2, criterion2);
  guarded(3, criterion3);
  guarded(4, criterion4);
  guarded(5, criterion5);
  guarded(6, criterion6);
  guarded(7, criterion7);
  guarded(8, criterion8);
  guarded(9, criterion9);
  if (g_failures == 0) {
    std::printf("All acceptance criteria passed.\n");
    return 0;
  }
  std::printf("%d acceptance criteria FAILED.\n", g_failures);
  return 1;
}
