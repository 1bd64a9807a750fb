#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include <lrval/dynamics.hpp>

using namespace lrval;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ValMatrix paper_M() { return matrix_parse(slurp("tests/data/M.txt")); }
ValMatrix paper_N() { return matrix_parse(slurp("tests/data/N.txt")); }

GenericForm paper_form() { return to_mu_nuhat_generic(paper_M(), paper_N(), 1); }

}  // namespace

TEST_CASE("nu_2 sweep of the worked example matches the paper's diagrams") {
  GenericForm G = paper_form();
  DeformationTrace tr = sweep(G, SweepSide::Nu, 2);

  REQUIRE(tr.breakpoints.size() == 3);
  CHECK(tr.breakpoints[0].beta == 6);
  CHECK(tr.breakpoints[0].j == 2);
  CHECK(tr.breakpoints[1].beta == 3);
  CHECK(tr.breakpoints[1].j == 3);
  CHECK(tr.breakpoints[2].beta == 1);
  CHECK(tr.breakpoints[2].j == 4);

  // sampled shapes at the paper's diagram parameters
  auto rows = [&](const Rat& beta) { return sweep_shape(tr, beta).len; };
  CHECK(rows(6) == std::vector<Rat>{0, 3, 2, 1});
  CHECK(rows(5) == std::vector<Rat>{0, 2, 2, 1});
  CHECK(rows(Rat(9, 2)) == std::vector<Rat>{0, Rat(3, 2), 2, 1});
  CHECK(rows(Rat(16, 5)) == std::vector<Rat>{0, Rat(1, 5), 2, 1});  // k22 = 0.2
  CHECK(rows(Rat(17, 10)) == std::vector<Rat>{0, 0, Rat(7, 10), 1});
  CHECK(rows(0) == std::vector<Rat>{0, 0, 0, 0});

  // the filling endpoints: full strip at beta0, empty at 0
  CHECK(tr.at_initial.nu() == RPartition({11, 6, 0, 0}));
  CHECK(tr.at_zero.nu() == RPartition({11, 0, 0, 0}));
}

TEST_CASE("sweep shapes grow as initial segments") {
  GenericForm G = paper_form();
  DeformationTrace tr = sweep(G, SweepSide::Nu, 2);
  StripShape prev = sweep_shape(tr, Rat(1, 7));
  for (int k = 1; k <= 14; ++k) {
    const Rat beta = Rat(k * 3, 7);
    StripShape cur = sweep_shape(tr, beta);
    CHECK(initial_segment(prev, cur));
    prev = cur;
  }
}

TEST_CASE("mu-side sweep works through the mirror") {
  GenericForm G = paper_form();
  DeformationTrace tr = sweep(G, SweepSide::Mu, 3);
  REQUIRE(!tr.breakpoints.empty());
  CHECK(tr.breakpoints[0].beta == 2);  // mu_3 of the worked example
  CHECK(tr.breakpoints[0].j == 3);
  // shapes remain valid as initial segments while beta decreases
  StripShape lo = sweep_shape(tr, Rat(1, 2)), hi = sweep_shape(tr, Rat(3, 2));
  CHECK(initial_segment(lo, hi));
}

TEST_CASE("sweep of a zero part yields an empty trace") {
  ValMatrix M = diag_from_partition(RPartition({2, 0}));
  ValMatrix N = identity_matrix(2);
  N.at(0, 1) = monomial(1, 1);
  N.at(0, 0) = monomial(0, 1);
  N.at(1, 1) = monomial(3, 1);
  GenericForm G = to_mu_nuhat_generic(M, N, 3);
  DeformationTrace tr = sweep(G, SweepSide::Nu, 2);
  if ((*G.nu)[1] == 0) CHECK(tr.breakpoints.empty());
}

TEST_CASE("stability: truncating nu keeps earlier strips (Cor same-same)") {
  GenericForm G = paper_form();
  CHECK(stability_check_same(G, 2, 2));          // nu -> (11,6,2,0...)
  CHECK(stability_check_same(G, 1, Rat(7, 2)));  // nu -> (11,7/2,0,0)
  CHECK(stability_check_same(G, 3, 1));
}

TEST_CASE("stability: reducing mu moves nothing below kappa (Cor don't-move)") {
  GenericForm G = paper_form();
  CHECK(stability_check_below(G, 2, 1));          // mu_3: 2 -> 1
  CHECK(stability_check_below(G, 1, Rat(7, 2)));  // mu_2: 5 -> 7/2
}

TEST_CASE("bijection right-to-left through matrix realizations") {
  LRFilling F = filling_parse(slurp("tests/data/paper-filling.txt"));
  LRFilling G1 = bijection_right_to_left(F, 3);
  // composing with the mirror returns the original filling
  LRFilling back = bijection_left_to_right(G1, 3);
  CHECK(back == F);
  // and the left filling has content mu with shape lambda/nu
  CHECK(G1.mu == F.nu());
  CHECK(G1.nu() == F.mu);
  CHECK(G1.lambda() == F.lambda());
}

TEST_CASE("scalar shift pair shifts edge parts of both fillings") {
  auto [M2, N2] = scalar_shift_pair(paper_M(), paper_N(), 2, 3);
  // right filling edges gain alpha = 2, left filling edges gain beta = 3
  LRFilling R0 = right_filling(paper_M(), paper_N(), 1);
  LRFilling R2 = right_filling(M2, N2, 1);
  for (int i = 1; i <= 4; ++i) {
    CHECK(R2.part(i, i) == R0.part(i, i) + 2);
    for (int j = i + 1; j <= 4; ++j) CHECK(R2.part(i, j) == R0.part(i, j));
  }
  LRFilling L0 = left_filling(paper_M(), paper_N(), 1);
  LRFilling L2 = left_filling(M2, N2, 1);
  for (int i = 1; i <= 4; ++i) {
    CHECK(L2.part(i, i) == L0.part(i, i) + 3);
    for (int j = i + 1; j <= 4; ++j) CHECK(L2.part(i, j) == L0.part(i, j));
  }
}

TEST_CASE("minimal_nonneg_shift on a pair with negative parts") {
  // shift the worked example down so edges go negative, then recover
  auto [M2, N2] = scalar_shift_pair(paper_M(), paper_N(), -3, Rat(-5, 2));
  auto [alpha, beta] = minimal_nonneg_shift(M2, N2, 9);
  CHECK(alpha >= 0);
  CHECK(beta >= 0);
  auto [M3, N3] = scalar_shift_pair(M2, N2, alpha, beta);
  LRFilling R = right_filling(M3, N3, 2), L = left_filling(M3, N3, 2);
  for (int i = 1; i <= 4; ++i) {
    CHECK(R.part(i, i) >= 0);
    CHECK(L.part(i, i) >= 0);
  }
  // minimality on the half-integer grid: half a step less goes negative
  if (alpha > 0) {
    auto [M4, N4] = scalar_shift_pair(M2, N2, alpha - Rat(1, 2), beta);
    LRFilling R4 = right_filling(M4, N4, 2);
    bool neg = false;
    for (int i = 1; i <= 4; ++i)
      if (R4.part(i, i) < 0) neg = true;
    CHECK(neg);
  }
}

TEST_CASE("sweep rejects configurations with negative parts") {
  auto [M2, N2] = scalar_shift_pair(paper_M(), paper_N(), -3, 0);
  GenericForm G = to_mu_nuhat_generic(M2, N2, 4);
  CHECK_THROWS_AS(sweep(G, SweepSide::Nu, 2), SweepError);
}
