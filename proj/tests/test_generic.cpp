#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include <lrval/generic.hpp>

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

// the lower-triangular L displayed in the paper's worked example
ValMatrix paper_L() {
  ValMatrix L = identity_matrix(4);
  L.at(1, 0) = fe_parse("2*t^(2/1) + 1*t^(1/1)");
  L.at(2, 0) = fe_parse("1*t^(4/1) + 1*t^(3/1) + 1*t^(2/1)");
  L.at(3, 0) = fe_parse("1*t^(3/1)");
  L.at(2, 1) = fe_parse("1*t^(2/1) + 1*t^(1/1)");
  L.at(3, 1) = fe_parse("1*t^(2/1)");
  L.at(3, 2) = fe_parse("1*t^(1/1)");
  return L;
}

}  // namespace

TEST_CASE("admissibility predicates") {
  const RPartition mu({9, 5, 2, 1});
  CHECK(is_mu_admissible(identity_matrix(4), mu));

  // entry below the exponent gap mu_j - mu_i breaks admissibility
  ValMatrix Q = identity_matrix(4);
  Q.at(3, 0) = monomial(3, 1);  // needs valuation >= mu_1 - mu_4 = 8
  CHECK(!is_mu_admissible(Q, mu));
  Q.at(3, 0) = monomial(8, 1);
  CHECK(is_mu_admissible(Q, mu));

  const RPartition nu({11, 6, 3, 2});
  CHECK(is_nuhat_admissible(identity_matrix(4), nu));
  ValMatrix T = identity_matrix(4);
  T.at(3, 0) = monomial(2, 1);  // needs valuation >= nu_1 - nu_4 = 9
  CHECK(!is_nuhat_admissible(T, nu));

  ValMatrix sing(4);  // not in GL_r(R): precondition violation
  CHECK_THROWS_AS(is_mu_admissible(sing, mu), std::invalid_argument);
}

TEST_CASE("triangular inverses are exact") {
  std::mt19937_64 rng(1);
  for (int it = 0; it < 20; ++it) {
    InvertiblePair P = random_glr(4, rng);
    CHECK(mat_mul(P.m, P.inv) == identity_matrix(4));
    CHECK(mat_mul(P.inv, P.m) == identity_matrix(4));
    CHECK(in_glr(P.m));
  }
}

TEST_CASE("random_mu_admissible") {
  std::mt19937_64 rng(2);
  const RPartition mu({9, 5, 2, 1});
  for (int it = 0; it < 10; ++it) {
    ValMatrix Q = random_mu_admissible(mu, rng);
    CHECK(is_mu_admissible(Q, mu));
  }
}

TEST_CASE("paper's N is already mu-generic") {
  GenericForm G;
  G.kind = FormKind::MuGeneric;
  G.matrix = paper_N();
  G.mu = RPartition({9, 5, 2, 1});
  CHECK(genericity_check(G));
}

TEST_CASE("paper's L passes the mu-nuhat genericity check") {
  GenericForm G;
  G.kind = FormKind::MuNuhatGeneric;
  G.matrix = mat_mul(paper_L(), diag_from_partition_hat(RPartition({11, 6, 3, 2})));
  G.mu = RPartition({9, 5, 2, 1});
  G.nu = RPartition({11, 6, 3, 2});
  CHECK(genericity_check(G));
}

TEST_CASE("degenerate repeated-row matrix fails the check") {
  // rows 1 and 2 identical: the minor on rows {1,2} cancels exactly to zero
  // (INFINITY), while the minor on rows {2,3} over the same columns is finite,
  // violating the (row) inequality for I = {1,2} <= H = {2,3}
  ValMatrix A(3);
  for (int j = 0; j < 3; ++j) {
    A.at(0, j) = fe_one();
    A.at(1, j) = fe_one();
  }
  A.at(2, 0) = fe_one();
  A.at(2, 1) = monomial(1, 1);
  A.at(2, 2) = monomial(2, 1);
  GenericForm G;
  G.kind = FormKind::MuGeneric;
  G.matrix = A;
  G.mu = RPartition({0, 0, 0});
  CHECK(!genericity_check(G));
}

TEST_CASE("to_mu_generic reproduces the paper's N on the worked example") {
  GenericForm G = to_mu_generic(paper_M(), paper_N(), 1);
  CHECK(G.verified);
  CHECK(G.kind == FormKind::MuGeneric);
  CHECK(G.mu == RPartition({9, 5, 2, 1}));
  // the pair (M, N) is already reduced: identity transforms keep N itself
  CHECK(matrix_to_string(G.matrix) == matrix_to_string(paper_N()));
  CHECK(invariant_partition(G.matrix) == RPartition({11, 6, 3, 2}));
}

TEST_CASE("to_mu_nuhat_generic recovers the paper's L") {
  GenericForm G = to_mu_nuhat_generic(paper_M(), paper_N(), 1);
  CHECK(G.verified);
  CHECK(G.kind == FormKind::MuNuhatGeneric);
  CHECK(*G.nu == RPartition({11, 6, 3, 2}));
  // L is lower-triangular with unit diagonal
  for (int i = 0; i < 4; ++i) {
    CHECK(valuation(G.matrix.at(i, i)) == Valuation::fin(0));
    for (int j = i + 1; j < 4; ++j) CHECK(G.matrix.at(i, j).is_zero());
  }
  const ValMatrix LDnu = mat_mul(G.matrix, diag_from_partition_hat(*G.nu));
  CHECK(invariant_partition(LDnu) == RPartition({11, 6, 3, 2}));
  CHECK(invariant_partition(mat_mul(paper_M(), LDnu)) == RPartition({15, 10, 8, 6}));
}

TEST_CASE("reduction handles a scrambled pair") {
  // same orbit as the worked example, scrambled by exact GL_r(R) moves
  std::mt19937_64 rng(99);
  InvertiblePair P = random_glr(4, rng), Q = random_glr(4, rng), T = random_glr(4, rng);
  ValMatrix M2 = mat_mul(mat_mul(P.m, paper_M()), Q.inv);
  ValMatrix N2 = mat_mul(mat_mul(Q.m, paper_N()), T.inv);
  GenericForm G = to_mu_nuhat_generic(M2, N2, 7);
  CHECK(G.verified);
  CHECK(G.mu == RPartition({9, 5, 2, 1}));
  CHECK(*G.nu == RPartition({11, 6, 3, 2}));
}

TEST_CASE("retry budget honours the environment override") {
  CHECK(max_genericity_retries() == 8);
  setenv("LRVAL_MAX_RETRIES", "3", 1);
  CHECK(max_genericity_retries() == 3);
  unsetenv("LRVAL_MAX_RETRIES");
}
