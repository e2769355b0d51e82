#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>

#include "kpos/error.hpp"
#include "kpos/totpos.hpp"
#include "test_support.hpp"

using namespace kpos;
using kpos::testing::leibniz_det;

namespace {

// exp(x_i y_j) with increasing x and y is strictly totally positive.
Eigen::MatrixXd exp_kernel(int n, int m, double spread = 0.7) {
  Eigen::MatrixXd X(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) X(i, j) = std::exp(spread * i * j / std::max(1, std::max(n, m) - 1));
  return X;
}

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int n, int m) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Eigen::MatrixXd X(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) X(i, j) = U(rng);
  return X;
}

}  // namespace

TEST_CASE("index tuples enumerate lexicographically") {
  const auto t = enumerate_tuples(4, 3);
  REQUIRE(t.size() == 4);
  CHECK(t[0].elements == std::vector<int>{1, 2, 3});
  CHECK(t[1].elements == std::vector<int>{1, 2, 4});
  CHECK(t[2].elements == std::vector<int>{1, 3, 4});
  CHECK(t[3].elements == std::vector<int>{2, 3, 4});
  CHECK(t[0].is_interval());
  CHECK_FALSE(t[1].is_interval());
  CHECK(enumerate_tuples(5, 2).size() == 10);
  CHECK(enumerate_tuples(2, 3).empty());
  CHECK_THROWS_AS(enumerate_tuples(3, 0), std::invalid_argument);
}

TEST_CASE("minors match the permutation expansion") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::MatrixXd X = random_matrix(rng, 5, 5);
    for (int r = 1; r <= 4; ++r) {
      const auto rows = enumerate_tuples(5, r);
      const auto& I = rows[static_cast<std::size_t>(trial) % rows.size()];
      const auto& J = rows[static_cast<std::size_t>(trial * 7 + 3) % rows.size()];
      CHECK(minor(X, I, J) == doctest::Approx(leibniz_det(submatrix(X, I, J))).epsilon(1e-10));
    }
  }
}

TEST_CASE("Cauchy-Binet: the compound of a product is the product of compounds") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::MatrixXd A = random_matrix(rng, 4, 5), B = random_matrix(rng, 5, 4);
    for (int r = 1; r <= 4; ++r) {
      const Eigen::MatrixXd lhs = compound_matrix(A * B, r);
      const Eigen::MatrixXd rhs = compound_matrix(A, r) * compound_matrix(B, r);
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + rhs.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("compound spectrum consists of r-fold eigenvalue products") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::MatrixXd M = random_matrix(rng, 4, 4);
    const Eigen::MatrixXd S = M + M.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    const Eigen::VectorXd lam = es.eigenvalues();
    for (int r = 1; r <= 3; ++r) {
      std::vector<double> expected;
      for (const auto& v : enumerate_tuples(4, r)) {
        double p = 1.0;
        for (int e : v.elements) p *= lam(e - 1);
        expected.push_back(p);
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ec(compound_matrix(S, r));
      std::vector<double> got(ec.eigenvalues().data(), ec.eigenvalues().data() + ec.eigenvalues().size());
      std::sort(expected.begin(), expected.end());
      std::sort(got.begin(), got.end());
      for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - expected[i]) <= 1e-9 * (1.0 + std::abs(expected[i])));
    }
  }
}

TEST_CASE("definiteness tests") {
  Eigen::MatrixXd P(2, 2);
  P << 2, 1, 1, 2;
  CHECK(is_pd(P));
  CHECK(is_psd(P));
  Eigen::MatrixXd S(2, 2);
  S << 1, 1, 1, 1;
  CHECK_FALSE(is_pd(S));
  CHECK(is_psd(S));
  CHECK_FALSE(psd_violation(S).has_value());
  Eigen::MatrixXd N(2, 2);
  N << 1, 2, 2, 1;
  CHECK_FALSE(is_psd(N));
  const auto v = psd_violation(N);
  REQUIRE(v.has_value());
  CHECK(v->value < 0);
  Eigen::MatrixXd asym(2, 2);
  asym << 1, 2, 0, 1;
  CHECK_THROWS_AS(is_pd(asym), std::invalid_argument);
}

TEST_CASE("PSD lifting: compounds of PSD matrices are PSD") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::MatrixXd M = random_matrix(rng, 5, 4);
    const Eigen::MatrixXd X = M * M.transpose();
    for (int r = 1; r <= 4; ++r) {
      const Eigen::MatrixXd C = compound_matrix(X, r);
      CHECK(is_psd(0.5 * (C + C.transpose())));
    }
  }
}

TEST_CASE("Desnanot-Jacobi identity") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::MatrixXd X = random_matrix(rng, 3 + trial % 3, 3 + trial % 3);
    CHECK(desnanot_jacobi_residual(X) <= 1e-12);
  }
  CHECK_THROWS_AS(desnanot_jacobi_residual(Eigen::MatrixXd::Identity(2, 2)), std::invalid_argument);
}

TEST_CASE("k-positivity of matrices") {
  const Eigen::MatrixXd K = exp_kernel(5, 5);
  for (int k = 1; k <= 5; ++k) {
    CHECK(is_k_positive(K, k, true).verdict == MatrixVerdict::Holds);
    CHECK(is_k_positive(K, k, true, true).verdict == MatrixVerdict::Holds);
  }
  Eigen::MatrixXd X(2, 2);
  X << 1, 2, 3, 4;
  CHECK(is_k_positive(X, 1).verdict == MatrixVerdict::Holds);
  const auto r = is_k_positive(X, 2);
  CHECK(r.verdict == MatrixVerdict::Fails);
  REQUIRE(r.witness.has_value());
  CHECK(r.witness->value == doctest::Approx(-2.0));
  CHECK(r.witness->order == 2);

  Eigen::MatrixXd Z = Eigen::MatrixXd::Identity(3, 3);
  CHECK(is_k_positive(Z, 3).verdict == MatrixVerdict::Holds);
  CHECK(is_k_positive(Z, 1, true).verdict == MatrixVerdict::Fails);
  CHECK_THROWS_AS(is_k_positive(Eigen::MatrixXd::Ones(30, 30), 12), BudgetExceeded);
}

TEST_CASE("consecutive-minor shortcut agrees with the exhaustive scan when conclusive") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> U(0.2, 1.5);
  int conclusive = 0;
  for (int trial = 0; trial < 300; ++trial) {
    Eigen::MatrixXd X(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) X(i, j) = std::exp(U(rng) * i * j) * (trial % 3 == 0 ? U(rng) : 1.0);
    for (int k = 1; k <= 4; ++k) {
      const auto fast = is_k_positive(X, k, true, true);
      const auto full = is_k_positive(X, k, true, false);
      if (fast.verdict == MatrixVerdict::Inconclusive) continue;
      ++conclusive;
      CHECK(fast.verdict == full.verdict);
    }
  }
  CHECK(conclusive > 500);
}

TEST_CASE("numerical rank") {
  CHECK(numerical_rank(exp_kernel(6, 4)) == 4);
  Eigen::MatrixXd R(3, 3);
  R << 1, 2, 3, 2, 4, 6, 1, 1, 1;
  CHECK(numerical_rank(R) == 2);
}

TEST_CASE("brute-force variation diminishing of matrices") {
  const Eigen::MatrixXd K = exp_kernel(6, 4, 1.0);
  const auto pass = ovd_matrix_bruteforce(K, 3);
  CHECK(pass.passed);
  CHECK(pass.rank == 4);
  CHECK(pass.inputs_checked == 81);

  Eigen::MatrixXd X(2, 2);
  X << 1, 2, 3, 4;
  OvdOptions opt;
  opt.threads = 2;
  opt.random_samples = 2000;
  const auto fail = ovd_matrix_bruteforce(X, 1, opt);
  CHECK_FALSE(fail.passed);
  REQUIRE(fail.counterexample.has_value());
  CHECK(fail.counterexample->input_variation <= 1);
  // same first counterexample regardless of threading
  opt.threads = 1;
  const auto serial = ovd_matrix_bruteforce(X, 1, opt);
  REQUIRE(serial.counterexample.has_value());
  CHECK(serial.counterexample->input == fail.counterexample->input);

  Eigen::MatrixXd neg(2, 2);
  neg << 1, -1, 1, 1;
  CHECK_FALSE(ovd_matrix_bruteforce(neg, 0).passed);
}
