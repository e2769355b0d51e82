#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kpos/error.hpp"
#include "kpos/lti.hpp"
#include "test_support.hpp"

using namespace kpos;
using kpos::testing::close_rel;
using kpos::testing::direct_impulse;

namespace {

PartialFractionSystem fig1() { return PartialFractionSystem({{0.9, 0.9}, {0.5, 0.5}, {-0.1, 0.1}}); }

// c A^(t-1) b with explicit matrix powers.
double markov(const StateSpace& ss, int t) {
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(ss.order(), ss.order());
  for (int i = 1; i < t; ++i) P = P * ss.A();
  return ss.c() * P * ss.b();
}

}  // namespace

TEST_CASE("impulse response of the three-term system") {
  const Signal g = impulse_response(fig1(), 8);
  CHECK(g(0) == 0.0);
  const double expected[] = {1.3, 1.05, 0.853, 0.7185, 0.62173};
  for (int t = 1; t <= 5; ++t) CHECK(g(t) == doctest::Approx(expected[t - 1]).epsilon(1e-14));
}

TEST_CASE("impulse responses agree across representations") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 4;
    const auto pfs = kpos::testing::random_pfs(rng, n, -1.0, 1.0, -0.95, 0.95, 0.05);
    const Signal g = impulse_response(pfs, 30);
    const Signal g_tf = impulse_response(recombine(pfs), 30);
    const StateSpace ss = to_state_space(pfs);
    const Signal g_ss = impulse_response(ss, 30);
    for (int t = 1; t <= 30; ++t) {
      const double ref = direct_impulse(pfs.residues(), pfs.poles(), t);
      CHECK(close_rel(g(t), ref, 1e-12, 1e-12));
      CHECK(close_rel(g_tf(t), ref, 1e-8, 1.0));
      CHECK(close_rel(g_ss(t), markov(ss, t), 1e-12, 1e-12));
    }
  }
}

TEST_CASE("partial fractions of z/((z-0.9)(z-0.5))") {
  const auto rtf = RationalTransferFunction::from_coefficients({1, 0}, {1, -1.4, 0.45});
  const auto pfs = partial_fractions(rtf);
  REQUIRE(pfs.order() == 2);
  CHECK(pfs.poles()[0] == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(pfs.residues()[0] == doctest::Approx(2.25).epsilon(1e-12));
  CHECK(pfs.poles()[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(pfs.residues()[1] == doctest::Approx(-1.25).epsilon(1e-12));
}

TEST_CASE("common denominator and zeros of the three-term system") {
  const auto rtf = recombine(fig1());
  const double num[] = {1.3, -0.9, 0.045};
  const double den[] = {1, -1.5, 0.59, -0.045};
  REQUIRE(rtf.numerator().size() == 3);
  REQUIRE(rtf.denominator().size() == 4);
  for (int i = 0; i < 3; ++i) CHECK(rtf.numerator()[i] == doctest::Approx(num[i]).epsilon(1e-12));
  for (int i = 0; i < 4; ++i) CHECK(rtf.denominator()[i] == doctest::Approx(den[i]).epsilon(1e-12));
  const auto z = zeros(rtf);
  REQUIRE(z.size() == 2);
  CHECK(z[0].real() == doctest::Approx((0.9 + std::sqrt(0.576)) / 2.6).epsilon(1e-10));
  CHECK(z[1].real() == doctest::Approx((0.9 - std::sqrt(0.576)) / 2.6).epsilon(1e-10));
}

TEST_CASE("state-space round trip preserves the transfer function") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pfs = kpos::testing::random_pfs(rng, 1 + trial % 4, 0.2, 1.0, 0.05, 0.95, 0.1);
    for (auto split : {Splitting::Asymmetric, Splitting::Symmetric}) {
      const auto back = partial_fractions(to_rational(to_state_space(pfs, split)));
      REQUIRE(back.order() == pfs.order());
      for (std::size_t i = 0; i < pfs.order(); ++i) {
        CHECK(close_rel(back.poles()[i], pfs.poles()[i], 1e-8));
        CHECK(close_rel(back.residues()[i], pfs.residues()[i], 1e-7));
      }
    }
  }
  CHECK_THROWS_AS(to_state_space(fig1(), Splitting::Symmetric), std::domain_error);
}

TEST_CASE("structural errors") {
  CHECK_THROWS_AS(PartialFractionSystem({{1, 0.5}, {2, 0.5}}), UnsupportedRepresentation);
  CHECK_THROWS_AS(RationalTransferFunction::from_coefficients({1, 0}, {1, 0}), StructuralError);
  CHECK_THROWS_AS(RationalTransferFunction::from_coefficients({1, -0.5}, {1, -1.4, 0.45}), StructuralError);
  CHECK_THROWS_AS(RationalTransferFunction::from_coefficients({0}, {1, -0.5}), StructuralError);
  CHECK_THROWS_AS(partial_fractions(RationalTransferFunction::from_coefficients({1}, {1, 0, 1})),
                  UnsupportedRepresentation);
  CHECK_THROWS_AS(partial_fractions(RationalTransferFunction::from_coefficients({1}, {1, -1, 0.25})),
                  UnsupportedRepresentation);
  CHECK_THROWS_AS(StateSpace(Eigen::MatrixXd::Identity(2, 3), Eigen::VectorXd::Ones(2), Eigen::RowVectorXd::Ones(2)),
                  std::invalid_argument);
}

TEST_CASE("FIR tails and the zero system") {
  const PartialFractionSystem fir({}, {2.0});
  const Signal g = impulse_response(fir, 4);
  CHECK(g(1) == 2.0);
  CHECK(g(2) == 0.0);
  CHECK(system_order(fir) == 1);
  const PartialFractionSystem zero({{0.0, 0.5}});
  CHECK(zero.is_zero());
  CHECK(impulse_response(zero, 3)(2) == 0.0);
  const PartialFractionSystem mixed({{1.0, 0.5}}, {1.0, -0.5});
  const Signal m = impulse_response(mixed, 4);
  CHECK(m(1) == doctest::Approx(2.0));
  CHECK(m(2) == doctest::Approx(0.0));
  CHECK(m(3) == doctest::Approx(0.25));
  CHECK(impulse_response(to_state_space(mixed), 4)(2) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("pole ordering puts the positive real pole first on ties") {
  const PartialFractionSystem s({{1.0, -0.9}, {1.0, 0.9}, {1.0, 0.2}});
  CHECK(s.poles()[0] == 0.9);
  CHECK(s.poles()[1] == -0.9);
  CHECK(s.poles()[2] == 0.2);
}

TEST_CASE("modal form detects repeated poles of a realization") {
  Eigen::MatrixXd A(2, 2);
  A << 0.9, 1.0, 0.0, 0.9;
  const StateSpace jordan(A, Eigen::Vector2d(0, 1), Eigen::RowVector2d(1, 0));
  CHECK_FALSE(modal_form(jordan).has_value());
  CHECK_FALSE(try_partial_fractions(jordan).has_value());
  const auto m = modal_form(System{fig1()});
  REQUIRE(m.has_value());
  CHECK(m->poles.size() == 3);
  const auto osc = RationalTransferFunction::from_coefficients({1}, {1, 0, 0.25});
  const auto mo = modal_form(System{osc});
  REQUIRE(mo.has_value());
  CHECK(std::abs(mo->poles[0].imag()) == doctest::Approx(0.5));
}

TEST_CASE("Hankel and Toeplitz matrices") {
  const Signal g = impulse_response(fig1(), 10);
  const auto H = hankel_matrix(g, 2, 3);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) CHECK(H.entries(a, b) == g(2 + a + b));
  const auto T = toeplitz_matrix(g, 1, 3);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) CHECK(T.entries(a, b) == g(1 + a - b));
  CHECK(T.entries(0, 2) == 0.0);
  CHECK_THROWS_AS(hankel_matrix(g, 0, 2), std::invalid_argument);
  CHECK_THROWS_AS(hankel_matrix(g, 8, 3), std::out_of_range);
  CHECK(kpos::testing::leibniz_det(hankel_matrix(g, 1, 2).entries) == doctest::Approx(0.0064).epsilon(1e-12));
  CHECK(kpos::testing::leibniz_det(hankel_matrix(g, 1, 3).entries) == doctest::Approx(-0.00073728).epsilon(1e-10));
}

TEST_CASE("observability times controllability equals the Hankel matrix") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const auto pfs = kpos::testing::random_pfs(rng, 1 + trial % 4, -1.0, 1.0);
    const StateSpace ss = to_state_space(recombine(pfs));
    const Signal g = impulse_response(pfs, 20);
    for (int j = 1; j <= 4; ++j) {
      const Eigen::MatrixXd OC = extended_observability(ss, j) * extended_controllability(ss, j);
      const auto H = hankel_matrix(g, 1, j).entries;
      CHECK((OC - H).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + H.cwiseAbs().maxCoeff()));
    }
  }
}
