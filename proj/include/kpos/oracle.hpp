#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kpos/positivity.hpp"

namespace kpos {

/// Finite N x L matrix of a Hankel or Toeplitz operator.
///
/// Hankel inputs are ordered (u(-1), ..., u(-L)) and the matrix is H_g(1, .)
/// cut to N rows and L columns. Toeplitz inputs are (u(0), ..., u(L-1)) and the
/// matrix is lower triangular with entry (t, s) = g(t - s).
struct OperatorTruncation {
  OperatorKind kind = OperatorKind::Hankel;
  int input_length = 0;
  int output_length = 0;
  Eigen::MatrixXd matrix;
};

OperatorTruncation truncate_operator(const Signal& g, OperatorKind kind, int L, int N);

/// y(t) = sum_{tau >= 1} g(t + tau) past(-tau) for t = 0..N-1.
Signal apply_hankel(const Signal& g, const Signal& past, int N);
/// Convenience form taking (u(-1), u(-2), ...).
Signal apply_hankel(const Signal& g, const std::vector<double>& past, int N);
/// y(t) = sum_{tau=0}^{t} g(t - tau) u(tau) for t = 0..N-1.
Signal apply_toeplitz(const Signal& g, const Signal& u, int N);

struct OvdCounterexample {
  Eigen::VectorXd input;
  Eigen::VectorXd output;
  int input_variation = 0;
  int output_variation = 0;
  bool variation_violation = false;
  bool order_violation = false;
  std::string source;  ///< mandatory, lattice or random
};

struct OvdVerifyOptions {
  std::vector<double> alphabet{-1.0, 0.0, 1.0};
  int samples = 0;
  std::uint64_t seed = 0x5EED;
  /// Checked before the lattice; shorter vectors are zero padded.
  std::vector<std::vector<double>> mandatory;
  std::size_t max_counterexamples = 8;
  std::uint64_t budget = 19683;  ///< 3^9 lattice inputs
  double zero_tol = 1e-12;
};

struct OvdVerification {
  bool passed = true;
  bool variation_ok = true;
  bool order_ok = true;
  int rank = 0;
  std::uint64_t inputs_checked = 0;
  std::uint64_t seed = 0;
  std::vector<OvdCounterexample> counterexamples;
};

/// Checks OVD(k-1) for every candidate input u with S(u) <= k-1: S(y) <= S(u)
/// and, when S(y) = S(u) and y != 0, equal leading signs. Throws
/// BudgetExceeded when |alphabet|^L exceeds the budget.
OvdVerification ovd_verify(const System& sys, OperatorKind kind, int k, int L, int N,
                           const OvdVerifyOptions& options = {});

// ---- static nonlinearities ---------------------------------------------------

enum class NonlinearityKind { Relay, Saturation, ShiftedSigmoid, Table };
enum class TableClaim { Monotone, SignPreserving };

struct Nonlinearity {
  NonlinearityKind kind = NonlinearityKind::Relay;
  double level = 1.0;  ///< saturation bound
  double shift = 0.0;  ///< sigmoid shift
  std::vector<std::pair<double, double>> table;  ///< knots (x, sigma(x)), linear in between
  TableClaim claim = TableClaim::Monotone;
};

/// Samplewise sigma(y). Sign-preserving maps keep S(y); monotone maps do not
/// increase S(Delta y) and strictly monotone ones keep it. Throws
/// std::invalid_argument when a table violates its declared claim.
Signal apply_nonlinearity(const Signal& y, const Nonlinearity& sigma);

// ---- worked examples ------------------------------------------------------------

/// {0.9 @ 0.9, 0.5 @ 0.5, -0.1 @ 0.1}.
PartialFractionSystem fig1_system();

struct ScenarioResult {
  std::string id;
  std::string description;
  OperatorKind kind = OperatorKind::Hankel;
  Signal input;
  Signal output;
  int input_variation = 0;
  int output_variation = 0;
  int input_first_sign = 0;
  int output_first_sign = 0;
  std::string verdict;
  std::uint64_t seed = 0x5EED;
};

/// The three worked three-term inputs: Hankel (1,-10), Toeplitz (10,-8.5), Hankel (10.9,-21.5,9.7).
std::vector<ScenarioResult> fig1_scenarios(int N = 8);

struct HeavyBallResult {
  double a = 0.0, alpha = 0.0, beta = 0.0;
  double threshold = 0.0;  ///< (sqrt(a alpha) + 1)^2
  bool threshold_tp = false;
  double discriminant = 0.0;
  bool double_pole = false;
  bool pole_test_tp = false;  ///< check_toeplitz_total on the closed loop
  bool simple_poles = true;   ///< repeated_pole_check at k = 2
  Poly open_loop_num, open_loop_den;
  Poly closed_loop_num, closed_loop_den;
  std::vector<Complex> closed_loop_poles;
  PositivityReport closed_loop_report;
  ScenarioResult simulation;  ///< x(0) = x(-1) = 0 under a unit step, 64 steps
};

RationalTransferFunction heavy_ball_open_loop(double alpha, double beta);
RationalTransferFunction heavy_ball_closed_loop(double a, double alpha, double beta);
HeavyBallResult heavy_ball(double a, double alpha, double beta, int steps = 64);

struct NeuronalResult {
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  ///< lhs - rhs
};

/// r1 r2 (p1-p2)^2 >= r1 r3 (p1-p3)^2 + r2 r3 (p2-p3)^2 for
/// G = r1/(z-p1) + r2/(z-p2) - r3/(z-p3). Throws std::invalid_argument unless
/// r_i > 0, r2 >= r3 and p1 >= p2 > p3 > 0.
NeuronalResult neuronal_condition(double r1, double r2, double r3, double p1, double p2, double p3);

/// Report block for a scenario, in the same key/value layout as to_text(PositivityReport).
std::string to_text(const ScenarioResult& s);
/// "t,u,y,dy" rows over the input and output windows.
std::string to_csv(const ScenarioResult& s);

}  // namespace kpos
